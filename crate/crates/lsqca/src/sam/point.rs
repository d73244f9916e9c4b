//! Point-SAM access: closed-form costs and the explicit move schedules that
//! realise them.
//!
//! A load slides the target one cell at a time toward the port band (column 0,
//! the centre row and its two neighbours). With one empty cell every slide is
//! preceded by walking the empty around the target: 2 beats when the next
//! slide turns, 4 when it continues straight. With two empty cells the
//! pair is first assembled beside the target, after which parallel moves give
//! 3 beats per straight step and 4 per diagonal step.

use std::collections::VecDeque;

use super::{Beat, Loc, Move, Slot};
use crate::floorplan::{BankGeometry, Cell};

pub type Dir = (isize, isize);

const LEFT: Dir = (0, -1);

pub fn step(g: &BankGeometry, (r, c): Cell, (dr, dc): Dir) -> Option<Cell> {
    let r = r.checked_add_signed(dr)?;
    let c = c.checked_add_signed(dc)?;
    g.contains((r, c)).then_some((r, c))
}

fn manhattan(a: Cell, b: Cell) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

/// Horizontal first, so equal-length routes resolve deterministically.
const NEIGHBOURS: [Dir; 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

/// Shortest route from `from` to `to` avoiding `blocked`, both ends included.
pub fn route(g: &BankGeometry, from: Cell, to: Cell, blocked: &[Cell]) -> Option<Vec<Cell>> {
    if blocked.contains(&to) || blocked.contains(&from) {
        return None;
    }
    if from == to {
        return Some(vec![from]);
    }
    let idx = |(r, c): Cell| r * g.row_len(0) + c;
    let mut prev = vec![usize::MAX; g.rows() * g.row_len(0)];
    let mut q = VecDeque::from([from]);
    prev[idx(from)] = idx(from);
    while let Some(x) = q.pop_front() {
        for d in NEIGHBOURS {
            let Some(y) = step(g, x, d) else { continue };
            if blocked.contains(&y) || prev[idx(y)] != usize::MAX {
                continue;
            }
            prev[idx(y)] = idx(x);
            if y == to {
                let w = g.row_len(0);
                let mut path = vec![y];
                let mut cur = idx(y);
                while cur != idx(from) {
                    cur = prev[cur];
                    path.push((cur / w, cur % w));
                }
                path.reverse();
                return Some(path);
            }
            q.push_back(y);
        }
    }
    None
}

/// Moves walking an empty cell along `path` (data shifts back one cell per beat).
fn walk(path: &[Cell]) -> Vec<Beat> {
    path.windows(2)
        .map(|w| vec![Move { from: Loc::Cell(w[1]), to: Loc::Cell(w[0]) }])
        .collect()
}

/// Empty-cell routing length to `to` around the target `t`.
fn detour(e: Cell, to: Cell, t: Cell) -> usize {
    let blocked = (e.0 == to.0 && to.0 == t.0 && e.1.min(to.1) < t.1 && t.1 < e.1.max(to.1))
        || (e.1 == to.1 && to.1 == t.1 && e.0.min(to.0) < t.0 && t.0 < e.0.max(to.0));
    manhattan(e, to) + if blocked { 2 } else { 0 }
}

/// Remaining displacement (columns, rows) from `t` to the port band.
pub fn displacement(g: &BankGeometry, t: Cell) -> (usize, usize) {
    let rc = g.center_row();
    (t.1, t.0.abs_diff(rc).saturating_sub(1))
}

fn toward_band(g: &BankGeometry, t: Cell) -> Dir {
    if t.0 < g.center_row() {
        (1, 0)
    } else {
        (-1, 0)
    }
}

/// Slide sequences a single empty cell can drive, with their closed-form costs.
fn single_options(g: &BankGeometry, t: Cell, e: Cell) -> Vec<(usize, Vec<Dir>)> {
    let (w, h) = displacement(g, t);
    let (m, s) = (w.min(h), w.abs_diff(h));
    let dx = LEFT;
    let dy = toward_band(g, t);
    let first = |d: Dir| step(g, t, d).map(|to| detour(e, to, t));
    let seq = |a: Dir, b: Dir, straight: Dir| {
        let mut v = Vec::with_capacity(2 * m + s);
        for _ in 0..m {
            v.push(a);
            v.push(b);
        }
        v.extend(std::iter::repeat_n(straight, s));
        v
    };
    let mut out = Vec::new();
    if s > 0 {
        let (st, pe) = if w > h { (dx, dy) } else { (dy, dx) };
        if let Some(d) = first(st) {
            out.push((d + 6 * m + 5 * s - 4 + 1, seq(st, pe, st)));
        }
        if m > 0 {
            if let Some(d) = first(pe) {
                out.push((d + 6 * m + 5 * s - 2 + 1, seq(pe, st, st)));
            }
        }
    } else {
        for (a, b) in [(dx, dy), (dy, dx)] {
            if let Some(d) = first(a) {
                out.push((d + 6 * m - 2 + 1, seq(a, b, a)));
            }
        }
    }
    out
}

/// Load cost of `t` with a single empty cell at `e`.
pub fn single_cost(g: &BankGeometry, t: Cell, e: Cell, band: &[Cell]) -> usize {
    if band.contains(&t) {
        return 1;
    }
    single_options(g, t, e)
        .into_iter()
        .map(|(c, _)| c)
        .min()
        .expect("every non-band cell has a slide toward the port")
}

/// Straight direction, side direction and step count for the two-empty protocol.
struct Accel {
    straight: Dir,
    side: Dir,
    s: usize,
    m: usize,
    f: Dir,
    gdir: Dir,
}

fn accel_shape(g: &BankGeometry, t: Cell) -> Accel {
    let (w, h) = displacement(g, t);
    let (m, s) = (w.min(h), w.abs_diff(h));
    let dy = toward_band(g, t);
    let rc = g.center_row();
    let (straight, side) = if w > h {
        let side = if h > 0 {
            dy
        } else if t.0 < rc {
            (1, 0)
        } else {
            (-1, 0)
        };
        (LEFT, side)
    } else {
        (dy, if w > 0 { LEFT } else { (0, 1) })
    };
    Accel { straight, side, s, m, f: dy, gdir: LEFT }
}

/// Formation the two empties must occupy before the first accelerated step.
fn formation(g: &BankGeometry, t: Cell, a: &Accel) -> Option<(Cell, Cell)> {
    if a.s > 0 {
        Some((step(g, t, a.straight)?, step(g, t, a.side)?))
    } else {
        Some((step(g, t, a.f)?, step(g, t, a.gdir)?))
    }
}

/// Cheapest sequential assembly of empties `e1`, `e2` onto the formation.
fn assembly(g: &BankGeometry, t: Cell, e1: Cell, e2: Cell, f1: Cell, f2: Cell) -> Option<(usize, Vec<Vec<Cell>>)> {
    let mut best: Option<(usize, Vec<Vec<Cell>>)> = None;
    for (a, b, fa, fb) in [(e1, e2, f1, f2), (e1, e2, f2, f1), (e2, e1, f1, f2), (e2, e1, f2, f1)] {
        let Some(p1) = route(g, a, fa, &[t, b]) else { continue };
        let Some(p2) = route(g, b, fb, &[t, fa]) else { continue };
        let cost = p1.len() + p2.len() - 2;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, vec![p1, p2]));
        }
    }
    best
}

fn accel_steps(a: &Accel) -> usize {
    3 * a.s + 4 * a.m - 2
}

/// Two-empty load cost with empties at `e1`, `e2`; `None` when the protocol cannot form.
pub fn accel_cost(g: &BankGeometry, t: Cell, e1: Cell, e2: Cell) -> Option<usize> {
    let a = accel_shape(g, t);
    let (f1, f2) = formation(g, t, &a)?;
    let (asm, _) = assembly(g, t, e1, e2, f1, f2)?;
    Some(asm + accel_steps(&a) + 1)
}

/// Closed-form load cost: the cheaper of single-empty mode over each empty
/// (other empties counted as data) and the two-empty protocol over each pair.
pub fn closed_form_cost(g: &BankGeometry, t: Cell, empties: &[Cell]) -> usize {
    let band = g.port_band();
    let single = empties.iter().map(|&e| single_cost(g, t, e, &band));
    let accel = empties
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| empties[i + 1..].iter().filter_map(move |&b| accel_cost(g, t, a, b)));
    single.chain(accel).min().expect("at least one empty cell")
}

fn add(c: Cell, d: Dir) -> Cell {
    ((c.0 as isize + d.0) as usize, (c.1 as isize + d.1) as usize)
}

fn mv(from: Cell, to: Cell) -> Move {
    Move { from: Loc::Cell(from), to: Loc::Cell(to) }
}

fn accel_moves(t0: Cell, a: &Accel) -> (Vec<Beat>, Cell) {
    let mut beats = Vec::new();
    let total = a.s + a.m;
    let mut t = t0;
    for i in 0..a.s {
        let (d, sd) = (a.straight, a.side);
        let nt = add(t, d);
        if i + 1 == total {
            beats.push(vec![mv(t, nt)]);
        } else {
            beats.push(vec![mv(t, nt), mv(add(add(t, sd), d), add(t, sd))]);
            beats.push(vec![mv(add(add(nt, sd), d), add(nt, sd)), mv(add(t, sd), t)]);
            beats.push(vec![mv(add(nt, d), add(add(nt, sd), d)), mv(add(nt, sd), add(t, sd))]);
        }
        t = nt;
    }
    for i in 0..a.m {
        let (f, gd) = (a.f, a.gdir);
        let t1 = add(t, f);
        let t2 = add(t1, gd);
        let last = a.s + i + 1 == total;
        beats.push(vec![mv(t, t1), mv(t2, add(t, gd))]);
        if last {
            beats.push(vec![mv(t1, t2)]);
        } else {
            beats.push(vec![mv(t1, t2), mv(add(t, gd), t)]);
            let (ff, gg) = (add(t1, f), add(add(t, gd), gd));
            beats.push(vec![mv(ff, t1), mv(gg, add(t, gd))]);
            beats.push(vec![mv(add(ff, gd), ff), mv(add(gg, f), gg)]);
        }
        t = t2;
    }
    (beats, t)
}

/// Cheapest load of `t` given the current empty cells; returns cost and the move schedule,
/// ending with the transfer into the CR.
pub fn plan_load(g: &BankGeometry, t: Cell, empties: &[Cell]) -> (usize, Vec<Beat>) {
    let (cost, mut beats, end) = plan_to_band(g, t, empties);
    beats.push(vec![Move { from: Loc::Cell(end), to: Loc::Cr }]);
    debug_assert_eq!(beats.len(), cost);
    (cost, beats)
}

/// Drops moves whose source is already empty (routes planned with other empties
/// treated as data can cross them). Beats left idle are dropped unless
/// `keep_idle`, which preserves the protocol's timing.
fn prune(beats: Vec<Beat>, empties: &[Cell], keep_idle: bool) -> Vec<Beat> {
    let mut empty: std::collections::HashSet<Cell> = empties.iter().copied().collect();
    let mut out = Vec::with_capacity(beats.len());
    for beat in beats {
        let kept: Beat = beat
            .into_iter()
            .filter(|m| !matches!(m.from, Loc::Cell(c) if empty.contains(&c)))
            .collect();
        for m in &kept {
            if let Loc::Cell(c) = m.from {
                empty.insert(c);
            }
            if let Loc::Cell(c) = m.to {
                empty.remove(&c);
            }
        }
        if keep_idle || !kept.is_empty() {
            out.push(kept);
        }
    }
    out
}

/// Moves bringing `t` into the port band; cost counts one extra beat for the
/// CR transfer or the lattice-surgery step that follows.
pub fn plan_to_band(g: &BankGeometry, t: Cell, empties: &[Cell]) -> (usize, Vec<Beat>, Cell) {
    let band = g.port_band();
    if band.contains(&t) {
        return (1, Vec::new(), t);
    }
    let mut best: Option<(usize, u8, Vec<Beat>, Cell)> = None;
    let mut consider = |rank: u8, (beats, end): (Vec<Beat>, Cell)| {
        let beats = prune(beats, empties, true);
        let cost = beats.len() + 1;
        if best.as_ref().is_none_or(|(c, r, ..)| (cost, rank) < (*c, *r)) {
            best = Some((cost, rank, beats, end));
        }
    };
    let mut es = empties.to_vec();
    es.sort();
    for &e in &es {
        for (_, dirs) in single_options(g, t, e) {
            consider(0, single_moves(g, t, e, &dirs));
        }
    }
    for (i, &e1) in es.iter().enumerate() {
        for &e2 in &es[i + 1..] {
            let a = accel_shape(g, t);
            let Some((f1, f2)) = formation(g, t, &a) else { continue };
            let Some((_, paths)) = assembly(g, t, e1, e2, f1, f2) else { continue };
            let mut b: Vec<Beat> = paths.iter().flat_map(|p| walk(p)).collect();
            let (steps, end) = accel_moves(t, &a);
            b.extend(steps);
            consider(1, (b, end));
        }
    }
    let (cost, _, beats, end) = best.expect("at least one empty cell");
    (cost, beats, end)
}

fn single_moves(g: &BankGeometry, t0: Cell, e0: Cell, dirs: &[Dir]) -> (Vec<Beat>, Cell) {
    let mut beats = Vec::new();
    let (mut t, mut e) = (t0, e0);
    for &d in dirs {
        let to = add(t, d);
        let path = route(g, e, to, &[t]).expect("route around target exists");
        beats.extend(walk(&path));
        beats.push(vec![mv(t, to)]);
        e = t;
        t = to;
    }
    (beats, t)
}

/// Moves and cost to bring the nearest empty next to `t` (for HD.M / PH.M).
pub fn plan_approach(g: &BankGeometry, t: Cell, empties: &[Cell]) -> (Vec<Beat>, Cell) {
    if let Some(&e) = empties.iter().filter(|&&e| manhattan(e, t) == 1).min() {
        return (Vec::new(), e);
    }
    let e = *empties
        .iter()
        .min_by_key(|&&e| (manhattan(e, t), e))
        .expect("at least one empty cell");
    let mut best: Option<Vec<Cell>> = None;
    for d in NEIGHBOURS {
        let Some(nb) = step(g, t, d) else { continue };
        if let Some(p) = route(g, e, nb, &[t]) {
            if best.as_ref().is_none_or(|b| p.len() < b.len()) {
                best = Some(p);
            }
        }
    }
    let p = best.expect("target has a reachable neighbour");
    let end = *p.last().unwrap();
    (prune(walk(&p), empties, false), end)
}

/// Locality-aware store: the empty nearest the port band is walked into the band,
/// then the qubit enters from the CR.
pub fn plan_store(g: &BankGeometry, empties: &[Cell]) -> (Vec<Beat>, Cell) {
    let band = g.port_band();
    let dist = |e: Cell| band.iter().map(|&b| manhattan(e, b)).min().unwrap();
    let e = *empties
        .iter()
        .min_by_key(|&&e| (dist(e), e))
        .expect("a vacancy exists for every loaded qubit");
    let home = g.home();
    let b = *band
        .iter()
        .min_by_key(|&&b| (manhattan(e, b), b != home, b))
        .unwrap();
    let p = route(g, e, b, &[]).expect("bank is connected");
    let mut beats = prune(walk(&p), empties, false);
    beats.push(vec![Move { from: Loc::Cr, to: Loc::Cell(b) }]);
    (beats, b)
}

/// Empties of a point grid.
pub fn empties(g: &BankGeometry, grid: &[Vec<Slot>]) -> Vec<Cell> {
    g.all_cells().filter(|&(r, c)| grid[r][c] == Slot::Empty).collect()
}
