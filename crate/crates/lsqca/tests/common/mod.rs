//! Independent reference models used by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use lsqca::floorplan::{BankGeometry, Cell};
use lsqca::sam::{Beat, Loc, Slot};

pub mod circuits;

fn neighbours(g: &BankGeometry, (r, c): Cell) -> Vec<Cell> {
    let mut v = Vec::new();
    if r > 0 && g.contains((r - 1, c)) {
        v.push((r - 1, c));
    }
    if g.contains((r + 1, c)) {
        v.push((r + 1, c));
    }
    if c > 0 && g.contains((r, c - 1)) {
        v.push((r, c - 1));
    }
    if g.contains((r, c + 1)) {
        v.push((r, c + 1));
    }
    v
}

fn in_band(g: &BankGeometry, t: Cell) -> bool {
    t.1 == 0 && g.contains(t) && t.0.abs_diff(g.rows() / 2) <= 1
}

/// All successor states of (target, empties) after one beat of parallel moves.
/// Each empty may receive at most one patch from a neighbour; sources are distinct.
fn successors(g: &BankGeometry, t: Cell, es: &[Cell]) -> Vec<(Cell, Vec<Cell>)> {
    let mut out = Vec::new();
    let options: Vec<Vec<Option<Cell>>> = es
        .iter()
        .map(|&e| {
            let mut o = vec![None];
            o.extend(neighbours(g, e).into_iter().filter(|n| !es.contains(n)).map(Some));
            o
        })
        .collect();
    let mut pick = vec![0usize; es.len()];
    loop {
        let srcs: Vec<Option<Cell>> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        let chosen: Vec<Cell> = srcs.iter().flatten().copied().collect();
        let distinct = chosen.iter().collect::<HashSet<_>>().len() == chosen.len();
        if distinct && !chosen.is_empty() {
            let mut nt = t;
            let mut ne = Vec::new();
            for (i, s) in srcs.iter().enumerate() {
                match s {
                    Some(src) => {
                        if *src == t {
                            nt = es[i];
                        }
                        ne.push(*src);
                    }
                    None => ne.push(es[i]),
                }
            }
            ne.sort();
            out.push((nt, ne));
        }
        let mut k = 0;
        loop {
            if k == es.len() {
                return out;
            }
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Exact minimum load cost (moves into the band + 1 transfer beat) for every
/// (target, empty set) state with `k` empties, via backward BFS from the goal set.
/// Moves are reversible, so forward and backward distances agree.
pub fn exact_costs(g: &BankGeometry, k: usize) -> HashMap<(Cell, Vec<Cell>), usize> {
    let cells: Vec<Cell> = g.all_cells().collect();
    let mut states = Vec::new();
    for &t in &cells {
        let rest: Vec<Cell> = cells.iter().copied().filter(|&c| c != t).collect();
        match k {
            1 => states.extend(rest.iter().map(|&e| (t, vec![e]))),
            2 => {
                for i in 0..rest.len() {
                    for j in i + 1..rest.len() {
                        states.push((t, vec![rest[i], rest[j]]));
                    }
                }
            }
            _ => unimplemented!(),
        }
    }
    let mut dist: HashMap<(Cell, Vec<Cell>), usize> = HashMap::new();
    let mut q = VecDeque::new();
    for s in &states {
        if in_band(g, s.0) {
            dist.insert(s.clone(), 1);
            q.push_back(s.clone());
        }
    }
    while let Some(s) = q.pop_front() {
        let d = dist[&s];
        for n in successors(g, s.0, &s.1) {
            if !dist.contains_key(&n) {
                dist.insert(n.clone(), d + 1);
                q.push_back(n);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayError {
    Occupied { beat: usize, cell: Cell },
    Conflict { beat: usize },
    MovesEmpty { beat: usize, cell: Cell },
}

/// Replays a schedule on a grid, enforcing that every destination is empty at the
/// start of its beat and that no cell takes part in two moves of one beat.
/// Returns the slot that ended in the CR, if any. Moving an empty cell is an error.
pub fn replay(grid: &mut [Vec<Slot>], beats: &[Beat], incoming: Option<Slot>) -> Result<Option<Slot>, ReplayError> {
    replay_with(grid, beats, incoming, true)
}

/// As [`replay`], but a move may carry an empty cell (line-SAM row shifts move
/// whole rows, vacancies included).
pub fn replay_shifts(grid: &mut [Vec<Slot>], beats: &[Beat], incoming: Option<Slot>) -> Result<Option<Slot>, ReplayError> {
    replay_with(grid, beats, incoming, false)
}

fn replay_with(
    grid: &mut [Vec<Slot>],
    beats: &[Beat],
    mut incoming: Option<Slot>,
    strict: bool,
) -> Result<Option<Slot>, ReplayError> {
    let mut out = None;
    for (i, beat) in beats.iter().enumerate() {
        let mut touched = HashSet::new();
        for m in beat {
            for l in [m.from, m.to] {
                if let Loc::Cell(c) = l {
                    if !touched.insert(c) {
                        return Err(ReplayError::Conflict { beat: i });
                    }
                }
            }
            if let Loc::Cell(c) = m.to {
                if grid[c.0][c.1] != Slot::Empty {
                    return Err(ReplayError::Occupied { beat: i, cell: c });
                }
            }
        }
        let mut moved = Vec::new();
        for m in beat {
            let s = match m.from {
                Loc::Cell(c) => {
                    let s = std::mem::replace(&mut grid[c.0][c.1], Slot::Empty);
                    if strict && s == Slot::Empty {
                        return Err(ReplayError::MovesEmpty { beat: i, cell: c });
                    }
                    s
                }
                Loc::Cr => incoming.take().expect("one incoming patch"),
            };
            moved.push((m.to, s));
        }
        for (to, s) in moved {
            match to {
                Loc::Cell(c) => grid[c.0][c.1] = s,
                Loc::Cr => out = Some(s),
            }
        }
    }
    Ok(out)
}

/// Grid with data everywhere except `empties`; the target is `Data(0)`.
pub fn grid_with(g: &BankGeometry, t: Cell, empties: &[Cell]) -> Vec<Vec<Slot>> {
    let mut grid: Vec<Vec<Slot>> = (0..g.rows()).map(|r| vec![Slot::Filler; g.row_len(r)]).collect();
    for &e in empties {
        grid[e.0][e.1] = Slot::Empty;
    }
    grid[t.0][t.1] = Slot::Data(0);
    grid
}
