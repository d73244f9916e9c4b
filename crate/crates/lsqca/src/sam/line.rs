//! Line-SAM access. The scan row is an all-empty row; shifting the row next to
//! it across moves the scan row by one (1 beat, all cells in parallel). Once the
//! scan row borders the target's row, the target travels along it into the CR
//! in one beat.

use super::{Beat, Loc, Move, Slot};
use crate::floorplan::{BankGeometry, Cell};

/// Row shifts needed to bring the scan row next to `row`.
pub fn shifts_to(scan: usize, row: usize) -> usize {
    debug_assert_ne!(scan, row);
    scan.abs_diff(row) - 1
}

pub fn load_cost(scan: usize, t: Cell) -> usize {
    shifts_to(scan, t.0) + 1
}

/// Row shifts moving the scan row until it borders `row`; returns the new scan index.
pub fn shift_moves(g: &BankGeometry, mut scan: usize, row: usize) -> (Vec<Beat>, usize) {
    let cols = g.row_len(0);
    let mut beats = Vec::new();
    for _ in 0..shifts_to(scan, row) {
        let next = if row > scan { scan + 1 } else { scan - 1 };
        beats.push(
            (0..cols)
                .map(|c| Move { from: Loc::Cell((next, c)), to: Loc::Cell((scan, c)) })
                .collect(),
        );
        scan = next;
    }
    (beats, scan)
}

pub fn plan_load(g: &BankGeometry, scan: usize, t: Cell) -> (Vec<Beat>, usize) {
    let (mut beats, scan) = shift_moves(g, scan, t.0);
    beats.push(vec![Move { from: Loc::Cell(t), to: Loc::Cr }]);
    (beats, scan)
}

/// Scan-row cells a transfer or surgery at column `col` runs through.
pub fn lane(scan: usize, col: usize) -> Vec<Cell> {
    (0..=col).map(|c| (scan, c)).collect()
}

pub fn vacancies(g: &BankGeometry, grid: &[Vec<Slot>], scan: usize) -> Vec<Cell> {
    g.all_cells()
        .filter(|&(r, c)| r != scan && grid[r][c] == Slot::Empty)
        .collect()
}

/// Store schedule. With a partner stored on `partner_row`, a vacancy is first
/// walked into that row so both qubits share it.
pub fn plan_store(
    g: &BankGeometry,
    grid: &[Vec<Slot>],
    scan: usize,
    partner: Option<Cell>,
) -> (Vec<Beat>, usize, Cell) {
    let vac = vacancies(g, grid, scan);
    let mut beats = Vec::new();
    let target = match partner {
        Some((pr, pc)) => {
            if let Some(&v) = vac.iter().filter(|v| v.0 == pr).min_by_key(|v| v.1) {
                v
            } else {
                let v = *vac
                    .iter()
                    .min_by_key(|&&(r, c)| (r.abs_diff(pr), r, c))
                    .expect("a vacancy exists for every loaded qubit");
                let (b, dest) = relocate(scan, v, (pr, pc));
                beats.extend(b);
                dest
            }
        }
        None => *vac
            .iter()
            .min_by_key(|&&(r, c)| (r.abs_diff(scan), r, c))
            .expect("a vacancy exists for every loaded qubit"),
    };
    let (shift, scan) = shift_moves(g, scan, target.0);
    beats.extend(shift);
    beats.push(vec![Move { from: Loc::Cr, to: Loc::Cell(target) }]);
    (beats, scan, target)
}

/// Walks vacancy `v` into the partner's row, avoiding the partner's column.
/// Crossing the scan row is a single two-cell move through the empty scan cell.
fn relocate(scan: usize, v: Cell, (pr, pc): Cell) -> (Vec<Beat>, Cell) {
    let mut beats = Vec::new();
    let mut cur = v;
    if cur.1 == pc {
        let nc = if pc > 0 { pc - 1 } else { pc + 1 };
        beats.push(vec![Move { from: Loc::Cell((cur.0, nc)), to: Loc::Cell(cur) }]);
        cur = (cur.0, nc);
    }
    while cur.0 != pr {
        let mut next = if pr > cur.0 { cur.0 + 1 } else { cur.0 - 1 };
        if next == scan {
            next = if pr > cur.0 { next + 1 } else { next - 1 };
        }
        beats.push(vec![Move { from: Loc::Cell((next, cur.1)), to: Loc::Cell(cur) }]);
        cur = (next, cur.1);
    }
    (beats, cur)
}
