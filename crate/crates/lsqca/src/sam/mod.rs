//! Scan-access memory state: occupancy, loads, stores and in-memory access.

pub mod line;
pub mod point;

use std::collections::HashMap;

use thiserror::Error;

use crate::floorplan::{BankGeometry, BankShape, Cell, Layout, Placement, QubitMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Empty,
    Data(u32),
    /// Unused capacity holding an idle patch; moved like data, never loaded.
    Filler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Loc {
    Cell(Cell),
    Cr,
}

/// One patch movement. All moves within a beat happen in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Loc,
    pub to: Loc,
}

pub type Beat = Vec<Move>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoveCost {
    /// Total beats including any fixed-latency operation after the movement.
    pub beats: usize,
    /// Beats during which cells of the bank are being moved.
    pub movement: usize,
    pub path: Vec<Beat>,
    /// Line SAM: scan-row cells held during the non-movement part.
    pub lane: Vec<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorePolicy {
    Reverse,
    LocalityAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessKind {
    Hd,
    Ph,
    Mzz,
    Mxx,
    Mx,
    Mz,
    Pz,
    Pp,
}

impl AccessKind {
    /// Latency once the scan resource is in place.
    pub fn op_beats(self) -> usize {
        match self {
            AccessKind::Hd => 3,
            AccessKind::Ph => 2,
            AccessKind::Mzz | AccessKind::Mxx => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preview {
    Load,
    Store(Option<u32>),
    Access(AccessKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QLoc {
    Conventional,
    Sam { bank: usize, cell: Cell },
    /// Loaded into the CR; returns to `bank` on store.
    Out { bank: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamError {
    #[error("M{0} is not resident in SAM")]
    NotResident(u32),
    #[error("M{0} is not loaded")]
    NotLoaded(u32),
    #[error("M{0} unknown")]
    Unknown(u32),
    #[error("reverse store of M{0}: bank changed since its load")]
    ReverseStale(u32),
}

#[derive(Debug, Clone)]
pub struct BankState {
    pub geom: BankGeometry,
    pub grid: Vec<Vec<Slot>>,
    /// Line banks: index of the all-empty row.
    pub scan: usize,
    pub epoch: u64,
}

impl BankState {
    fn new(geom: BankGeometry) -> Self {
        let rows = geom.rows();
        let grid = (0..rows).map(|r| vec![Slot::Filler; geom.row_len(r)]).collect();
        let scan = geom.home().0;
        let mut b = BankState { geom, grid, scan, epoch: 0 };
        match b.geom.shape {
            BankShape::Point { .. } => {
                let h = b.geom.home();
                b.grid[h.0][h.1] = Slot::Empty;
            }
            BankShape::Line { .. } => b.grid[scan].fill(Slot::Empty),
        }
        b
    }

    pub fn is_line(&self) -> bool {
        matches!(self.geom.shape, BankShape::Line { .. })
    }

    pub fn slot(&self, (r, c): Cell) -> Slot {
        self.grid[r][c]
    }

    pub fn empties(&self) -> Vec<Cell> {
        point::empties(&self.geom, &self.grid)
    }

    /// Applies a move schedule. `incoming` is the qubit entering from the CR, if any;
    /// returns the slot that left into the CR.
    pub fn apply(&mut self, beats: &[Beat], mut incoming: Option<Slot>) -> Option<Slot> {
        let mut outgoing = None;
        for beat in beats {
            let taken: Vec<Slot> = beat
                .iter()
                .map(|m| match m.from {
                    Loc::Cell((r, c)) => std::mem::replace(&mut self.grid[r][c], Slot::Empty),
                    Loc::Cr => incoming.take().expect("store schedule carries one qubit"),
                })
                .collect();
            for (m, s) in beat.iter().zip(taken) {
                match m.to {
                    Loc::Cell((r, c)) => {
                        debug_assert!(
                            self.grid[r][c] == Slot::Empty || s == Slot::Empty,
                            "move into occupied cell {:?}",
                            (r, c)
                        );
                        if s != Slot::Empty {
                            self.grid[r][c] = s;
                        }
                    }
                    Loc::Cr => outgoing = Some(s),
                }
            }
        }
        if !beats.is_empty() {
            self.epoch += 1;
        }
        outgoing
    }
}

#[derive(Debug, Clone)]
pub struct SamState {
    pub banks: Vec<BankState>,
    pub loc: Vec<QLoc>,
    /// Loaded qubit → (bank epoch after the load, load path, scan row before it).
    loads: HashMap<u32, (u64, Vec<Beat>, usize)>,
}

fn invert(beats: &[Beat]) -> Vec<Beat> {
    beats
        .iter()
        .rev()
        .map(|b| b.iter().map(|m| Move { from: m.to, to: m.from }).collect())
        .collect()
}

impl SamState {
    pub fn new(layout: &Layout, map: &QubitMap) -> Self {
        let mut banks: Vec<BankState> = layout.banks.iter().cloned().map(BankState::new).collect();
        let loc = map
            .places
            .iter()
            .enumerate()
            .map(|(q, p)| match *p {
                Placement::Conventional => QLoc::Conventional,
                Placement::Bank { bank, cell } => {
                    banks[bank].grid[cell.0][cell.1] = Slot::Data(q as u32);
                    QLoc::Sam { bank, cell }
                }
            })
            .collect();
        SamState { banks, loc, loads: HashMap::new() }
    }

    fn loc(&self, q: u32) -> Result<QLoc, SamError> {
        self.loc.get(q as usize).copied().ok_or(SamError::Unknown(q))
    }

    pub fn location(&self, q: u32) -> Option<QLoc> {
        self.loc.get(q as usize).copied()
    }

    /// Bank a qubit belongs to, resident or loaded.
    pub fn bank_of(&self, q: u32) -> Option<usize> {
        match self.loc.get(q as usize)? {
            QLoc::Sam { bank, .. } | QLoc::Out { bank } => Some(*bank),
            QLoc::Conventional => None,
        }
    }

    /// Cost of loading `q` from the current state, without changing it.
    pub fn load_cost(&self, q: u32) -> Result<usize, SamError> {
        match self.loc(q)? {
            QLoc::Conventional => Ok(0),
            QLoc::Out { .. } => Err(SamError::NotResident(q)),
            QLoc::Sam { bank, cell } => {
                let b = &self.banks[bank];
                Ok(if b.is_line() {
                    line::load_cost(b.scan, cell)
                } else {
                    point::plan_to_band(&b.geom, cell, &b.empties()).0
                })
            }
        }
    }

    pub fn load(&mut self, q: u32) -> Result<MoveCost, SamError> {
        let (bank, cell) = match self.loc(q)? {
            QLoc::Conventional => return Ok(MoveCost::default()),
            QLoc::Out { .. } => return Err(SamError::NotResident(q)),
            QLoc::Sam { bank, cell } => (bank, cell),
        };
        let b = &mut self.banks[bank];
        let scan_before = b.scan;
        let (path, lane) = if b.is_line() {
            let (path, scan) = line::plan_load(&b.geom, b.scan, cell);
            b.scan = scan;
            (path, line::lane(scan, cell.1))
        } else {
            (point::plan_load(&b.geom, cell, &b.empties()).1, Vec::new())
        };
        let out = b.apply(&path, None);
        debug_assert_eq!(out, Some(Slot::Data(q)));
        self.loads.insert(q, (b.epoch, path.clone(), scan_before));
        self.loc[q as usize] = QLoc::Out { bank };
        self.resync(bank);
        Ok(MoveCost { beats: path.len(), movement: path.len() - 1, path, lane })
    }

    /// Stores a loaded qubit back into its bank. `partner` names a qubit the
    /// stored one just interacted with; line banks try to share its row.
    pub fn store(
        &mut self,
        q: u32,
        policy: StorePolicy,
        partner: Option<u32>,
    ) -> Result<MoveCost, SamError> {
        let bank = match self.loc(q)? {
            QLoc::Conventional => return Ok(MoveCost::default()),
            QLoc::Sam { .. } => return Err(SamError::NotLoaded(q)),
            QLoc::Out { bank } => bank,
        };
        let partner_cell = self.partner_cell(bank, partner);
        let b = &mut self.banks[bank];
        let (path, lane) = match policy {
            StorePolicy::Reverse => {
                let (epoch, ref load, scan) = *self.loads.get(&q).ok_or(SamError::NotLoaded(q))?;
                if epoch != b.epoch {
                    return Err(SamError::ReverseStale(q));
                }
                b.scan = scan;
                (invert(load), Vec::new())
            }
            StorePolicy::LocalityAware if b.is_line() => {
                let (path, scan, cell) = line::plan_store(&b.geom, &b.grid, b.scan, partner_cell);
                b.scan = scan;
                (path, line::lane(scan, cell.1))
            }
            StorePolicy::LocalityAware => (point::plan_store(&b.geom, &b.empties()).0, Vec::new()),
        };
        b.apply(&path, Some(Slot::Data(q)));
        self.loads.remove(&q);
        self.resync(bank);
        Ok(MoveCost { beats: path.len(), movement: path.len() - 1, path, lane })
    }

    fn partner_cell(&self, bank: usize, partner: Option<u32>) -> Option<Cell> {
        match self.loc.get(partner? as usize)? {
            QLoc::Sam { bank: pb, cell } if *pb == bank => Some(*cell),
            _ => None,
        }
    }

    /// Bank and movement beats an operation would take from the current state,
    /// without performing it. `None` for conventional qubits or invalid requests.
    pub fn preview(&self, q: u32, what: Preview) -> Option<(usize, usize)> {
        let l = self.loc.get(q as usize)?;
        match (what, *l) {
            (Preview::Load, QLoc::Sam { bank, cell }) => {
                let b = &self.banks[bank];
                Some((bank, if b.is_line() { line::shifts_to(b.scan, cell.0) } else { self.load_cost(q).ok()? - 1 }))
            }
            (Preview::Access(k), QLoc::Sam { bank, cell }) => {
                let b = &self.banks[bank];
                if k.op_beats() == 0 {
                    Some((bank, 0))
                } else if b.is_line() {
                    Some((bank, line::shifts_to(b.scan, cell.0)))
                } else {
                    let e = b.empties();
                    Some((bank, match k {
                        AccessKind::Hd | AccessKind::Ph => point::plan_approach(&b.geom, cell, &e).0.len(),
                        _ => point::plan_to_band(&b.geom, cell, &e).0 - 1,
                    }))
                }
            }
            (Preview::Store(partner), QLoc::Out { bank }) => {
                let b = &self.banks[bank];
                let beats = if b.is_line() {
                    line::plan_store(&b.geom, &b.grid, b.scan, self.partner_cell(bank, partner)).0.len()
                } else {
                    point::plan_store(&b.geom, &b.empties()).0.len()
                };
                Some((bank, beats - 1))
            }
            _ => None,
        }
    }

    /// In-memory operation on a resident qubit: positions the scan resource and
    /// returns movement plus operation latency.
    pub fn access(&mut self, q: u32, kind: AccessKind) -> Result<MoveCost, SamError> {
        let op = kind.op_beats();
        let (bank, cell) = match self.loc(q)? {
            QLoc::Conventional => return Ok(MoveCost { beats: op, ..Default::default() }),
            QLoc::Out { .. } => return Err(SamError::NotResident(q)),
            QLoc::Sam { bank, cell } => (bank, cell),
        };
        if op == 0 {
            return Ok(MoveCost::default());
        }
        let b = &mut self.banks[bank];
        let (path, lane) = if b.is_line() {
            let (path, scan) = line::shift_moves(&b.geom, b.scan, cell.0);
            b.scan = scan;
            let lane = match kind {
                AccessKind::Hd | AccessKind::Ph => vec![(scan, cell.1)],
                _ => line::lane(scan, cell.1),
            };
            (path, lane)
        } else {
            let empties = b.empties();
            match kind {
                AccessKind::Hd | AccessKind::Ph => (point::plan_approach(&b.geom, cell, &empties).0, Vec::new()),
                _ => (point::plan_to_band(&b.geom, cell, &empties).1, Vec::new()),
            }
        };
        b.apply(&path, None);
        self.resync(bank);
        Ok(MoveCost { beats: path.len() + op, movement: path.len(), path, lane })
    }

    /// Recomputes qubit locations of one bank after its cells moved.
    fn resync(&mut self, bank: usize) {
        let b = &self.banks[bank];
        for (r, row) in b.grid.iter().enumerate() {
            for (c, s) in row.iter().enumerate() {
                if let Slot::Data(q) = *s {
                    self.loc[q as usize] = QLoc::Sam { bank, cell: (r, c) };
                }
            }
        }
    }

    /// Occupancy / location cross-check.
    pub fn check(&self) -> Result<(), String> {
        let mut out_per_bank = vec![0usize; self.banks.len()];
        for (q, l) in self.loc.iter().enumerate() {
            match *l {
                QLoc::Conventional => {}
                QLoc::Out { bank } => out_per_bank[bank] += 1,
                QLoc::Sam { bank, cell } => {
                    if self.banks[bank].slot(cell) != Slot::Data(q as u32) {
                        return Err(format!("M{q} expected at {cell:?} in bank {bank}"));
                    }
                }
            }
        }
        for (i, b) in self.banks.iter().enumerate() {
            let mut data = 0;
            for row in &b.grid {
                for s in row {
                    if let Slot::Data(q) = *s {
                        data += 1;
                        if !matches!(self.loc[q as usize], QLoc::Sam { bank, .. } if bank == i) {
                            return Err(format!("M{q} in bank {i} grid but mapped elsewhere"));
                        }
                    }
                }
            }
            let empties = b.grid.iter().flatten().filter(|s| **s == Slot::Empty).count();
            if b.is_line() {
                if b.grid[b.scan].iter().any(|s| *s != Slot::Empty) {
                    return Err(format!("bank {i}: scan row {} not empty", b.scan));
                }
                if empties != b.geom.row_len(0) + out_per_bank[i] {
                    return Err(format!("bank {i}: {empties} empties, {} loaded", out_per_bank[i]));
                }
            } else if empties != 1 + out_per_bank[i] {
                return Err(format!("bank {i}: {empties} empties, {} loaded", out_per_bank[i]));
            }
            if data != b.geom.qubits - out_per_bank[i] {
                return Err(format!("bank {i}: {data} resident of {}", b.geom.qubits));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{assign_initial, build_layout, LayoutConfig, SamKind};

    fn state(kind: SamKind, banks: u32, n: usize) -> SamState {
        let cfg = LayoutConfig { sam_kind: kind, banks, ..Default::default() };
        let l = build_layout(&cfg, n).unwrap();
        let m = assign_initial(&l, n, None).unwrap();
        SamState::new(&l, &m)
    }

    #[test]
    fn initial_state_is_consistent() {
        for kind in [SamKind::Point, SamKind::Line] {
            for n in [1, 2, 3, 7, 20, 48, 100] {
                state(kind, 1, n).check().unwrap();
            }
        }
    }

    #[test]
    fn point_store_after_port_load_is_one_beat() {
        let mut s = state(SamKind::Point, 1, 48);
        // M0 sits in the port band.
        assert_eq!(s.load(0).unwrap().beats, 1);
        assert_eq!(s.store(0, StorePolicy::LocalityAware, None).unwrap().beats, 1);
        s.check().unwrap();
    }

    #[test]
    fn reverse_store_mirrors_load() {
        let mut s = state(SamKind::Point, 1, 48);
        let before = s.banks[0].grid.clone();
        let l = s.load(40).unwrap();
        let st = s.store(40, StorePolicy::Reverse, None).unwrap();
        assert_eq!(l.beats, st.beats);
        assert_eq!(s.banks[0].grid, before);
        s.check().unwrap();
    }

    #[test]
    fn reverse_store_rejected_after_bank_changes() {
        let mut s = state(SamKind::Point, 1, 48);
        s.load(40).unwrap();
        s.access(30, AccessKind::Hd).unwrap();
        assert_eq!(s.store(40, StorePolicy::Reverse, None), Err(SamError::ReverseStale(40)));
    }

    #[test]
    fn line_same_row_second_load() {
        let mut s = state(SamKind::Line, 1, 400);
        let QLoc::Sam { cell, .. } = s.location(399).unwrap() else { panic!() };
        let first = s.load(399).unwrap().beats;
        assert_eq!(first, line::load_cost(10, cell));
        let neighbour = s.banks[0].grid[cell.0].iter().find_map(|x| match x {
            Slot::Data(q) => Some(*q),
            _ => None,
        });
        assert_eq!(s.load(neighbour.unwrap()).unwrap().beats, 1);
        s.check().unwrap();
    }

    #[test]
    fn line_partners_share_a_row() {
        let mut s = state(SamKind::Line, 1, 100);
        let row_of = |s: &SamState, q| match s.location(q).unwrap() {
            QLoc::Sam { cell, .. } => cell.0,
            _ => panic!(),
        };
        // pick two qubits three rows apart
        let (a, b) = (0..100u32)
            .flat_map(|a| (0..100u32).map(move |b| (a, b)))
            .find(|&(a, b)| row_of(&s, b) == row_of(&s, a) + 3)
            .unwrap();
        s.load(a).unwrap();
        s.load(b).unwrap();
        s.store(a, StorePolicy::LocalityAware, Some(b)).unwrap();
        s.store(b, StorePolicy::LocalityAware, Some(a)).unwrap();
        assert_eq!(row_of(&s, a), row_of(&s, b));
        s.check().unwrap();
    }

    #[test]
    fn in_memory_costs() {
        let mut s = state(SamKind::Point, 1, 48);
        assert_eq!(s.access(5, AccessKind::Mz).unwrap().beats, 0);
        // M0 is in the band next to the empty home cell.
        assert_eq!(s.access(0, AccessKind::Hd).unwrap().beats, 3);
        let mut s = state(SamKind::Line, 1, 100);
        let QLoc::Sam { cell, .. } = s.location(0).unwrap() else { panic!() };
        assert_eq!(s.banks[0].scan.abs_diff(cell.0), 1);
        let c = s.access(0, AccessKind::Mzz).unwrap();
        assert_eq!((c.movement, c.beats), (0, 1));
    }

    #[test]
    fn conventional_is_free_to_move() {
        let cfg = LayoutConfig { hybrid_fraction: 1.0, ..Default::default() };
        let l = build_layout(&cfg, 3).unwrap();
        let m = assign_initial(&l, 3, None).unwrap();
        let mut s = SamState::new(&l, &m);
        assert_eq!(s.load(1).unwrap().beats, 0);
        assert_eq!(s.access(1, AccessKind::Hd).unwrap().beats, 3);
        assert_eq!(s.store(1, StorePolicy::LocalityAware, None).unwrap().beats, 0);
    }
}
