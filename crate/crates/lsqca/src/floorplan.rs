//! Cell-grid geometry for SAM banks, the computational register (CR) and the
//! conventional region, plus initial qubit placement.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamKind {
    Point,
    Line,
    Conventional,
}

impl std::str::FromStr for SamKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "point" => Ok(SamKind::Point),
            "line" => Ok(SamKind::Line),
            "conventional" => Ok(SamKind::Conventional),
            _ => Err(format!("unknown sam kind `{s}`")),
        }
    }
}

impl fmt::Display for SamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamKind::Point => "point",
            SamKind::Line => "line",
            SamKind::Conventional => "conventional",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub sam_kind: SamKind,
    pub banks: u32,
    pub factories: u32,
    /// Fraction of qubits placed in the conventional region.
    pub hybrid_fraction: f64,
    /// Pooled magic-state buffer; `None` means twice the factory count.
    pub buffer_capacity: Option<u32>,
    pub warm_start: bool,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            sam_kind: SamKind::Point,
            banks: 1,
            factories: 1,
            hybrid_fraction: 0.0,
            buffer_capacity: None,
            warm_start: false,
        }
    }
}

impl LayoutConfig {
    pub fn buffer(&self) -> u32 {
        self.buffer_capacity.unwrap_or(2 * self.factories)
    }
}

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BankShape {
    /// Rows of the given lengths, left-justified; column 0 faces the CR.
    Point { row_lens: Vec<usize> },
    /// `rows` × `cols` rectangle, one of whose rows is the scan row.
    Line { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankGeometry {
    pub shape: BankShape,
    /// Qubits assigned to this bank.
    pub qubits: usize,
}

impl BankGeometry {
    pub fn rows(&self) -> usize {
        match &self.shape {
            BankShape::Point { row_lens } => row_lens.len(),
            BankShape::Line { rows, .. } => *rows,
        }
    }

    pub fn row_len(&self, r: usize) -> usize {
        match &self.shape {
            BankShape::Point { row_lens } => row_lens.get(r).copied().unwrap_or(0),
            BankShape::Line { rows, cols } => {
                if r < *rows {
                    *cols
                } else {
                    0
                }
            }
        }
    }

    pub fn contains(&self, (r, c): Cell) -> bool {
        c < self.row_len(r)
    }

    pub fn cells(&self) -> usize {
        (0..self.rows()).map(|r| self.row_len(r)).sum()
    }

    /// Centre row; the lower middle for an even row count.
    pub fn center_row(&self) -> usize {
        self.rows() / 2
    }

    /// Point: home of the scan cell. Line: the scan row index is `home().0`.
    pub fn home(&self) -> Cell {
        (self.center_row(), 0)
    }

    /// Data slots the bank can hold.
    pub fn capacity(&self) -> usize {
        match &self.shape {
            BankShape::Point { .. } => self.cells() - 1,
            BankShape::Line { cols, .. } => self.cells() - cols,
        }
    }

    /// Point-bank cells that touch the CR port column.
    pub fn port_band(&self) -> Vec<Cell> {
        let rc = self.center_row();
        (rc.saturating_sub(1)..=rc + 1)
            .filter(|&r| self.contains((r, 0)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|r| (r, 0))
            .collect()
    }

    pub fn all_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.rows()).flat_map(move |r| (0..self.row_len(r)).map(move |c| (r, c)))
    }
}

/// Point-SAM shape for `m` data qubits: `m + 1` cells in a near-square with
/// the deficit taken from the bottom row.
///
/// Shapes with a dead-end cell are padded (two-row banks to a full rectangle,
/// a one-cell bottom row to two cells) so the scan cell can always circulate.
pub fn point_shape(m: usize) -> Vec<usize> {
    let cells = m + 1;
    if cells <= 2 {
        return vec![cells];
    }
    let cells = cells.max(4);
    let s = ceil_sqrt(cells);
    let rows = cells.div_ceil(s);
    let k = cells - s * (rows - 1);
    let mut lens = vec![s; rows];
    lens[rows - 1] = if rows == 2 { s } else { k.max(2) };
    lens
}

/// Line-SAM data block (rows, cols) for `m` qubits: the cheaper of L×L and
/// L×(L+1) blocks, counting the scan row and the full-height CR.
pub fn line_block(m: usize) -> (usize, usize) {
    let m = m.max(1);
    let mut best: Option<((usize, usize), usize)> = None;
    let mut l = 1;
    loop {
        for (a, b) in [(l, l), (l, l + 1)] {
            if a * b >= m {
                let total = (a + 1) * b + 2 * (a + 1);
                if best.is_none_or(|(_, t)| total < t) {
                    best = Some(((a, b), total));
                }
            }
        }
        if l * l >= m {
            return best.unwrap().0;
        }
        l += 1;
    }
}

pub fn ceil_sqrt(n: usize) -> usize {
    let s = n.isqrt();
    if s * s == n {
        s
    } else {
        s + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub config: LayoutConfig,
    pub banks: Vec<BankGeometry>,
    pub cr_cells: usize,
    pub registers: u32,
    pub conventional_qubits: usize,
    pub conventional_cells: usize,
    pub qubit_count: usize,
}

impl Layout {
    pub fn total_cells(&self) -> usize {
        self.banks.iter().map(|b| b.cells()).sum::<usize>() + self.cr_cells + self.conventional_cells
    }

    pub fn data_capacity(&self) -> usize {
        self.banks.iter().map(|b| b.capacity()).sum::<usize>() + self.conventional_qubits
    }

    pub fn sam_qubits(&self) -> usize {
        self.qubit_count - self.conventional_qubits
    }

    /// Structured text dump for debugging.
    pub fn describe(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", self.config.sam_kind);
        for (i, b) in self.banks.iter().enumerate() {
            let _ = match &b.shape {
                BankShape::Point { row_lens } => {
                    writeln!(s, "bank {i} point rows {row_lens:?} qubits {} home {:?}", b.qubits, b.home())
                }
                BankShape::Line { rows, cols } => {
                    writeln!(s, "bank {i} line {rows}x{cols} qubits {} scan_row {}", b.qubits, b.home().0)
                }
            };
        }
        let _ = writeln!(s, "cr {} cells {} registers", self.cr_cells, self.registers);
        let _ = writeln!(s, "conventional {} qubits {} cells", self.conventional_qubits, self.conventional_cells);
        let _ = writeln!(s, "total {} cells", self.total_cells());
        s
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("{kind} SAM does not support {banks} banks")]
    Banks { kind: SamKind, banks: u32 },
    #[error("hybrid fraction {0} outside [0, 1]")]
    Fraction(String),
    #[error("qubit count must be at least 1")]
    Empty,
    #[error("{need} qubits exceed capacity {have}")]
    Capacity { need: usize, have: usize },
}

/// Qubits that a hybrid split places in the conventional region.
pub fn conventional_share(qubits: usize, f: f64) -> usize {
    ((qubits as f64) * f).round().clamp(0.0, qubits as f64) as usize
}

pub fn build_layout(cfg: &LayoutConfig, qubit_count: usize) -> Result<Layout, LayoutError> {
    if qubit_count == 0 {
        return Err(LayoutError::Empty);
    }
    if !(0.0..=1.0).contains(&cfg.hybrid_fraction) {
        return Err(LayoutError::Fraction(cfg.hybrid_fraction.to_string()));
    }
    let ok_banks = match cfg.sam_kind {
        SamKind::Point => (1..=2).contains(&cfg.banks),
        SamKind::Line => matches!(cfg.banks, 1 | 2 | 4),
        SamKind::Conventional => true,
    };
    if !ok_banks {
        return Err(LayoutError::Banks { kind: cfg.sam_kind, banks: cfg.banks });
    }
    let conv = match cfg.sam_kind {
        SamKind::Conventional => qubit_count,
        _ => conventional_share(qubit_count, cfg.hybrid_fraction),
    };
    let sam = qubit_count - conv;
    let mut banks = Vec::new();
    let mut cr_cells = 0;
    if sam > 0 {
        // Never more banks than qubits.
        let nb = (cfg.banks as usize).min(sam);
        let nb = if cfg.sam_kind == SamKind::Line && nb == 3 { 2 } else { nb };
        for i in 0..nb {
            let share = sam / nb + usize::from(i < sam % nb);
            let shape = match cfg.sam_kind {
                SamKind::Point => BankShape::Point { row_lens: point_shape(share) },
                _ => {
                    let (a, b) = line_block(share);
                    BankShape::Line { rows: a + 1, cols: b }
                }
            };
            banks.push(BankGeometry { shape, qubits: share });
        }
        cr_cells = match cfg.sam_kind {
            SamKind::Point => 6,
            _ => 2 * banks.iter().map(|b| b.rows()).sum::<usize>(),
        };
    }
    let layout = Layout {
        config: cfg.clone(),
        banks,
        cr_cells,
        registers: 2,
        conventional_qubits: conv,
        conventional_cells: 2 * conv,
        qubit_count,
    };
    debug_assert!(layout.data_capacity() >= qubit_count);
    Ok(layout)
}

pub fn memory_density(l: &Layout, used_qubits: usize) -> f64 {
    if used_qubits == 0 {
        return 0.0;
    }
    used_qubits as f64 / l.total_cells() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    Conventional,
    Bank { bank: usize, cell: Cell },
}

/// Variable → placement. Index = M variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitMap {
    pub places: Vec<Placement>,
}

impl QubitMap {
    pub fn bank_of(&self, q: u32) -> Option<usize> {
        match self.places.get(q as usize)? {
            Placement::Bank { bank, .. } => Some(*bank),
            Placement::Conventional => None,
        }
    }
}

/// Bank cells in fill order: cheapest initial access first, then row-major.
pub fn fill_order(b: &BankGeometry) -> Vec<Cell> {
    let home = b.home();
    let mut cells: Vec<Cell> = match &b.shape {
        BankShape::Point { .. } => b.all_cells().filter(|&c| c != home).collect(),
        BankShape::Line { .. } => b.all_cells().filter(|c| c.0 != home.0).collect(),
    };
    match &b.shape {
        BankShape::Point { .. } => {
            let band = b.port_band();
            cells.sort_by_key(|&(r, c)| {
                (crate::sam::point::single_cost(b, (r, c), home, &band), r, c)
            });
        }
        BankShape::Line { .. } => {
            cells.sort_by_key(|&(r, c)| (r.abs_diff(home.0), r, c));
        }
    }
    cells
}

pub fn assign_initial(
    l: &Layout,
    qubit_count: usize,
    hotness: Option<&[u32]>,
) -> Result<QubitMap, LayoutError> {
    if qubit_count > l.data_capacity() {
        return Err(LayoutError::Capacity { need: qubit_count, have: l.data_capacity() });
    }
    let ranking: Vec<u32> = match hotness {
        Some(h) => h.to_vec(),
        None => (0..qubit_count as u32).collect(),
    };
    let mut places = vec![Placement::Conventional; qubit_count];
    let mut conventional = vec![false; qubit_count];
    for &q in ranking.iter().take(l.conventional_qubits.min(qubit_count)) {
        conventional[q as usize] = true;
    }
    let orders: Vec<Vec<Cell>> = l.banks.iter().map(fill_order).collect();
    let mut next = vec![0usize; l.banks.len()];
    let mut rr = 0;
    for q in 0..qubit_count {
        if conventional[q] {
            continue;
        }
        let bank = rr % l.banks.len();
        rr += 1;
        let cell = orders[bank][next[bank]];
        next[bank] += 1;
        places[q] = Placement::Bank { bank, cell };
    }
    Ok(QubitMap { places })
}
