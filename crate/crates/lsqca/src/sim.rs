//! Beat-accurate execution of LSQCA programs on a layout.
//!
//! Instructions issue oldest-ready-first once their dependencies have retired
//! and their resources are free. Memory movement is applied to the SAM state
//! at issue; the reservation windows keep later operations off the cells
//! until the movement has physically happened.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt::Write;

use thiserror::Error;

use crate::floorplan::{
    assign_initial, build_layout, memory_density, Cell, Layout, LayoutConfig, LayoutError, QubitMap, SamKind,
};
use crate::isa::{Instruction, Opcode, Program};
use crate::msf::MsfState;
use crate::sam::{AccessKind, MoveCost, Preview, QLoc, SamState, StorePolicy};

/// Beats for each of the two lattice-surgery steps inside CX.
pub const CX_SURGERY: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOptions {
    /// Beats between a measurement retiring and SK seeing its value.
    pub decoder_latency: usize,
    /// Hard stop; exceeding it is reported as a deadlock.
    pub max_beats: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { decoder_latency: 0, max_beats: 50_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Res {
    Bank(usize),
    Cell(usize, Cell),
    Reg(u32),
}

impl std::fmt::Display for Res {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Res::Bank(b) => write!(f, "b{b}"),
            Res::Cell(b, (r, c)) => write!(f, "b{b}:r{r}c{c}"),
            Res::Reg(c) => write!(f, "C{c}"),
        }
    }
}

/// A resource held over `[from, until)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hold {
    pub res: Res,
    pub from: usize,
    pub until: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub index: usize,
    pub issue: usize,
    pub retire: usize,
    pub holds: Vec<Hold>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub total_beats: usize,
    pub instruction_count: usize,
    /// `None` for an empty program.
    pub cpi: Option<f64>,
    /// Indexed by instruction.
    pub trace: Vec<TraceEvent>,
    pub per_qubit_refs: BTreeMap<u32, Vec<usize>>,
    /// Issue beats of PM instructions.
    pub magic_beats: Vec<usize>,
    pub density: f64,
    pub msf: MsfState,
}

impl RunResult {
    pub fn cpi_or_zero(&self) -> f64 {
        self.cpi.unwrap_or(0.0)
    }

    /// `issue retire OPCODE operands holds` per instruction, in program order.
    pub fn trace_text(&self, p: &Program) -> String {
        let mut s = String::new();
        for e in &self.trace {
            let holds: Vec<String> = e.holds.iter().map(|h| format!("{}@{}..{}", h.res, h.from, h.until)).collect();
            let holds = if holds.is_empty() { "-".to_string() } else { holds.join(",") };
            let _ = writeln!(s, "{} {} {} {}", e.issue, e.retire, p.instructions[e.index], holds);
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "beats {}\ninstructions {}\ncpi {}\ndensity {:.4}\nmagic_states {}\n",
            self.total_beats,
            self.instruction_count,
            match self.cpi {
                Some(c) => format!("{c:.4}"),
                None => "0 (undefined)".into(),
            },
            self.density,
            self.magic_beats.len()
        )
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("deadlock at beat {beat}:\n{}", blocked.join("\n"))]
    Deadlock { beat: usize, blocked: Vec<String> },
    #[error("program uses {need} {what}, layout provides {have}")]
    Capacity { what: &'static str, need: usize, have: usize },
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

fn is_filler(op: Opcode) -> bool {
    matches!(op, Opcode::Ld | Opcode::Pm | Opcode::PzC | Opcode::PpC)
}

fn is_emptier(op: Opcode) -> bool {
    matches!(op, Opcode::St | Opcode::MxC | Opcode::MzC)
}

fn access_kind(op: Opcode) -> Option<AccessKind> {
    Some(match op {
        Opcode::HdM => AccessKind::Hd,
        Opcode::PhM => AccessKind::Ph,
        Opcode::MzzM => AccessKind::Mzz,
        Opcode::MxxM => AccessKind::Mxx,
        Opcode::MxM => AccessKind::Mx,
        Opcode::MzM => AccessKind::Mz,
        Opcode::PzM => AccessKind::Pz,
        Opcode::PpM => AccessKind::Pp,
        _ => return None,
    })
}

/// Fixed latency of register-only instructions.
fn fixed(op: Opcode) -> usize {
    match op {
        Opcode::HdC => 3,
        Opcode::PhC => 2,
        Opcode::MxxC | Opcode::MzzC | Opcode::Pm => 1,
        _ => 0,
    }
}

/// Static dependencies: the previous instruction on each M, C and V operand, and
/// the SK guarding this instruction.
pub fn dependencies(p: &Program) -> Vec<Vec<usize>> {
    let mut last_m = BTreeMap::new();
    let mut last_c = BTreeMap::new();
    let mut last_v = BTreeMap::new();
    let mut deps = Vec::with_capacity(p.len());
    for (i, ins) in p.instructions.iter().enumerate() {
        let mut d = BTreeSet::new();
        for m in ins.mems() {
            d.extend(last_m.insert(m, i));
        }
        for c in ins.regs() {
            d.extend(last_c.insert(c, i));
        }
        for v in ins.vals() {
            d.extend(last_v.insert(v, i));
        }
        if i > 0 && p.instructions[i - 1].op == Opcode::Sk {
            d.insert(i - 1);
        }
        deps.push(d.into_iter().collect());
    }
    deps
}

#[derive(Default)]
struct BankBusy {
    excl_until: usize,
    cells: Vec<(Cell, usize)>,
}

impl BankBusy {
    fn idle(&self, t: usize) -> bool {
        self.excl_until <= t && self.cells.iter().all(|&(_, u)| u <= t)
    }

    fn lane_free(&self, t: usize, lane: &[Cell]) -> bool {
        self.excl_until <= t && self.cells.iter().all(|&(c, u)| u <= t || !lane.contains(&c))
    }
}

/// What an issued instruction does to the machine; computed before committing.
struct Plan {
    latency: usize,
    holds: Vec<Hold>,
}

struct Machine<'a> {
    p: &'a Program,
    opts: &'a SimOptions,
    sam: SamState,
    msf: MsfState,
    banks: Vec<BankBusy>,
    reg_busy_until: Vec<usize>,
    reg_live: Vec<bool>,
    /// Unissued CX instructions with an operand in SAM.
    pending_cx: BTreeSet<usize>,
}

enum Blocked {
    Magic,
    Register,
    Bank(usize),
    Order(usize),
}

impl Machine<'_> {
    fn bank_free(&self, b: usize, t: usize, movement: usize, lane: &[Cell]) -> bool {
        if movement > 0 || lane.is_empty() {
            self.banks[b].idle(t)
        } else {
            self.banks[b].lane_free(t, lane)
        }
    }

    fn reg_free(&self, c: u32, t: usize) -> bool {
        self.reg_busy_until.get(c as usize).is_none_or(|&u| u <= t)
    }

    fn free_cx_register(&self, t: usize) -> Option<u32> {
        (0..self.reg_live.len() as u32).find(|&c| !self.reg_live[c as usize] && self.reg_free(c, t))
    }

    /// Holds for a memory-side operation: the whole bank for point SAM; for line
    /// SAM the bank while rows shift, then only the lane cells.
    fn mem_holds(&self, bank: usize, t: usize, cost: &MoveCost, op_beats: usize) -> Vec<Hold> {
        let end = t + cost.beats.max(op_beats);
        if self.sam.banks[bank].is_line() {
            let mut h = Vec::new();
            let m = cost.movement;
            if m > 0 {
                h.push(Hold { res: Res::Bank(bank), from: t, until: t + m });
            }
            h.extend(cost.lane.iter().map(|&c| Hold { res: Res::Cell(bank, c), from: t + m, until: end }));
            h
        } else {
            vec![Hold { res: Res::Bank(bank), from: t, until: end }]
        }
    }

    /// Lane cells a line-bank operation would hold, for the pre-issue check.
    fn preview_lane(&self, q: u32, what: Preview) -> Vec<Cell> {
        let Some(QLoc::Sam { bank, cell }) = self.sam.location(q) else { return Vec::new() };
        let b = &self.sam.banks[bank];
        if !b.is_line() {
            return Vec::new();
        }
        match what {
            Preview::Access(AccessKind::Hd | AccessKind::Ph) => vec![(b.scan, cell.1)],
            _ => crate::sam::line::lane(b.scan, cell.1),
        }
    }

    /// Checks whether `i` can issue at `t`; returns why not.
    fn check(&self, i: usize, t: usize) -> Result<(), Blocked> {
        let ins = &self.p.instructions[i];
        for c in ins.regs() {
            if !self.reg_free(c, t) {
                return Err(Blocked::Register);
            }
        }
        if is_filler(ins.op) {
            if let Some(&cx) = self.pending_cx.first() {
                // Leave a register for the older CX.
                if cx < i {
                    let free = (0..self.reg_live.len() as u32)
                        .filter(|&c| !self.reg_live[c as usize] && self.reg_free(c, t))
                        .count();
                    if free <= 1 {
                        return Err(Blocked::Order(cx));
                    }
                }
            }
        }
        let mems: Vec<u32> = ins.mems().collect();
        let bank_check = |q: u32, what: Preview| -> Result<(), Blocked> {
            if let Some((b, m)) = self.sam.preview(q, what) {
                if !self.bank_free(b, t, m, &self.preview_lane(q, what)) {
                    return Err(Blocked::Bank(b));
                }
            }
            Ok(())
        };
        match ins.op {
            Opcode::Pm if self.msf.stock == 0 => return Err(Blocked::Magic),
            Opcode::Ld => bank_check(mems[0], Preview::Load)?,
            Opcode::St => {
                if let Some(b) = self.sam.bank_of(mems[0]) {
                    if !self.banks[b].idle(t) {
                        return Err(Blocked::Bank(b));
                    }
                }
            }
            Opcode::Cx => {
                for &q in &mems {
                    if let Some(b) = self.sam.bank_of(q) {
                        if !self.banks[b].idle(t) {
                            return Err(Blocked::Bank(b));
                        }
                    }
                }
                let x = self.cx_first(mems[0], mems[1]);
                if self.sam.bank_of(x).is_some() && self.free_cx_register(t).is_none() {
                    return Err(Blocked::Register);
                }
            }
            op => {
                if let Some(k) = access_kind(op).filter(|k| k.op_beats() > 0) {
                    bank_check(mems[0], Preview::Access(k))?;
                }
            }
        }
        Ok(())
    }

    /// The CX operand to load: the cheaper one, the first on ties.
    fn cx_first(&self, a: u32, b: u32) -> u32 {
        let ca = self.sam.load_cost(a).unwrap_or(0);
        let cb = self.sam.load_cost(b).unwrap_or(0);
        if cb < ca {
            b
        } else {
            a
        }
    }

    fn commit(&mut self, i: usize, t: usize) -> Plan {
        let ins: &Instruction = &self.p.instructions[i];
        let mems: Vec<u32> = ins.mems().collect();
        let regs: Vec<u32> = ins.regs().collect();
        let mut holds = Vec::new();
        let sam_err = |e| panic!("instruction {i} ({ins}): {e}");
        let latency = match ins.op {
            Opcode::Ld => {
                let q = mems[0];
                let bank = self.sam.bank_of(q);
                let c = self.sam.load(q).unwrap_or_else(sam_err);
                if let Some(b) = bank {
                    holds.extend(self.mem_holds(b, t, &c, 0));
                }
                c.beats
            }
            Opcode::St => {
                let q = mems[0];
                let bank = self.sam.bank_of(q);
                let c = self.sam.store(q, StorePolicy::LocalityAware, None).unwrap_or_else(sam_err);
                if let Some(b) = bank {
                    holds.extend(self.mem_holds(b, t, &c, 0));
                }
                c.beats
            }
            Opcode::Pm => {
                assert!(self.msf.request());
                1
            }
            Opcode::Sk => self.opts.decoder_latency,
            Opcode::Cx => self.commit_cx(i, t, mems[0], mems[1], &mut holds),
            op => match access_kind(op) {
                Some(k) => {
                    let q = mems[0];
                    let bank = self.sam.bank_of(q);
                    let c = self.sam.access(q, k).unwrap_or_else(sam_err);
                    if let (Some(b), true) = (bank, k.op_beats() > 0) {
                        holds.extend(self.mem_holds(b, t, &c, k.op_beats()));
                    }
                    c.beats
                }
                None => fixed(op),
            },
        };
        let retire = t + latency;
        for &c in &regs {
            holds.push(Hold { res: Res::Reg(c), from: t, until: retire });
        }
        for h in &holds {
            match h.res {
                Res::Bank(b) => self.banks[b].excl_until = self.banks[b].excl_until.max(h.until),
                Res::Cell(b, c) => self.banks[b].cells.push((c, h.until)),
                Res::Reg(c) => {
                    let u = &mut self.reg_busy_until[c as usize];
                    *u = (*u).max(h.until);
                }
            }
        }
        if is_filler(ins.op) {
            for &c in &regs {
                self.reg_live[c as usize] = true;
            }
        }
        Plan { latency, holds }
    }

    fn commit_cx(&mut self, i: usize, t: usize, a: u32, b: u32, holds: &mut Vec<Hold>) -> usize {
        let x = self.cx_first(a, b);
        let y = if x == a { b } else { a };
        let err = |e| panic!("CX #{i}: {e}");
        let banks: BTreeSet<usize> = [x, y].iter().filter_map(|&q| self.sam.bank_of(q)).collect();
        let load = self.sam.load(x).unwrap_or_else(err);
        let pos = self.sam.access(y, AccessKind::Mxx).unwrap_or_else(err);
        let store = self.sam.store(x, StorePolicy::LocalityAware, Some(y)).unwrap_or_else(err);
        let total = load.beats + CX_SURGERY + pos.beats + store.beats;
        for b in banks {
            holds.push(Hold { res: Res::Bank(b), from: t, until: t + total });
        }
        if self.sam.bank_of(x).is_some() {
            let c = self.free_cx_register(t).expect("checked before issue");
            holds.push(Hold { res: Res::Reg(c), from: t, until: t + total });
        }
        self.pending_cx.remove(&i);
        total
    }
}

/// Runs `p` on `layout` with qubits placed by `map`.
pub fn run(p: &Program, layout: &Layout, map: &QubitMap, opts: &SimOptions) -> Result<RunResult, SimError> {
    if p.max_qubit() > map.places.len() {
        return Err(SimError::Capacity { what: "qubits", need: p.max_qubit(), have: map.places.len() });
    }
    let regs_needed = p.instructions.iter().flat_map(|i| i.regs()).max().map_or(0, |c| c as usize + 1);
    if regs_needed > layout.registers as usize {
        return Err(SimError::Capacity { what: "registers", need: regs_needed, have: layout.registers as usize });
    }
    let cfg = &layout.config;
    let sam = SamState::new(layout, map);
    let pending_cx = p
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, ins)| ins.op == Opcode::Cx && ins.mems().any(|q| sam.bank_of(q).is_some()))
        .map(|(i, _)| i)
        .collect();
    let nregs = layout.registers as usize;
    let mut m = Machine {
        p,
        opts,
        sam,
        msf: MsfState::new(cfg.factories, cfg.buffer(), cfg.warm_start),
        banks: layout.banks.iter().map(|_| BankBusy::default()).collect(),
        reg_busy_until: vec![0; nregs],
        reg_live: vec![false; nregs],
        pending_cx,
    };

    let deps = dependencies(p);
    let mut waiting: Vec<usize> = deps.iter().map(|d| d.len()).collect();
    let mut dependents = vec![Vec::new(); p.len()];
    for (i, d) in deps.iter().enumerate() {
        for &j in d {
            dependents[j].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..p.len()).filter(|&i| waiting[i] == 0).collect();
    let mut in_flight: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut trace: Vec<Option<TraceEvent>> = vec![None; p.len()];
    let mut retired = 0;
    let mut t = 0;
    let mut last = 0;

    let retire = |i: usize, m: &mut Machine, ready: &mut BTreeSet<usize>, waiting: &mut Vec<usize>| {
        let ins = &p.instructions[i];
        if is_emptier(ins.op) {
            for c in ins.regs() {
                m.reg_live[c as usize] = false;
            }
        }
        for &d in &dependents[i] {
            waiting[d] -= 1;
            if waiting[d] == 0 {
                ready.insert(d);
            }
        }
    };

    while retired < p.len() {
        if t > 0 {
            m.msf.tick();
        }
        m.banks.iter_mut().for_each(|b| b.cells.retain(|&(_, u)| u > t));
        while let Some(&Reverse((r, i))) = in_flight.peek() {
            if r > t {
                break;
            }
            in_flight.pop();
            retire(i, &mut m, &mut ready, &mut waiting);
            retired += 1;
        }
        let mut issued = false;
        loop {
            let mut progress = false;
            let candidates: Vec<usize> = ready.iter().copied().collect();
            for i in candidates {
                if m.check(i, t).is_err() {
                    continue;
                }
                ready.remove(&i);
                let plan = m.commit(i, t);
                trace[i] = Some(TraceEvent { index: i, issue: t, retire: t + plan.latency, holds: plan.holds });
                last = last.max(t + plan.latency);
                progress = true;
                issued = true;
                if plan.latency == 0 {
                    retire(i, &mut m, &mut ready, &mut waiting);
                    retired += 1;
                } else {
                    in_flight.push(Reverse((t + plan.latency, i)));
                }
            }
            if !progress {
                break;
            }
        }
        if retired == p.len() {
            break;
        }
        let magic_wait = ready.iter().any(|&i| p.instructions[i].op == Opcode::Pm) && m.msf.factories > 0;
        let stuck = in_flight.is_empty() && !issued && !magic_wait && m.banks.iter().all(|b| b.idle(t + 1));
        if stuck || t >= opts.max_beats {
            return Err(SimError::Deadlock { beat: t, blocked: diagnose(&m, &ready, &waiting, t) });
        }
        t += 1;
    }

    let trace: Vec<TraceEvent> = trace.into_iter().map(|e| e.expect("all instructions issued")).collect();
    debug_assert!(m.sam.check().is_ok(), "{:?}", m.sam.check());
    let mut per_qubit_refs: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut magic_beats = Vec::new();
    for e in &trace {
        let ins = &p.instructions[e.index];
        for q in ins.mems() {
            per_qubit_refs.entry(q).or_default().push(e.issue);
        }
        if ins.op == Opcode::Pm {
            magic_beats.push(e.issue);
        }
    }
    for v in per_qubit_refs.values_mut() {
        v.sort_unstable();
    }
    magic_beats.sort_unstable();
    let n = p.len();
    Ok(RunResult {
        total_beats: last,
        instruction_count: n,
        cpi: (n > 0).then(|| last as f64 / n as f64),
        trace,
        per_qubit_refs,
        magic_beats,
        density: if layout.config.sam_kind == SamKind::Conventional {
            0.5
        } else {
            memory_density(layout, layout.qubit_count)
        },
        msf: m.msf,
    })
}

fn diagnose(m: &Machine, ready: &BTreeSet<usize>, waiting: &[usize], t: usize) -> Vec<String> {
    let mut out = Vec::new();
    for &i in ready.iter().take(5) {
        let why = match m.check(i, t) {
            Err(Blocked::Magic) => "waiting for a magic state (no factory output)".to_string(),
            Err(Blocked::Register) => "no free register".to_string(),
            Err(Blocked::Bank(b)) => format!("bank {b} busy"),
            Err(Blocked::Order(cx)) => format!("yields its register to older CX #{cx}"),
            Ok(()) => "issuable".to_string(),
        };
        out.push(format!("#{i} {}: {why}", m.p.instructions[i]));
    }
    let pending = waiting.iter().filter(|&&w| w > 0).count();
    if pending > 0 {
        out.push(format!("{pending} more waiting on dependencies"));
    }
    out
}

/// Places the program's qubits (identity order, or hotness order for the
/// conventional share) and runs it.
pub fn run_config(
    p: &Program,
    cfg: &LayoutConfig,
    qubits: usize,
    hotness: Option<&[u32]>,
    opts: &SimOptions,
) -> Result<RunResult, SimError> {
    let n = qubits.max(p.max_qubit()).max(1);
    let layout = build_layout(cfg, n)?;
    let map = assign_initial(&layout, n, hotness)?;
    run(p, &layout, &map, opts)
}

/// Conventional-floorplan reference: every qubit reachable without movement,
/// in-memory operations at register prices, unlimited parallelism.
pub fn run_baseline(p: &Program, qubits: usize, cfg: &LayoutConfig, opts: &SimOptions) -> Result<RunResult, SimError> {
    let cfg = LayoutConfig { sam_kind: SamKind::Conventional, ..cfg.clone() };
    run_config(p, &cfg, qubits, None, opts)
}
