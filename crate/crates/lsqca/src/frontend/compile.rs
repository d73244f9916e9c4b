use std::collections::HashMap;

use thiserror::Error;

use super::{Gate, GateCircuit};
use crate::isa::{Instruction, Opcode, Operand, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompilePolicy {
    /// H/S/Sdg become HD.M/PH.M instead of LD, op.C, ST.
    pub in_memory_single_qubit: bool,
    /// CNOT becomes one CX instead of a lattice-surgery sequence through the CR.
    pub cx_as_instruction: bool,
    /// T measures ZZ against memory directly instead of loading the target.
    pub t_gate_in_memory_zz: bool,
    /// Register cells the program may name.
    pub registers: u32,
}

impl Default for CompilePolicy {
    fn default() -> Self {
        CompilePolicy {
            in_memory_single_qubit: true,
            cx_as_instruction: true,
            t_gate_in_memory_zz: true,
            registers: 2,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("gate {index}: {gate:?} must be lowered first")]
    NotLowered { index: usize, gate: Gate },
    #[error("gate {index}: needs {need} live registers, policy allows {have}")]
    RegisterPressure { index: usize, need: u32, have: u32 },
    #[error("gate {index}: classical slot {slot} read before written")]
    UnwrittenSlot { index: usize, slot: u32 },
}

struct Emitter {
    out: Vec<Instruction>,
    next_v: u32,
    next_t: u32,
    regs: u32,
}

impl Emitter {
    fn emit(&mut self, op: Opcode, operands: Vec<Operand>) {
        self.out.push(Instruction::new(op, operands).expect("compiler emits well-formed instructions"));
    }

    fn fresh(&mut self) -> Operand {
        self.next_v += 1;
        Operand::V(self.next_v - 1)
    }

    /// Magic-state register for the next T gate; alternates so consecutive Ts overlap.
    fn t_reg(&mut self) -> u32 {
        self.next_t += 1;
        (self.next_t - 1) % self.regs
    }
}

pub fn compile_to_lsqca(c: &GateCircuit, p: &CompilePolicy) -> Result<Program, CompileError> {
    use Opcode::*;
    use Operand::{C, M};
    let mut e = Emitter { out: Vec::new(), next_v: 0, next_t: 0, regs: p.registers.max(1) };
    let mut slots: HashMap<u32, Operand> = HashMap::new();
    let need = |index: usize, n: u32| {
        if n > p.registers {
            Err(CompileError::RegisterPressure { index, need: n, have: p.registers })
        } else {
            Ok(())
        }
    };
    for (index, g) in c.gates.iter().enumerate() {
        match *g {
            Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => {
                let (mem_op, reg_op) = if matches!(g, Gate::H(_)) { (HdM, HdC) } else { (PhM, PhC) };
                if p.in_memory_single_qubit {
                    e.emit(mem_op, vec![M(q)]);
                } else {
                    need(index, 1)?;
                    e.emit(Ld, vec![M(q), C(0)]);
                    e.emit(reg_op, vec![C(0)]);
                    e.emit(St, vec![C(0), M(q)]);
                }
            }
            Gate::T(q) | Gate::Tdg(q) => {
                if p.t_gate_in_memory_zz {
                    need(index, 1)?;
                    let k = e.t_reg();
                    let v = e.fresh();
                    let w = e.fresh();
                    e.emit(Pm, vec![C(k)]);
                    e.emit(MzzM, vec![C(k), M(q), v]);
                    e.emit(MxC, vec![C(k), w]);
                    e.emit(Sk, vec![v]);
                    e.emit(PhM, vec![M(q)]);
                } else {
                    need(index, 2)?;
                    let (k, r) = (0, 1);
                    let v = e.fresh();
                    let w = e.fresh();
                    e.emit(Pm, vec![C(k)]);
                    e.emit(Ld, vec![M(q), C(r)]);
                    e.emit(MzzC, vec![C(k), C(r), v]);
                    e.emit(MxC, vec![C(k), w]);
                    e.emit(Sk, vec![v]);
                    e.emit(PhC, vec![C(r)]);
                    e.emit(St, vec![C(r), M(q)]);
                }
            }
            Gate::Cnot(a, b) => {
                if p.cx_as_instruction {
                    e.emit(Cx, vec![M(a), M(b)]);
                } else {
                    need(index, 2)?;
                    let (v1, v2, v3) = (e.fresh(), e.fresh(), e.fresh());
                    e.emit(Ld, vec![M(a), C(0)]);
                    e.emit(PpC, vec![C(1)]);
                    e.emit(MzzC, vec![C(0), C(1), v1]);
                    e.emit(MxxM, vec![C(1), M(b), v2]);
                    e.emit(MzC, vec![C(1), v3]);
                    e.emit(St, vec![C(0), M(a)]);
                }
            }
            Gate::MeasZ(q, s) | Gate::MeasX(q, s) => {
                let v = e.fresh();
                let op = if matches!(g, Gate::MeasZ(..)) { MzM } else { MxM };
                e.emit(op, vec![M(q), v]);
                slots.insert(s, v);
            }
            Gate::PrepZ(q) => e.emit(PzM, vec![M(q)]),
            Gate::PrepX(q) => e.emit(PpM, vec![M(q)]),
            Gate::CondS(q, s) => {
                let v = *slots.get(&s).ok_or(CompileError::UnwrittenSlot { index, slot: s })?;
                e.emit(Sk, vec![v]);
                e.emit(PhM, vec![M(q)]);
            }
            Gate::Toffoli(..) => return Err(CompileError::NotLowered { index, gate: *g }),
        }
    }
    Ok(Program::new(e.out))
}
