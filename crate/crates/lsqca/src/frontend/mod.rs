//! Gate-level circuits: parsing, generators, Clifford+T lowering and LSQCA compilation.

mod compile;
mod generators;
mod lower;
mod parse;

pub use compile::{compile_to_lsqca, CompileError, CompilePolicy};
pub use generators::{gen_builtin, gen_select, Builtin, GenError, SelectInfo, MAX_QUBITS};
pub use lower::{lower_to_clifford_t, toffoli_decomposition};
pub use parse::{parse_gate_circuit, render_native, Format, GateParseError};

use std::fmt;

use crate::isa::Program;

/// Lowers Toffolis and compiles in one step.
pub fn compile(c: &GateCircuit, p: &CompilePolicy) -> Result<Program, CompileError> {
    compile_to_lsqca(&lower_to_clifford_t(c), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(u32),
    S(u32),
    Sdg(u32),
    X(u32),
    Y(u32),
    Z(u32),
    T(u32),
    Tdg(u32),
    Cnot(u32, u32),
    Toffoli(u32, u32, u32),
    MeasZ(u32, u32),
    MeasX(u32, u32),
    PrepZ(u32),
    PrepX(u32),
    /// S on the qubit if the classical slot reads 1.
    CondS(u32, u32),
}

impl Gate {
    pub fn qubits(&self) -> Vec<u32> {
        use Gate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) | T(q) | Tdg(q) | PrepZ(q) | PrepX(q) => {
                vec![q]
            }
            MeasZ(q, _) | MeasX(q, _) | CondS(q, _) => vec![q],
            Cnot(a, b) => vec![a, b],
            Toffoli(a, b, c) => vec![a, b, c],
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }
}

/// Register membership used by hybrid placement and locality analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    Control,
    Temporal,
    System,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Data => "data",
            Role::Control => "control",
            Role::Temporal => "temporal",
            Role::System => "system",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateCircuit {
    pub qubit_count: u32,
    pub gates: Vec<Gate>,
    /// Per-qubit role; empty when the source carries no metadata.
    pub roles: Vec<Role>,
}

impl GateCircuit {
    pub fn new(qubit_count: u32) -> Self {
        GateCircuit { qubit_count, gates: Vec::new(), roles: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn role(&self, q: u32) -> Role {
        self.roles.get(q as usize).copied().unwrap_or(Role::Data)
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_t()).count()
    }

    pub fn toffoli_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Toffoli(..))).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot(..))).count()
    }

    /// Checks index ranges and that every conditional reads an already written slot.
    pub fn validate(&self) -> Result<(), String> {
        let mut written = std::collections::HashSet::new();
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(q) = g.qubits().into_iter().find(|&q| q >= self.qubit_count) {
                return Err(format!("gate {i}: qubit {q} out of range"));
            }
            match *g {
                Gate::MeasZ(_, v) | Gate::MeasX(_, v) => {
                    written.insert(v);
                }
                Gate::CondS(_, v) if !written.contains(&v) => {
                    return Err(format!("gate {i}: slot {v} read before written"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
