//! Compile an OpenQASM circuit (with a Toffoli) down to LSQCA instructions.
//!
//! ```bash
//! cargo run --example compile_circuit
//! ```

use lsqca::frontend::{compile, lower_to_clifford_t, parse_gate_circuit, CompilePolicy, Format};
use lsqca::isa::{render_program, Opcode};

const QASM: &str = r#"
OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
h q[0];
cx q[0], q[1];
ccx q[0], q[1], q[2];
t q[2];
measure q[0] -> c[0];
measure q[1] -> c[1];
measure q[2] -> c[2];
"#;

fn main() {
    let c = parse_gate_circuit(QASM, Format::Qasm).expect("parses");
    let lowered = lower_to_clifford_t(&c);
    println!("{} gates, {} Toffoli -> {} gates, T-count {}", c.gates.len(), c.toffoli_count(), lowered.gates.len(), lowered.t_count());

    let p = compile(&c, &CompilePolicy::default()).expect("compiles");
    println!("{} instructions, {} magic states\n", p.len(), p.count(Opcode::Pm));
    print!("{}", render_program(&p));

    // Register-based lowering: single-qubit gates go through LD/ST.
    let reg = CompilePolicy { in_memory_single_qubit: false, ..CompilePolicy::default() };
    let q = compile(&c, &reg).unwrap();
    println!("\nregister lowering: {} instructions ({} LD)", q.len(), q.count(Opcode::Ld));
}
