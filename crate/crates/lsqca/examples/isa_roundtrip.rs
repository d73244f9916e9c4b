//! Parse LSQCA assembly, inspect each instruction's latency class, and print
//! the program back out.
//!
//! ```bash
//! cargo run --example isa_roundtrip
//! ```

use lsqca::isa::{parse_program, render_program, Opcode};

const SRC: &str = "\
# one T gate applied in memory
PM C0
MZZ.M C0 M0 V0
MX.C C0 V1
SK V0
PH.M M0
";

fn main() {
    let p = parse_program(SRC).expect("valid assembly");
    for i in &p.instructions {
        println!("{:<18} {:?}", i.to_string(), i.latency());
    }
    println!(
        "{} instructions, {} memory qubits, {} registers, {} PM",
        p.len(),
        p.qubit_count(),
        p.register_count(),
        p.count(Opcode::Pm)
    );
    let text = render_program(&p);
    assert_eq!(parse_program(&text).unwrap(), p);
    print!("\n{text}");

    // Operand kinds are checked at parse time.
    println!("\n{}", parse_program("LD C0 M1").unwrap_err());
}
