//! Beat-accurate run of a small program on a point SAM, with its trace.
//!
//! ```bash
//! cargo run --example simulate_program
//! ```

use lsqca::floorplan::LayoutConfig;
use lsqca::isa::parse_program;
use lsqca::sim::{run_config, SimError, SimOptions};

fn main() {
    let p = parse_program(
        "HD.M M0\nCX M0 M1\nPM C0\nMZZ.M C0 M2 V0\nMX.C C0 V1\nSK V0\nPH.M M2\nMZ.M M1 V2\n",
    )
    .unwrap();
    let cfg = LayoutConfig::default();
    let r = run_config(&p, &cfg, 4, None, &SimOptions::default()).unwrap();
    print!("{}", r.summary());
    println!("\nissue retire instruction holds");
    print!("{}", r.trace_text(&p));

    // Without a factory the PM can never issue.
    let dry = LayoutConfig { factories: 0, ..cfg };
    match run_config(&p, &dry, 4, None, &SimOptions::default()) {
        Err(e @ SimError::Deadlock { .. }) => println!("\n{e}"),
        other => println!("unexpected: {other:?}"),
    }
}
