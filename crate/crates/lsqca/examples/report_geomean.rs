//! Aggregate per-benchmark overheads into a geometric-mean summary, the way
//! `lsqca report` does.
//!
//! ```bash
//! cargo run --release --example report_geomean
//! ```

use lsqca::analysis::{geomean_overhead, overhead};
use lsqca::floorplan::LayoutConfig;
use lsqca::frontend::{compile, gen_builtin, Builtin, CompilePolicy};
use lsqca::sim::{run_baseline, run_config, SimOptions};

fn main() {
    let opts = SimOptions::default();
    let cfg = LayoutConfig { factories: 2, ..Default::default() };
    let mut all = Vec::new();
    println!("name,beats,baseline_beats,overhead");
    for (b, size) in [(Builtin::Ghz, 24), (Builtin::Cat, 24), (Builtin::Bv, 24), (Builtin::Adder, 3)] {
        let c = gen_builtin(b, size).unwrap();
        let p = compile(&c, &CompilePolicy::default()).unwrap();
        let n = c.qubit_count as usize;
        let base = run_baseline(&p, n, &cfg, &opts).unwrap().total_beats;
        let beats = run_config(&p, &cfg, n, None, &opts).unwrap().total_beats;
        let o = overhead(beats, base);
        all.push(o);
        println!("{:?}-{size},{beats},{base},{o:.6}", b);
    }
    println!("GEOMEAN,,,{:.6}", geomean_overhead(&all).unwrap());
}
