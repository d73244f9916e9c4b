//! Execution-time overhead of SAM floorplans against the conventional
//! baseline for the built-in benchmarks.
//!
//! ```bash
//! cargo run --release --example baseline_vs_sam
//! ```

use lsqca::analysis::overhead;
use lsqca::floorplan::{LayoutConfig, SamKind};
use lsqca::frontend::{compile, gen_builtin, gen_select, Builtin, CompilePolicy};
use lsqca::sim::{run_baseline, run_config, SimOptions};

fn main() {
    let mut benches = vec![
        ("ghz-32", gen_builtin(Builtin::Ghz, 32).unwrap()),
        ("bv-32", gen_builtin(Builtin::Bv, 32).unwrap()),
        ("adder-4", gen_builtin(Builtin::Adder, 4).unwrap()),
    ];
    benches.push(("select-3", gen_select(3).unwrap().0));
    let opts = SimOptions::default();
    println!("{:<10} {:>3} {:>9} {:>9} {:>9}", "bench", "msf", "baseline", "point", "line");
    for (name, c) in &benches {
        let p = compile(c, &CompilePolicy::default()).unwrap();
        let n = c.qubit_count as usize;
        for factories in [1, 4] {
            let cfg = LayoutConfig { factories, ..Default::default() };
            let base = run_baseline(&p, n, &cfg, &opts).unwrap().total_beats;
            let cost = |kind| {
                let b = run_config(&p, &LayoutConfig { sam_kind: kind, ..cfg.clone() }, n, None, &opts)
                    .unwrap()
                    .total_beats;
                format!("{:+.0}%", 100.0 * overhead(b, base))
            };
            println!("{name:<10} {factories:>3} {base:>9} {:>9} {:>9}", cost(SamKind::Point), cost(SamKind::Line));
        }
    }
}
