//! Reference locality of SELECT: control and temporal qubits are touched far
//! more often than system qubits.
//!
//! ```bash
//! cargo run --release --example locality
//! ```

use lsqca::analysis::{median, period_cdf, reference_trace};
use lsqca::floorplan::LayoutConfig;
use lsqca::frontend::{compile, gen_select, CompilePolicy, Role};
use lsqca::sim::{run_config, SimOptions};

fn main() {
    let (c, info) = gen_select(4).unwrap();
    let p = compile(&c, &CompilePolicy::default()).unwrap();
    let r = run_config(&p, &LayoutConfig::default(), c.qubit_count as usize, None, &SimOptions::default()).unwrap();
    let t = reference_trace(&r);
    println!("SELECT(4) on point SAM: {} terms, {} beats", info.terms, r.total_beats);
    for role in [Role::Control, Role::Temporal, Role::System] {
        let qs: Vec<u32> = (0..c.qubit_count).filter(|&q| c.role(q) == role).collect();
        let periods = t.periods_of(qs.iter().copied());
        println!(
            "  {role:<8} {:>3} qubits  {:>6} references  median period {:?}",
            qs.len(),
            periods.len() + qs.len(),
            median(&periods)
        );
    }
    println!("  magic-state interval {:?}", t.magic_interval());
    let cdf = period_cdf(&t.all_periods());
    for (period, frac) in cdf.iter().filter(|(p, _)| p.is_power_of_two()) {
        println!("  P(period <= {period:>4}) = {frac:.3}");
    }
}
