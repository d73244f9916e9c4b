//! Sweep the fraction of hot qubits kept in conventional memory and write
//! the density/overhead curve as CSV.
//!
//! ```bash
//! cargo run --release --example hybrid_sweep
//! ```

use lsqca::analysis::{f_grid, sweep_hybrid, write_sweep_csv};
use lsqca::floorplan::{LayoutConfig, SamKind};
use lsqca::frontend::{compile, gen_builtin, Builtin, CompilePolicy};
use lsqca::sim::SimOptions;

fn main() {
    let c = gen_builtin(Builtin::Adder, 4).unwrap();
    let p = compile(&c, &CompilePolicy::default()).unwrap();
    let cfg = LayoutConfig { sam_kind: SamKind::Line, factories: 2, ..Default::default() };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let curve = sweep_hybrid(&p, c.qubit_count as usize, &cfg, &f_grid(), &SimOptions::default(), threads).unwrap();
    println!("# baseline {} beats", curve.baseline_beats);
    write_sweep_csv(&curve, std::io::stdout()).unwrap();
}
