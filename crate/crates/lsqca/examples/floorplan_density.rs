//! Memory density of the three floorplans and of hybrid splits.
//!
//! ```bash
//! cargo run --example floorplan_density
//! ```

use lsqca::floorplan::{build_layout, memory_density, LayoutConfig, SamKind};

fn main() {
    println!("{:>6} {:>13} {:>6} {:>8}", "n", "kind", "cells", "density");
    for n in [16, 64, 400] {
        for kind in [SamKind::Conventional, SamKind::Point, SamKind::Line] {
            let cfg = LayoutConfig { sam_kind: kind, ..Default::default() };
            let l = build_layout(&cfg, n).unwrap();
            println!("{n:>6} {:>13} {:>6} {:>8.4}", kind.to_string(), l.total_cells(), memory_density(&l, n));
        }
    }

    println!("\npoint SAM, 400 qubits, hybrid fraction f:");
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let cfg = LayoutConfig { hybrid_fraction: f, ..Default::default() };
        let l = build_layout(&cfg, 400).unwrap();
        println!("  f={f:.2}  cells {:>4}  density {:.4}", l.total_cells(), memory_density(&l, 400));
    }

    let cfg = LayoutConfig { sam_kind: SamKind::Line, banks: 2, ..Default::default() };
    print!("\n{}", build_layout(&cfg, 20).unwrap().describe());
}
