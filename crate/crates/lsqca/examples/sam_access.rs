//! Load and store qubits in point and line SAM banks and watch the cost.
//!
//! ```bash
//! cargo run --example sam_access
//! ```

use lsqca::floorplan::{assign_initial, build_layout, LayoutConfig, SamKind};
use lsqca::sam::{SamState, StorePolicy};

fn main() {
    for kind in [SamKind::Point, SamKind::Line] {
        let cfg = LayoutConfig { sam_kind: kind, ..Default::default() };
        let n = 36;
        let layout = build_layout(&cfg, n).unwrap();
        let map = assign_initial(&layout, n, None).unwrap();
        let mut sam = SamState::new(&layout, &map);
        println!("{kind} SAM, {n} qubits");
        let worst = (0..n as u32).map(|q| sam.load_cost(q).unwrap()).max().unwrap();
        println!("  worst initial load: {worst} beats");
        for q in [0, 17, 35, 17] {
            let before = sam.location(q);
            let ld = sam.load(q).unwrap();
            let st = sam.store(q, StorePolicy::LocalityAware, None).unwrap();
            sam.check().unwrap();
            println!(
                "  q{q:<2} {before:?} -> load {} beats, store {} beats, now {:?}",
                ld.beats,
                st.beats,
                sam.location(q).unwrap()
            );
        }
    }
}
