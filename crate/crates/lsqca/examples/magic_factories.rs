//! Magic-state supply: production rate, buffering and discard.
//!
//! ```bash
//! cargo run --example magic_factories
//! ```

use lsqca::msf::{MsfState, PERIOD};

fn main() {
    println!("one state per factory every {PERIOD} beats");
    for factories in [1, 2, 4] {
        let mut m = MsfState::new(factories, factories, false);
        let mut got = 0;
        for _ in 0..1500 {
            m.tick();
            if m.request() {
                got += 1;
            }
        }
        println!("  {factories} factories, greedy consumer, 1500 beats: {got} states");
    }

    // Idle consumer: the buffer fills and extra output is discarded.
    let mut m = MsfState::new(2, 3, false);
    for _ in 0..150 {
        m.tick();
    }
    println!("idle: produced {} stock {} discarded {}", m.produced, m.stock, m.discarded);
    assert!(m.balanced(0));
}
