//! Magic-state factories: a fixed production period feeding one pooled buffer.

/// Beats per magic state per factory.
pub const PERIOD: u32 = 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsfState {
    pub factories: u32,
    pub capacity: u32,
    pub stock: u32,
    /// Beats since the last production; factories run in phase.
    pub phase: u32,
    pub produced: u64,
    pub discarded: u64,
    pub granted: u64,
}

impl MsfState {
    pub fn new(factories: u32, capacity: u32, warm: bool) -> Self {
        MsfState {
            factories,
            capacity,
            stock: if warm { capacity } else { 0 },
            phase: 0,
            produced: 0,
            discarded: 0,
            granted: 0,
        }
    }

    /// Advances one beat. States made while the buffer is full are dropped.
    pub fn tick(&mut self) {
        self.phase += 1;
        if self.phase == PERIOD {
            self.phase = 0;
            for _ in 0..self.factories {
                self.produced += 1;
                if self.stock < self.capacity {
                    self.stock += 1;
                } else {
                    self.discarded += 1;
                }
            }
        }
    }

    /// Takes one state if available.
    pub fn request(&mut self) -> bool {
        if self.stock == 0 {
            return false;
        }
        self.stock -= 1;
        self.granted += 1;
        true
    }

    /// Initial stock (warm start) plus kept production equals grants plus stock.
    pub fn balanced(&self, initial: u32) -> bool {
        initial as u64 + self.produced - self.discarded == self.granted + self.stock as u64
    }
}
