//! Dense state-vector reference for small gate circuits.

use lsqca::frontend::Gate;
use num_complex::Complex64 as C;

pub struct State {
    pub n: u32,
    pub amp: Vec<C>,
}

impl State {
    pub fn basis(n: u32, index: usize) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        amp[index] = C::new(1.0, 0.0);
        State { n, amp }
    }

    fn one(&mut self, q: u32, m: [[C; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a, b) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn controlled_x(&mut self, controls: &[u32], t: u32) {
        let mask: usize = controls.iter().map(|c| 1usize << c).sum();
        let bit = 1usize << t;
        for i in 0..self.amp.len() {
            if i & mask == mask && i & bit == 0 {
                self.amp.swap(i, i | bit);
            }
        }
    }

    /// Applies a unitary gate; measurement-type gates panic.
    pub fn apply(&mut self, g: &Gate) {
        let z = C::new(0.0, 0.0);
        let o = C::new(1.0, 0.0);
        let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let phase = |theta: f64| [[o, z], [z, C::from_polar(1.0, theta)]];
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        match *g {
            Gate::H(q) => self.one(q, [[h, h], [h, -h]]),
            Gate::S(q) => self.one(q, phase(FRAC_PI_2)),
            Gate::Sdg(q) => self.one(q, phase(-FRAC_PI_2)),
            Gate::T(q) => self.one(q, phase(FRAC_PI_4)),
            Gate::Tdg(q) => self.one(q, phase(-FRAC_PI_4)),
            Gate::X(q) => self.one(q, [[z, o], [o, z]]),
            Gate::Y(q) => self.one(q, [[z, C::new(0.0, -1.0)], [C::new(0.0, 1.0), z]]),
            Gate::Z(q) => self.one(q, [[o, z], [z, -o]]),
            Gate::Cnot(c, t) => self.controlled_x(&[c], t),
            Gate::Toffoli(a, b, t) => self.controlled_x(&[a, b], t),
            ref other => panic!("non-unitary gate {other:?}"),
        }
    }

    /// |<self|other>| for states of equal size.
    pub fn overlap(&self, other: &State) -> f64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum::<C>().norm()
    }

    /// Index of the single basis state with probability ~1, if any.
    pub fn classical(&self) -> Option<usize> {
        self.amp.iter().position(|a| a.norm_sqr() > 1.0 - 1e-9)
    }
}

/// Column `j` of the unitary of `gates` acting on `n` qubits.
pub fn column(n: u32, gates: &[Gate], j: usize) -> State {
    let mut s = State::basis(n, j);
    for g in gates {
        s.apply(g);
    }
    s
}

/// Unitary part of a circuit (measurements and preparations dropped).
pub fn unitary_gates(gates: &[Gate]) -> Vec<Gate> {
    gates
        .iter()
        .copied()
        .filter(|g| !matches!(g, Gate::MeasZ(..) | Gate::MeasX(..) | Gate::PrepZ(_) | Gate::PrepX(_) | Gate::CondS(..)))
        .collect()
}

impl State {
    pub fn inner(&self, other: &State) -> C {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }
}
