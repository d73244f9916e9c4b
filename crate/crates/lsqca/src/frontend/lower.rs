use super::{Gate, GateCircuit};

/// The textbook 7-T Toffoli: 6 CNOT, 2 H, T/Tdg on all three wires.
pub fn toffoli_decomposition(a: u32, b: u32, t: u32) -> [Gate; 15] {
    use Gate::*;
    [
        H(t),
        Cnot(b, t),
        Tdg(t),
        Cnot(a, t),
        T(t),
        Cnot(b, t),
        Tdg(t),
        Cnot(a, t),
        T(b),
        T(t),
        H(t),
        Cnot(a, b),
        T(a),
        Tdg(b),
        Cnot(a, b),
    ]
}

/// Expands Toffolis; every other gate passes through unchanged and in order.
pub fn lower_to_clifford_t(c: &GateCircuit) -> GateCircuit {
    let mut out = GateCircuit {
        qubit_count: c.qubit_count,
        gates: Vec::with_capacity(c.gates.len() + 14 * c.toffoli_count()),
        roles: c.roles.clone(),
    };
    for g in &c.gates {
        match *g {
            Gate::Toffoli(a, b, t) => out.gates.extend(toffoli_decomposition(a, b, t)),
            other => out.gates.push(other),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{gen_builtin, gen_select, Builtin};

    #[test]
    fn single_toffoli_counts() {
        let mut c = GateCircuit::new(3);
        c.push(Gate::Toffoli(0, 1, 2));
        let l = lower_to_clifford_t(&c);
        assert_eq!(l.t_count(), 7);
        assert_eq!(l.cnot_count(), 6);
        assert_eq!(l.gates.iter().filter(|g| matches!(g, Gate::H(_))).count(), 2);
        assert_eq!(l.toffoli_count(), 0);
    }

    #[test]
    fn identity_without_toffoli() {
        let c = gen_builtin(Builtin::Ghz, 5).unwrap();
        assert_eq!(lower_to_clifford_t(&c), c);
    }

    #[test]
    fn t_count_is_seven_per_toffoli() {
        let (c, _) = gen_select(2).unwrap();
        assert_eq!(lower_to_clifford_t(&c).t_count(), 7 * c.toffoli_count());
        let a = gen_builtin(Builtin::Adder, 4).unwrap();
        assert_eq!(lower_to_clifford_t(&a).t_count(), 7 * a.toffoli_count());
    }
}
