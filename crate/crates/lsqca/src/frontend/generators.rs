use thiserror::Error;

use super::{Gate, GateCircuit, Role};

/// Generated circuits must stay below this many qubits.
pub const MAX_QUBITS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Ghz,
    Cat,
    /// Bernstein–Vazirani with the all-ones secret.
    Bv,
    /// Cuccaro ripple-carry adder on two `size`-bit operands.
    Adder,
}

impl std::str::FromStr for Builtin {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ghz" => Ok(Builtin::Ghz),
            "cat" => Ok(Builtin::Cat),
            "bv" => Ok(Builtin::Bv),
            "adder" => Ok(Builtin::Adder),
            _ => Err(format!("unknown generator `{s}`")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("size {size} out of range for {kind}")]
    Size { kind: &'static str, size: u64 },
}

fn check(kind: &'static str, size: u64, min: u64, qubits: u64) -> Result<(), GenError> {
    if size < min || qubits >= MAX_QUBITS {
        Err(GenError::Size { kind, size })
    } else {
        Ok(())
    }
}

pub fn gen_builtin(kind: Builtin, size: u64) -> Result<GateCircuit, GenError> {
    match kind {
        Builtin::Ghz => {
            check("ghz", size, 1, size)?;
            let n = size as u32;
            let mut c = GateCircuit::new(n);
            c.push(Gate::H(0));
            for q in 1..n {
                c.push(Gate::Cnot(q - 1, q));
            }
            for q in 0..n {
                c.push(Gate::MeasZ(q, q));
            }
            Ok(c)
        }
        Builtin::Cat => {
            check("cat", size, 1, size)?;
            let n = size as u32;
            let mut c = GateCircuit::new(n);
            c.push(Gate::H(0));
            for q in 1..n {
                c.push(Gate::Cnot(0, q));
            }
            for q in 0..n {
                c.push(Gate::MeasZ(q, q));
            }
            Ok(c)
        }
        Builtin::Bv => {
            check("bv", size, 1, size + 1)?;
            Ok(bernstein_vazirani(&vec![true; size as usize]))
        }
        Builtin::Adder => {
            check("adder", size, 1, 2 * size + 2)?;
            Ok(cuccaro(size as u32))
        }
    }
}

pub(crate) fn bernstein_vazirani(secret: &[bool]) -> GateCircuit {
    let n = secret.len() as u32;
    let anc = n;
    let mut c = GateCircuit::new(n + 1);
    c.push(Gate::X(anc)).push(Gate::H(anc));
    for q in 0..n {
        c.push(Gate::H(q));
    }
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.push(Gate::Cnot(q as u32, anc));
        }
    }
    for q in 0..n {
        c.push(Gate::H(q));
    }
    for q in 0..n {
        c.push(Gate::MeasZ(q, q));
    }
    c
}

// Layout: [cin, a0, b0, a1, b1, ..., z]. Sum lands in b, carry in z.
fn cuccaro(n: u32) -> GateCircuit {
    let a = |i: u32| 1 + 2 * i;
    let b = |i: u32| 2 + 2 * i;
    let z = 2 * n + 1;
    let mut c = GateCircuit::new(2 * n + 2);
    let maj = |c: &mut GateCircuit, x: u32, y: u32, w: u32| {
        c.push(Gate::Cnot(w, y)).push(Gate::Cnot(w, x)).push(Gate::Toffoli(x, y, w));
    };
    let uma = |c: &mut GateCircuit, x: u32, y: u32, w: u32| {
        c.push(Gate::Toffoli(x, y, w)).push(Gate::Cnot(w, x)).push(Gate::Cnot(x, y));
    };
    let carry = |i: u32| if i == 0 { 0 } else { a(i - 1) };
    for i in 0..n {
        maj(&mut c, carry(i), b(i), a(i));
    }
    c.push(Gate::Cnot(a(n - 1), z));
    for i in (0..n).rev() {
        uma(&mut c, carry(i), b(i), a(i));
    }
    for i in 0..n {
        c.push(Gate::MeasZ(b(i), i));
    }
    c.push(Gate::MeasZ(z, n));
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectInfo {
    pub terms: usize,
    pub control: u32,
    pub temporal: u32,
    pub system: u32,
}

#[derive(Clone, Copy)]
enum Pauli {
    X,
    Y,
    Z,
}

/// SELECT over the 2D Heisenberg model on a `w`×`w` open grid.
///
/// Unary iteration: the control register (MSB first) is ANDed down a Toffoli
/// ladder into the temporal register; consecutive indices only rebuild the
/// ladder below their first differing bit.
pub fn gen_select(w: u32) -> Result<(GateCircuit, SelectInfo), GenError> {
    let w64 = w as u64;
    check("select", w64, 2, w64 * w64 + 64)?;
    let site = |r: u32, c: u32| r * w + c;
    let mut bonds = Vec::new();
    for r in 0..w {
        for c in 0..w {
            if c + 1 < w {
                bonds.push((site(r, c), site(r, c + 1)));
            }
            if r + 1 < w {
                bonds.push((site(r, c), site(r + 1, c)));
            }
        }
    }
    let terms: Vec<(Pauli, u32, u32)> = bonds
        .iter()
        .flat_map(|&(u, v)| [(Pauli::X, u, v), (Pauli::Y, u, v), (Pauli::Z, u, v)])
        .collect();
    let l = terms.len();
    let k = usize::BITS - (l - 1).leading_zeros();
    let ctrl = |j: u32| j;
    let anc = |j: u32| k + j - 1; // a_j for j in 1..k
    let sys0 = k + k - 1;
    let n = sys0 + w * w;
    let mut c = GateCircuit::new(n);
    c.roles = (0..n)
        .map(|q| {
            if q < k {
                Role::Control
            } else if q < sys0 {
                Role::Temporal
            } else {
                Role::System
            }
        })
        .collect();

    let bit = |i: usize, j: u32| (i >> (k - 1 - j)) & 1 == 1;
    let link = |c: &mut GateCircuit, j: u32| {
        let prev = if j == 1 { ctrl(0) } else { anc(j - 1) };
        c.push(Gate::Toffoli(prev, ctrl(j), anc(j)));
    };
    let mut flipped = vec![false; k as usize];
    let mut prev: Option<usize> = None;
    for (i, &(p, u, v)) in terms.iter().enumerate() {
        let first_diff = match prev {
            None => 0,
            Some(pi) => (0..k).find(|&j| bit(pi, j) != bit(i, j)).unwrap_or(k),
        };
        let from = first_diff.max(1);
        if prev.is_some() {
            for j in (from..k).rev() {
                link(&mut c, j);
            }
        }
        for j in first_diff..k {
            let want = !bit(i, j);
            if flipped[j as usize] != want {
                c.push(Gate::X(ctrl(j)));
                flipped[j as usize] = want;
            }
        }
        for j in from..k {
            link(&mut c, j);
        }
        let a = anc(k - 1);
        for q in [sys0 + u, sys0 + v] {
            match p {
                Pauli::X => {
                    c.push(Gate::Cnot(a, q));
                }
                Pauli::Y => {
                    c.push(Gate::Sdg(q)).push(Gate::Cnot(a, q)).push(Gate::S(q));
                }
                Pauli::Z => {
                    c.push(Gate::H(q)).push(Gate::Cnot(a, q)).push(Gate::H(q));
                }
            }
        }
        prev = Some(i);
    }
    for j in (1..k).rev() {
        link(&mut c, j);
    }
    for j in 0..k {
        if flipped[j as usize] {
            c.push(Gate::X(ctrl(j)));
        }
    }
    let info = SelectInfo { terms: l, control: k, temporal: k - 1, system: w * w };
    Ok((c, info))
}
