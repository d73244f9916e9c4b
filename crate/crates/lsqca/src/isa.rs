//! Instruction set: opcodes, operands, assembly text and static latencies.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opcode {
    Ld,
    St,
    PzC,
    PpC,
    Pm,
    HdC,
    PhC,
    MxC,
    MzC,
    MxxC,
    MzzC,
    Sk,
    PzM,
    PpM,
    HdM,
    PhM,
    MxM,
    MzM,
    MxxM,
    MzzM,
    Cx,
}

/// Operand kind letter as it appears in the assembly syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    M,
    C,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    M(u32),
    C(u32),
    V(u32),
}

impl Operand {
    pub fn kind(self) -> Kind {
        match self {
            Operand::M(_) => Kind::M,
            Operand::C(_) => Kind::C,
            Operand::V(_) => Kind::V,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::M(i) => write!(f, "M{i}"),
            Operand::C(i) => write!(f, "C{i}"),
            Operand::V(i) => write!(f, "V{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatencyClass {
    Fixed(u32),
    Variable,
}

pub const ALL_OPCODES: [Opcode; 21] = [
    Opcode::Ld,
    Opcode::St,
    Opcode::PzC,
    Opcode::PpC,
    Opcode::Pm,
    Opcode::HdC,
    Opcode::PhC,
    Opcode::MxC,
    Opcode::MzC,
    Opcode::MxxC,
    Opcode::MzzC,
    Opcode::Sk,
    Opcode::PzM,
    Opcode::PpM,
    Opcode::HdM,
    Opcode::PhM,
    Opcode::MxM,
    Opcode::MzM,
    Opcode::MxxM,
    Opcode::MzzM,
    Opcode::Cx,
];

impl Opcode {
    pub fn mnemonic(self) -> &'static str {
        use Opcode::*;
        match self {
            Ld => "LD",
            St => "ST",
            PzC => "PZ.C",
            PpC => "PP.C",
            Pm => "PM",
            HdC => "HD.C",
            PhC => "PH.C",
            MxC => "MX.C",
            MzC => "MZ.C",
            MxxC => "MXX.C",
            MzzC => "MZZ.C",
            Sk => "SK",
            PzM => "PZ.M",
            PpM => "PP.M",
            HdM => "HD.M",
            PhM => "PH.M",
            MxM => "MX.M",
            MzM => "MZ.M",
            MxxM => "MXX.M",
            MzzM => "MZZ.M",
            Cx => "CX",
        }
    }

    pub fn signature(self) -> &'static [Kind] {
        use Kind::*;
        use Opcode::*;
        match self {
            Ld => &[M, C],
            St => &[C, M],
            PzC | PpC | Pm | HdC | PhC => &[C],
            MxC | MzC => &[C, V],
            MxxC | MzzC => &[C, C, V],
            Sk => &[V],
            PzM | PpM | HdM | PhM => &[M],
            MxM | MzM => &[M, V],
            MxxM | MzzM => &[C, M, V],
            Cx => &[M, M],
        }
    }

    /// Static latency in code beats. Movement-dependent opcodes are `Variable`.
    pub fn latency(self) -> LatencyClass {
        use Opcode::*;
        match self {
            HdC => LatencyClass::Fixed(3),
            PhC => LatencyClass::Fixed(2),
            MxxC | MzzC => LatencyClass::Fixed(1),
            PzC | PpC | MxC | MzC | MxM | MzM | PzM | PpM => LatencyClass::Fixed(0),
            Ld | St | Pm | Sk | HdM | PhM | MxxM | MzzM | Cx => LatencyClass::Variable,
        }
    }

    /// True for opcodes that write a classical value.
    pub fn is_measurement(self) -> bool {
        matches!(
            self,
            Opcode::MxC | Opcode::MzC | Opcode::MxxC | Opcode::MzzC | Opcode::MxM | Opcode::MzM
                | Opcode::MxxM | Opcode::MzzM
        )
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for Opcode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        ALL_OPCODES
            .iter()
            .copied()
            .find(|o| o.mnemonic() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub op: Opcode,
    pub operands: Vec<Operand>,
}

impl Instruction {
    /// Builds an instruction, checking operand kinds against the signature.
    pub fn new(op: Opcode, operands: Vec<Operand>) -> Result<Self, String> {
        let sig = op.signature();
        if sig.len() != operands.len() {
            return Err(format!(
                "{op} takes {} operands, got {}",
                sig.len(),
                operands.len()
            ));
        }
        for (i, (k, o)) in sig.iter().zip(&operands).enumerate() {
            if *k != o.kind() {
                return Err(format!("{op} operand {} must be {:?}, got {o}", i + 1, k));
            }
        }
        Ok(Instruction { op, operands })
    }

    pub fn mems(&self) -> impl Iterator<Item = u32> + '_ {
        self.operands.iter().filter_map(|o| match o {
            Operand::M(i) => Some(*i),
            _ => None,
        })
    }

    pub fn regs(&self) -> impl Iterator<Item = u32> + '_ {
        self.operands.iter().filter_map(|o| match o {
            Operand::C(i) => Some(*i),
            _ => None,
        })
    }

    pub fn vals(&self) -> impl Iterator<Item = u32> + '_ {
        self.operands.iter().filter_map(|o| match o {
            Operand::V(i) => Some(*i),
            _ => None,
        })
    }

    pub fn latency(&self) -> LatencyClass {
        self.op.latency()
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.op.mnemonic())?;
        for o in &self.operands {
            write!(f, " {o}")?;
        }
        Ok(())
    }
}

pub fn nominal_latency(i: &Instruction) -> LatencyClass {
    i.op.latency()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Program { instructions }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    fn distinct(&self, f: impl Fn(&Instruction) -> Vec<u32>) -> usize {
        self.instructions
            .iter()
            .flat_map(f)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn qubit_count(&self) -> usize {
        self.distinct(|i| i.mems().collect())
    }

    pub fn register_count(&self) -> usize {
        self.distinct(|i| i.regs().collect())
    }

    pub fn classical_count(&self) -> usize {
        self.distinct(|i| i.vals().collect())
    }

    /// One past the largest M index used; memory must have at least this many slots.
    pub fn max_qubit(&self) -> usize {
        self.instructions
            .iter()
            .flat_map(|i| i.mems())
            .max()
            .map_or(0, |m| m as usize + 1)
    }

    pub fn count(&self, op: Opcode) -> usize {
        self.instructions.iter().filter(|i| i.op == op).count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown opcode `{name}`")]
    UnknownOpcode { line: usize, name: String },
    #[error("line {line}: {msg}")]
    Operands { line: usize, msg: String },
    #[error("line {line}: malformed operand `{token}`")]
    BadOperand { line: usize, token: String },
    #[error("line {line}: V{value} read by SK before any measurement writes it")]
    UnwrittenValue { line: usize, value: u32 },
}

fn parse_operand(tok: &str) -> Option<Operand> {
    let mut chars = tok.chars();
    let prefix = chars.next()?;
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u32 = digits.parse().ok()?;
    match prefix {
        'M' => Some(Operand::M(n)),
        'C' => Some(Operand::C(n)),
        'V' => Some(Operand::V(n)),
        _ => None,
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut out = Vec::new();
    let mut written = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(name) = toks.next() else { continue };
        let op: Opcode = name.parse().map_err(|_| ParseError::UnknownOpcode {
            line,
            name: name.to_string(),
        })?;
        let operands = toks
            .map(|t| {
                parse_operand(t).ok_or_else(|| ParseError::BadOperand {
                    line,
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ins = Instruction::new(op, operands).map_err(|msg| ParseError::Operands { line, msg })?;
        if ins.op == Opcode::Sk {
            let v = ins.vals().next().unwrap();
            if !written.contains(&v) {
                return Err(ParseError::UnwrittenValue { line, value: v });
            }
        } else if ins.op.is_measurement() {
            written.extend(ins.vals());
        }
        out.push(ins);
    }
    Ok(Program::new(out))
}

pub fn render_program(p: &Program) -> String {
    let mut s = String::new();
    for i in &p.instructions {
        s.push_str(&i.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn latency_table_is_total() {
        let fixed: &[(Opcode, u32)] = &[
            (Opcode::HdC, 3),
            (Opcode::PhC, 2),
            (Opcode::MxxC, 1),
            (Opcode::MzzC, 1),
            (Opcode::PzC, 0),
            (Opcode::PpC, 0),
            (Opcode::MxC, 0),
            (Opcode::MzC, 0),
            (Opcode::MxM, 0),
            (Opcode::MzM, 0),
            (Opcode::PzM, 0),
            (Opcode::PpM, 0),
        ];
        for op in ALL_OPCODES {
            let want = fixed
                .iter()
                .find(|(o, _)| *o == op)
                .map_or(LatencyClass::Variable, |(_, b)| LatencyClass::Fixed(*b));
            assert_eq!(op.latency(), want, "{op}");
        }
    }

    #[test]
    fn parses_examples() {
        let p = parse_program("HD.C C0").unwrap();
        assert_eq!(p.instructions[0], Instruction::new(Opcode::HdC, vec![Operand::C(0)]).unwrap());
        let p = parse_program("MZZ.M C0 M5 V2").unwrap();
        assert_eq!(
            p.instructions[0].operands,
            vec![Operand::C(0), Operand::M(5), Operand::V(2)]
        );
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn reports_errors_with_lines() {
        assert_eq!(
            parse_program("LD M0 C0\nFOO C1").unwrap_err(),
            ParseError::UnknownOpcode { line: 2, name: "FOO".into() }
        );
        assert!(matches!(
            parse_program("MZZ.C C0 V1").unwrap_err(),
            ParseError::Operands { line: 1, .. }
        ));
        assert!(matches!(
            parse_program("LD M0 Cx").unwrap_err(),
            ParseError::BadOperand { line: 1, .. }
        ));
        assert!(matches!(
            parse_program("LD M-1 C0").unwrap_err(),
            ParseError::BadOperand { .. }
        ));
        assert_eq!(
            parse_program("SK V3").unwrap_err(),
            ParseError::UnwrittenValue { line: 1, value: 3 }
        );
    }

    #[test]
    fn renders_single_load() {
        let p = Program::new(vec![
            Instruction::new(Opcode::Ld, vec![Operand::M(0), Operand::C(0)]).unwrap(),
        ]);
        assert_eq!(render_program(&p), "LD M0 C0\n");
        assert_eq!(render_program(&Program::default()), "");
    }

    #[test]
    fn counts() {
        let p = parse_program("PM C0\nMZZ.M C0 M3 V0\nMX.C C0 V1\nSK V0\nPH.M M3\nCX M3 M1").unwrap();
        assert_eq!(p.qubit_count(), 2);
        assert_eq!(p.register_count(), 1);
        assert_eq!(p.classical_count(), 2);
        assert_eq!(p.max_qubit(), 4);
    }

    fn arb_instruction(vmax: u32) -> impl Strategy<Value = Instruction> {
        (0..ALL_OPCODES.len(), prop::collection::vec(0u32..50, 3)).prop_map(move |(k, ix)| {
            let op = ALL_OPCODES[k];
            let ops = op
                .signature()
                .iter()
                .zip(ix)
                .map(|(kind, i)| match kind {
                    Kind::M => Operand::M(i),
                    Kind::C => Operand::C(i % 4),
                    Kind::V => Operand::V(i % vmax.max(1)),
                })
                .collect();
            Instruction::new(op, ops).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip(body in prop::collection::vec(arb_instruction(8), 0..60)) {
            // Seed every V so SK reads are always preceded by a write.
            let mut ins: Vec<Instruction> = (0..8)
                .map(|v| Instruction::new(Opcode::MzM, vec![Operand::M(0), Operand::V(v)]).unwrap())
                .collect();
            ins.extend(body);
            let p = Program::new(ins);
            prop_assert_eq!(parse_program(&render_program(&p)).unwrap(), p);
        }
    }
}
