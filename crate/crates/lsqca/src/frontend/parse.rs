use std::collections::HashMap;

use thiserror::Error;

use super::{Gate, GateCircuit, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// OpenQASM 2 subset.
    Qasm,
    /// Line-per-gate `.gc` text.
    Native,
}

impl Format {
    pub fn from_path(p: &std::path::Path) -> Option<Format> {
        match p.extension()?.to_str()? {
            "qasm" => Some(Format::Qasm),
            "gc" => Some(Format::Native),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GateParseError {
    #[error("line {line}: unsupported gate `{name}`")]
    Unsupported { line: usize, name: String },
    #[error("line {line}: register `{name}` declared twice")]
    Redeclared { line: usize, name: String },
    #[error("line {line}: index out of range in `{arg}`")]
    OutOfRange { line: usize, arg: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> GateParseError {
    GateParseError::Syntax { line, msg: msg.into() }
}

pub fn parse_gate_circuit(text: &str, format: Format) -> Result<GateCircuit, GateParseError> {
    match format {
        Format::Qasm => parse_qasm(text),
        Format::Native => parse_native(text),
    }
}

/// `;`-terminated statements with the line each one starts on. `//` comments dropped.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if cur.trim().is_empty() {
                start = i + 1;
            }
            if ch == ';' {
                out.push((start, cur.trim().to_string()));
                cur.clear();
            } else {
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        out.push((start, cur.trim().to_string()));
    }
    out
}

struct Regs {
    q: HashMap<String, (u32, u32)>,
    c: HashMap<String, (u32, u32)>,
    nq: u32,
    nc: u32,
}

impl Regs {
    fn resolve(
        map: &HashMap<String, (u32, u32)>,
        line: usize,
        arg: &str,
    ) -> Result<u32, GateParseError> {
        let arg = arg.trim();
        let (name, idx) = match arg.find('[') {
            Some(b) => {
                let close = arg.rfind(']').ok_or_else(|| syntax(line, format!("bad operand `{arg}`")))?;
                let idx: u32 = arg[b + 1..close]
                    .trim()
                    .parse()
                    .map_err(|_| syntax(line, format!("bad index in `{arg}`")))?;
                (arg[..b].trim(), Some(idx))
            }
            None => (arg, None),
        };
        let &(base, size) = map
            .get(name)
            .ok_or_else(|| syntax(line, format!("undeclared register `{name}`")))?;
        match idx {
            Some(i) if i < size => Ok(base + i),
            Some(_) => Err(GateParseError::OutOfRange { line, arg: arg.to_string() }),
            None if size == 1 => Ok(base),
            None => Err(syntax(line, format!("whole-register operand `{arg}` not supported"))),
        }
    }
}

fn parse_qasm(text: &str) -> Result<GateCircuit, GateParseError> {
    let mut regs = Regs { q: HashMap::new(), c: HashMap::new(), nq: 0, nc: 0 };
    let mut gates = Vec::new();
    for (line, st) in statements(text) {
        let (head, rest) = match st.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => (&st[..i], st[i..].trim()),
            None => (st.as_str(), ""),
        };
        match head {
            "OPENQASM" | "include" | "barrier" => continue,
            "qreg" | "creg" => {
                let b = rest.find('[').ok_or_else(|| syntax(line, "register size missing"))?;
                let e = rest.find(']').ok_or_else(|| syntax(line, "register size missing"))?;
                let name = rest[..b].trim().to_string();
                let size: u32 = rest[b + 1..e]
                    .trim()
                    .parse()
                    .map_err(|_| syntax(line, "bad register size"))?;
                let (map, next) = if head == "qreg" {
                    (&mut regs.q, &mut regs.nq)
                } else {
                    (&mut regs.c, &mut regs.nc)
                };
                if map.contains_key(&name) {
                    return Err(GateParseError::Redeclared { line, name });
                }
                map.insert(name, (*next, size));
                *next += size;
                continue;
            }
            _ => {}
        }
        if head == "measure" {
            let (q, c) = rest
                .split_once("->")
                .ok_or_else(|| syntax(line, "measure needs `->`"))?;
            let q = Regs::resolve(&regs.q, line, q)?;
            let c = Regs::resolve(&regs.c, line, c)?;
            gates.push(Gate::MeasZ(q, c));
            continue;
        }
        let want = match head {
            "h" | "s" | "sdg" | "x" | "y" | "z" | "t" | "tdg" | "reset" => 1,
            "cx" | "CX" => 2,
            "ccx" => 3,
            _ => {
                return Err(GateParseError::Unsupported { line, name: head.to_string() });
            }
        };
        let args: Vec<u32> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|a| Regs::resolve(&regs.q, line, a))
                .collect::<Result<_, _>>()?
        };
        if args.len() != want {
            return Err(syntax(line, format!("`{head}` takes {want} operands")));
        }
        gates.push(match head {
            "h" => Gate::H(args[0]),
            "s" => Gate::S(args[0]),
            "sdg" => Gate::Sdg(args[0]),
            "x" => Gate::X(args[0]),
            "y" => Gate::Y(args[0]),
            "z" => Gate::Z(args[0]),
            "t" => Gate::T(args[0]),
            "tdg" => Gate::Tdg(args[0]),
            "reset" => Gate::PrepZ(args[0]),
            "cx" | "CX" => Gate::Cnot(args[0], args[1]),
            _ => Gate::Toffoli(args[0], args[1], args[2]),
        });
    }
    Ok(GateCircuit { qubit_count: regs.nq, gates, roles: Vec::new() })
}

fn parse_native(text: &str) -> Result<GateCircuit, GateParseError> {
    let mut n: Option<u32> = None;
    let mut gates = Vec::new();
    let mut roles: Vec<(usize, u32, Role)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some((&head, args)) = toks.split_first() else { continue };
        if head == "qubits" {
            if n.is_some() {
                return Err(GateParseError::Redeclared { line, name: "qubits".into() });
            }
            let v = args
                .first()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| syntax(line, "qubits needs a count"))?;
            n = Some(v);
            continue;
        }
        let nq = n.ok_or_else(|| syntax(line, "`qubits N` must come first"))?;
        if head == "role" {
            let q: u32 = args.first().and_then(|a| a.parse().ok()).ok_or_else(|| syntax(line, "role needs a qubit"))?;
            let r = match args.get(1).copied() {
                Some("data") => Role::Data,
                Some("control") => Role::Control,
                Some("temporal") => Role::Temporal,
                Some("system") => Role::System,
                _ => return Err(syntax(line, "unknown role")),
            };
            if q >= nq {
                return Err(GateParseError::OutOfRange { line, arg: q.to_string() });
            }
            roles.push((line, q, r));
            continue;
        }
        let nums: Vec<u32> = args
            .iter()
            .map(|a| a.parse().map_err(|_| syntax(line, format!("bad number `{a}`"))))
            .collect::<Result<_, _>>()?;
        let (arity, slots) = match head {
            "h" | "s" | "sdg" | "x" | "y" | "z" | "t" | "tdg" | "prepz" | "prepx" => (1, 0),
            "cx" => (2, 0),
            "ccx" => (3, 0),
            "measz" | "measx" | "conds" => (1, 1),
            _ => return Err(GateParseError::Unsupported { line, name: head.to_string() }),
        };
        if nums.len() != arity + slots {
            return Err(syntax(line, format!("`{head}` takes {} numbers", arity + slots)));
        }
        if let Some(&q) = nums[..arity].iter().find(|&&q| q >= nq) {
            return Err(GateParseError::OutOfRange { line, arg: q.to_string() });
        }
        gates.push(match head {
            "h" => Gate::H(nums[0]),
            "s" => Gate::S(nums[0]),
            "sdg" => Gate::Sdg(nums[0]),
            "x" => Gate::X(nums[0]),
            "y" => Gate::Y(nums[0]),
            "z" => Gate::Z(nums[0]),
            "t" => Gate::T(nums[0]),
            "tdg" => Gate::Tdg(nums[0]),
            "prepz" => Gate::PrepZ(nums[0]),
            "prepx" => Gate::PrepX(nums[0]),
            "cx" => Gate::Cnot(nums[0], nums[1]),
            "ccx" => Gate::Toffoli(nums[0], nums[1], nums[2]),
            "measz" => Gate::MeasZ(nums[0], nums[1]),
            "measx" => Gate::MeasX(nums[0], nums[1]),
            _ => Gate::CondS(nums[0], nums[1]),
        });
    }
    let nq = n.unwrap_or(0);
    let mut c = GateCircuit { qubit_count: nq, gates, roles: Vec::new() };
    if !roles.is_empty() {
        c.roles = vec![Role::Data; nq as usize];
        for (_, q, r) in roles {
            c.roles[q as usize] = r;
        }
    }
    c.validate().map_err(|msg| syntax(0, msg))?;
    Ok(c)
}

/// Writes the native `.gc` form; `parse_gate_circuit(.., Native)` reads it back unchanged.
pub fn render_native(c: &GateCircuit) -> String {
    use std::fmt::Write;
    let mut s = format!("qubits {}\n", c.qubit_count);
    for (q, r) in c.roles.iter().enumerate() {
        if *r != Role::Data {
            let _ = writeln!(s, "role {q} {r}");
        }
    }
    for g in &c.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(s, "h {q}"),
            Gate::S(q) => writeln!(s, "s {q}"),
            Gate::Sdg(q) => writeln!(s, "sdg {q}"),
            Gate::X(q) => writeln!(s, "x {q}"),
            Gate::Y(q) => writeln!(s, "y {q}"),
            Gate::Z(q) => writeln!(s, "z {q}"),
            Gate::T(q) => writeln!(s, "t {q}"),
            Gate::Tdg(q) => writeln!(s, "tdg {q}"),
            Gate::PrepZ(q) => writeln!(s, "prepz {q}"),
            Gate::PrepX(q) => writeln!(s, "prepx {q}"),
            Gate::Cnot(a, b) => writeln!(s, "cx {a} {b}"),
            Gate::Toffoli(a, b, t) => writeln!(s, "ccx {a} {b} {t}"),
            Gate::MeasZ(q, v) => writeln!(s, "measz {q} {v}"),
            Gate::MeasX(q, v) => writeln!(s, "measx {q} {v}"),
            Gate::CondS(q, v) => writeln!(s, "conds {q} {v}"),
        };
    }
    s
}
