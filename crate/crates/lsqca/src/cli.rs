//! Command-line front end: `compile | simulate | sweep | report`.
//!
//! Settings come from a flat `key = value` file (`--config`) and are
//! overridden by flags of the same name. Exit codes: 0 ok, 2 input error,
//! 3 simulation deadlock.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    f_grid, geomean_overhead, overhead, period_cdf, reference_trace, sweep_hybrid, write_cdf_csv,
    write_refs_csv, write_sweep_csv,
};
use crate::floorplan::{LayoutConfig, SamKind};
use crate::frontend::{compile, gen_builtin, gen_select, parse_gate_circuit, Builtin, CompilePolicy, Format};
use crate::isa::{parse_program, render_program, Opcode, Program};
use crate::sim::{run_baseline, run_config, SimError, SimOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEADLOCK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lsqca", about = "Compile and simulate programs for a load/store quantum architecture")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Compile a circuit to LSQCA assembly.
    Compile(Settings),
    /// Run a program and write a summary, trace and reference statistics.
    Simulate(Settings),
    /// Sweep the hybrid fraction f over 0, 0.05, ..., 1.
    Sweep(Settings),
    /// Aggregate simulate summaries or sweep CSVs into a GEOMEAN table.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
pub struct Settings {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Circuit (.qasm, .gc) or program (.lsq) file.
    #[arg(long)]
    pub input: Option<String>,
    /// ghz | cat | bv | adder
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub size: Option<String>,
    /// SELECT lattice width.
    #[arg(long)]
    pub select: Option<String>,
    /// point | line | conventional
    #[arg(long)]
    pub sam: Option<String>,
    #[arg(long)]
    pub banks: Option<String>,
    #[arg(long)]
    pub factories: Option<String>,
    #[arg(long)]
    pub buffer: Option<String>,
    #[arg(long)]
    pub warm: Option<String>,
    /// Hybrid fraction in [0, 1].
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub in_memory: Option<String>,
    #[arg(long)]
    pub cx_instruction: Option<String>,
    #[arg(long)]
    pub t_zz: Option<String>,
    #[arg(long)]
    pub decoder_latency: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
    /// Output file (compile, sweep) or directory (simulate).
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, PartialEq)]
pub enum CliError {
    Input(String),
    Deadlock(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Deadlock(_) => EXIT_DEADLOCK,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Deadlock(m) => f.write_str(m),
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Deadlock { .. } => CliError::Deadlock(e.to_string()),
            other => input(other),
        }
    }
}

const KEYS: &[&str] = &[
    "input", "builtin", "size", "select", "sam", "banks", "factories", "buffer", "warm", "f", "in_memory",
    "cx_instruction", "t_zz", "decoder_latency", "threads", "out",
];

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut m = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| input(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(input(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        m.insert(k.to_string(), v.trim().to_string());
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Builtin(Builtin, u64),
    Select(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub layout: LayoutConfig,
    pub policy: CompilePolicy,
    pub opts: SimOptions,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Short label used in summaries.
    pub fn name(&self) -> String {
        match &self.source {
            Source::File(p) => p.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned()),
            Source::Builtin(b, n) => format!("{}-{n}", format!("{b:?}").to_lowercase()),
            Source::Select(w) => format!("select-{w}"),
        }
    }
}

fn num<T: std::str::FromStr>(m: &BTreeMap<String, String>, k: &str) -> Result<Option<T>, CliError> {
    m.get(k)
        .map(|v| v.parse::<T>().map_err(|_| input(format!("bad value for `{k}`: `{v}`"))))
        .transpose()
}

fn flag(m: &BTreeMap<String, String>, k: &str, default: bool) -> Result<bool, CliError> {
    match m.get(k).map(String::as_str) {
        None => Ok(default),
        Some("true" | "1" | "yes" | "on") => Ok(true),
        Some("false" | "0" | "no" | "off") => Ok(false),
        Some(v) => Err(input(format!("bad value for `{k}`: `{v}`"))),
    }
}

impl Settings {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("input", &self.input),
            ("builtin", &self.builtin),
            ("size", &self.size),
            ("select", &self.select),
            ("sam", &self.sam),
            ("banks", &self.banks),
            ("factories", &self.factories),
            ("buffer", &self.buffer),
            ("warm", &self.warm),
            ("f", &self.f),
            ("in_memory", &self.in_memory),
            ("cx_instruction", &self.cx_instruction),
            ("t_zz", &self.t_zz),
            ("decoder_latency", &self.decoder_latency),
            ("threads", &self.threads),
            ("out", &self.out),
        ];
        pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut m = match &self.config {
            Some(p) => parse_config_text(&fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))?)?,
            None => BTreeMap::new(),
        };
        m.extend(self.overrides());
        resolve_map(&m)
    }
}

pub fn resolve_map(m: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let sources = ["input", "builtin", "select"].iter().filter(|k| m.contains_key(**k)).count();
    if sources != 1 {
        return Err(input("give exactly one of `input`, `builtin`, `select`"));
    }
    let source = if let Some(p) = m.get("input") {
        Source::File(PathBuf::from(p))
    } else if let Some(b) = m.get("builtin") {
        let kind: Builtin = b.parse().map_err(input)?;
        let size = num(m, "size")?.ok_or_else(|| input("`builtin` needs `size`"))?;
        Source::Builtin(kind, size)
    } else {
        Source::Select(num(m, "select")?.expect("counted above"))
    };
    let f: f64 = num(m, "f")?.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&f) {
        return Err(input(format!("f = {f} outside [0, 1]")));
    }
    let layout = LayoutConfig {
        sam_kind: match m.get("sam") {
            Some(s) => s.parse::<SamKind>().map_err(input)?,
            None => SamKind::Point,
        },
        banks: num(m, "banks")?.unwrap_or(1),
        factories: num(m, "factories")?.unwrap_or(1),
        hybrid_fraction: f,
        buffer_capacity: num(m, "buffer")?,
        warm_start: flag(m, "warm", false)?,
    };
    let d = CompilePolicy::default();
    let policy = CompilePolicy {
        in_memory_single_qubit: flag(m, "in_memory", d.in_memory_single_qubit)?,
        cx_as_instruction: flag(m, "cx_instruction", d.cx_as_instruction)?,
        t_gate_in_memory_zz: flag(m, "t_zz", d.t_gate_in_memory_zz)?,
        registers: d.registers,
    };
    let opts = SimOptions {
        decoder_latency: num(m, "decoder_latency")?.unwrap_or(0),
        ..SimOptions::default()
    };
    Ok(RunConfig {
        source,
        layout,
        policy,
        opts,
        threads: num(m, "threads")?.unwrap_or(1).max(1),
        out: m.get("out").map(PathBuf::from),
    })
}

/// The program to run and the number of qubits it addresses.
pub struct Loaded {
    pub program: Program,
    pub qubits: usize,
    pub t_count: usize,
}

pub fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let circuit = match &cfg.source {
        Source::File(p) => {
            let text = fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            if p.extension().is_some_and(|e| e == "lsq") {
                let program = parse_program(&text).map_err(input)?;
                let qubits = program.max_qubit();
                return Ok(Loaded { program, qubits, t_count: 0 });
            }
            let fmt = Format::from_path(p)
                .ok_or_else(|| input(format!("{}: expected .qasm, .gc or .lsq", p.display())))?;
            parse_gate_circuit(&text, fmt).map_err(input)?
        }
        Source::Builtin(k, n) => gen_builtin(*k, *n).map_err(input)?,
        Source::Select(w) => gen_select(*w).map_err(input)?.0,
    };
    let program = compile(&circuit, &cfg.policy).map_err(input)?;
    let lowered = crate::frontend::lower_to_clifford_t(&circuit);
    Ok(Loaded { program, qubits: circuit.qubit_count as usize, t_count: lowered.t_count() })
}

fn write_file(p: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
    }
    fs::write(p, bytes).map_err(|e| input(format!("{}: {e}", p.display())))
}

pub fn cmd_compile(cfg: &RunConfig) -> Result<String, CliError> {
    let l = load(cfg)?;
    let text = render_program(&l.program);
    let stats = format!(
        "qubits {}\nt_count {}\npm_count {}\ninstructions {}\n",
        l.qubits,
        l.t_count,
        l.program.count(Opcode::Pm),
        l.program.len()
    );
    match &cfg.out {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            Ok(stats)
        }
        None => Ok(text),
    }
}

/// Runs the configured layout and the baseline; returns the summary record.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let l = load(cfg)?;
    let base = run_baseline(&l.program, l.qubits, &cfg.layout, &cfg.opts)?;
    let hot = (cfg.layout.hybrid_fraction > 0.0)
        .then(|| crate::analysis::hotness_rank(&reference_trace(&base), l.qubits.max(l.program.max_qubit()).max(1)));
    let r = run_config(&l.program, &cfg.layout, l.qubits, hot.as_deref(), &cfg.opts)?;
    let summary = format!(
        "name {}\nsam {}\nbanks {}\nfactories {}\nf {:.2}\n{}baseline_beats {}\noverhead {:.6}\n",
        cfg.name(),
        cfg.layout.sam_kind,
        cfg.layout.banks,
        cfg.layout.factories,
        cfg.layout.hybrid_fraction,
        r.summary(),
        base.total_beats,
        overhead(r.total_beats, base.total_beats)
    );
    if let Some(dir) = &cfg.out {
        let t = reference_trace(&r);
        let mut refs = Vec::new();
        write_refs_csv(&t, &mut refs).map_err(input)?;
        let mut cdf = Vec::new();
        write_cdf_csv(&period_cdf(&t.all_periods()), &mut cdf).map_err(input)?;
        write_file(&dir.join("summary.txt"), summary.as_bytes())?;
        write_file(&dir.join("trace.log"), r.trace_text(&l.program).as_bytes())?;
        write_file(&dir.join("refs.csv"), &refs)?;
        write_file(&dir.join("cdf.csv"), &cdf)?;
    }
    Ok(summary)
}

/// Returns the CSV and, separately, any warnings.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(String, Vec<String>), CliError> {
    let l = load(cfg)?;
    let curve = sweep_hybrid(&l.program, l.qubits, &cfg.layout, &f_grid(), &cfg.opts, cfg.threads)?;
    let mut csv = Vec::new();
    write_sweep_csv(&curve, &mut csv).map_err(input)?;
    let mut warnings = Vec::new();
    for w in curve.points.windows(2) {
        if w[1].density > w[0].density + 1e-12 {
            warnings.push(format!("density rises from f={:.2} to f={:.2}", w[0].f, w[1].f));
        }
    }
    for p in &curve.points {
        if let Err(e) = &p.beats {
            warnings.push(format!("f={:.2} failed: {}", p.f, e.lines().next().unwrap_or("")));
        }
    }
    let csv = String::from_utf8(csv).expect("csv is utf-8");
    if let Some(p) = &cfg.out {
        write_file(p, csv.as_bytes())?;
    }
    Ok((csv, warnings))
}

fn parse_summary(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(' '))
        .map(|(k, v)| (k.to_string(), v.trim().to_string()))
        .collect()
}

/// Simulate summaries → per-run rows plus GEOMEAN; sweep CSVs → per-f GEOMEAN.
pub fn cmd_report(files: &[PathBuf]) -> Result<String, CliError> {
    if files.is_empty() {
        return Err(input("report needs at least one input file"));
    }
    let texts: Vec<(PathBuf, String)> = files
        .iter()
        .map(|p| fs::read_to_string(p).map(|t| (p.clone(), t)).map_err(|e| input(format!("{}: {e}", p.display()))))
        .collect::<Result<_, _>>()?;
    let csvs = texts.iter().filter(|(p, _)| p.extension().is_some_and(|e| e == "csv")).count();
    if csvs == texts.len() {
        report_sweeps(&texts)
    } else if csvs == 0 {
        report_summaries(&texts)
    } else {
        Err(input("report inputs must be all summaries or all sweep CSVs"))
    }
}

fn report_summaries(texts: &[(PathBuf, String)]) -> Result<String, CliError> {
    let mut out = String::from("name,beats,baseline_beats,overhead\n");
    let mut overheads = Vec::new();
    for (p, t) in texts {
        let s = parse_summary(t);
        let get = |k: &str| s.get(k).cloned().ok_or_else(|| input(format!("{}: missing `{k}`", p.display())));
        let o: f64 = get("overhead")?.parse().map_err(|_| input(format!("{}: bad overhead", p.display())))?;
        out += &format!("{},{},{},{o:.6}\n", get("name")?, get("beats")?, get("baseline_beats")?);
        overheads.push(o);
    }
    out += &format!("GEOMEAN,,,{:.6}\n", geomean_overhead(&overheads).map_err(input)?);
    Ok(out)
}

fn report_sweeps(texts: &[(PathBuf, String)]) -> Result<String, CliError> {
    let mut by_f: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (p, t) in texts {
        let mut r = csv::Reader::from_reader(t.as_bytes());
        for rec in r.records() {
            let rec = rec.map_err(|e| input(format!("{}: {e}", p.display())))?;
            let bad = || input(format!("{}: malformed sweep row", p.display()));
            let f = rec.get(0).ok_or_else(bad)?.to_string();
            let d: f64 = rec.get(1).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let e = by_f.entry(f).or_default();
            e.1.push(d);
            if let Some(o) = rec.get(2).and_then(|v| v.parse::<f64>().ok()) {
                e.0.push(o);
            }
        }
    }
    let mut out = String::from("f,geomean_overhead,mean_density\n");
    for (f, (o, d)) in by_f {
        let g = geomean_overhead(&o).map_or("failed".to_string(), |g| format!("{g:.6}"));
        out += &format!("{f},{g},{:.6}\n", d.iter().sum::<f64>() / d.len() as f64);
    }
    Ok(out)
}

/// Runs one invocation; returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    let result = match &cli.cmd {
        Cmd::Compile(s) => s.resolve().and_then(|c| cmd_compile(&c)).map(|o| print!("{o}")),
        Cmd::Simulate(s) => s.resolve().and_then(|c| cmd_simulate(&c)).map(|o| print!("{o}")),
        Cmd::Sweep(s) => s.resolve().and_then(|c| cmd_sweep(&c)).map(|(csv, warnings)| {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            print!("{csv}");
        }),
        Cmd::Report(a) => cmd_report(&a.files).and_then(|o| match &a.out {
            Some(p) => write_file(p, o.as_bytes()),
            None => {
                print!("{o}");
                Ok(())
            }
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
