//! Reference-trace statistics, hotness ranking, hybrid sweeps and aggregation.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::floorplan::{build_layout, memory_density, LayoutConfig};
use crate::isa::Program;
use crate::sim::{run_baseline, run_config, RunResult, SimError, SimOptions};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceTrace {
    /// Distinct issue beats at which each qubit is named.
    pub refs: BTreeMap<u32, Vec<usize>>,
    pub magic: Vec<usize>,
}

impl ReferenceTrace {
    pub fn periods(&self, q: u32) -> Vec<usize> {
        self.refs.get(&q).map_or_else(Vec::new, |b| b.windows(2).map(|w| w[1] - w[0]).collect())
    }

    pub fn periods_of(&self, qubits: impl IntoIterator<Item = u32>) -> Vec<usize> {
        qubits.into_iter().flat_map(|q| self.periods(q)).collect()
    }

    pub fn all_periods(&self) -> Vec<usize> {
        self.periods_of(self.refs.keys().copied())
    }

    /// Mean gap between consecutive magic-state requests.
    pub fn magic_interval(&self) -> Option<f64> {
        let m = &self.magic;
        (m.len() > 1).then(|| (m[m.len() - 1] - m[0]) as f64 / (m.len() - 1) as f64)
    }
}

/// Several instructions naming a qubit in one beat count as one reference.
pub fn reference_trace(r: &RunResult) -> ReferenceTrace {
    let refs = r
        .per_qubit_refs
        .iter()
        .map(|(&q, beats)| {
            let mut b = beats.clone();
            b.dedup();
            (q, b)
        })
        .collect();
    ReferenceTrace { refs, magic: r.magic_beats.clone() }
}

/// Empirical CDF as (period, fraction ≤ period) steps.
pub fn period_cdf(periods: &[usize]) -> Vec<(usize, f64)> {
    let mut p = periods.to_vec();
    p.sort_unstable();
    let n = p.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in p.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => out.push((v, frac)),
        }
    }
    out
}

pub fn median(v: &[usize]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_unstable();
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] as f64 } else { (s[n / 2 - 1] + s[n / 2]) as f64 / 2.0 })
}

/// Qubits `0..qubits` by descending reference count, ties by index.
pub fn hotness_rank(t: &ReferenceTrace, qubits: usize) -> Vec<u32> {
    let count = |q: u32| t.refs.get(&q).map_or(0, Vec::len);
    let mut order: Vec<u32> = (0..qubits as u32).collect();
    order.sort_by_key(|&q| (std::cmp::Reverse(count(q)), q));
    order
}

pub fn f_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub f: f64,
    pub density: f64,
    pub beats: Result<usize, String>,
    pub overhead: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub baseline_beats: usize,
    pub points: Vec<SweepPoint>,
}

pub fn overhead(beats: usize, baseline: usize) -> f64 {
    if baseline == 0 {
        if beats == 0 { 0.0 } else { f64::INFINITY }
    } else {
        beats as f64 / baseline as f64 - 1.0
    }
}

/// Runs the program at each hybrid fraction; the hottest qubits of a baseline
/// profiling run go to the conventional region. Points are independent and run
/// on `threads` workers; results do not depend on the thread count.
pub fn sweep_hybrid(
    p: &Program,
    qubits: usize,
    cfg: &LayoutConfig,
    grid: &[f64],
    opts: &SimOptions,
    threads: usize,
) -> Result<SweepCurve, SimError> {
    let qubits = qubits.max(p.max_qubit()).max(1);
    let base = run_baseline(p, qubits, cfg, opts)?;
    let hot = hotness_rank(&reference_trace(&base), qubits);
    let point = |&f: &f64| {
        let c = LayoutConfig { hybrid_fraction: f, ..cfg.clone() };
        let density = build_layout(&c, qubits).map_or(f64::NAN, |l| memory_density(&l, qubits));
        let beats = run_config(p, &c, qubits, Some(&hot), opts).map(|r| r.total_beats).map_err(|e| e.to_string());
        let overhead = beats.clone().map(|b| overhead(b, base.total_beats));
        SweepPoint { f, density, beats, overhead }
    };
    let points = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| grid.par_iter().map(point).collect())
    } else {
        grid.iter().map(point).collect()
    };
    Ok(SweepCurve { baseline_beats: base.total_beats, points })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no results to aggregate")]
    Empty,
    #[error("overhead {0} is not above -1")]
    Domain(String),
}

/// Geometric mean of (1 + overhead), minus 1.
pub fn geomean_overhead(o: &[f64]) -> Result<f64, AnalysisError> {
    if o.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if let Some(bad) = o.iter().find(|&&x| x <= -1.0 || x.is_nan()) {
        return Err(AnalysisError::Domain(bad.to_string()));
    }
    Ok((o.iter().map(|x| (1.0 + x).ln()).sum::<f64>() / o.len() as f64).exp() - 1.0)
}

pub fn write_sweep_csv(c: &SweepCurve, w: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["f", "density", "overhead"])?;
    for p in &c.points {
        let o = match &p.overhead {
            Ok(o) => format!("{o:.6}"),
            Err(_) => "failed".into(),
        };
        w.write_record([format!("{:.2}", p.f), format!("{:.6}", p.density), o])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_refs_csv(t: &ReferenceTrace, w: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["qubit", "beat"])?;
    for (q, beats) in &t.refs {
        for b in beats {
            w.write_record([q.to_string(), b.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_cdf_csv(cdf: &[(usize, f64)], w: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["period", "cdf"])?;
    for (p, f) in cdf {
        w.write_record([p.to_string(), format!("{f:.6}")])?;
    }
    w.flush()?;
    Ok(())
}
