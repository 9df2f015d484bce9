//! Benchmark harness: repeated trials, quantile summaries, ECDFs and
//! single-axis ablations.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use prrtc_core::{Error, PlanStatus, PlannerParams, SamplerKind, Search};

use crate::io::{IoError, Problem, ResultRow};
use crate::run::plan;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub problem: String,
    pub trial: usize,
    pub status: PlanStatus,
    pub time_ms: f64,
    /// Present iff solved.
    pub cost: Option<f64>,
    pub iterations: u64,
    pub sphere_tests: u64,
    pub workers: usize,
    pub seed: Option<u64>,
    pub config_hash: u64,
}

impl BenchRecord {
    pub fn to_row(&self) -> ResultRow {
        ResultRow {
            problem: self.problem.clone(),
            status: self.status.into(),
            time_ms: self.time_ms,
            cost: self.cost,
            iterations: self.iterations,
            sphere_tests: self.sphere_tests,
            workers: self.workers,
            seed: self.seed,
        }
    }
}

/// FNV-1a over the debug form of the parameters; stable for a given build.
pub fn params_hash(p: &PlannerParams) -> u64 {
    format!("{p:?}").bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Parameters for one problem: `base`, then the problem's own overrides.
/// A uniform sampler gets seed `seed + trial` so trials differ but replay.
pub fn trial_params(base: &PlannerParams, problem: &Problem, trial: usize) -> PlannerParams {
    let mut p = problem.params.apply(*base);
    // Workers come from the caller, not the problem file.
    p.workers = base.workers;
    if let SamplerKind::Uniform { seed } = p.sampler {
        p.sampler = SamplerKind::Uniform { seed: seed.wrapping_add(trial as u64) };
    }
    p
}

/// Runs every problem `trials` times. Problems run one after another; each
/// gets one search allocated up front and reused across its trials, and only
/// the planning call is timed. Records are ordered by (problem, trial).
pub fn run_suite(problems: &[Problem], trials: usize, base: &PlannerParams) -> Result<Vec<BenchRecord>, Error> {
    let mut out = Vec::with_capacity(problems.len() * trials);
    for problem in problems {
        if trials == 0 {
            continue;
        }
        let first = trial_params(base, problem, 0);
        let mut search = Search::new(&problem.robot, &problem.scene, first)?;
        for trial in 0..trials {
            let params = trial_params(base, problem, trial);
            if params != *search.params() {
                search = Search::new(&problem.robot, &problem.scene, params)?;
            }
            let r = plan(&mut search, &problem.start, &problem.goal)?;
            let o = &r.outcome;
            out.push(BenchRecord {
                problem: problem.name.clone(),
                trial,
                status: o.status,
                time_ms: r.time_ms(),
                cost: (o.status == PlanStatus::Solved).then_some(o.cost),
                iterations: o.iterations,
                sphere_tests: o.stats.sphere_tests,
                workers: params.workers,
                seed: match params.sampler {
                    SamplerKind::Uniform { seed } => Some(seed),
                    SamplerKind::Halton => None,
                },
                config_hash: params_hash(&params),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantiles {
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub p95: f64,
    pub max: f64,
}

/// Quantile `p` of sorted values by linear interpolation between order
/// statistics at position `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Quantiles {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Quantiles {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            p95: quantile_sorted(&v, 0.95),
            max: v[v.len() - 1],
        })
    }
}

/// Statistics over one group of runs. Time and cost quantiles cover solved
/// runs only; unsolved runs are counted in `failed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub runs: usize,
    pub solved: usize,
    pub failed: usize,
    pub success_rate: f64,
    pub time_ms: Option<Quantiles>,
    pub cost: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Per problem, in first-seen order.
    pub problems: Vec<(String, SummaryRow)>,
    pub pooled: SummaryRow,
}

fn summary_row(records: &[&BenchRecord]) -> SummaryRow {
    let solved: Vec<&&BenchRecord> = records.iter().filter(|r| r.status == PlanStatus::Solved).collect();
    let times: Vec<f64> = solved.iter().map(|r| r.time_ms).collect();
    let costs: Vec<f64> = solved.iter().filter_map(|r| r.cost).collect();
    SummaryRow {
        runs: records.len(),
        solved: solved.len(),
        failed: records.len() - solved.len(),
        success_rate: solved.len() as f64 / records.len() as f64,
        time_ms: Quantiles::of(&times),
        cost: Quantiles::of(&costs),
    }
}

pub fn summarize(records: &[BenchRecord]) -> Result<Summary, Error> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("cannot summarize zero records"));
    }
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.problem.as_str()) {
            names.push(&r.problem);
        }
    }
    let problems = names
        .iter()
        .map(|n| {
            let group: Vec<&BenchRecord> = records.iter().filter(|r| r.problem == *n).collect();
            (n.to_string(), summary_row(&group))
        })
        .collect();
    let all: Vec<&BenchRecord> = records.iter().collect();
    Ok(Summary { problems, pooled: summary_row(&all) })
}

/// One ECDF point: the fraction of all runs solved with metric `<= value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcdfPoint {
    pub value: f64,
    pub fraction_solved: f64,
}

/// ECDF of a metric over solved runs, normalized by all runs so the curve
/// ends at the success rate.
pub fn ecdf(records: &[BenchRecord], metric: impl Fn(&BenchRecord) -> Option<f64>) -> Vec<EcdfPoint> {
    let mut v: Vec<f64> =
        records.iter().filter(|r| r.status == PlanStatus::Solved).filter_map(&metric).collect();
    v.sort_by(f64::total_cmp);
    let n = records.len() as f64;
    v.iter().enumerate().map(|(i, &value)| EcdfPoint { value, fraction_solved: (i + 1) as f64 / n }).collect()
}

/// Writes `metric,value,fraction_solved` rows for solve time and cost.
pub fn write_ecdf_csv(path: impl AsRef<Path>, records: &[BenchRecord]) -> Result<(), IoError> {
    let path = path.as_ref();
    let err = |error| IoError::Csv { path: path.to_path_buf(), error };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["metric", "value", "fraction_solved"]).map_err(err)?;
    let metrics: [(&str, Vec<EcdfPoint>); 2] =
        [("time_ms", ecdf(records, |r| Some(r.time_ms))), ("cost", ecdf(records, |r| r.cost))];
    for (name, points) in metrics {
        for p in points {
            w.write_record([name.to_string(), p.value.to_string(), p.fraction_solved.to_string()]).map_err(err)?;
        }
    }
    w.flush().map_err(|error| IoError::Write { path: path.to_path_buf(), error })
}

/// Writes the per-problem and pooled quantile table.
pub fn write_summary_csv(path: impl AsRef<Path>, summary: &Summary) -> Result<(), IoError> {
    let path = path.as_ref();
    let err = |error| IoError::Csv { path: path.to_path_buf(), error };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let mut header = vec!["problem".to_string(), "runs".into(), "success_rate".into()];
    for m in ["time_ms", "cost"] {
        for q in ["mean", "q1", "median", "q3", "p95", "max"] {
            header.push(format!("{m}_{q}"));
        }
    }
    w.write_record(&header).map_err(err)?;
    let pooled = ("all".to_string(), summary.pooled.clone());
    for (name, row) in summary.problems.iter().chain(std::iter::once(&pooled)) {
        let mut rec = vec![name.clone(), row.runs.to_string(), row.success_rate.to_string()];
        for q in [row.time_ms, row.cost] {
            match q {
                Some(q) => rec.extend([q.mean, q.q1, q.median, q.q3, q.p95, q.max].map(|v| v.to_string())),
                None => rec.extend(std::iter::repeat_n(String::new(), 6)),
            }
        }
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|error| IoError::Write { path: path.to_path_buf(), error })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<20} {:>5} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}",
            "problem", "runs", "succ", "mean_ms", "q1_ms", "med_ms", "q3_ms", "p95_ms", "max_ms", "cost"
        )?;
        let pooled = ("all".to_string(), self.pooled.clone());
        for (name, row) in self.problems.iter().chain(std::iter::once(&pooled)) {
            write!(f, "{:<20} {:>5} {:>6.3}", name, row.runs, row.success_rate)?;
            match row.time_ms {
                Some(q) => write!(
                    f,
                    " {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
                    q.mean, q.q1, q.median, q.q3, q.p95, q.max
                )?,
                None => write!(f, " {:>65}", "-")?,
            }
            match row.cost {
                Some(q) => writeln!(f, " {:>8.3}", q.mean)?,
                None => writeln!(f, " {:>8}", "-")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationAxis {
    Workers,
    EarlyExit,
    TwoStage,
    DynamicDomain,
    BatchedCc,
}

impl FromStr for AblationAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "workers" => AblationAxis::Workers,
            "early_exit" => AblationAxis::EarlyExit,
            "two_stage" => AblationAxis::TwoStage,
            "dynamic_domain" => AblationAxis::DynamicDomain,
            "batched_cc" => AblationAxis::BatchedCc,
            _ => return Err(format!("unknown axis `{s}`")),
        })
    }
}

impl fmt::Display for AblationAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AblationAxis::Workers => "workers",
            AblationAxis::EarlyExit => "early_exit",
            AblationAxis::TwoStage => "two_stage",
            AblationAxis::DynamicDomain => "dynamic_domain",
            AblationAxis::BatchedCc => "batched_cc",
        })
    }
}

/// Batch width used for the "on" setting of the batched_cc axis.
pub const BATCHED_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AblationSpec {
    pub axis: AblationAxis,
    /// Worker counts for `workers`, `on`/`off` for the switches.
    pub values: Vec<String>,
}

impl AblationSpec {
    pub fn new(axis: AblationAxis, values: Vec<String>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("ablation needs at least one value"));
        }
        let spec = AblationSpec { axis, values };
        for v in &spec.values {
            spec.apply(&PlannerParams::default(), v)?;
        }
        Ok(spec)
    }

    /// Default sweep for an axis.
    pub fn default_values(axis: AblationAxis) -> Vec<String> {
        match axis {
            AblationAxis::Workers => ["1", "2", "4", "8"].map(String::from).to_vec(),
            _ => ["on", "off"].map(String::from).to_vec(),
        }
    }

    pub fn apply(&self, base: &PlannerParams, value: &str) -> Result<PlannerParams, Error> {
        let mut p = *base;
        let switch = || match value {
            "on" | "true" | "1" => Ok(true),
            "off" | "false" | "0" => Ok(false),
            _ => Err(Error::InvalidArgument("switch values are on or off")),
        };
        match self.axis {
            AblationAxis::Workers => {
                p.workers = value
                    .parse()
                    .ok()
                    .filter(|&w| w > 0)
                    .ok_or(Error::InvalidArgument("worker counts must be positive integers"))?
            }
            AblationAxis::EarlyExit => p.check.early_exit = switch()?,
            AblationAxis::TwoStage => p.check.two_stage = switch()?,
            AblationAxis::DynamicDomain => {
                p.dd_radius = switch()?.then(|| base.dd_radius.unwrap_or(PlannerParams::default_dd_radius(p.delta)))
            }
            AblationAxis::BatchedCc => p.check.batch_width = if switch()? { BATCHED_WIDTH } else { 1 },
        }
        Ok(p)
    }
}

/// Sweeps one axis with everything else fixed; one record set per value.
/// The axis is applied after the problem's own overrides.
pub fn run_ablation(
    spec: &AblationSpec,
    problems: &[Problem],
    trials: usize,
    base: &PlannerParams,
) -> Result<Vec<(String, Vec<BenchRecord>)>, Error> {
    let mut groups = Vec::with_capacity(spec.values.len());
    for value in &spec.values {
        let mut records = Vec::new();
        for problem in problems {
            let mut pinned = problem.clone();
            pinned.params = crate::io::ParamsFile::default();
            let merged = problem.params.apply(*base);
            let params = spec.apply(&PlannerParams { workers: base.workers, ..merged }, value)?;
            records.extend(run_suite(std::slice::from_ref(&pinned), trials, &params)?);
        }
        groups.push((value.clone(), records));
    }
    Ok(groups)
}
