use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use prrtc::bench::{self, AblationAxis, AblationSpec};
use prrtc::check::check_path;
use prrtc::io::{self, ParamsFile, PathFile, PathMetadata, ResultRow, SamplerName};
use prrtc::{default_params, resolve_workers, solve};
use prrtc_core::{PlanStatus, PlannerParams};

#[derive(Parser)]
#[command(name = "prrtc", version, about = "Parallel bidirectional RRT-Connect motion planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one query. Exit 0 solved, 2 failed, 3 infeasible endpoint.
    Plan(PlanArgs),
    /// Re-check a path file with the fine-sphere checker. Exit 0 iff valid.
    Validate(ValidateArgs),
    /// Run every problem in a directory several times.
    Bench(BenchArgs),
    /// Sweep one planner setting over a problem directory.
    Ablate(AblateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Halton,
    Uniform,
}

#[derive(Args, Clone, Default)]
struct Tuning {
    /// Extension range.
    #[arg(long)]
    delta: Option<f64>,
    /// Collision checks per edge.
    #[arg(long = "n-cc")]
    n_cc: Option<usize>,
    /// Worker threads; PRRTC_THREADS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
    /// Iteration budget per worker.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Dynamic-domain radius (defaults to 16 * delta).
    #[arg(long = "dd-radius")]
    dd_radius: Option<f64>,
    /// Disable dynamic-domain rejection.
    #[arg(long = "no-dynamic-domain")]
    no_dynamic_domain: bool,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    /// Seed for the uniform sampler.
    #[arg(long)]
    seed: Option<u64>,
}

impl Tuning {
    fn overrides(&self) -> ParamsFile {
        ParamsFile {
            delta: self.delta,
            n_cc: self.n_cc,
            max_iters: self.max_iters,
            dd_radius: self.dd_radius,
            dynamic_domain: self.no_dynamic_domain.then_some(false),
            sampler: self.sampler.map(|s| match s {
                SamplerArg::Halton => SamplerName::Halton,
                SamplerArg::Uniform => SamplerName::Uniform,
            }),
            seed: self.seed,
            ..ParamsFile::default()
        }
    }

    /// Defaults, then `file` overrides, then command-line flags.
    fn params(&self, file: &ParamsFile) -> PlannerParams {
        let mut p = self.overrides().apply(file.apply(default_params()));
        p.workers = resolve_workers(self.workers.or(file.workers));
        p
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    robot: PathBuf,
    #[arg(long)]
    scene: PathBuf,
    /// Comma-separated joint values.
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    #[arg(long, allow_hyphen_values = true)]
    goal: String,
    #[command(flatten)]
    tuning: Tuning,
    /// Write the path as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    robot: PathBuf,
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    path: PathBuf,
    #[arg(long = "resolution-multiplier", default_value_t = 4)]
    resolution_multiplier: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    problems: PathBuf,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    ecdf: Option<PathBuf>,
    /// Quantile table per problem and pooled.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    problems: PathBuf,
    /// workers, early_exit, two_stage, dynamic_domain or batched_cc.
    #[arg(long)]
    axis: AblationAxis,
    /// Values to sweep, comma-separated (default: 1,2,4,8 or on,off).
    #[arg(long, value_delimiter = ',')]
    values: Vec<String>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    tuning: Tuning,
    /// Directory for one CSV per value plus summary.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_config(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .enumerate()
        .map(|(i, v)| v.trim().parse::<f64>().with_context(|| format!("--{field}: value {i} `{v}` is not a number")))
        .collect()
}

fn cmd_plan(a: PlanArgs) -> Result<ExitCode> {
    let robot = io::load_robot(&a.robot)?;
    let scene = io::load_scene(&a.scene)?;
    let start = parse_config("start", &a.start)?;
    let goal = parse_config("goal", &a.goal)?;
    for (name, q) in [("start", &start), ("goal", &goal)] {
        if q.len() != robot.dof() {
            bail!("--{name}: {} values given, robot has {} degrees of freedom", q.len(), robot.dof());
        }
    }
    let params = a.tuning.params(&ParamsFile::default());
    let r = solve(&robot, &scene, params, &start, &goal)?;
    let o = &r.outcome;
    println!(
        "status={:?} time_ms={:.3} cost={:.6} iterations={} sphere_tests={} waypoints={} workers={}",
        o.status,
        r.time_ms(),
        o.cost,
        o.iterations,
        o.stats.sphere_tests,
        o.path.len(),
        params.workers
    );
    if let (Some(out), PlanStatus::Solved) = (&a.out, o.status) {
        let file = PathFile {
            robot: a.robot.display().to_string(),
            scene: a.scene.display().to_string(),
            path: o.path.iter().map(|c| c.to_vec()).collect(),
            metadata: PathMetadata {
                cost: o.cost,
                params: ParamsFile::from_params(&params),
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            },
        };
        io::write_path(out, &file)?;
    }
    Ok(ExitCode::from(match o.status {
        PlanStatus::Solved => 0,
        PlanStatus::Failed => 2,
        PlanStatus::InfeasibleEndpoint => 3,
    }))
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let robot = io::load_robot(&a.robot)?;
    let scene = io::load_scene(&a.scene)?;
    let file = io::load_path(&a.path)?;
    let params = file.metadata.params.apply(PlannerParams::default());
    let report = check_path(&robot, &scene, &file.path, params.delta, params.n_cc, a.resolution_multiplier);
    if report.is_valid() {
        println!("valid: {} configurations checked", report.configs_checked);
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &report.violations {
            println!("violation: {v:?}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    let problems = io::load_problem_dir(&a.problems)?;
    let params = a.tuning.params(&ParamsFile::default());
    let records = bench::run_suite(&problems, a.trials, &params)?;
    let rows: Vec<ResultRow> = records.iter().map(|r| r.to_row()).collect();
    io::write_results_csv(&a.csv, &rows)?;
    if let Some(p) = &a.ecdf {
        bench::write_ecdf_csv(p, &records)?;
    }
    if records.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    let summary = bench::summarize(&records)?;
    if let Some(p) = &a.summary {
        bench::write_summary_csv(p, &summary)?;
    }
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_ablate(a: AblateArgs) -> Result<ExitCode> {
    let problems = io::load_problem_dir(&a.problems)?;
    let values = if a.values.is_empty() { AblationSpec::default_values(a.axis) } else { a.values.clone() };
    let spec = AblationSpec::new(a.axis, values)?;
    let params = a.tuning.params(&ParamsFile::default());
    let groups = bench::run_ablation(&spec, &problems, a.trials, &params)?;
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("{}", a.out_dir.display()))?;
    let summary_path = a.out_dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary_path).with_context(|| format!("{}", summary_path.display()))?;
    w.write_record(["axis", "value", "runs", "success_rate", "mean_time_ms", "mean_cost", "mean_iterations", "mean_sphere_tests"])?;
    for (value, records) in &groups {
        let rows: Vec<ResultRow> = records.iter().map(|r| r.to_row()).collect();
        io::write_results_csv(a.out_dir.join(format!("{}_{}.csv", a.axis, value)), &rows)?;
        let n = records.len().max(1) as f64;
        let s = bench::summarize(records).ok();
        let mean = |f: &dyn Fn(&bench::BenchRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
        let rec = [
            a.axis.to_string(),
            value.clone(),
            records.len().to_string(),
            s.as_ref().map(|s| s.pooled.success_rate.to_string()).unwrap_or_default(),
            s.as_ref().and_then(|s| s.pooled.time_ms).map(|q| q.mean.to_string()).unwrap_or_default(),
            s.as_ref().and_then(|s| s.pooled.cost).map(|q| q.mean.to_string()).unwrap_or_default(),
            mean(&|r| r.iterations as f64).to_string(),
            mean(&|r| r.sphere_tests as f64).to_string(),
        ];
        println!("{}", rec.join(","));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Ablate(a) => cmd_ablate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
