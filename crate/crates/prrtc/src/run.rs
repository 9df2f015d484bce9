//! Runs a [`Search`] on OS threads.

use std::thread;
use std::time::{Duration, Instant};

use prrtc_core::{Error, PlanOutcome, PlannerParams, RobotModel, Scene, Search};

/// Environment variable that overrides the worker count.
pub const THREADS_ENV: &str = "PRRTC_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub outcome: PlanOutcome,
    pub wall_time: Duration,
}

impl PlanResult {
    pub fn time_ms(&self) -> f64 {
        self.wall_time.as_secs_f64() * 1e3
    }
}

/// Worker count: `PRRTC_THREADS` if set, else `requested`, else one per core.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    env.or(requested)
        .unwrap_or_else(|| thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Library defaults with the worker count taken from [`resolve_workers`].
pub fn default_params() -> PlannerParams {
    PlannerParams { workers: resolve_workers(None), ..PlannerParams::default() }
}

/// Plans one query on a prepared search. Only this call is timed; the
/// search (trees, scratch) is allocated beforehand and reused.
pub fn plan(search: &mut Search<'_>, start: &[f64], goal: &[f64]) -> Result<PlanResult, Error> {
    let t0 = Instant::now();
    if let Some(outcome) = search.reset(start, goal)? {
        return Ok(PlanResult { outcome, wall_time: t0.elapsed() });
    }
    let search: &Search<'_> = search;
    let workers = search.params().workers;
    if workers == 1 {
        search.run_worker(0);
    } else {
        thread::scope(|s| {
            for id in 1..workers {
                s.spawn(move || search.run_worker(id));
            }
            search.run_worker(0);
        });
    }
    let outcome = search.outcome()?;
    Ok(PlanResult { outcome, wall_time: t0.elapsed() })
}

/// One-shot planning: builds a search and runs it.
pub fn solve(
    model: &RobotModel,
    scene: &Scene,
    params: PlannerParams,
    start: &[f64],
    goal: &[f64],
) -> Result<PlanResult, Error> {
    let mut search = Search::new(model, scene, params)?;
    plan(&mut search, start, goal)
}
