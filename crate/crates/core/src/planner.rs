//! Parallel bidirectional RRT-Connect.
//!
//! A [`Search`] owns two shared trees (rooted at the start and the goal).
//! Any number of workers call [`Search::run_worker`] concurrently; each
//! repeatedly extends the currently smaller tree toward a sample and then
//! greedily connects the new node to the other tree. The first worker whose
//! connect lands on the other tree claims the result and raises the stop
//! flag. Thread creation is left to the caller.

use alloc::format;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use crate::collision::{CheckOptions, CheckStats, EdgeValidator, Scene, StatsSnapshot};
use crate::config::{lerp_into, Config};
use crate::error::Error;
use crate::kinematics::RobotModel;
use crate::nn::{self, nearest_parallel, nearest_serial, NnResult};
use crate::sampling::{HaltonState, Sampler};
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Halton,
    /// Seeded uniform sampling; worker `w` uses a stream derived from `seed` and `w`.
    Uniform { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    /// Extension range δ in configuration-space units.
    pub delta: f64,
    /// Collision checks per edge.
    pub n_cc: usize,
    pub workers: usize,
    pub max_iters_per_worker: usize,
    /// Node budget for both trees together, split evenly.
    pub tree_capacity: usize,
    /// Dynamic-domain shrink radius; `None` disables the heuristic.
    pub dd_radius: Option<f64>,
    /// Always extend the smaller tree (otherwise alternate).
    pub balance: bool,
    pub check: CheckOptions,
    pub sampler: SamplerKind,
    /// Lanes for the nearest-neighbor scan; 1 is the serial scan.
    pub nn_partitions: usize,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            delta: 0.5,
            n_cc: 32,
            workers: 1,
            max_iters_per_worker: 2000,
            tree_capacity: 200_000,
            dd_radius: Some(8.0),
            balance: true,
            check: CheckOptions::default(),
            sampler: SamplerKind::Halton,
            nn_partitions: 1,
        }
    }
}

impl PlannerParams {
    /// Default dynamic-domain radius for a given extension range.
    pub fn default_dd_radius(delta: f64) -> f64 {
        16.0 * delta
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidArgument("delta must be positive"));
        }
        if self.n_cc == 0 {
            return Err(Error::InvalidArgument("n_cc must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1"));
        }
        if self.tree_capacity < 2 {
            return Err(Error::InvalidArgument("tree capacity must hold both roots"));
        }
        if self.nn_partitions == 0 {
            return Err(Error::InvalidArgument("nn_partitions must be at least 1"));
        }
        if let Some(r) = self.dd_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidArgument("dynamic-domain radius must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Solved,
    Failed,
    InfeasibleEndpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub status: PlanStatus,
    /// Start to goal; empty unless solved.
    pub path: Vec<Config>,
    pub cost: f64,
    /// Extension attempts over all workers.
    pub iterations: u64,
    /// Samples discarded before an extension (dynamic-domain rejections and
    /// samples that coincide with their nearest node).
    pub rejected_samples: u64,
    pub stats: StatsSnapshot,
    pub solving_worker: Option<usize>,
    pub tree_sizes: [usize; 2],
}

/// Index of the start tree and the goal tree.
pub const START_TREE: usize = 0;
pub const GOAL_TREE: usize = 1;

const NO_WINNER: usize = usize::MAX;

/// Shared planning state for one query at a time.
#[derive(Debug)]
pub struct Search<'a> {
    model: &'a RobotModel,
    scene: &'a Scene,
    params: PlannerParams,
    trees: [Tree; 2],
    stop: AtomicBool,
    winner: AtomicUsize,
    meet: [AtomicUsize; 2],
    iterations: AtomicU64,
    rejected: AtomicU64,
    stats: CheckStats,
}

impl<'a> Search<'a> {
    /// Allocates the trees. Reuse the search across queries with [`Search::reset`].
    pub fn new(model: &'a RobotModel, scene: &'a Scene, params: PlannerParams) -> Result<Self, Error> {
        params.validate()?;
        let dof = model.dof();
        let cap_a = params.tree_capacity.div_ceil(2);
        let cap_b = params.tree_capacity / 2;
        Ok(Search {
            model,
            scene,
            params,
            trees: [Tree::new(dof, cap_a, params.dd_radius), Tree::new(dof, cap_b, params.dd_radius)],
            stop: AtomicBool::new(false),
            winner: AtomicUsize::new(NO_WINNER),
            meet: [AtomicUsize::new(0), AtomicUsize::new(0)],
            iterations: AtomicU64::new(0),
            rejected: AtomicU64::new(0),
            stats: CheckStats::default(),
        })
    }

    pub fn params(&self) -> &PlannerParams {
        &self.params
    }

    pub fn model(&self) -> &'a RobotModel {
        self.model
    }

    pub fn scene(&self) -> &'a Scene {
        self.scene
    }

    pub fn tree(&self, which: usize) -> &Tree {
        &self.trees[which]
    }

    /// Prepares a new query. Returns a finished outcome when no search is
    /// needed: an endpoint is out of limits or in collision, or the start
    /// equals the goal.
    pub fn reset(&mut self, start: &[f64], goal: &[f64]) -> Result<Option<PlanOutcome>, Error> {
        self.model.check_dim(start)?;
        self.model.check_dim(goal)?;
        for t in &mut self.trees {
            t.reset(self.params.dd_radius);
        }
        *self.stop.get_mut() = false;
        *self.winner.get_mut() = NO_WINNER;
        *self.iterations.get_mut() = 0;
        *self.rejected.get_mut() = 0;
        self.stats.reset();

        let mut v = EdgeValidator::new(self.model, self.scene, self.params.check);
        let feasible = self.model.within_limits(start)
            && self.model.within_limits(goal)
            && v.check_config(start)
            && v.check_config(goal);
        v.flush_stats(&self.stats);
        let finished = |status, path: Vec<Config>| PlanOutcome {
            status,
            path,
            cost: 0.0,
            iterations: 0,
            rejected_samples: 0,
            stats: self.stats.snapshot(),
            solving_worker: None,
            tree_sizes: [0, 0],
        };
        if !feasible {
            return Ok(Some(finished(PlanStatus::InfeasibleEndpoint, Vec::new())));
        }
        if start == goal {
            return Ok(Some(finished(PlanStatus::Solved, alloc::vec![Config::from(start)])));
        }
        self.trees[START_TREE].push(start, None);
        self.trees[GOAL_TREE].push(goal, None);
        Ok(None)
    }

    pub fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    pub fn worker(&self, id: usize) -> Worker<'_, 'a> {
        Worker::new(self, id)
    }

    /// Runs worker `id` until a solution is found, its iteration budget is
    /// spent, or its tree fills up.
    pub fn run_worker(&self, id: usize) {
        self.worker(id).run();
    }

    /// Collects the result. Call after every worker has returned.
    pub fn outcome(&self) -> Result<PlanOutcome, Error> {
        let winner = self.winner.load(Ordering::Acquire);
        let (status, path, solving_worker) = if winner == NO_WINNER {
            (PlanStatus::Failed, Vec::new(), None)
        } else {
            let a = self.meet[START_TREE].load(Ordering::Acquire);
            let b = self.meet[GOAL_TREE].load(Ordering::Acquire);
            let path = assemble_path(&self.trees[START_TREE], &self.trees[GOAL_TREE], a, b)?;
            (PlanStatus::Solved, path, Some(winner))
        };
        Ok(PlanOutcome {
            status,
            cost: path_cost(&path),
            path,
            iterations: self.iterations.load(Ordering::Relaxed),
            rejected_samples: self.rejected.load(Ordering::Relaxed),
            stats: self.stats.snapshot(),
            solving_worker,
            tree_sizes: [self.trees[0].len(), self.trees[1].len()],
        })
    }

    fn nearest(&self, tree: &Tree, q: &[f64]) -> NnResult {
        let len = tree.len();
        let r = if self.params.nn_partitions > 1 {
            nearest_parallel(tree, len, q, self.params.nn_partitions)
        } else {
            nearest_serial(tree, len, q)
        };
        r.expect("trees always hold their root")
    }

    fn claim(&self, id: usize, extended: usize, meet_ext: usize, meet_other: usize) {
        if self.winner.compare_exchange(NO_WINNER, id, Ordering::AcqRel, Ordering::Acquire).is_ok() {
            self.meet[extended].store(meet_ext, Ordering::Release);
            self.meet[1 - extended].store(meet_other, Ordering::Release);
        }
        self.stop.store(true, Ordering::Release);
    }
}

/// Result of one extension step.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub config: Vec<f64>,
    pub valid: bool,
}

/// Result of a greedy connect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connection {
    pub reached: bool,
    /// Last node appended to the extended tree (the start node if none).
    pub last_added: usize,
    /// Nearest node of the other tree that the connect aimed at.
    pub target: usize,
    pub appended: usize,
    pub capacity_exhausted: bool,
}

/// One worker's private state: sampler, collision scratch and counters.
#[derive(Debug)]
pub struct Worker<'s, 'a> {
    search: &'s Search<'a>,
    id: usize,
    validator: EdgeValidator<'a>,
    sampler: Sampler,
    sample: Vec<f64>,
    near: Vec<f64>,
    step: Vec<f64>,
    from: Vec<f64>,
    iterations: u64,
    rejected: u64,
}

impl<'s, 'a> Worker<'s, 'a> {
    fn new(search: &'s Search<'a>, id: usize) -> Self {
        let dof = search.model.dof();
        let workers = search.params.workers as u64;
        let sampler = match search.params.sampler {
            // Index 0 is the all-lower-limits corner; start at worker + 1.
            SamplerKind::Halton => Sampler::Halton(HaltonState::new(dof, id as u64 + 1, workers)),
            SamplerKind::Uniform { seed } => {
                Sampler::uniform(seed.wrapping_add((id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
            }
        };
        Worker {
            search,
            id,
            validator: EdgeValidator::new(search.model, search.scene, search.params.check),
            sampler,
            sample: alloc::vec![0.0; dof],
            near: alloc::vec![0.0; dof],
            step: alloc::vec![0.0; dof],
            from: alloc::vec![0.0; dof],
            iterations: 0,
            rejected: 0,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    /// Main loop. Counters are merged into the search on return.
    pub fn run(mut self) {
        let search = self.search;
        let params = search.params;
        let limits = search.model.limits();
        while (self.iterations as usize) < params.max_iters_per_worker {
            if search.stopped() {
                break;
            }
            self.iterations += 1;
            let s = self.select_tree();
            let tree = &search.trees[s];

            // Rejected samples are replaced by the next draw within the same
            // iteration.
            let mut sample = core::mem::take(&mut self.sample);
            let nn = loop {
                if search.stopped() {
                    break None;
                }
                self.sampler.sample_into(limits, &mut sample);
                let nn = search.nearest(tree, &sample);
                if nn.distance > 0.0 && tree.domain().accept(nn.index, nn.distance) {
                    break Some(nn);
                }
                self.rejected += 1;
            };
            let Some(nn) = nn else {
                self.sample = sample;
                break;
            };
            let ext = self.extend_step(s, &sample, nn);
            self.sample = sample;
            if !ext.valid {
                continue;
            }
            let Some(node) = tree.push(&ext.config, Some(nn.index)) else { break };
            let conn = self.greedy_connect(s, node);
            if conn.reached {
                search.claim(self.id, s, conn.last_added, conn.target);
                break;
            }
            if conn.capacity_exhausted {
                break;
            }
        }
        search.iterations.fetch_add(self.iterations, Ordering::Relaxed);
        search.rejected.fetch_add(self.rejected, Ordering::Relaxed);
        self.validator.flush_stats(&search.stats);
    }

    /// Tree to extend in the next iteration.
    fn select_tree(&self) -> usize {
        if self.search.params.balance {
            // Possibly stale sizes; no lock is taken.
            let a = self.search.trees[START_TREE].len();
            let b = self.search.trees[GOAL_TREE].len();
            if a <= b { START_TREE } else { GOAL_TREE }
        } else {
            (self.iterations as usize + self.id) % 2
        }
    }

    /// Steps from `nn` toward `c_rand` by at most δ and validates the new
    /// edge. A failed edge gives `nn` its dynamic-domain radius.
    pub fn extend_step(&mut self, tree: usize, c_rand: &[f64], nn: NnResult) -> Extension {
        let search = self.search;
        let t = &search.trees[tree];
        t.config_into(nn.index, &mut self.near);
        let delta = search.params.delta;
        let config = if nn.distance <= delta {
            c_rand.to_vec()
        } else {
            let mut out = alloc::vec![0.0; c_rand.len()];
            lerp_into(&self.near, c_rand, delta / nn.distance, &mut out);
            out
        };
        let valid = self.validator.validate_edge(&self.near, &config, search.params.n_cc);
        if !valid {
            t.domain().record_failure(nn.index);
        }
        Extension { config, valid }
    }

    /// Walks from node `start` of tree `tree` toward its nearest node in the
    /// other tree in `⌈d/δ⌉` equal steps, appending each validated step. The
    /// last step lands exactly on the target configuration.
    pub fn greedy_connect(&mut self, tree: usize, start: usize) -> Connection {
        let search = self.search;
        let ts = &search.trees[tree];
        let to = &search.trees[1 - tree];
        ts.config_into(start, &mut self.from);
        let nno = search.nearest(to, &self.from);
        let mut conn = Connection {
            reached: false,
            last_added: start,
            target: nno.index,
            appended: 0,
            capacity_exhausted: false,
        };
        if nno.distance == 0.0 {
            conn.reached = true;
            return conn;
        }
        let mut target = alloc::vec![0.0; self.from.len()];
        to.config_into(nno.index, &mut target);
        let steps = libm::ceil(nno.distance / search.params.delta).max(1.0) as usize;
        let origin = self.from.clone();
        for k in 1..=steps {
            if k == steps {
                self.step.copy_from_slice(&target);
            } else {
                lerp_into(&origin, &target, k as f64 / steps as f64, &mut self.step);
            }
            if !self.validator.validate_edge(&self.from, &self.step, search.params.n_cc) {
                return conn;
            }
            match ts.push(&self.step, Some(conn.last_added)) {
                Some(i) => {
                    conn.last_added = i;
                    conn.appended += 1;
                }
                None => {
                    conn.capacity_exhausted = true;
                    return conn;
                }
            }
            core::mem::swap(&mut self.from, &mut self.step);
            if search.stopped() && k < steps {
                return conn;
            }
        }
        conn.reached = true;
        conn
    }

    pub fn local_stats(&self) -> StatsSnapshot {
        self.validator.local_stats()
    }
}

/// Start-to-goal path through the meeting nodes `meet_a` (start tree) and
/// `meet_b` (goal tree), whose configurations must coincide.
pub fn assemble_path(tree_a: &Tree, tree_b: &Tree, meet_a: usize, meet_b: usize) -> Result<Vec<Config>, Error> {
    let ca = tree_a.config(meet_a);
    let cb = tree_b.config(meet_b);
    let gap = ca.iter().zip(&cb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if gap > 1e-12 {
        return Err(Error::Invariant(format!(
            "meeting nodes {meet_a} and {meet_b} differ by {gap}"
        )));
    }
    let mut path = Vec::new();
    let mut cur = Some(meet_a);
    while let Some(i) = cur {
        path.push(Config::from(tree_a.config(i)));
        cur = tree_a.parent(i);
    }
    path.reverse();
    let mut cur = tree_b.parent(meet_b);
    while let Some(i) = cur {
        path.push(Config::from(tree_b.config(i)));
        cur = tree_b.parent(i);
    }
    Ok(path)
}

/// Arclength of a path in configuration space.
pub fn path_cost(path: &[Config]) -> f64 {
    path.windows(2).fold(0.0, |acc, w| acc + libm::sqrt(nn::distance_sq(&w[0], &w[1])))
}
