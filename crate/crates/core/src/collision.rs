//! Sphere-based collision checking.
//!
//! A configuration is checked in two stages. The coarse stage tests one
//! bounding sphere per link against every scene primitive and every
//! self-collision pair, and records which (link, primitive) and pair
//! combinations might touch. Only those combinations are re-tested with the
//! link's fine spheres. Because each coarse sphere contains its link's fine
//! spheres, the two-stage answer equals the all-fine answer.
//!
//! Contact semantics: a sphere collides only when the separation is strictly
//! smaller than its radius. Tangent contact is free.

use alloc::string::String;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::config::lerp_into;
use crate::error::{Error, SceneError};
use crate::kinematics::{RobotModel, Sphere};
use crate::math::{self, dot, norm_sq, quaternion_norm, Pose, Transform, Vec3};

/// Radius padding for the coarse filter. Coarse spheres contain fine spheres
/// only up to a 1e-9 load tolerance plus rounding in FK, so the filter is
/// padded to stay conservative.
const COARSE_SLACK: f64 = 1e-6;

/// Oriented box: pose as given in the scene file plus its derived frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Cuboid {
    pose: Pose,
    half_extents: Vec3,
    frame: Transform,
}

impl Cuboid {
    pub fn new(pose: Pose, half_extents: Vec3) -> Self {
        Cuboid { pose, half_extents, frame: pose.to_transform() }
    }

    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn half_extents(&self) -> Vec3 {
        self.half_extents
    }

    pub fn frame(&self) -> &Transform {
        &self.frame
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Sphere(Sphere),
    Box(Cuboid),
    Capsule { a: Vec3, b: Vec3, radius: f64 },
}

impl Primitive {
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        Primitive::Sphere(Sphere::new(center, radius))
    }

    pub fn cuboid(pose: Pose, half_extents: Vec3) -> Self {
        Primitive::Box(Cuboid::new(pose, half_extents))
    }

    pub fn capsule(a: Vec3, b: Vec3, radius: f64) -> Self {
        Primitive::Capsule { a, b, radius }
    }

    /// Squared distance from `p` to the primitive's core (center, solid box,
    /// or segment) and the radius to add on top of it.
    #[inline]
    fn core_distance_sq(&self, p: Vec3) -> (f64, f64) {
        match self {
            Primitive::Sphere(s) => (norm_sq(math::sub(p, s.center)), s.radius),
            Primitive::Box(b) => {
                let local = b.frame.apply_inverse(p);
                let h = b.half_extents;
                let mut d = 0.0;
                for k in 0..3 {
                    let excess = local[k].abs() - h[k];
                    if excess > 0.0 {
                        d += excess * excess;
                    }
                }
                (d, 0.0)
            }
            Primitive::Capsule { a, b, radius } => (point_segment_distance_sq(p, *a, *b), *radius),
        }
    }
}

pub(crate) fn point_segment_distance_sq(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = math::sub(b, a);
    let len_sq = norm_sq(ab);
    let t = if len_sq > 0.0 { (dot(math::sub(p, a), ab) / len_sq).clamp(0.0, 1.0) } else { 0.0 };
    norm_sq(math::sub(p, math::add(a, math::scale(ab, t))))
}

/// `true` when the sphere penetrates the primitive; touching is free.
#[inline]
pub fn sphere_vs_primitive(s: &Sphere, p: &Primitive) -> bool {
    let (d_sq, r) = p.core_distance_sq(s.center);
    let reach = s.radius + r;
    d_sq < reach * reach
}

#[inline]
fn spheres_overlap(a: &Sphere, b: &Sphere, slack: f64) -> bool {
    let reach = a.radius + b.radius + slack;
    norm_sq(math::sub(a.center, b.center)) < reach * reach
}

#[inline]
fn coarse_vs_primitive(s: &Sphere, p: &Primitive) -> bool {
    let (d_sq, r) = p.core_distance_sq(s.center);
    let reach = s.radius + r + COARSE_SLACK;
    d_sq < reach * reach
}

/// Obstacles as posed primitives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub name: String,
    primitives: Vec<Primitive>,
}

impl Scene {
    pub fn new(name: impl Into<String>, primitives: Vec<Primitive>) -> Result<Self, SceneError> {
        for (index, p) in primitives.iter().enumerate() {
            validate_primitive(index, p)?;
        }
        Ok(Scene { name: name.into(), primitives })
    }

    pub fn empty() -> Self {
        Scene::default()
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }
}

fn validate_primitive(index: usize, p: &Primitive) -> Result<(), SceneError> {
    let finite = |vs: &[f64]| vs.iter().all(|v| v.is_finite());
    match p {
        Primitive::Sphere(s) => {
            if !finite(&s.center) || !s.radius.is_finite() {
                return Err(SceneError::NonFinite { index });
            }
            if s.radius <= 0.0 {
                return Err(SceneError::Radius { index, value: s.radius });
            }
        }
        Primitive::Box(b) => {
            if !finite(&b.pose.translation) || !finite(&b.pose.rotation) || !finite(&b.half_extents) {
                return Err(SceneError::NonFinite { index });
            }
            let n = quaternion_norm(b.pose.rotation);
            if (n - 1.0).abs() > 1e-6 {
                return Err(SceneError::Rotation { index, norm: n });
            }
            if b.half_extents.iter().any(|h| *h <= 0.0) {
                return Err(SceneError::HalfExtents { index });
            }
        }
        Primitive::Capsule { a, b, radius } => {
            if !finite(a) || !finite(b) || !radius.is_finite() {
                return Err(SceneError::NonFinite { index });
            }
            if *radius <= 0.0 {
                return Err(SceneError::Radius { index, value: *radius });
            }
        }
    }
    Ok(())
}

/// Diagnostic counters. Relaxed atomics: they never drive control flow.
#[derive(Debug, Default)]
pub struct CheckStats {
    pub sphere_tests: AtomicU64,
    pub fk_calls: AtomicU64,
    pub fine_stage_entries: AtomicU64,
}

/// Plain snapshot of [`CheckStats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsSnapshot {
    pub sphere_tests: u64,
    pub fk_calls: u64,
    pub fine_stage_entries: u64,
}

impl CheckStats {
    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            sphere_tests: self.sphere_tests.load(Ordering::Relaxed),
            fk_calls: self.fk_calls.load(Ordering::Relaxed),
            fine_stage_entries: self.fine_stage_entries.load(Ordering::Relaxed),
        }
    }

    pub fn add(&self, s: &StatsSnapshot) {
        self.sphere_tests.fetch_add(s.sphere_tests, Ordering::Relaxed);
        self.fk_calls.fetch_add(s.fk_calls, Ordering::Relaxed);
        self.fine_stage_entries.fetch_add(s.fine_stage_entries, Ordering::Relaxed);
    }

    pub fn reset(&self) {
        self.sphere_tests.store(0, Ordering::Relaxed);
        self.fk_calls.store(0, Ordering::Relaxed);
        self.fine_stage_entries.store(0, Ordering::Relaxed);
    }
}

/// Knobs that change how much work a check does, never its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Coarse filter before fine spheres; off means fine-only brute force.
    pub two_stage: bool,
    /// Stop validating an edge after the batch that found a collision.
    pub early_exit: bool,
    /// Samples per batch. Batches rake across the edge: the first batch holds
    /// samples spread over the whole segment. Width 1 is plain sequential.
    pub batch_width: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { two_stage: true, early_exit: true, batch_width: 8 }
    }
}

/// One discretized edge: samples `from + (i/n)(to - from)` for `i = 1..=n`.
/// `from` itself is not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCheckRequest {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub resolution: usize,
}

/// Reusable per-thread collision checker with scratch buffers.
#[derive(Debug)]
pub struct EdgeValidator<'a> {
    model: &'a RobotModel,
    scene: &'a Scene,
    opts: CheckOptions,
    poses: Vec<Transform>,
    coarse: Vec<Sphere>,
    prim_flags: Vec<(usize, usize)>,
    pair_flags: Vec<(usize, usize)>,
    fine_offsets: Vec<usize>,
    fine_world: Vec<Sphere>,
    fine_ready: Vec<bool>,
    sample: Vec<f64>,
    local: StatsSnapshot,
}

impl<'a> EdgeValidator<'a> {
    pub fn new(model: &'a RobotModel, scene: &'a Scene, opts: CheckOptions) -> Self {
        let mut fine_offsets = Vec::with_capacity(model.num_links() + 1);
        let mut total = 0;
        for link in model.links() {
            fine_offsets.push(total);
            total += link.spheres.fine.len();
        }
        fine_offsets.push(total);
        EdgeValidator {
            model,
            scene,
            opts: CheckOptions { batch_width: opts.batch_width.max(1), ..opts },
            poses: Vec::with_capacity(model.num_links()),
            coarse: Vec::with_capacity(model.num_links()),
            prim_flags: Vec::new(),
            pair_flags: Vec::new(),
            fine_offsets,
            fine_world: alloc::vec![Sphere::new([0.0; 3], 0.0); total],
            fine_ready: alloc::vec![false; model.num_links()],
            sample: alloc::vec![0.0; model.dof()],
            local: StatsSnapshot::default(),
        }
    }

    pub fn options(&self) -> CheckOptions {
        self.opts
    }

    pub fn model(&self) -> &'a RobotModel {
        self.model
    }

    /// Counters accumulated since the last flush.
    pub fn local_stats(&self) -> StatsSnapshot {
        self.local
    }

    /// Adds the local counters into `stats` and zeroes them.
    pub fn flush_stats(&mut self, stats: &CheckStats) {
        stats.add(&self.local);
        self.local = StatsSnapshot::default();
    }

    /// `true` when `q` is collision-free. `q.len()` must equal the model dof.
    pub fn check_config(&mut self, q: &[f64]) -> bool {
        self.model.forward_kinematics_into(q, &mut self.poses);
        self.local.fk_calls += 1;
        self.fine_ready.iter_mut().for_each(|r| *r = false);
        if self.opts.two_stage {
            self.two_stage()
        } else {
            self.fine_only()
        }
    }

    fn fine_spheres(&mut self, link: usize) -> &[Sphere] {
        let (lo, hi) = (self.fine_offsets[link], self.fine_offsets[link + 1]);
        if !self.fine_ready[link] {
            let pose = &self.poses[link];
            for (out, s) in self.fine_world[lo..hi].iter_mut().zip(&self.model.links()[link].spheres.fine) {
                *out = s.transformed(pose);
            }
            self.fine_ready[link] = true;
        }
        &self.fine_world[lo..hi]
    }

    fn two_stage(&mut self) -> bool {
        let model = self.model;
        let prims = self.scene.primitives();
        self.prim_flags.clear();
        self.pair_flags.clear();
        self.coarse.clear();
        let mut tests = 0u64;
        for (k, link) in model.links().iter().enumerate() {
            let c = link.spheres.coarse.transformed(&self.poses[k]);
            for (j, p) in prims.iter().enumerate() {
                if coarse_vs_primitive(&c, p) {
                    self.prim_flags.push((k, j));
                }
            }
            tests += prims.len() as u64;
            self.coarse.push(c);
        }
        for &(a, b) in model.self_pairs() {
            if spheres_overlap(&self.coarse[a], &self.coarse[b], 2.0 * COARSE_SLACK) {
                self.pair_flags.push((a, b));
            }
        }
        tests += model.self_pairs().len() as u64;
        self.local.sphere_tests += tests;
        if self.prim_flags.is_empty() && self.pair_flags.is_empty() {
            return true;
        }
        self.local.fine_stage_entries += 1;

        for i in 0..self.prim_flags.len() {
            let (link, prim) = self.prim_flags[i];
            let p = &prims[prim];
            let fine = self.fine_spheres(link);
            let n = fine.len() as u64;
            let hit = fine.iter().any(|s| sphere_vs_primitive(s, p));
            self.local.sphere_tests += n;
            if hit {
                return false;
            }
        }
        for i in 0..self.pair_flags.len() {
            let (a, b) = self.pair_flags[i];
            self.fine_spheres(a);
            self.fine_spheres(b);
            if self.fine_pair_collides(a, b) {
                return false;
            }
        }
        true
    }

    fn fine_pair_collides(&mut self, a: usize, b: usize) -> bool {
        let sa = &self.fine_world[self.fine_offsets[a]..self.fine_offsets[a + 1]];
        let sb = &self.fine_world[self.fine_offsets[b]..self.fine_offsets[b + 1]];
        let mut tests = 0;
        let mut hit = false;
        'outer: for x in sa {
            for y in sb {
                tests += 1;
                if spheres_overlap(x, y, 0.0) {
                    hit = true;
                    break 'outer;
                }
            }
        }
        self.local.sphere_tests += tests;
        hit
    }

    fn fine_only(&mut self) -> bool {
        let model = self.model;
        let prims = self.scene.primitives();
        for link in 0..model.num_links() {
            let fine = self.fine_spheres(link);
            let n = fine.len() as u64;
            let hit = fine.iter().any(|s| prims.iter().any(|p| sphere_vs_primitive(s, p)));
            self.local.sphere_tests += n * prims.len() as u64;
            if hit {
                return false;
            }
        }
        for &(a, b) in model.self_pairs() {
            self.fine_spheres(b);
            if self.fine_pair_collides(a, b) {
                return false;
            }
        }
        true
    }

    #[inline]
    fn check_sample(&mut self, from: &[f64], to: &[f64], i: usize, n: usize) -> bool {
        let mut sample = core::mem::take(&mut self.sample);
        lerp_into(from, to, i as f64 / n as f64, &mut sample);
        let free = self.check_config(&sample);
        self.sample = sample;
        free
    }

    /// Checks one batch (`step`) of the raked sample order. Returns whether
    /// every sample in it was free.
    fn check_batch(&mut self, from: &[f64], to: &[f64], n: usize, step: usize) -> bool {
        let width = self.opts.batch_width;
        let per = n.div_ceil(width);
        let mut free = true;
        for k in 0..width {
            let i = k * per + step + 1;
            if i > n {
                break;
            }
            free &= self.check_sample(from, to, i, n);
            if !free && self.opts.early_exit {
                // Remaining lanes of the batch would still run on SIMT
                // hardware; here they are skipped.
                return false;
            }
        }
        free
    }

    /// Validates the discretized segment `from → to`. Dimensions must match
    /// the model.
    pub fn validate_edge(&mut self, from: &[f64], to: &[f64], resolution: usize) -> bool {
        let n = resolution.max(1);
        if from == to {
            return self.check_config(to);
        }
        let per = n.div_ceil(self.opts.batch_width);
        let mut valid = true;
        for step in 0..per {
            valid &= self.check_batch(from, to, n, step);
            if !valid && self.opts.early_exit {
                return false;
            }
        }
        valid
    }

    /// Validates many edges, interleaving their batches so that each round
    /// advances every still-open edge by one batch.
    pub fn validate_edges(&mut self, requests: &[EdgeCheckRequest]) -> Vec<bool> {
        let mut valid = alloc::vec![true; requests.len()];
        let mut open = alloc::vec![true; requests.len()];
        let width = self.opts.batch_width;
        let rounds = requests.iter().map(|r| r.resolution.max(1).div_ceil(width)).max().unwrap_or(0);
        for step in 0..rounds {
            for (r, req) in requests.iter().enumerate() {
                if !open[r] {
                    continue;
                }
                let n = req.resolution.max(1);
                if req.from == req.to {
                    valid[r] = self.check_config(&req.to);
                    open[r] = false;
                    continue;
                }
                if step >= n.div_ceil(width) {
                    open[r] = false;
                    continue;
                }
                valid[r] &= self.check_batch(&req.from, &req.to, n, step);
                if !valid[r] && self.opts.early_exit {
                    open[r] = false;
                }
            }
        }
        valid
    }
}

/// Two-stage check of a single configuration.
pub fn check_config(model: &RobotModel, scene: &Scene, q: &[f64], stats: &CheckStats) -> Result<bool, Error> {
    model.check_dim(q)?;
    let mut v = EdgeValidator::new(model, scene, CheckOptions::default());
    let free = v.check_config(q);
    v.flush_stats(stats);
    Ok(free)
}

fn check_request(model: &RobotModel, req: &EdgeCheckRequest) -> Result<(), Error> {
    model.check_dim(&req.from)?;
    model.check_dim(&req.to)?;
    if req.resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1"));
    }
    Ok(())
}

/// Validates one discretized edge with sequential sample order.
pub fn validate_edge(
    model: &RobotModel,
    scene: &Scene,
    req: &EdgeCheckRequest,
    early_exit: bool,
    stats: &CheckStats,
) -> Result<bool, Error> {
    check_request(model, req)?;
    let opts = CheckOptions { early_exit, batch_width: 1, ..CheckOptions::default() };
    let mut v = EdgeValidator::new(model, scene, opts);
    let ok = v.validate_edge(&req.from, &req.to, req.resolution);
    v.flush_stats(stats);
    Ok(ok)
}

/// Validates a batch of edges; equal to mapping [`validate_edge`] over them.
pub fn validate_edge_batched(
    model: &RobotModel,
    scene: &Scene,
    requests: &[EdgeCheckRequest],
    stats: &CheckStats,
) -> Result<Vec<bool>, Error> {
    for r in requests {
        check_request(model, r)?;
    }
    let mut v = EdgeValidator::new(model, scene, CheckOptions::default());
    let out = v.validate_edges(requests);
    v.flush_stats(stats);
    Ok(out)
}
