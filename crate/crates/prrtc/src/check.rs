//! Fine-sphere-only path checker with its own geometry, used to re-validate
//! planner output at a higher resolution than the planner used.

use prrtc_core::{forward_kinematics, Primitive, RobotModel, Scene};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Waypoint or interpolated configuration outside the joint limits.
    Limits { segment: usize, t: f64 },
    Obstacle { segment: usize, t: f64, link: usize, primitive: usize },
    SelfCollision { segment: usize, t: f64, a: usize, b: usize },
    Dimension { waypoint: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub configs_checked: usize,
    pub violations: Vec<Violation>,
}

impl PathReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean distance from `p` to the primitive's surface, negative inside.
/// Only the sign relative to a sphere radius matters here.
fn clearance(p: [f64; 3], prim: &Primitive) -> f64 {
    match prim {
        Primitive::Sphere(s) => dot(sub(p, s.center), sub(p, s.center)).sqrt() - s.radius,
        Primitive::Capsule { a, b, radius } => {
            let ab = sub(*b, *a);
            let ap = sub(p, *a);
            let len = dot(ab, ab);
            let t = if len > 0.0 { (dot(ap, ab) / len).clamp(0.0, 1.0) } else { 0.0 };
            let c = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
            dot(sub(p, c), sub(p, c)).sqrt() - radius
        }
        Primitive::Box(b) => {
            // Closest point by clamping in the box frame.
            let f = b.frame();
            let d = sub(p, f.translation);
            let r = f.rotation;
            let local = [
                r[0][0] * d[0] + r[1][0] * d[1] + r[2][0] * d[2],
                r[0][1] * d[0] + r[1][1] * d[1] + r[2][1] * d[2],
                r[0][2] * d[0] + r[1][2] * d[1] + r[2][2] * d[2],
            ];
            let h = b.half_extents();
            let clamped = [
                local[0].clamp(-h[0], h[0]),
                local[1].clamp(-h[1], h[1]),
                local[2].clamp(-h[2], h[2]),
            ];
            let out = sub(local, clamped);
            let dist = dot(out, out).sqrt();
            if dist > 0.0 {
                dist
            } else {
                -(h[0] - local[0].abs()).min(h[1] - local[1].abs()).min(h[2] - local[2].abs())
            }
        }
    }
}

/// Checks one configuration against the scene and the self-collision pairs
/// with every fine sphere; returns the first violation found.
pub fn config_violation(model: &RobotModel, scene: &Scene, q: &[f64], segment: usize, t: f64) -> Option<Violation> {
    let limits = model.limits();
    if q.iter().zip(limits).any(|(v, (lo, hi))| v < lo || v > hi) {
        return Some(Violation::Limits { segment, t });
    }
    let frames = forward_kinematics(model, q).ok()?;
    let world: Vec<Vec<([f64; 3], f64)>> = model
        .links()
        .iter()
        .zip(&frames)
        .map(|(l, f)| l.spheres.fine.iter().map(|s| (f.apply(s.center), s.radius)).collect())
        .collect();
    for (link, spheres) in world.iter().enumerate() {
        for (pi, prim) in scene.primitives().iter().enumerate() {
            if spheres.iter().any(|(c, r)| clearance(*c, prim) < *r) {
                return Some(Violation::Obstacle { segment, t, link, primitive: pi });
            }
        }
    }
    for &(a, b) in model.self_pairs() {
        for (ca, ra) in &world[a] {
            for (cb, rb) in &world[b] {
                if dot(sub(*ca, *cb), sub(*ca, *cb)).sqrt() < ra + rb {
                    return Some(Violation::SelfCollision { segment, t, a, b });
                }
            }
        }
    }
    None
}

/// Re-validates a waypoint path. Each segment of length `L` is sampled at
/// `multiplier * n_cc * max(1, ceil(L / delta))` evenly spaced points plus
/// its start, which is `multiplier` times the planner's own density.
pub fn check_path(
    model: &RobotModel,
    scene: &Scene,
    path: &[impl AsRef<[f64]>],
    delta: f64,
    n_cc: usize,
    multiplier: usize,
) -> PathReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for (i, q) in path.iter().enumerate() {
        if q.as_ref().len() != model.dof() {
            violations.push(Violation::Dimension { waypoint: i });
        }
    }
    if !violations.is_empty() || path.is_empty() {
        return PathReport { configs_checked: 0, violations };
    }
    let first = path[0].as_ref();
    checked += 1;
    violations.extend(config_violation(model, scene, first, 0, 0.0));
    let mut q = vec![0.0; model.dof()];
    for (seg, w) in path.windows(2).enumerate() {
        let (a, b) = (w[0].as_ref(), w[1].as_ref());
        let len = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let pieces = ((len / delta).ceil() as usize).max(1);
        let steps = multiplier.max(1) * n_cc.max(1) * pieces;
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            for ((o, x), y) in q.iter_mut().zip(a).zip(b) {
                *o = x + t * (y - x);
            }
            if k == steps {
                q.copy_from_slice(b);
            }
            checked += 1;
            if let Some(v) = config_violation(model, scene, &q, seg, t) {
                violations.push(v);
                break;
            }
        }
    }
    PathReport { configs_checked: checked, violations }
}
