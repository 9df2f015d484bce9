#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix4, Quaternion as NQuat, Rotation3, Translation3, Unit, UnitQuaternion, Vector3};
use prrtc_core::{
    Joint, JointKind, Link, LinkSpheres, Pose, Primitive, RobotModel, Scene, Sphere, Transform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn unit_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return q.map(|v| v / n);
        }
    }
}

fn point(rng: &mut ChaCha8Rng, r: f64) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(-r..r))
}

/// Fine spheres plus a coarse sphere that bounds them.
pub fn random_spheres(rng: &mut ChaCha8Rng) -> LinkSpheres {
    let n = rng.random_range(1..5);
    let fine: Vec<Sphere> =
        (0..n).map(|_| Sphere::new(point(rng, 0.3), rng.random_range(0.02..0.12))).collect();
    let center = point(rng, 0.1);
    let radius = fine
        .iter()
        .map(|s| {
            let d = [s.center[0] - center[0], s.center[1] - center[1], s.center[2] - center[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() + s.radius
        })
        .fold(0.0, f64::max)
        + rng.random_range(0.0..0.05);
    LinkSpheres { coarse: Sphere::new(center, radius), fine }
}

/// A random forest of revolute, prismatic and fixed joints with random
/// origins and axes, and random non-adjacent self pairs.
pub fn random_model(rng: &mut ChaCha8Rng, links: usize) -> RobotModel {
    let mut out = Vec::with_capacity(links);
    for k in 0..links {
        let parent = if k == 0 || rng.random_bool(0.1) { None } else { Some(rng.random_range(0..k)) };
        let kind = match rng.random_range(0..10) {
            0..=5 => JointKind::Revolute,
            6..=7 => JointKind::Prismatic,
            _ if k == 0 => JointKind::Revolute,
            _ => JointKind::Fixed,
        };
        let limits = match kind {
            JointKind::Revolute => Some((-PI, PI)),
            JointKind::Prismatic => Some((-0.3, 0.3)),
            JointKind::Fixed => None,
        };
        out.push(Link {
            name: format!("l{k}"),
            joint: Joint {
                kind,
                parent,
                origin: Pose { translation: point(rng, 0.5), rotation: unit_quaternion(rng) },
                axis: unit_vector(rng),
                limits,
            },
            spheres: random_spheres(rng),
        });
    }
    let mut pairs = Vec::new();
    for a in 0..links {
        for b in a + 1..links {
            let adjacent = out[b].joint.parent == Some(a) || out[a].joint.parent == Some(b);
            if !adjacent && rng.random_bool(0.3) {
                pairs.push((a, b));
            }
        }
    }
    RobotModel::new("random", out, pairs).expect("generated model is valid")
}

pub fn random_scene(rng: &mut ChaCha8Rng, n: usize, extent: f64) -> Scene {
    let prims = (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => Primitive::sphere(point(rng, extent), rng.random_range(0.05..0.4)),
            1 => Primitive::cuboid(
                Pose { translation: point(rng, extent), rotation: unit_quaternion(rng) },
                std::array::from_fn(|_| rng.random_range(0.02..0.4)),
            ),
            _ => {
                let a = point(rng, extent);
                let b = if rng.random_bool(0.1) { a } else { point(rng, extent) };
                Primitive::capsule(a, b, rng.random_range(0.02..0.3))
            }
        })
        .collect();
    Scene::new("random", prims).expect("generated scene is valid")
}

pub fn random_config(rng: &mut ChaCha8Rng, model: &RobotModel) -> Vec<f64> {
    model.limits().iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect()
}

// ------------------------------------------------------------------ oracles

/// Dense homogeneous-matrix forward kinematics.
pub fn fk_oracle(model: &RobotModel, q: &[f64]) -> Vec<Matrix4<f64>> {
    let mut out: Vec<Matrix4<f64>> = Vec::new();
    let mut qi = 0;
    for link in model.links() {
        let j = &link.joint;
        let [w, x, y, z] = j.origin.rotation;
        let t = j.origin.translation;
        let origin = Translation3::new(t[0], t[1], t[2]).to_homogeneous()
            * UnitQuaternion::from_quaternion(NQuat::new(w, x, y, z)).to_homogeneous();
        let axis = Vector3::new(j.axis[0], j.axis[1], j.axis[2]);
        let motion = match j.kind {
            JointKind::Revolute => {
                qi += 1;
                Rotation3::from_axis_angle(&Unit::new_normalize(axis), q[qi - 1]).to_homogeneous()
            }
            JointKind::Prismatic => {
                qi += 1;
                Translation3::from(axis * q[qi - 1]).to_homogeneous()
            }
            JointKind::Fixed => Matrix4::identity(),
        };
        let local = origin * motion;
        out.push(match j.parent {
            Some(p) => out[p] * local,
            None => local,
        });
    }
    out
}

pub fn to_matrix(t: &Transform) -> Matrix4<f64> {
    let r = t.rotation;
    let p = t.translation;
    Matrix4::new(
        r[0][0], r[0][1], r[0][2], p[0], //
        r[1][0], r[1][1], r[1][2], p[1], //
        r[2][0], r[2][1], r[2][2], p[2], //
        0.0, 0.0, 0.0, 1.0,
    )
}

fn mat_apply(m: &Matrix4<f64>, c: [f64; 3]) -> [f64; 3] {
    let v = m * nalgebra::Vector4::new(c[0], c[1], c[2], 1.0);
    [v[0], v[1], v[2]]
}

/// Closest point of a primitive's core to `p`, and the radius around it.
fn closest(prim: &Primitive, p: [f64; 3]) -> ([f64; 3], f64) {
    match prim {
        Primitive::Sphere(s) => (s.center, s.radius),
        Primitive::Capsule { a, b, radius } => {
            let a = Vector3::from(*a);
            let b = Vector3::from(*b);
            let p = Vector3::from(p);
            let ab = b - a;
            let t = if ab.norm_squared() > 0.0 { ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0) } else { 0.0 };
            let c = a + ab * t;
            ([c.x, c.y, c.z], *radius)
        }
        Primitive::Box(b) => {
            let pose = b.pose();
            let [w, x, y, z] = pose.rotation;
            let rot = UnitQuaternion::from_quaternion(NQuat::new(w, x, y, z));
            let t = Vector3::from(pose.translation);
            let local = rot.inverse() * (Vector3::from(p) - t);
            let h = b.half_extents();
            let c = Vector3::new(local.x.clamp(-h[0], h[0]), local.y.clamp(-h[1], h[1]), local.z.clamp(-h[2], h[2]));
            let w = rot * c + t;
            ([w.x, w.y, w.z], 0.0)
        }
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Every fine sphere against every primitive and self pair, with
/// independently computed kinematics and geometry. `true` if free.
pub fn brute_force_free(model: &RobotModel, scene: &Scene, q: &[f64]) -> bool {
    let frames = fk_oracle(model, q);
    let world: Vec<Vec<([f64; 3], f64)>> = model
        .links()
        .iter()
        .zip(&frames)
        .map(|(l, m)| l.spheres.fine.iter().map(|s| (mat_apply(m, s.center), s.radius)).collect())
        .collect();
    for spheres in &world {
        for prim in scene.primitives() {
            for &(c, r) in spheres {
                let (p, pr) = closest(prim, c);
                if dist(c, p) < r + pr {
                    return false;
                }
            }
        }
    }
    for &(a, b) in model.self_pairs() {
        for &(ca, ra) in &world[a] {
            for &(cb, rb) in &world[b] {
                if dist(ca, cb) < ra + rb {
                    return false;
                }
            }
        }
    }
    true
}

/// Configurations of an edge validated at resolution `n`.
pub fn edge_samples(from: &[f64], to: &[f64], n: usize) -> Vec<Vec<f64>> {
    (1..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
        })
        .collect()
}
