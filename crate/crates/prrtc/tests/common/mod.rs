#![allow(dead_code)]

use std::path::{Path, PathBuf};

use prrtc::io::{self, IoError, ParamsFile, SamplerName};
use prrtc_core::{Joint, JointKind, Link, LinkSpheres, Pose, Primitive, RobotModel, Scene, Sphere};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point(r: &mut ChaCha8Rng, s: f64) -> [f64; 3] {
    std::array::from_fn(|_| r.random_range(-s..s))
}

fn unit<const N: usize>(r: &mut ChaCha8Rng) -> [f64; N] {
    loop {
        let v: [f64; N] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return v.map(|x| x / n);
        }
    }
}

pub fn random_model(r: &mut ChaCha8Rng) -> RobotModel {
    let n = r.random_range(1..8);
    let mut links: Vec<Link> = Vec::new();
    for k in 0..n {
        let kind = [JointKind::Revolute, JointKind::Prismatic, JointKind::Fixed][r.random_range(0..3)];
        let kind = if k == 0 && kind == JointKind::Fixed { JointKind::Revolute } else { kind };
        let fine: Vec<Sphere> = (0..r.random_range(0..4)).map(|_| Sphere::new(point(r, 0.2), r.random_range(0.01..0.1))).collect();
        links.push(Link {
            name: format!("link_{k}"),
            joint: Joint {
                kind,
                parent: if k == 0 || r.random_bool(0.1) { None } else { Some(r.random_range(0..k)) },
                origin: Pose { translation: point(r, 1.0), rotation: unit(r) },
                axis: unit(r),
                limits: (kind != JointKind::Fixed).then(|| {
                    let lo = r.random_range(-3.0..0.0);
                    (lo, lo + r.random_range(0.0..4.0))
                }),
            },
            spheres: LinkSpheres { coarse: Sphere::new([0.0; 3], 0.5), fine },
        });
    }
    let mut pairs = Vec::new();
    for a in 0..n {
        for (b, link) in links.iter().enumerate().skip(a + 1) {
            if link.joint.parent != Some(a) && r.random_bool(0.3) {
                pairs.push((a, b));
            }
        }
    }
    RobotModel::new(format!("robot_{}", r.random::<u16>()), links, pairs).unwrap()
}

pub fn random_scene(r: &mut ChaCha8Rng) -> Scene {
    let prims = (0..r.random_range(0..8))
        .map(|_| match r.random_range(0..3) {
            0 => Primitive::sphere(point(r, 2.0), r.random_range(0.01..1.0)),
            1 => Primitive::cuboid(
                Pose { translation: point(r, 2.0), rotation: unit(r) },
                std::array::from_fn(|_| r.random_range(0.01..1.0)),
            ),
            _ => Primitive::capsule(point(r, 2.0), point(r, 2.0), r.random_range(0.01..1.0)),
        })
        .collect();
    Scene::new(format!("scene_{}", r.random::<u16>()), prims).unwrap()
}

pub fn random_params(r: &mut ChaCha8Rng) -> ParamsFile {
    ParamsFile {
        delta: r.random_bool(0.5).then(|| r.random_range(0.01..2.0)),
        n_cc: r.random_bool(0.5).then(|| r.random_range(1..100)),
        workers: r.random_bool(0.5).then(|| r.random_range(1..16)),
        max_iters: r.random_bool(0.5).then(|| r.random_range(1..100_000)),
        tree_capacity: r.random_bool(0.5).then(|| r.random_range(2..1_000_000)),
        dynamic_domain: r.random_bool(0.5).then(|| r.random_bool(0.5)),
        dd_radius: r.random_bool(0.5).then(|| r.random_range(0.1..10.0)),
        balance: r.random_bool(0.5).then(|| r.random_bool(0.5)),
        two_stage: r.random_bool(0.5).then(|| r.random_bool(0.5)),
        early_exit: r.random_bool(0.5).then(|| r.random_bool(0.5)),
        batch_width: r.random_bool(0.5).then(|| r.random_range(1..16)),
        sampler: r.random_bool(0.5).then(|| if r.random_bool(0.5) { SamplerName::Halton } else { SamplerName::Uniform }),
        seed: r.random_bool(0.5).then(|| r.random()),
        nn_partitions: r.random_bool(0.5).then(|| r.random_range(1..64)),
    }
}

pub fn random_config(r: &mut ChaCha8Rng, dof: usize) -> Vec<f64> {
    (0..dof).map(|_| r.random_range(-3.0..3.0)).collect()
}

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub type Loader = fn(&Path) -> Result<(), IoError>;

/// Every file in `tests/fixtures/invalid`, its loader, and the field the
/// error must name.
pub fn invalid_cases() -> Vec<(&'static str, Loader, &'static str)> {
    let robot: Loader = |p| io::load_robot(p).map(drop);
    let scene: Loader = |p| io::load_scene(p).map(drop);
    let problem: Loader = |p| io::load_problem(p).map(drop);
    let path: Loader = |p| io::load_path(p).map(drop);
    let results: Loader = |p| io::read_results_csv(p).map(drop);
    vec![
        ("robot_axis_norm.json", robot, "links[1].joint.axis"),
        ("robot_fine_escapes.json", robot, "links[0].fine[1]"),
        ("robot_missing_radius.json", robot, "links[2].coarse"),
        ("robot_bad_joint_type.json", robot, "links[0].joint.type"),
        ("robot_parent_order.json", robot, "links[1].joint.parent"),
        ("robot_adjacent_pair.json", robot, "self_pairs[0]"),
        ("robot_unknown_field.json", robot, "colour"),
        ("robot_quaternion.json", robot, "links[2].joint.origin.rotation"),
        ("robot_inverted_limits.json", robot, "links[0].joint.limits"),
        ("robot_fixed_with_limits.json", robot, "links[2].joint.limits"),
        ("scene_negative_radius.json", scene, "primitives[0].radius"),
        ("scene_box_extents.json", scene, "primitives[1].half_extents"),
        ("scene_unknown_type.json", scene, "primitives[2].type"),
        ("scene_rotation.json", scene, "primitives[1].rotation"),
        ("scene_string_center.json", scene, "primitives[0].center[1]"),
        ("problem_start_dim.json", problem, "start"),
        ("problem_goal_not_number.json", problem, "goal[1]"),
        ("problem_missing_scene.json", problem, "scene"),
        ("problem_bad_param.json", problem, "params.delta"),
        ("problem_unknown_param.json", problem, "deltaa"),
        ("path_empty.json", path, "path"),
        ("path_dimension.json", path, "path[2]"),
        ("path_repeat.json", path, "path[1]"),
        ("path_missing_cost.json", path, "cost"),
        ("results_bad_header.csv", results, "header"),
        ("results_bad_status.csv", results, "row 1"),
    ]
}
