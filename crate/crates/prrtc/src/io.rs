//! JSON formats for robots, scenes, problems and paths, and the results CSV.
//!
//! Every loader reports the file and the offending field, e.g.
//! `robot.json: links[2].joint.axis: norm 2 is not 1`.

use std::fs;
use std::path::{Path, PathBuf};

use prrtc_core::{
    Config, Joint, JointKind, Link, LinkSpheres, ModelError, PlanStatus, PlannerParams, Pose, Primitive,
    RobotModel, SamplerKind, Scene, SceneError, Sphere,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {error}", .path.display())]
    Read { path: PathBuf, error: std::io::Error },
    #[error("{}: {error}", .path.display())]
    Write { path: PathBuf, error: std::io::Error },
    #[error("{}: {field}: {message}", .path.display())]
    Parse { path: PathBuf, field: String, message: String },
    #[error("{}: {error}", .path.display())]
    Model { path: PathBuf, error: ModelError },
    #[error("{}: {error}", .path.display())]
    Scene { path: PathBuf, error: SceneError },
    #[error("{}: {field}: {message}", .path.display())]
    Invalid { path: PathBuf, field: String, message: String },
    #[error("{}: {error}", .path.display())]
    Csv { path: PathBuf, error: csv::Error },
}

impl IoError {
    fn invalid(path: &Path, field: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Invalid { path: path.to_path_buf(), field: field.into(), message: message.into() }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|error| IoError::Read { path: path.to_path_buf(), error })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        IoError::Parse {
            path: path.to_path_buf(),
            field: if field == "." { "<root>".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).expect("file types always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|error| IoError::Write { path: path.to_path_buf(), error })
}

fn identity_rotation() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

// ------------------------------------------------------------------ robot

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotFile {
    pub name: String,
    pub links: Vec<LinkFile>,
    #[serde(default)]
    pub self_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkFile {
    pub name: String,
    pub joint: JointFile,
    pub coarse: SphereFile,
    pub fine: Vec<SphereFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointType {
    Revolute,
    Prismatic,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    #[serde(rename = "type")]
    pub kind: JointType,
    #[serde(default)]
    pub parent: Option<usize>,
    #[serde(default)]
    pub origin: PoseFile,
    #[serde(default = "z_axis")]
    pub axis: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseFile {
    #[serde(default)]
    pub translation: [f64; 3],
    /// Quaternion as `[w, x, y, z]`.
    #[serde(default = "identity_rotation")]
    pub rotation: [f64; 4],
}

impl Default for PoseFile {
    fn default() -> Self {
        PoseFile { translation: [0.0; 3], rotation: identity_rotation() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereFile {
    pub center: [f64; 3],
    pub radius: f64,
}

impl From<Sphere> for SphereFile {
    fn from(s: Sphere) -> Self {
        SphereFile { center: s.center, radius: s.radius }
    }
}

impl From<SphereFile> for Sphere {
    fn from(s: SphereFile) -> Self {
        Sphere::new(s.center, s.radius)
    }
}

impl RobotFile {
    pub fn into_model(self) -> Result<RobotModel, ModelError> {
        let links = self
            .links
            .into_iter()
            .map(|l| Link {
                name: l.name,
                joint: Joint {
                    kind: match l.joint.kind {
                        JointType::Revolute => JointKind::Revolute,
                        JointType::Prismatic => JointKind::Prismatic,
                        JointType::Fixed => JointKind::Fixed,
                    },
                    parent: l.joint.parent,
                    origin: Pose { translation: l.joint.origin.translation, rotation: l.joint.origin.rotation },
                    axis: l.joint.axis,
                    limits: l.joint.limits.map(|[lo, hi]| (lo, hi)),
                },
                spheres: LinkSpheres {
                    coarse: l.coarse.into(),
                    fine: l.fine.into_iter().map(Sphere::from).collect(),
                },
            })
            .collect();
        let pairs = self.self_pairs.into_iter().map(|[a, b]| (a, b)).collect();
        RobotModel::new(self.name, links, pairs)
    }

    pub fn from_model(model: &RobotModel) -> Self {
        RobotFile {
            name: model.name().to_string(),
            links: model
                .links()
                .iter()
                .map(|l| LinkFile {
                    name: l.name.clone(),
                    joint: JointFile {
                        kind: match l.joint.kind {
                            JointKind::Revolute => JointType::Revolute,
                            JointKind::Prismatic => JointType::Prismatic,
                            JointKind::Fixed => JointType::Fixed,
                        },
                        parent: l.joint.parent,
                        origin: PoseFile {
                            translation: l.joint.origin.translation,
                            rotation: l.joint.origin.rotation,
                        },
                        axis: l.joint.axis,
                        limits: l.joint.limits.map(|(lo, hi)| [lo, hi]),
                    },
                    coarse: l.spheres.coarse.into(),
                    fine: l.spheres.fine.iter().copied().map(SphereFile::from).collect(),
                })
                .collect(),
            self_pairs: model.self_pairs().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

pub fn load_robot(path: impl AsRef<Path>) -> Result<RobotModel, IoError> {
    let path = path.as_ref();
    let file: RobotFile = read_json(path)?;
    file.into_model().map_err(|error| IoError::Model { path: path.to_path_buf(), error })
}

pub fn write_robot(path: impl AsRef<Path>, model: &RobotModel) -> Result<(), IoError> {
    write_json(path.as_ref(), &RobotFile::from_model(model))
}

// ------------------------------------------------------------------ scene

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub primitives: Vec<PrimitiveFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PrimitiveFile {
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    Box {
        translation: [f64; 3],
        #[serde(default = "identity_rotation")]
        rotation: [f64; 4],
        half_extents: [f64; 3],
    },
    Capsule {
        a: [f64; 3],
        b: [f64; 3],
        radius: f64,
    },
}

impl SceneFile {
    pub fn into_scene(self) -> Result<Scene, SceneError> {
        let prims = self
            .primitives
            .into_iter()
            .map(|p| match p {
                PrimitiveFile::Sphere { center, radius } => Primitive::sphere(center, radius),
                PrimitiveFile::Box { translation, rotation, half_extents } => {
                    Primitive::cuboid(Pose { translation, rotation }, half_extents)
                }
                PrimitiveFile::Capsule { a, b, radius } => Primitive::capsule(a, b, radius),
            })
            .collect();
        Scene::new(self.name, prims)
    }

    pub fn from_scene(scene: &Scene) -> Self {
        SceneFile {
            name: scene.name.clone(),
            primitives: scene
                .primitives()
                .iter()
                .map(|p| match p {
                    Primitive::Sphere(s) => PrimitiveFile::Sphere { center: s.center, radius: s.radius },
                    Primitive::Box(b) => PrimitiveFile::Box {
                        translation: b.pose().translation,
                        rotation: b.pose().rotation,
                        half_extents: b.half_extents(),
                    },
                    Primitive::Capsule { a, b, radius } => PrimitiveFile::Capsule { a: *a, b: *b, radius: *radius },
                })
                .collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    name: String,
    #[serde(default)]
    primitives: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereBody {
    center: [f64; 3],
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxBody {
    translation: [f64; 3],
    #[serde(default = "identity_rotation")]
    rotation: [f64; 4],
    half_extents: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapsuleBody {
    a: [f64; 3],
    b: [f64; 3],
    radius: f64,
}

fn body<T: DeserializeOwned>(path: &Path, prefix: &str, value: serde_json::Value) -> Result<T, IoError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        IoError::Parse {
            path: path.to_path_buf(),
            field: if inner == "." { prefix.to_string() } else { format!("{prefix}.{inner}") },
            message: e.into_inner().to_string(),
        }
    })
}

/// Primitives are dispatched on `type` by hand so that errors inside one
/// still carry the full field path.
fn parse_primitive(path: &Path, index: usize, value: serde_json::Value) -> Result<PrimitiveFile, IoError> {
    let prefix = format!("primitives[{index}]");
    let serde_json::Value::Object(mut map) = value else {
        return Err(IoError::invalid(path, prefix, "expected an object"));
    };
    let kind = match map.remove("type") {
        Some(serde_json::Value::String(s)) => s,
        Some(_) => return Err(IoError::invalid(path, format!("{prefix}.type"), "expected a string")),
        None => return Err(IoError::invalid(path, format!("{prefix}.type"), "missing field `type`")),
    };
    let rest = serde_json::Value::Object(map);
    Ok(match kind.as_str() {
        "sphere" => {
            let b: SphereBody = body(path, &prefix, rest)?;
            PrimitiveFile::Sphere { center: b.center, radius: b.radius }
        }
        "box" => {
            let b: BoxBody = body(path, &prefix, rest)?;
            PrimitiveFile::Box { translation: b.translation, rotation: b.rotation, half_extents: b.half_extents }
        }
        "capsule" => {
            let b: CapsuleBody = body(path, &prefix, rest)?;
            PrimitiveFile::Capsule { a: b.a, b: b.b, radius: b.radius }
        }
        other => {
            return Err(IoError::invalid(
                path,
                format!("{prefix}.type"),
                format!("unknown primitive `{other}`, expected sphere, box or capsule"),
            ))
        }
    })
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, IoError> {
    let path = path.as_ref();
    let raw: RawScene = read_json(path)?;
    let primitives = raw
        .primitives
        .into_iter()
        .enumerate()
        .map(|(i, v)| parse_primitive(path, i, v))
        .collect::<Result<_, _>>()?;
    let file = SceneFile { name: raw.name, primitives };
    file.into_scene().map_err(|error| IoError::Scene { path: path.to_path_buf(), error })
}

pub fn write_scene(path: impl AsRef<Path>, scene: &Scene) -> Result<(), IoError> {
    write_json(path.as_ref(), &SceneFile::from_scene(scene))
}

// ------------------------------------------------------------------ params

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerName {
    Halton,
    Uniform,
}

/// Planner settings as stored in files; unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_capacity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamic_domain: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dd_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_stage: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_exit: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nn_partitions: Option<usize>,
}

impl ParamsFile {
    /// Applies the set fields on top of `base`. A changed `delta` moves the
    /// dynamic-domain radius with it unless the radius is given explicitly.
    pub fn apply(&self, mut base: PlannerParams) -> PlannerParams {
        if let Some(d) = self.delta {
            base.delta = d;
            if base.dd_radius.is_some() {
                base.dd_radius = Some(PlannerParams::default_dd_radius(d));
            }
        }
        if let Some(v) = self.n_cc {
            base.n_cc = v;
        }
        if let Some(v) = self.workers {
            base.workers = v;
        }
        if let Some(v) = self.max_iters {
            base.max_iters_per_worker = v;
        }
        if let Some(v) = self.tree_capacity {
            base.tree_capacity = v;
        }
        if let Some(r) = self.dd_radius {
            base.dd_radius = Some(r);
        }
        match self.dynamic_domain {
            Some(false) => base.dd_radius = None,
            Some(true) if base.dd_radius.is_none() => {
                base.dd_radius = Some(self.dd_radius.unwrap_or(PlannerParams::default_dd_radius(base.delta)))
            }
            _ => {}
        }
        if let Some(v) = self.balance {
            base.balance = v;
        }
        if let Some(v) = self.two_stage {
            base.check.two_stage = v;
        }
        if let Some(v) = self.early_exit {
            base.check.early_exit = v;
        }
        if let Some(v) = self.batch_width {
            base.check.batch_width = v;
        }
        let seed = self.seed.or(match base.sampler {
            SamplerKind::Uniform { seed } => Some(seed),
            SamplerKind::Halton => None,
        });
        match (self.sampler, seed) {
            (Some(SamplerName::Halton), _) => base.sampler = SamplerKind::Halton,
            (Some(SamplerName::Uniform), s) => base.sampler = SamplerKind::Uniform { seed: s.unwrap_or(0) },
            (None, Some(s)) if matches!(base.sampler, SamplerKind::Uniform { .. }) => {
                base.sampler = SamplerKind::Uniform { seed: s }
            }
            _ => {}
        }
        if let Some(v) = self.nn_partitions {
            base.nn_partitions = v;
        }
        base
    }

    /// Every field set from `params`.
    pub fn from_params(params: &PlannerParams) -> Self {
        let (sampler, seed) = match params.sampler {
            SamplerKind::Halton => (SamplerName::Halton, None),
            SamplerKind::Uniform { seed } => (SamplerName::Uniform, Some(seed)),
        };
        ParamsFile {
            delta: Some(params.delta),
            n_cc: Some(params.n_cc),
            workers: Some(params.workers),
            max_iters: Some(params.max_iters_per_worker),
            tree_capacity: Some(params.tree_capacity),
            dynamic_domain: Some(params.dd_radius.is_some()),
            dd_radius: params.dd_radius,
            balance: Some(params.balance),
            two_stage: Some(params.check.two_stage),
            early_exit: Some(params.check.early_exit),
            batch_width: Some(params.check.batch_width),
            sampler: Some(sampler),
            seed,
            nn_partitions: Some(params.nn_partitions),
        }
    }
}

// ------------------------------------------------------------------ problem

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Relative paths resolve against the problem file's directory.
    pub robot: String,
    pub scene: String,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub params: ParamsFile,
}

fn is_default(p: &ParamsFile) -> bool {
    *p == ParamsFile::default()
}

/// A problem with its robot and scene loaded.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub path: PathBuf,
    pub robot_path: PathBuf,
    pub scene_path: PathBuf,
    pub robot: RobotModel,
    pub scene: Scene,
    pub start: Config,
    pub goal: Config,
    pub params: ParamsFile,
}

pub fn load_problem_file(path: impl AsRef<Path>) -> Result<ProblemFile, IoError> {
    read_json(path.as_ref())
}

pub fn write_problem(path: impl AsRef<Path>, problem: &ProblemFile) -> Result<(), IoError> {
    write_json(path.as_ref(), problem)
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Loads a problem plus the robot and scene it references, and checks the
/// endpoint dimensions against the robot.
pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem, IoError> {
    let path = path.as_ref();
    let file = load_problem_file(path)?;
    let robot_path = resolve(path, &file.robot);
    let scene_path = resolve(path, &file.scene);
    let robot = load_robot(&robot_path)?;
    let scene = load_scene(&scene_path)?;
    for (field, q) in [("start", &file.start), ("goal", &file.goal)] {
        if q.len() != robot.dof() {
            return Err(IoError::invalid(
                path,
                field,
                format!("has {} values but the robot has {} degrees of freedom", q.len(), robot.dof()),
            ));
        }
    }
    let name = file.name.clone().unwrap_or_else(|| {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    });
    Ok(Problem {
        name,
        path: path.to_path_buf(),
        robot_path,
        scene_path,
        robot,
        scene,
        start: file.start.into(),
        goal: file.goal.into(),
        params: file.params,
    })
}

/// Every `*.json` problem in `dir`, sorted by file name.
pub fn load_problem_dir(dir: impl AsRef<Path>) -> Result<Vec<Problem>, IoError> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|error| IoError::Read { path: dir.to_path_buf(), error })?;
    let mut paths = Vec::new();
    for e in entries {
        let e = e.map_err(|error| IoError::Read { path: dir.to_path_buf(), error })?;
        let p = e.path();
        if p.extension().is_some_and(|x| x == "json") {
            paths.push(p);
        }
    }
    paths.sort();
    paths.iter().map(load_problem).collect()
}

// ------------------------------------------------------------------ path

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathMetadata {
    pub cost: f64,
    pub params: ParamsFile,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub robot: String,
    pub scene: String,
    pub path: Vec<Vec<f64>>,
    pub metadata: PathMetadata,
}

impl PathFile {
    /// Waypoint count, equal dimensions and distinct neighbors.
    pub fn check(&self) -> Result<(), (String, String)> {
        let Some(first) = self.path.first() else {
            return Err(("path".into(), "needs at least one configuration".into()));
        };
        for (i, q) in self.path.iter().enumerate() {
            if q.len() != first.len() {
                return Err((format!("path[{i}]"), format!("has {} values, expected {}", q.len(), first.len())));
            }
            if i > 0 && *q == self.path[i - 1] {
                return Err((format!("path[{i}]"), "repeats the previous configuration".into()));
            }
        }
        Ok(())
    }

    pub fn configs(&self) -> Vec<Config> {
        self.path.iter().cloned().map(Config::from).collect()
    }
}

pub fn load_path(path: impl AsRef<Path>) -> Result<PathFile, IoError> {
    let path = path.as_ref();
    let file: PathFile = read_json(path)?;
    file.check().map_err(|(field, message)| IoError::invalid(path, field, message))?;
    Ok(file)
}

pub fn write_path(path: impl AsRef<Path>, file: &PathFile) -> Result<(), IoError> {
    let path = path.as_ref();
    file.check().map_err(|(field, message)| IoError::invalid(path, field, message))?;
    write_json(path, file)
}

// ------------------------------------------------------------------ results CSV

/// Column order of the results CSV.
pub const RESULTS_HEADER: &str = "problem,status,time_ms,cost,iterations,sphere_tests,workers,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusName {
    Solved,
    Failed,
    InfeasibleEndpoint,
}

impl From<PlanStatus> for StatusName {
    fn from(s: PlanStatus) -> Self {
        match s {
            PlanStatus::Solved => StatusName::Solved,
            PlanStatus::Failed => StatusName::Failed,
            PlanStatus::InfeasibleEndpoint => StatusName::InfeasibleEndpoint,
        }
    }
}

impl From<StatusName> for PlanStatus {
    fn from(s: StatusName) -> Self {
        match s {
            StatusName::Solved => PlanStatus::Solved,
            StatusName::Failed => PlanStatus::Failed,
            StatusName::InfeasibleEndpoint => PlanStatus::InfeasibleEndpoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub status: StatusName,
    pub time_ms: f64,
    /// Empty unless solved.
    pub cost: Option<f64>,
    pub iterations: u64,
    pub sphere_tests: u64,
    pub workers: usize,
    pub seed: Option<u64>,
}

pub fn write_results_csv(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<(), IoError> {
    let path = path.as_ref();
    let csv_err = |error| IoError::Csv { path: path.to_path_buf(), error };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if rows.is_empty() {
        w.write_record(RESULTS_HEADER.split(',')).map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|error| IoError::Write { path: path.to_path_buf(), error })
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>, IoError> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|error| IoError::Csv { path: path.to_path_buf(), error })?;
    let header = r.headers().map_err(|error| IoError::Csv { path: path.to_path_buf(), error })?;
    if header.iter().collect::<Vec<_>>().join(",") != RESULTS_HEADER {
        return Err(IoError::invalid(path, "header", format!("expected `{RESULTS_HEADER}`")));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| IoError::invalid(path, format!("row {}", i + 1), e.to_string()))
        })
        .collect()
}
