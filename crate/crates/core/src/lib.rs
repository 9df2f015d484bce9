//! Allocation-only core of a parallel bidirectional RRT-Connect planner.
//!
//! Everything in this crate is pure computation over borrowed models and
//! scenes, plus the atomic append-only trees the planner workers share. No
//! threads, clocks or files live here; the `prrtc` crate spawns workers,
//! times runs and reads the JSON formats.
//!
//! Module map:
//!
//! - [`math`]: rigid transforms and unit quaternions.
//! - [`kinematics`]: serial-chain forward kinematics and link sphere models.
//! - [`collision`]: sphere/primitive tests, two-stage configuration checks and
//!   discretized edge validation.
//! - [`sampling`]: Halton and seeded uniform samplers, dynamic-domain radii.
//! - [`nn`]: linear-scan nearest neighbor, serial and partitioned.
//! - [`tree`]: fixed-capacity tree with two-phase publish.
//! - [`planner`]: the per-worker RRT-Connect loop and path assembly.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod collision;
pub mod config;
pub mod error;
pub mod kinematics;
pub mod math;
pub mod nn;
pub mod planner;
pub mod sampling;
pub mod tree;

pub use collision::{
    check_config, sphere_vs_primitive, validate_edge, validate_edge_batched, CheckOptions,
    CheckStats, Cuboid, EdgeCheckRequest, EdgeValidator, Primitive, Scene, StatsSnapshot,
};
pub use config::Config;
pub use error::{Error, ModelError, SceneError};
pub use kinematics::{
    forward_kinematics, sphere_positions, Joint, JointKind, Link, LinkSpheres, RobotModel, Sphere,
    SphereLevel,
};
pub use math::{Pose, Quaternion, Transform, Vec3};
pub use nn::{distance, nearest_parallel, nearest_parallel_counted, nearest_serial, ConfigSet, LaneAccounting, NnResult};
pub use planner::{
    assemble_path, path_cost, Connection, Extension, PlanOutcome, PlanStatus, PlannerParams, SamplerKind, Search,
    Worker, GOAL_TREE, START_TREE,
};
pub use sampling::{halton_value, DynamicDomain, HaltonState, Sampler};
pub use tree::Tree;
