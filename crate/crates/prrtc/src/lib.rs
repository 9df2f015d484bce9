//! Planning driver, independent path checker, file formats and benchmark
//! harness around `prrtc-core`.

pub mod bench;
pub mod check;
pub mod io;
pub mod run;

pub use prrtc_core as core;
pub use run::{default_params, plan, resolve_workers, solve, PlanResult};
