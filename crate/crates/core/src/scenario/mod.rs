//! Driven cilium and carpet scenarios: configuration, run orchestration,
//! trajectory files, signal analysis and the scheme benchmark.

mod analysis;
mod benchmark;
mod config;
mod drive;
mod run;
mod trajectory;

pub use analysis::{correlation_lag, dominant_frequency, SpectralPeak};
pub use benchmark::{benchmark_stability, tip_distance, BenchmarkReport};
pub use config::{
    BenchmarkSpec, BoundarySpec, CarpetSpec, DriveSpec, EndSpec, OutputFormat, OutputSpec, ScenarioConfig,
    SCENARIO_SCHEMA,
};
pub use drive::{drive_couple, drive_loads, ramp, static_energy};
pub use run::{rod_problem, run_carpet, run_cilium, simulate, worker_count, RodFailure, RunOutcome, THREADS_VAR};
pub use trajectory::{Drift, Frame, Point, RodFrame, Trajectory, TRAJECTORY_SCHEMA};
