use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::run::{rod_problem, run_cilium};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::integrators::{max_stable_dt, Scheme};

/// Stability thresholds and timings of both schemes on one cilium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub dt_pure: f64,
    pub dt_semi: f64,
    pub dt_ratio: f64,
    /// Seconds to `t_end` at half the respective threshold.
    pub wall_pure: f64,
    pub wall_semi: f64,
    pub speedup: f64,
    /// Largest tip distance between the two half-threshold runs, relative
    /// to the largest tip deflection of the pure run.
    pub tip_mismatch: f64,
    /// Semi step whose tip path stays within `accuracy` of the pure run,
    /// found by halving from half its threshold.
    pub dt_semi_matched: Option<f64>,
    pub wall_semi_matched: Option<f64>,
    pub speedup_matched: Option<f64>,
    pub accuracy: f64,
    pub horizon: f64,
}

/// Halvings tried when matching the semi run to the pure one.
const MATCH_HALVINGS: usize = 8;

/// A single-rod copy of `base` with `scheme` and a step that puts exactly
/// `samples` equal intervals of frames on `[0, t_end]`.
fn timed_config(base: &ScenarioConfig, scheme: Scheme, dt: f64) -> ScenarioConfig {
    let samples = base.benchmark.samples;
    let per_sample = (base.t_end / samples as f64 / dt).ceil().max(1.0) as usize;
    let mut c = base.clone();
    c.scheme = scheme;
    c.carpet.rods = 1;
    c.output.stride = per_sample;
    c.dt = base.t_end / (per_sample * samples) as f64;
    c
}

fn timed_run(config: &ScenarioConfig) -> Result<(Trajectory, f64)> {
    let start = Instant::now();
    let trajectory = run_cilium(config)?.into_result().map_err(|f| f.error)?;
    Ok((trajectory, start.elapsed().as_secs_f64()))
}

fn largest_deflection(t: &Trajectory) -> f64 {
    let base = t.frames[0].rods[0].tip;
    t.tip_path(0)
        .iter()
        .map(|p| distance(p, &base))
        .fold(0.0, f64::max)
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest tip distance between two runs recorded at the same frame times.
pub fn tip_distance(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.frames.len() != b.frames.len() {
        return Err(Error::InvalidInput(format!(
            "trajectories hold {} and {} frames",
            a.frames.len(),
            b.frames.len()
        )));
    }
    Ok(a.tip_path(0)
        .iter()
        .zip(b.tip_path(0))
        .map(|(p, q)| distance(p, &q))
        .fold(0.0, f64::max))
}

/// Locates both stability thresholds over `t_end` (or the configured
/// horizon), then times both schemes to `t_end` at half their threshold.
/// The semi step is also halved until its tip path agrees with the pure
/// run to the configured accuracy, and that run is timed too.
pub fn benchmark_stability(base: &ScenarioConfig) -> Result<BenchmarkReport> {
    base.validate()?;
    let spec = base.benchmark;
    let horizon = spec.horizon.unwrap_or(base.t_end);
    let problem = rod_problem(base, 0)?;
    let bounds = (spec.dt_min, spec.dt_max);
    let dt_pure = max_stable_dt(Scheme::Pure, &problem, bounds, horizon, spec.trials)?;
    let dt_semi = max_stable_dt(Scheme::Semi, &problem, bounds, horizon, spec.trials)?;

    let (pure, wall_pure) = timed_run(&timed_config(base, Scheme::Pure, 0.5 * dt_pure))?;
    let (semi, wall_semi) = timed_run(&timed_config(base, Scheme::Semi, 0.5 * dt_semi))?;
    let scale = largest_deflection(&pure);
    if !(scale > 0.0) {
        return Err(Error::Scenario("the drive does not deflect the tip".into()));
    }
    let tip_mismatch = tip_distance(&pure, &semi)? / scale;

    let mut matched = None;
    let mut dt = 0.5 * dt_semi;
    let mut candidate = (semi, wall_semi, tip_mismatch);
    for _ in 0..=MATCH_HALVINGS {
        if candidate.2 <= spec.accuracy {
            matched = Some((dt, candidate.1));
            break;
        }
        dt *= 0.5;
        let (run, wall) = timed_run(&timed_config(base, Scheme::Semi, dt))?;
        let mismatch = tip_distance(&pure, &run)? / scale;
        candidate = (run, wall, mismatch);
    }

    Ok(BenchmarkReport {
        dt_pure,
        dt_semi,
        dt_ratio: dt_semi / dt_pure,
        wall_pure,
        wall_semi,
        speedup: wall_pure / wall_semi,
        tip_mismatch,
        dt_semi_matched: matched.map(|m| m.0),
        wall_semi_matched: matched.map(|m| m.1),
        speedup_matched: matched.map(|m| wall_pure / m.1),
        accuracy: spec.accuracy,
        horizon,
    })
}
