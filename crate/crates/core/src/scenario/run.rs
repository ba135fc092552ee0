use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::Vector3;
use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::drive::{drive_loads, static_energy};
use super::trajectory::{Drift, Frame, RodFrame, Trajectory};
use crate::error::{Error, Result};
use crate::integrators::{Integrator, Problem, StepReport, BLOWUP_FACTOR};
use crate::rod::{reconstruct_centerline, Frame as Directors, RodState};

/// Environment variable holding the worker count; 0 or unset means one
/// worker per core.
pub const THREADS_VAR: &str = "ROD_SIM_THREADS";

/// A run that stopped early.
#[derive(Debug, thiserror::Error)]
#[error("rod {rod}: {error}")]
pub struct RodFailure {
    pub rod: usize,
    #[source]
    pub error: Error,
}

/// Frames recorded up to the end or up to the first failure. After a
/// failure the trajectory holds the frames every rod completed.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub failure: Option<RodFailure>,
}

impl RunOutcome {
    pub fn into_result(self) -> std::result::Result<Trajectory, RodFailure> {
        match self.failure {
            None => Ok(self.trajectory),
            Some(f) => Err(f),
        }
    }
}

/// The single-rod problem for rod `k` of the configured carpet.
pub fn rod_problem(config: &ScenarioConfig, k: usize) -> Result<Problem> {
    let params = config.material;
    let loads = drive_loads(config.drive, params.length, config.rod_phase(k));
    let initial = RodState::rest(params.grid()?);
    let mut problem = Problem::new(params, loads, config.boundary.conditions(), initial)?;
    problem.energy_scale = static_energy(&config.drive, params.length, params.bending_stiffness);
    Ok(problem)
}

fn base_position(config: &ScenarioConfig, k: usize) -> Vector3<f64> {
    Vector3::new(k as f64 * config.carpet.spacing, 0.0, 0.0)
}

fn rod_frame(state: &RodState, base: Vector3<f64>, report: Option<&StepReport>, energy: f64) -> Result<RodFrame> {
    let line = reconstruct_centerline(&state.kappa, &state.grid, base, Directors::identity())?;
    let positions = line.positions.iter().map(|p| [p.x, p.y, p.z]).collect();
    let drift = report.map(|r| Drift {
        r4: r.r4,
        r5: r.r5,
        r6: r.r6,
    });
    Ok(RodFrame::new(positions, Some(energy), drift))
}

struct RodRun {
    times: Vec<f64>,
    frames: Vec<RodFrame>,
    error: Option<Error>,
}

/// Steps rod `k` to `t_end`, recording a frame at `t = 0` and after every
/// `stride` steps. Stops early once `stop` is raised by another rod.
fn simulate_rod(config: &ScenarioConfig, k: usize, stop: &AtomicBool) -> RodRun {
    let mut run = RodRun {
        times: Vec::new(),
        frames: Vec::new(),
        error: None,
    };
    if let Err(e) = march(config, k, stop, &mut run) {
        run.error = Some(e);
    }
    run
}

fn march(config: &ScenarioConfig, k: usize, stop: &AtomicBool, run: &mut RodRun) -> Result<()> {
    let problem = rod_problem(config, k)?;
    let base = base_position(config, k);
    let ceiling = BLOWUP_FACTOR * problem.initial_energy().max(problem.energy_scale);
    let (steps, dt) = config.steps();
    let stride = config.output.stride;
    let mut integrator = Integrator::new(&problem, config.scheme)?;
    run.times.push(0.0);
    run.frames.push(rod_frame(&problem.initial, base, None, problem.initial_energy())?);
    for step in 1..=steps {
        if stop.load(Ordering::Relaxed) {
            return Ok(());
        }
        let report = integrator.step(dt)?;
        let t = step as f64 * dt;
        if !report.finite || report.energy > ceiling {
            return Err(Error::Unstable { t });
        }
        if step % stride == 0 || step == steps {
            run.times.push(t);
            run.frames.push(rod_frame(&integrator.rod_state(), base, Some(&report), report.energy)?);
        }
    }
    Ok(())
}

/// Worker count from [`THREADS_VAR`].
pub fn worker_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Configuration(format!("{THREADS_VAR} must be a whole number, got {v:?}"))),
    }
}

fn merge(config: &ScenarioConfig, runs: Vec<RodRun>) -> RunOutcome {
    let mut trajectory = Trajectory::new(runs.len(), config.material.nodes);
    let complete = runs.iter().map(|r| r.frames.len()).min().unwrap_or(0);
    let failure = runs
        .iter()
        .enumerate()
        .find(|(_, r)| r.error.is_some())
        .map(|(rod, _)| rod);
    let mut runs = runs;
    let failure = failure.map(|rod| RodFailure {
        rod,
        error: runs[rod].error.take().expect("failed rod carries its error"),
    });
    let times = runs[0].times[..complete].to_vec();
    let mut columns: Vec<_> = runs.into_iter().map(|r| r.frames.into_iter()).collect();
    for time in times {
        let rods = columns.iter_mut().map(|c| c.next().expect("every rod reached this frame")).collect();
        trajectory.frames.push(Frame { time, rods });
    }
    RunOutcome { trajectory, failure }
}

/// One base-clamped driven cilium.
pub fn run_cilium(config: &ScenarioConfig) -> Result<RunOutcome> {
    config.validate()?;
    if config.carpet.rods != 1 {
        return Err(Error::Configuration(format!(
            "a single cilium run needs one rod, the config has {}",
            config.carpet.rods
        )));
    }
    let run = simulate_rod(config, 0, &AtomicBool::new(false));
    Ok(merge(config, vec![run]))
}

/// `rods` uncoupled cilia with phases `phase + k * phase_increment` and
/// bases `spacing` apart along x, run on a worker pool. The first rod to
/// fail stops the others.
pub fn run_carpet(config: &ScenarioConfig) -> Result<RunOutcome> {
    config.validate()?;
    if config.carpet.rods < 2 {
        return Err(Error::Configuration("a carpet needs at least two rods".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| Error::Configuration(format!("cannot start worker pool: {e}")))?;
    let stop = AtomicBool::new(false);
    let runs: Vec<RodRun> = pool.install(|| {
        (0..config.carpet.rods)
            .into_par_iter()
            .map(|k| {
                let run = simulate_rod(config, k, &stop);
                if run.error.is_some() {
                    stop.store(true, Ordering::Relaxed);
                }
                run
            })
            .collect()
    });
    Ok(merge(config, runs))
}

/// [`run_cilium`] or [`run_carpet`] depending on the rod count.
pub fn simulate(config: &ScenarioConfig) -> Result<RunOutcome> {
    if config.carpet.rods == 1 {
        run_cilium(config)
    } else {
        run_carpet(config)
    }
}
