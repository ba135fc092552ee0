//! Explicit time stepping: the plain forward Euler scheme on the full
//! vector state and the scheme that evolves the rod on the collinear
//! manifold of the closed-form family, plus a stability search.

mod manifold;
mod pure;
mod semi;
mod stability;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{adiag, diff_first, max_norm, Vec2};
use crate::rod::{
    bending_couple, energy, solve_contact_force, BoundaryConditions, EndKind, Loads, MaterialParams, RodState,
};

pub use manifold::{lift, project, project_onto, ManifoldState};
pub use pure::step_pure_numeric;
pub use semi::{step_semi_analytic, DEFAULT_EPS_FACTOR};
pub use stability::{is_stable, max_stable_dt, BLOWUP_FACTOR};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Pure,
    Semi,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pure => "pure",
            Scheme::Semi => "semi",
        }
    }
}

/// Diagnostics of one step, evaluated on the new state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub dt: f64,
    /// `max |d_s upsilon - adiag omega|`.
    pub r4: f64,
    /// `max |omega x kappa|`.
    pub r5: f64,
    /// `max |upsilon x kappa|`.
    pub r6: f64,
    pub energy: f64,
    pub finite: bool,
    /// `max |kappa_bar d_t C - omega_bar d_s C|`; semi scheme only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compatibility: Option<f64>,
}

impl StepReport {
    fn unstable(dt: f64) -> Self {
        Self {
            dt,
            r4: f64::NAN,
            r5: f64::NAN,
            r6: f64::NAN,
            energy: f64::NAN,
            finite: false,
            compatibility: None,
        }
    }
}

/// `max |d_s upsilon - adiag omega|` with central differences.
pub fn compatibility_drift(state: &RodState) -> Result<f64> {
    let dv = diff_first(&state.upsilon, state.grid.spacing())?;
    Ok(dv
        .iter()
        .zip(&state.omega)
        .map(|(d, w)| (d - adiag(*w)).norm())
        .fold(0.0, f64::max))
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("time step must be positive, got {dt}")))
    }
}

/// Time derivatives of `upsilon` and `omega` from both balance laws, with
/// the contact force from its boundary-value problem.
struct BalanceRates {
    upsilon: Vec<Vec2>,
    omega: Vec<Vec2>,
}

fn balance_rates(
    state: &RodState,
    params: &MaterialParams,
    loads: &Loads,
    bc: &BoundaryConditions,
    t: f64,
) -> Result<BalanceRates> {
    let grid = state.grid;
    let h = grid.spacing();
    let (ra, ri) = (params.linear_density(), params.rotary_inertia());
    let n = solve_contact_force(state, params, loads, bc, t)?;
    let dn = diff_first(&n, h)?;
    let dm = diff_first(&bending_couple(state, params), h)?;
    let f = loads.force_field(&grid, t);
    let l = loads.couple_field(&grid, t);
    Ok(BalanceRates {
        upsilon: dn.iter().zip(&f).map(|(dn, f)| (dn + f) / ra).collect(),
        omega: (0..grid.nodes())
            .map(|i| (dm[i] + adiag(n[i]) + l[i]) / ri)
            .collect(),
    })
}

/// Overwrites clamped end values with the prescribed motion at `t`.
fn apply_clamps(upsilon: &mut [Vec2], omega: &mut [Vec2], bc: &BoundaryConditions, t: f64) {
    let last = upsilon.len() - 1;
    for (end, i) in [(&bc.base, 0), (&bc.tip, last)] {
        if let EndKind::Clamped(motion) = end {
            upsilon[i] = motion.velocity(t);
            omega[i] = motion.angular_velocity(t);
        }
    }
}

/// Indices of the moment-free ends.
fn free_ends(bc: &BoundaryConditions, nodes: usize) -> impl Iterator<Item = usize> {
    let base = bc.base.is_free().then_some(0);
    let tip = bc.tip.is_free().then_some(nodes - 1);
    base.into_iter().chain(tip)
}

/// One rod with its loads, ends and initial data.
#[derive(Clone, Debug)]
pub struct Problem {
    pub params: MaterialParams,
    pub loads: Loads,
    pub bc: BoundaryConditions,
    pub initial: RodState,
    pub t0: f64,
    /// Energy level the drive itself can reach; the stability ceiling is
    /// measured against it when the initial energy is smaller.
    pub energy_scale: f64,
    /// Direction angle used where the initial velocity gives none.
    pub rest_angle: f64,
}

impl Problem {
    pub fn new(params: MaterialParams, loads: Loads, bc: BoundaryConditions, initial: RodState) -> Result<Self> {
        params.validate()?;
        if initial.grid != params.grid()? {
            return Err(Error::GridMismatch(
                "initial state does not live on the material grid".into(),
            ));
        }
        Ok(Self {
            params,
            loads,
            bc,
            initial,
            t0: 0.0,
            energy_scale: 0.0,
            rest_angle: 0.0,
        })
    }

    pub fn initial_energy(&self) -> f64 {
        energy(&self.initial, &self.params)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SchemeState {
    Pure(RodState),
    Semi(ManifoldState),
}

/// Owns the evolving state of one problem under one scheme.
#[derive(Clone, Debug)]
pub struct Integrator<'a> {
    problem: &'a Problem,
    state: SchemeState,
    t: f64,
}

impl<'a> Integrator<'a> {
    pub fn new(problem: &'a Problem, scheme: Scheme) -> Result<Self> {
        let init = &problem.initial;
        let state = match scheme {
            Scheme::Pure => SchemeState::Pure(init.clone()),
            Scheme::Semi => {
                let speed = max_norm(&init.upsilon);
                let eps = if speed > 0.0 {
                    DEFAULT_EPS_FACTOR * speed
                } else {
                    f64::MIN_POSITIVE
                };
                let mut m = project(init, &vec![problem.rest_angle; init.grid.nodes()], eps)?;
                m.unwrap_angle();
                SchemeState::Semi(m)
            }
        };
        Ok(Self {
            problem,
            state,
            t: problem.t0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &SchemeState {
        &self.state
    }

    pub fn scheme(&self) -> Scheme {
        match self.state {
            SchemeState::Pure(_) => Scheme::Pure,
            SchemeState::Semi(_) => Scheme::Semi,
        }
    }

    /// Current vector state; lifted for the semi scheme.
    pub fn rod_state(&self) -> RodState {
        match &self.state {
            SchemeState::Pure(r) => r.clone(),
            SchemeState::Semi(m) => lift(m),
        }
    }

    pub fn step(&mut self, dt: f64) -> Result<StepReport> {
        let p = self.problem;
        let report = match &self.state {
            SchemeState::Pure(r) => {
                let (next, report) = step_pure_numeric(r, &p.params, &p.loads, &p.bc, self.t, dt)?;
                self.state = SchemeState::Pure(next);
                report
            }
            SchemeState::Semi(m) => {
                let (next, report) = step_semi_analytic(m, &p.params, &p.loads, &p.bc, self.t, dt, None)?;
                self.state = SchemeState::Semi(next);
                report
            }
        };
        self.t += dt;
        Ok(report)
    }
}
