use super::{Integrator, Problem, Scheme};
use crate::error::{Error, Result};

/// A run is unstable once its energy exceeds this multiple of
/// `max(initial energy, problem.energy_scale)`.
pub const BLOWUP_FACTOR: f64 = 1e3;

/// Bisection stops once the bracket ratio is below this.
const LOG_TOLERANCE: f64 = 1.05;

/// Runs `ceil(horizon / dt)` steps and checks finiteness and the energy
/// ceiling after each.
pub fn is_stable(problem: &Problem, scheme: Scheme, dt: f64, horizon: f64) -> Result<bool> {
    let ceiling = BLOWUP_FACTOR * problem.initial_energy().max(problem.energy_scale);
    let steps = (horizon / dt).ceil() as usize;
    let mut run = Integrator::new(problem, scheme)?;
    for _ in 0..steps {
        let rep = run.step(dt)?;
        if !rep.finite || rep.energy > ceiling {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Factor between successive candidates while looking for a stable step.
const SCAN_FACTOR: f64 = 4.0;

/// Largest stable step inside `dt_bounds`. Candidates fall from the upper
/// bound by [`SCAN_FACTOR`] until one is stable, so the cost is set by the
/// threshold rather than by the lower bound. The bracket is then bisected
/// on `log dt` to 5% or for `trials` steps, whichever comes first.
pub fn max_stable_dt(
    scheme: Scheme,
    problem: &Problem,
    dt_bounds: (f64, f64),
    horizon: f64,
    trials: usize,
) -> Result<f64> {
    let (lo_bound, mut hi) = dt_bounds;
    if !(lo_bound > 0.0 && hi >= lo_bound && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("bad step bounds ({lo_bound}, {hi})")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
    }
    if is_stable(problem, scheme, hi, horizon)? {
        return Ok(hi);
    }
    let mut lo = hi;
    loop {
        lo = (lo / SCAN_FACTOR).max(lo_bound);
        if is_stable(problem, scheme, lo, horizon)? {
            break;
        }
        if lo == lo_bound {
            return Err(Error::Scenario(format!(
                "{} scheme is already unstable at the lower bound dt = {lo_bound}",
                scheme.name()
            )));
        }
        hi = lo;
    }
    for _ in 0..trials {
        if hi / lo <= LOG_TOLERANCE {
            break;
        }
        let mid = (lo * hi).sqrt();
        if is_stable(problem, scheme, mid, horizon)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Vec2};
    use crate::rod::{BoundaryConditions, Loads, MaterialParams, RodState};

    fn problem(nodes: usize, bent: bool) -> Problem {
        let params = MaterialParams {
            density: 1.0,
            area: 0.01,
            inertia: 0.01,
            bending_stiffness: 0.5,
            length: 1.0,
            nodes,
        };
        let g = Grid1D::new(1.0, nodes).unwrap();
        let mut init = RodState::rest(g);
        if bent {
            for (k, s) in init.kappa.iter_mut().zip(g.positions()) {
                *k = Vec2::new(0.5 * (1.0 - s) * (1.0 - s), 0.0);
            }
        }
        Problem::new(params, Loads::none(), BoundaryConditions::cantilever(), init).unwrap()
    }

    #[test]
    fn undriven_rest_is_stable_everywhere() {
        let p = problem(21, false);
        for scheme in [Scheme::Pure, Scheme::Semi] {
            assert_eq!(max_stable_dt(scheme, &p, (1e-4, 1e-1), 1.0, 20).unwrap(), 1e-1);
        }
    }

    #[test]
    fn bad_bounds_are_rejected() {
        let p = problem(21, true);
        assert!(max_stable_dt(Scheme::Pure, &p, (0.0, 1.0), 1.0, 5).is_err());
        assert!(max_stable_dt(Scheme::Pure, &p, (1e-3, 1e-4), 1.0, 5).is_err());
        assert!(max_stable_dt(Scheme::Pure, &p, (1e-4, 1e-3), -1.0, 5).is_err());
        assert!(matches!(
            max_stable_dt(Scheme::Pure, &p, (0.5, 1.0), 1.0, 5),
            Err(Error::Scenario(_))
        ));
    }

    #[test]
    fn bisection_brackets_the_threshold() {
        let p = problem(41, true);
        let dt = max_stable_dt(Scheme::Semi, &p, (1e-6, 1e-1), 0.5, 40).unwrap();
        assert!(is_stable(&p, Scheme::Semi, dt, 0.5).unwrap());
        assert!(!is_stable(&p, Scheme::Semi, dt * LOG_TOLERANCE * 1.01, 0.5).unwrap());
    }

    #[test]
    fn pure_threshold_falls_with_refinement() {
        let found: Vec<f64> = [21, 41, 81]
            .iter()
            .map(|&n| max_stable_dt(Scheme::Pure, &problem(n, true), (1e-5, 1e-1), 0.2, 40).unwrap())
            .collect();
        assert!(found[0] > found[1] && found[1] > found[2], "{found:?}");
    }
}
