use std::f64::consts::{PI, TAU};

use super::{
    apply_clamps, balance_rates, check_dt, compatibility_drift, free_ends, lift, ManifoldState, StepReport,
};
use crate::error::Result;
use crate::grid::{cumtrapz, diff_first, direction, max_norm, Vec2};
use crate::rod::{energy, BoundaryConditions, EndKind, Loads, MaterialParams};

/// Default angle carry-over threshold relative to the largest nodal speed.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-8;

/// One step on the collinear manifold.
///
/// Both balance laws advance the lifted velocities by forward Euler. The
/// new velocities are projected onto the carried direction field, and the
/// spatial structure of `d_s upsilon = adiag omega` is then imposed exactly:
/// the speed `upsilon_bar` is uniform along the rod and the direction obeys
/// `d_s C = -omega_bar / upsilon_bar` from the base. The curvature
/// magnitude follows `d_t kappa_bar = d_s omega_bar` with the `omega_bar`
/// just computed.
///
/// `eps` defaults to `DEFAULT_EPS_FACTOR` times the largest updated speed;
/// where the speed is below it the previous angle increments are kept.
pub fn step_semi_analytic(
    m: &ManifoldState,
    params: &MaterialParams,
    loads: &Loads,
    bc: &BoundaryConditions,
    t: f64,
    dt: f64,
    eps: Option<f64>,
) -> Result<(ManifoldState, StepReport)> {
    check_dt(dt)?;
    if !m.is_finite() {
        return Ok((m.clone(), StepReport::unstable(dt)));
    }
    let grid = m.grid;
    let n = grid.nodes();
    let h = grid.spacing();

    let r = lift(m);
    let rates = balance_rates(&r, params, loads, bc, t)?;
    let advance = |x: &[Vec2], rate: &[Vec2]| -> Vec<Vec2> {
        x.iter().zip(rate).map(|(x, d)| x + d * dt).collect()
    };
    let mut upsilon = advance(&r.upsilon, &rates.upsilon);
    let mut omega = advance(&r.omega, &rates.omega);
    apply_clamps(&mut upsilon, &mut omega, bc, t + dt);
    let eps = eps.unwrap_or_else(|| DEFAULT_EPS_FACTOR * max_norm(&upsilon));

    let omega_bar: Vec<f64> = omega
        .iter()
        .zip(&m.angle)
        .map(|(w, &c)| w.dot(&direction(c)))
        .collect();

    let base_angle = advance_base_angle(m, bc, t + dt, dt, eps)?;
    let speed = upsilon[0].dot(&direction(base_angle));
    let angle: Vec<f64> = if speed.abs() > eps {
        cumtrapz(&omega_bar, h)
            .into_iter()
            .map(|q| base_angle - q / speed)
            .collect()
    } else {
        m.angle.iter().map(|c| c - m.angle[0] + base_angle).collect()
    };

    let dw = diff_first(&omega_bar, h)?;
    let mut kappa: Vec<f64> = m.kappa.iter().zip(&dw).map(|(k, d)| k + dt * d).collect();
    for i in free_ends(bc, n) {
        kappa[i] = 0.0;
    }

    let next = ManifoldState {
        grid,
        angle,
        kappa,
        omega: omega_bar,
        upsilon: vec![speed; n],
    };
    if !next.is_finite() {
        return Ok((next, StepReport::unstable(dt)));
    }

    let dc = diff_first(&next.angle, h)?;
    let compatibility = (0..n)
        .map(|i| {
            let dc_dt = (next.angle[i] - m.angle[i]) / dt;
            (next.kappa[i] * dc_dt - next.omega[i] * dc[i]).abs()
        })
        .fold(0.0, f64::max);
    let lifted = lift(&next);
    let (r5, r6) = next.constraint_residuals();
    let report = StepReport {
        dt,
        r4: compatibility_drift(&lifted)?,
        r5,
        r6,
        energy: energy(&lifted, params),
        finite: true,
        compatibility: Some(compatibility),
    };
    let finite = report.r4.is_finite() && report.energy.is_finite();
    Ok((next, StepReport { finite, ..report }))
}

/// New base angle. A clamped base moving faster than `eps` takes the
/// direction of its prescribed velocity. Otherwise the normal part of
/// `d_t kappa = d_s omega`, `kappa_bar d_t C = omega_bar d_s C`, gives the
/// rate where the base is moving and curved; elsewhere the angle is kept.
fn advance_base_angle(m: &ManifoldState, bc: &BoundaryConditions, t_next: f64, dt: f64, eps: f64) -> Result<f64> {
    let c0 = m.angle[0];
    if let EndKind::Clamped(motion) = &bc.base {
        let v = motion.velocity(t_next);
        return Ok(if v.norm() > eps {
            nearest_branch(v.y.atan2(v.x), c0)
        } else {
            c0
        });
    }
    let curvature_scale = m.kappa.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let curved = curvature_scale > 0.0 && m.kappa[0].abs() > DEFAULT_EPS_FACTOR * curvature_scale;
    if m.upsilon[0].abs() > eps && curved {
        let dc = diff_first(&m.angle, m.grid.spacing())?;
        Ok(c0 + dt * m.omega[0] * dc[0] / m.kappa[0])
    } else {
        Ok(c0)
    }
}

/// `angle + 2 pi k` closest to `reference`.
fn nearest_branch(angle: f64, reference: f64) -> f64 {
    let d = angle - reference;
    reference + d - TAU * ((d + PI) / TAU).floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{eval_magnitudes, invert_time, sample_state, ParamFns, ScalarFn};
    use crate::grid::Grid1D;
    use crate::integrators::project;
    use proptest::prelude::*;

    fn params(nodes: usize) -> MaterialParams {
        MaterialParams {
            density: 1.0,
            area: 1.0,
            inertia: 2.0,
            bending_stiffness: 1.0,
            length: 1.0,
            nodes,
        }
    }

    fn slow_family() -> ParamFns {
        ParamFns::new(
            ScalarFn::constant(1.0),
            ScalarFn::linear(0.2, 0.5),
            ScalarFn::linear(0.0, 1.0),
            (-20.0, 20.0),
        )
        .unwrap()
    }

    fn family_manifold(pf: &ParamFns, g: Grid1D, t: f64) -> ManifoldState {
        let r = sample_state(pf, &g, t).unwrap();
        let mut m = project(&r, &vec![0.0; g.nodes()], 1e-12).unwrap();
        m.unwrap_angle();
        m
    }

    fn family_scalars(pf: &ParamFns, g: Grid1D, t: f64) -> Vec<(f64, f64)> {
        g.positions()
            .map(|s| {
                let u = invert_time(pf, s, t).unwrap();
                let f = eval_magnitudes(pf, s, u).unwrap();
                (f.angle, f.kappa)
            })
            .collect()
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let g = Grid1D::new(1.0, 11).unwrap();
        let m = ManifoldState::rest(g, 0.3);
        let (next, rep) =
            step_semi_analytic(&m, &params(11), &Loads::none(), &BoundaryConditions::cantilever(), 0.0, 0.1, None)
                .unwrap();
        assert_eq!(next, m);
        assert_eq!((rep.r4, rep.r5, rep.r6, rep.energy), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(rep.compatibility, Some(0.0));
    }

    #[test]
    fn one_step_from_family_keeps_constraints() {
        let pf = slow_family();
        let g = Grid1D::new(1.0, 101).unwrap();
        let m = family_manifold(&pf, g, 0.2);
        let floor = compatibility_drift(&lift(&m)).unwrap();
        assert!(floor < 1e-5, "{floor}");
        let (_, rep) =
            step_semi_analytic(&m, &params(101), &Loads::none(), &BoundaryConditions::free_free(), 0.2, 1e-3, None)
                .unwrap();
        assert_eq!((rep.r5, rep.r6), (0.0, 0.0));
        assert!(rep.r4 <= 1e-5, "{rep:?}");
    }

    #[test]
    fn recomputed_angle_converges_at_second_order() {
        let pf = ParamFns::new(
            ScalarFn::constant(1.0),
            ScalarFn::analytic(|u| 0.5 * u + 0.2 * (2.0 * u).sin(), |u| 0.5 + 0.4 * (2.0 * u).cos()),
            ScalarFn::linear(0.0, 1.0),
            (-20.0, 20.0),
        )
        .unwrap();
        let (t, dt) = (0.2, 1e-9);
        let err = |nodes: usize| {
            let g = Grid1D::new(1.0, nodes).unwrap();
            let m = family_manifold(&pf, g, t);
            let (next, _) =
                step_semi_analytic(&m, &params(nodes), &Loads::none(), &BoundaryConditions::free_free(), t, dt, None)
                    .unwrap();
            let exact = family_scalars(&pf, g, t + dt);
            next.angle
                .iter()
                .zip(&exact)
                .map(|(c, e)| (c - e.0).abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(21), err(41));
        assert!(a < 1e-3, "{a}");
        let ratio = a / b;
        assert!(ratio > 3.5, "{a} {b}");
    }

    #[test]
    fn curvature_update_matches_family_locally() {
        let pf = ParamFns::reference();
        let g = Grid1D::new(1.0, 101).unwrap();
        let h = g.spacing();
        let t = 0.3;
        let m = family_manifold(&pf, g, t);
        let err = |dt: f64| {
            let (next, _) =
                step_semi_analytic(&m, &params(101), &Loads::none(), &BoundaryConditions::free_free(), t, dt, None)
                    .unwrap();
            let exact = family_scalars(&pf, g, t + dt);
            (1..100)
                .map(|i| (next.kappa[i] - exact[i].1).abs())
                .fold(0.0, f64::max)
        };
        for dt in [1e-2, 5e-3, 2.5e-3] {
            let e = err(dt);
            assert!(e <= 2.0 * (dt * dt + dt * h * h), "{dt}: {e}");
        }
    }

    #[test]
    fn clamped_base_follows_prescribed_direction() {
        let g = Grid1D::new(1.0, 21).unwrap();
        let motion = crate::rod::ClampMotion::new(
            |t| direction(t) * 2.0,
            |t| Vec2::new(-t.sin(), t.cos()) * 2.0,
            |_| Vec2::zeros(),
        );
        let bc = BoundaryConditions {
            base: EndKind::Clamped(motion),
            tip: EndKind::Free,
        };
        let mut m = ManifoldState::rest(g, 0.0);
        m.angle[0] = TAU;
        let (next, _) = step_semi_analytic(&m, &params(21), &Loads::none(), &bc, 0.0, 0.5, None).unwrap();
        assert!((next.angle[0] - (TAU + 0.5)).abs() < 1e-12);
        assert!(next.upsilon.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn nearest_branch_picks_closest_turn() {
        assert!((nearest_branch(0.1, TAU) - (TAU + 0.1)).abs() < 1e-15);
        assert!((nearest_branch(-3.0, 3.0) - (TAU - 3.0)).abs() < 1e-15);
        assert_eq!(nearest_branch(1.0, 1.0), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn constraints_are_exact_for_any_load(
            l1 in -5.0..5.0f64,
            l2 in -5.0..5.0f64,
            f1 in -5.0..5.0f64,
            dt in 1e-4..1e-1f64,
            c in -3.0..3.0f64,
        ) {
            let g = Grid1D::new(1.0, 31).unwrap();
            let mut m = ManifoldState::rest(g, c);
            m.kappa = g.positions().map(|s| (2.0 * s).sin()).collect();
            m.upsilon = vec![0.3; 31];
            let loads = Loads::none()
                .with_couple(move |s, t| Vec2::new(l1 * s, l2 * t))
                .with_force(move |s, _| Vec2::new(f1, s));
            let mut t = 0.0;
            for _ in 0..5 {
                let (next, rep) =
                    step_semi_analytic(&m, &params(31), &loads, &BoundaryConditions::cantilever(), t, dt, None).unwrap();
                if !rep.finite {
                    break;
                }
                prop_assert_eq!((rep.r5, rep.r6), (0.0, 0.0));
                m = next;
                t += dt;
            }
        }
    }
}
