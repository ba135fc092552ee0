use super::{apply_clamps, balance_rates, check_dt, compatibility_drift, free_ends, StepReport};
use crate::error::Result;
use crate::grid::{cross, diff_first, Vec2};
use crate::rod::{energy, BoundaryConditions, Loads, MaterialParams, RodState};

/// One forward Euler step of both balance laws and the curvature
/// compatibility, every right-hand side taken at `t`. The velocity
/// compatibility and both cross-product constraints are left free and only
/// reported.
pub fn step_pure_numeric(
    r: &RodState,
    params: &MaterialParams,
    loads: &Loads,
    bc: &BoundaryConditions,
    t: f64,
    dt: f64,
) -> Result<(RodState, StepReport)> {
    check_dt(dt)?;
    if !r.is_finite() {
        return Ok((r.clone(), StepReport::unstable(dt)));
    }
    let h = r.grid.spacing();
    let rates = balance_rates(r, params, loads, bc, t)?;
    let dw = diff_first(&r.omega, h)?;
    let advance = |x: &[Vec2], rate: &[Vec2]| -> Vec<Vec2> {
        x.iter().zip(rate).map(|(x, d)| x + d * dt).collect()
    };
    let mut next = RodState {
        grid: r.grid,
        kappa: advance(&r.kappa, &dw),
        omega: advance(&r.omega, &rates.omega),
        upsilon: advance(&r.upsilon, &rates.upsilon),
    };
    apply_clamps(&mut next.upsilon, &mut next.omega, bc, t + dt);
    for i in free_ends(bc, r.grid.nodes()) {
        next.kappa[i] = Vec2::zeros();
    }

    if !next.is_finite() {
        return Ok((next, StepReport::unstable(dt)));
    }
    let worst = |a: &[Vec2]| {
        a.iter()
            .zip(&next.kappa)
            .map(|(a, k)| cross(*a, *k).abs())
            .fold(0.0, f64::max)
    };
    let report = StepReport {
        dt,
        r4: compatibility_drift(&next)?,
        r5: worst(&next.omega),
        r6: worst(&next.upsilon),
        energy: energy(&next, params),
        finite: true,
        compatibility: None,
    };
    let finite = report.r4.is_finite() && report.energy.is_finite();
    Ok((next, StepReport { finite, ..report }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sample_state, ParamFns};
    use crate::grid::{adiag, Grid1D};
    use crate::rod::{ClampMotion, EndKind};

    fn params(nodes: usize, ei: f64) -> MaterialParams {
        MaterialParams {
            density: 1.0,
            area: 1.0,
            inertia: 2.0,
            bending_stiffness: ei,
            length: 1.0,
            nodes,
        }
    }

    fn r4_field(r: &RodState) -> Vec<Vec2> {
        let dv = diff_first(&r.upsilon, r.grid.spacing()).unwrap();
        dv.iter().zip(&r.omega).map(|(d, w)| d - adiag(*w)).collect()
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let g = Grid1D::new(1.0, 21).unwrap();
        let r = RodState::rest(g);
        let (next, rep) =
            step_pure_numeric(&r, &params(21, 1.0), &Loads::none(), &BoundaryConditions::free_free(), 0.0, 0.1)
                .unwrap();
        assert_eq!(next, r);
        assert!(rep.finite);
        assert_eq!((rep.r4, rep.r5, rep.r6, rep.energy), (0.0, 0.0, 0.0, 0.0));
        assert!(rep.compatibility.is_none());
    }

    #[test]
    fn rejects_non_positive_step() {
        let g = Grid1D::new(1.0, 5).unwrap();
        let r = RodState::rest(g);
        let p = params(5, 1.0);
        assert!(step_pure_numeric(&r, &p, &Loads::none(), &BoundaryConditions::free_free(), 0.0, 0.0).is_err());
    }

    #[test]
    fn drift_on_family_data_grows_linearly_in_dt() {
        let g = Grid1D::new(1.0, 101).unwrap();
        let r = sample_state(&ParamFns::reference(), &g, 0.3).unwrap();
        let bc = BoundaryConditions::free_free();
        let before = r4_field(&r);
        let floor = before.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(floor < 1e-4, "{floor}");
        let change = |dt: f64| {
            let (next, rep) = step_pure_numeric(&r, &params(101, 1.0), &Loads::none(), &bc, 0.3, dt).unwrap();
            assert!(rep.finite);
            r4_field(&next)
                .iter()
                .zip(&before)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let (a, b) = (change(1e-6), change(5e-7));
        assert!(a > 0.0 && a < 1e-4, "{a}");
        assert!((a / b - 2.0).abs() < 1e-2, "{}", a / b);
    }

    #[test]
    fn clamped_ends_follow_their_motion() {
        let g = Grid1D::new(1.0, 11).unwrap();
        let motion = ClampMotion::new(
            |t| Vec2::new(t, 0.0),
            |_| Vec2::new(1.0, 0.0),
            |t| Vec2::new(0.0, 2.0 * t),
        );
        let bc = BoundaryConditions {
            base: EndKind::Clamped(motion),
            tip: EndKind::Free,
        };
        let mut r = RodState::rest(g);
        r.kappa[10] = Vec2::new(0.5, 0.5);
        let (next, _) = step_pure_numeric(&r, &params(11, 1.0), &Loads::none(), &bc, 1.0, 0.5).unwrap();
        assert_eq!(next.upsilon[0], Vec2::new(1.5, 0.0));
        assert_eq!(next.omega[0], Vec2::new(0.0, 3.0));
        assert_eq!(next.kappa[10], Vec2::zeros());
    }

    #[test]
    fn stiff_rod_blows_up_at_large_step() {
        let g = Grid1D::new(1.0, 101).unwrap();
        let p = params(101, 1e3);
        let mut r = RodState::rest(g);
        for (k, s) in r.kappa.iter_mut().zip(g.positions()) {
            *k = Vec2::new((std::f64::consts::PI * s).sin() * 1e-3, 0.0);
        }
        let bc = BoundaryConditions::cantilever();
        let mut t = 0.0;
        let mut finite = true;
        for _ in 0..1000 {
            let (next, rep) = step_pure_numeric(&r, &p, &Loads::none(), &bc, t, 1e-2).unwrap();
            t += 1e-2;
            r = next;
            if !rep.finite {
                finite = false;
                break;
            }
        }
        assert!(!finite);
    }
}
