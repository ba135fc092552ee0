use serde::{Deserialize, Serialize};

use super::ParamFns;
use crate::error::{Error, Result};
use crate::grid::{adiag, cross, diff_first, direction, find_root, max_norm, Grid1D, Vec2};
use crate::rod::RodState;

/// Denominators below this times their scale are treated as singular.
const DEGENERACY: f64 = 1e-12;

/// Number of uniform samples used to bracket the time inversion.
const INVERSION_SCAN: usize = 64;

/// Shared direction angle and signed magnitudes of the family at `(s, u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyScalars {
    pub angle: f64,
    pub kappa: f64,
    pub omega: f64,
    pub upsilon: f64,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyPoint {
    pub kappa: Vec2,
    pub omega: Vec2,
    pub upsilon: Vec2,
    pub t: f64,
}

pub fn eval_magnitudes(pf: &ParamFns, s: f64, u: f64) -> Result<FamilyScalars> {
    let a = pf.a.value(u);
    let a_prime = pf.a.derivative(u);
    let c_prime = pf.c.derivative(u);
    let w = a * s + u;
    let f_prime = pf.f.derivative(w);
    let stretch = a_prime * s + 1.0;
    let singular = Error::SingularParametrization { s, u };
    if !(stretch.abs() > DEGENERACY * (1.0 + (a_prime * s).abs())) {
        return Err(singular);
    }
    if !(f_prime.abs() > DEGENERACY) {
        return Err(singular);
    }
    Ok(FamilyScalars {
        angle: pf.c.value(u),
        kappa: -a * a * c_prime / stretch,
        omega: a * c_prime / (f_prime * stretch),
        upsilon: 1.0 / f_prime,
        t: pf.f.value(w),
    })
}

pub fn eval_solution(pf: &ParamFns, s: f64, u: f64) -> Result<FamilyPoint> {
    let m = eval_magnitudes(pf, s, u)?;
    let e = direction(m.angle);
    Ok(FamilyPoint {
        kappa: e * m.kappa,
        omega: e * m.omega,
        upsilon: e * m.upsilon,
        t: m.t,
    })
}

/// Solves `F(A(u) s + u) = t` for `u` inside the family's u range.
pub fn invert_time(pf: &ParamFns, s: f64, t: f64) -> Result<f64> {
    let g = |u: f64| pf.f.value(pf.a.value(u) * s + u) - t;
    let (lo, hi) = pf.u_range();
    let step = (hi - lo) / (INVERSION_SCAN - 1) as f64;
    let mut prev_u = lo;
    let mut prev_g = g(lo);
    if prev_g == 0.0 {
        return Ok(lo);
    }
    for k in 1..INVERSION_SCAN {
        let u = if k + 1 == INVERSION_SCAN { hi } else { lo + k as f64 * step };
        let gu = g(u);
        if prev_g.signum() != gu.signum() {
            let root = find_root(g, (prev_u, u))?;
            if g(root).abs() <= 1e-10 * t.abs().max(1.0) {
                return Ok(root);
            }
            break;
        }
        prev_u = u;
        prev_g = gu;
    }
    Err(Error::OutOfRange { s, t })
}

/// Family state on `grid` at time `t`.
pub fn sample_state(pf: &ParamFns, grid: &Grid1D, t: f64) -> Result<RodState> {
    let n = grid.nodes();
    let mut kappa = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut upsilon = Vec::with_capacity(n);
    for s in grid.positions() {
        let u = invert_time(pf, s, t)?;
        let p = eval_solution(pf, s, u)?;
        kappa.push(p.kappa);
        omega.push(p.omega);
        upsilon.push(p.upsilon);
    }
    RodState::new(*grid, kappa, omega, upsilon)
}

/// Max-norm residuals of the parameter-free subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterFreeResiduals {
    /// `d_t kappa - d_s omega`.
    pub r3: f64,
    /// `d_s upsilon - adiag omega`.
    pub r4: f64,
    /// `omega x kappa`.
    pub r5: f64,
    /// `upsilon x kappa`.
    pub r6: f64,
}

/// Residuals at the middle of three states spaced `dt` apart in time.
pub fn residual_parameter_free(
    prev: &RodState,
    cur: &RodState,
    next: &RodState,
    dt: f64,
) -> Result<ParameterFreeResiduals> {
    if prev.grid != cur.grid || next.grid != cur.grid {
        return Err(Error::GridMismatch("states live on different grids".into()));
    }
    let h = cur.grid.spacing();
    let dw = diff_first(&cur.omega, h)?;
    let dv = diff_first(&cur.upsilon, h)?;
    let r3: Vec<Vec2> = (0..cur.grid.nodes())
        .map(|i| (next.kappa[i] - prev.kappa[i]) / (2.0 * dt) - dw[i])
        .collect();
    let r4: Vec<Vec2> = dv.iter().zip(&cur.omega).map(|(d, w)| d - adiag(*w)).collect();
    let crossed = |a: &[Vec2]| {
        a.iter()
            .zip(&cur.kappa)
            .map(|(a, k)| cross(*a, *k).abs())
            .fold(0.0, f64::max)
    };
    Ok(ParameterFreeResiduals {
        r3: max_norm(&r3),
        r4: max_norm(&r4),
        r5: crossed(&cur.omega),
        r6: crossed(&cur.upsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{random_family, ScalarFn};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_family_values() {
        let pf = ParamFns::reference();
        for (s, u) in [(0.3, 0.4), (0.9, -1.2), (0.0, 2.5)] {
            let p = eval_solution(&pf, s, u).unwrap();
            let e = Vec2::new(u.cos(), u.sin());
            assert!((p.kappa + e).norm() < 1e-15);
            assert!((p.omega - e).norm() < 1e-15);
            assert!((p.upsilon - e).norm() < 1e-15);
            assert!((p.t - (s + u)).abs() < 1e-15);
        }
        let p = eval_solution(&pf, 0.0, 0.0).unwrap();
        assert_eq!(p.kappa, Vec2::new(-1.0, 0.0));
        assert_eq!(p.omega, Vec2::new(1.0, 0.0));
        assert_eq!(p.upsilon, Vec2::new(1.0, 0.0));
        assert_eq!(p.t, 0.0);
    }

    #[test]
    fn singular_parametrization_detected() {
        let pf = ParamFns::new(
            ScalarFn::linear(0.0, -1.0),
            ScalarFn::linear(0.0, 1.0),
            ScalarFn::linear(0.0, 1.0),
            (-2.0, 2.0),
        )
        .unwrap();
        assert!(matches!(
            eval_solution(&pf, 1.0, 0.5),
            Err(Error::SingularParametrization { .. })
        ));
        let flat = ParamFns::new(
            ScalarFn::constant(1.0),
            ScalarFn::linear(0.0, 1.0),
            ScalarFn::constant(3.0),
            (-2.0, 2.0),
        )
        .unwrap();
        assert!(eval_solution(&flat, 0.1, 0.1).is_err());
    }

    #[test]
    fn time_inversion() {
        let pf = ParamFns::reference();
        assert!((invert_time(&pf, 0.3, 1.0).unwrap() - 0.7).abs() < 1e-14);
        let cubic = ParamFns::new(
            ScalarFn::constant(1.0),
            ScalarFn::linear(0.0, 1.0),
            ScalarFn::analytic(|w| w + w * w * w, |w| 1.0 + 3.0 * w * w),
            (-3.0, 3.0),
        )
        .unwrap();
        let u = invert_time(&cubic, 0.0, 2.0).unwrap();
        assert!((u - 1.0).abs() < 1e-13);
        assert!(matches!(
            invert_time(&pf.clone().with_u_range((-1.0, 1.0)).unwrap(), 0.0, 5.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn sampled_reference_state() {
        let pf = ParamFns::reference();
        let g = Grid1D::new(1.0, 11).unwrap();
        let st = sample_state(&pf, &g, 0.0).unwrap();
        for (v, s) in st.upsilon.iter().zip(g.positions()) {
            assert!((v - Vec2::new((-s).cos(), (-s).sin())).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_state_residuals() {
        let g = Grid1D::new(1.0, 11).unwrap();
        let e = vec![Vec2::new(1.0, 0.0); 11];
        let st = RodState::new(g, e.clone(), e.clone(), e).unwrap();
        let r = residual_parameter_free(&st, &st, &st, 0.1).unwrap();
        assert_eq!((r.r3, r.r5, r.r6), (0.0, 0.0, 0.0));
        assert!((r.r4 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_residuals_are_small_and_second_order() {
        let pf = ParamFns::reference();
        let res = |h: f64| {
            let g = Grid1D::new(1.0, (1.0 / h).round() as usize + 1).unwrap();
            let t = 0.4;
            residual_parameter_free(
                &sample_state(&pf, &g, t - h).unwrap(),
                &sample_state(&pf, &g, t).unwrap(),
                &sample_state(&pf, &g, t + h).unwrap(),
                h,
            )
            .unwrap()
        };
        let fine = res(1e-3);
        for r in [fine.r3, fine.r4, fine.r5, fine.r6] {
            assert!(r <= 1e-5, "{fine:?}");
        }
        let (a, b) = (res(2e-2), res(1e-2));
        // u = t - s makes the leading errors of kappa_t and omega_s cancel,
        // so R3 converges faster than second order on this family.
        assert!(a.r3 / b.r3 >= 3.5, "{a:?} {b:?}");
        assert!((3.5..=4.5).contains(&(a.r4 / b.r4)), "{a:?} {b:?}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = RodState::rest(Grid1D::new(1.0, 11).unwrap());
        let b = RodState::rest(Grid1D::new(1.0, 12).unwrap());
        assert!(residual_parameter_free(&a, &b, &a, 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn algebraic_identities(seed in any::<u64>(), s in 0.0..1.0f64, x in 0.0..1.0f64) {
            let pf = random_family(&mut ChaCha8Rng::seed_from_u64(seed));
            let (lo, hi) = pf.u_range();
            let u = lo + 0.25 * (hi - lo) + 0.5 * (hi - lo) * x;
            let p = eval_solution(&pf, s, u).unwrap();
            let a = pf.a.value(u);
            let fp = pf.f.derivative(a * s + u);
            prop_assert!((p.omega + p.kappa / (a * fp)).norm() <= 1e-12 * (1.0 + p.kappa.norm()));
            prop_assert!((p.upsilon.norm() - 1.0 / fp).abs() <= 1e-12);
            prop_assert!(cross(p.kappa, p.omega).abs() <= 1e-14);
            prop_assert!(cross(p.kappa, p.upsilon).abs() <= 1e-14);
            prop_assert!(cross(p.omega, p.upsilon).abs() <= 1e-14);
        }

        #[test]
        fn sampled_speed_is_uniform(seed in any::<u64>(), t in 0.0..1.0f64) {
            let pf = random_family(&mut ChaCha8Rng::seed_from_u64(seed));
            let g = Grid1D::new(1.0, 21).unwrap();
            let st = sample_state(&pf, &g, t).unwrap();
            let speed0 = st.upsilon[0].norm();
            for v in &st.upsilon {
                prop_assert!((v.norm() - speed0).abs() <= 1e-10);
            }
            for i in 0..21 {
                prop_assert!(cross(st.upsilon[i], st.kappa[i]).abs() <= 1e-12);
                prop_assert!(cross(st.omega[i], st.kappa[i]).abs() <= 1e-12);
            }
        }
    }
}
