use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{eval_solution, invert_time, ParamFns, ParamFnsFixture, RealFn};
use crate::error::{Error, Result};
use crate::grid::{rk4_step, EndCondition, SampledFn};

/// Boundary data on `s = 0`: `upsilon_1 = f1(t)`, `omega_1 = f2(t)`,
/// `kappa_1 = f3(t)`, and `upsilon_2 = c1` at `t = 0`.
#[derive(Clone)]
pub struct CauchyData {
    f1: RealFn,
    f2: RealFn,
    f3: RealFn,
    c1: f64,
}

impl CauchyData {
    pub fn new(
        f1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f3: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c1: f64,
    ) -> Result<Self> {
        let data = Self {
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            f3: Arc::new(f3),
            c1,
        };
        for (name, v) in [("f1", data.f1(0.0)), ("f2", data.f2(0.0)), ("f3", data.f3(0.0))] {
            if !(v.is_finite() && v != 0.0) {
                return Err(Error::InvalidInput(format!("{name}(0) must be nonzero, got {v}")));
            }
        }
        if !(c1.is_finite() && c1 != 0.0) {
            return Err(Error::InvalidInput(format!("C1 must be nonzero, got {c1}")));
        }
        Ok(data)
    }

    pub fn f1(&self, t: f64) -> f64 {
        (self.f1)(t)
    }
    pub fn f2(&self, t: f64) -> f64 {
        (self.f2)(t)
    }
    pub fn f3(&self, t: f64) -> f64 {
        (self.f3)(t)
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
}

impl fmt::Debug for CauchyData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyData").field("c1", &self.c1).finish_non_exhaustive()
    }
}

/// Closed-form term for JSON data specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Term {
    /// `offset + amplitude * cos(frequency * t + phase)`.
    Cos {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `sum_k coefficients[k] * t^k`.
    Poly { coefficients: Vec<f64> },
}

impl Term {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Term::Cos {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * (frequency * t + phase).cos(),
            Term::Poly { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    fn into_fn(self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        move |t| self.eval(t)
    }
}

/// JSON input of the `match-cauchy` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchySpec {
    pub f1: Term,
    pub f2: Term,
    pub f3: Term,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub u_max: f64,
    pub steps: usize,
}

impl CauchySpec {
    pub fn data(&self) -> Result<CauchyData> {
        CauchyData::new(
            self.f1.clone().into_fn(),
            self.f2.clone().into_fn(),
            self.f3.clone().into_fn(),
            self.c1,
        )
    }
}

/// Threshold for vanishing data or `cos C` along the march.
const DEGENERACY: f64 = 1e-12;

/// Values that must stay away from zero along the march.
fn guarded(data: &CauchyData, c: f64, big_f: f64) -> [(&'static str, f64); 4] {
    [
        ("cos C", c.cos()),
        ("f1", data.f1(big_f)),
        ("f2", data.f2(big_f)),
        ("f3", data.f3(big_f)),
    ]
}

/// Rejects tiny guarded values and sign flips relative to the start, since
/// a flip between knots means a zero was stepped over.
fn check_march(data: &CauchyData, u: f64, c: f64, big_f: f64, signs: &[f64; 4]) -> Result<()> {
    for ((name, v), sign) in guarded(data, c, big_f).into_iter().zip(signs) {
        if !(v.is_finite() && v.abs() > DEGENERACY && v.signum() == *sign) {
            return Err(Error::Degenerate {
                u,
                reason: format!("{name} = {v}"),
            });
        }
    }
    Ok(())
}

/// Family matching the given boundary data on `u` in `[0, u_max]`.
///
/// Marches `C' = -f2(F)^2 cos C / (f3(F) f1(F)^2)` and `F' = cos C / f1(F)`
/// with RK4 from `C(0) = atan(C1 / f1(0))`, `F(0) = 0`, and sets
/// `A = -f3(F) f1(F) / (f2(F) cos C)` at every knot.
pub fn match_cauchy(data: &CauchyData, u_max: f64, steps: usize) -> Result<ParamFns> {
    if !(u_max.is_finite() && u_max > 0.0) {
        return Err(Error::InvalidInput(format!("u_max must be positive, got {u_max}")));
    }
    if steps < 3 {
        return Err(Error::InvalidInput("match_cauchy needs at least 3 steps".into()));
    }
    let rhs_of = |y: &[f64]| {
        let (c, f) = (y[0], y[1]);
        let (f1, f2, f3) = (data.f1(f), data.f2(f), data.f3(f));
        let cos = c.cos();
        [-f2 * f2 * cos / (f3 * f1 * f1), cos / f1]
    };
    let mut rhs = |_: f64, y: &[f64], dy: &mut [f64]| dy.copy_from_slice(&rhs_of(y));

    let h = u_max / steps as f64;
    let mut u = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = vec![(data.c1() / data.f1(0.0)).atan(), 0.0];
    let signs = guarded(data, y[0], y[1]).map(|(_, v)| v.signum());
    check_march(data, 0.0, y[0], y[1], &signs)?;
    u.push(0.0);
    states.push(y.clone());
    for k in 0..steps {
        let uk = k as f64 * h;
        y = rk4_step(&mut rhs, uk, &y, h).map_err(|e| match e {
            Error::Divergence { u } => Error::Degenerate {
                u,
                reason: "non-finite right-hand side".into(),
            },
            other => other,
        })?;
        let next_u = if k + 1 == steps { u_max } else { (k + 1) as f64 * h };
        check_march(data, next_u, y[0], y[1], &signs)?;
        u.push(next_u);
        states.push(y.clone());
    }

    let c_vals: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let f_vals: Vec<f64> = states.iter().map(|y| y[1]).collect();
    let a_vals: Vec<f64> = states
        .iter()
        .map(|y| {
            let f = y[1];
            -data.f3(f) * data.f1(f) / (data.f2(f) * y[0].cos())
        })
        .collect();
    let start = rhs_of(&states[0]);
    let end = rhs_of(&states[steps]);
    let c = SampledFn::new(
        u.clone(),
        c_vals,
        EndCondition::Clamped {
            start: start[0],
            end: end[0],
        },
    )?;
    let f = SampledFn::new(
        u.clone(),
        f_vals,
        EndCondition::Clamped {
            start: start[1],
            end: end[1],
        },
    )?;
    let a = SampledFn::new(u, a_vals, EndCondition::NotAKnot)?;
    ParamFns::new(a.into(), c.into(), f.into(), (0.0, u_max))
}

/// Worst residual of the five matching relations on `s = 0`:
/// `cos C / F' = f1(F)`, `C' A cos C / F' = f2(F)`, `-C' A^2 cos C = f3(F)`,
/// `sin C(0) / F'(0) = C1` and `F(0) = 0`.
pub fn verify_initial_match(pf: &ParamFns, data: &CauchyData, u_samples: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &u in u_samples {
        let (a, c, cp) = (pf.a.value(u), pf.c.value(u), pf.c.derivative(u));
        let (big_f, fp) = (pf.f.value(u), pf.f.derivative(u));
        let cos = c.cos();
        worst = worst
            .max((cos / fp - data.f1(big_f)).abs())
            .max((cp * a * cos / fp - data.f2(big_f)).abs())
            .max((-cp * a * a * cos - data.f3(big_f)).abs());
    }
    let start = (pf.c.value(0.0).sin() / pf.f.derivative(0.0) - data.c1()).abs();
    worst.max(start).max(pf.f.value(0.0).abs())
}

/// Worst deviation of the sampled family's `s = 0` trace from the data at
/// the given times.
pub fn boundary_trace_error(pf: &ParamFns, data: &CauchyData, t_samples: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in t_samples {
        let u = invert_time(pf, 0.0, t)?;
        let p = eval_solution(pf, 0.0, u)?;
        worst = worst
            .max((p.upsilon.x - data.f1(t)).abs())
            .max((p.omega.x - data.f2(t)).abs())
            .max((p.kappa.x - data.f3(t)).abs());
    }
    let origin = eval_solution(pf, 0.0, invert_time(pf, 0.0, 0.0)?)?;
    Ok(worst.max((origin.upsilon.y - data.c1()).abs()))
}

/// Output of the `match-cauchy` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub u_max: f64,
    pub steps: usize,
    /// [`verify_initial_match`] on the march knots.
    pub initial_match_residual: f64,
    /// [`boundary_trace_error`] on 50 times covering 90% of the reachable
    /// range at `s = 0`.
    pub boundary_trace_error: f64,
    pub family: ParamFnsFixture,
}

/// Matches the data of `spec` and checks the result both ways.
pub fn cauchy_round_trip(spec: &CauchySpec) -> Result<CauchyReport> {
    let data = spec.data()?;
    let pf = match_cauchy(&data, spec.u_max, spec.steps)?;
    let knots: Vec<f64> = (0..=spec.steps)
        .map(|i| spec.u_max * i as f64 / spec.steps as f64)
        .collect();
    let initial_match_residual = verify_initial_match(&pf, &data, &knots);
    let reach = pf.f.value(spec.u_max);
    let times: Vec<f64> = (0..50).map(|i| 0.9 * reach * i as f64 / 49.0).collect();
    Ok(CauchyReport {
        u_max: spec.u_max,
        steps: spec.steps,
        initial_match_residual,
        boundary_trace_error: boundary_trace_error(&pf, &data, &times)?,
        family: pf.to_fixture()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn worked_example() -> CauchyData {
        CauchyData::new(
            |t| (t + FRAC_PI_4).cos(),
            |t| (t + FRAC_PI_4).cos(),
            |t| -(t + FRAC_PI_4).cos(),
            FRAC_PI_4.sin(),
        )
        .unwrap()
    }

    fn samples(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn worked_example_recovers_closed_form() {
        let pf = match_cauchy(&worked_example(), 0.5, 1000).unwrap();
        assert!((pf.c.value(0.0) - FRAC_PI_4).abs() < 1e-15);
        for u in samples(0.0, 0.5, 37) {
            assert!((pf.a.value(u) - 1.0).abs() <= 1e-8);
            assert!((pf.c.value(u) - (u + FRAC_PI_4)).abs() <= 1e-8);
            assert!((pf.f.value(u) - u).abs() <= 1e-8);
        }
        assert!(verify_initial_match(&pf, &worked_example(), &samples(0.0, 0.5, 51)) <= 1e-6);
    }

    #[test]
    fn mismatch_is_detected() {
        let data = worked_example();
        let pf = match_cauchy(&data, 0.5, 200).unwrap();
        let a = pf.a.clone();
        let shifted = ParamFns::new(
            crate::analytic::ScalarFn::analytic(move |u| a.value(u) + 1e-3, |_| 0.0),
            pf.c.clone(),
            pf.f.clone(),
            pf.u_range(),
        )
        .unwrap();
        let r = verify_initial_match(&shifted, &data, &samples(0.0, 0.5, 21));
        assert!(r > 3e-4 && r < 1e-2, "{r}");
    }

    #[test]
    fn rejects_vanishing_data() {
        assert!(CauchyData::new(f64::sin, f64::cos, f64::cos, 1.0).is_err());
        // The reference family's own trace has C1 = 0.
        assert!(CauchyData::new(f64::cos, f64::cos, |t| -t.cos(), 0.0).is_err());
    }

    #[test]
    fn degeneracy_reports_position() {
        // f1 = cos(t + pi/4) vanishes at t = pi/4, reached at u = pi/4.
        match match_cauchy(&worked_example(), 1.5, 300) {
            Err(Error::Degenerate { u, .. }) => assert!((u - FRAC_PI_4).abs() < 0.02, "{u}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_json() {
        let json = r#"{
            "f1": {"kind": "cos", "amplitude": 1.0, "frequency": 1.0, "phase": 0.7853981633974483},
            "f2": {"kind": "cos", "amplitude": 1.0, "frequency": 1.0, "phase": 0.7853981633974483},
            "f3": {"kind": "cos", "amplitude": -1.0, "frequency": 1.0, "phase": 0.7853981633974483},
            "C1": 0.7071067811865476, "u_max": 0.5, "steps": 1000
        }"#;
        let spec: CauchySpec = serde_json::from_str(json).unwrap();
        let data = spec.data().unwrap();
        assert!((data.f3(0.3) + (0.3 + FRAC_PI_4).cos()).abs() < 1e-15);
        let poly = Term::Poly { coefficients: vec![1.0, -2.0, 0.5] };
        assert!((poly.eval(2.0) - (1.0 - 4.0 + 2.0)).abs() < 1e-15);
        assert!(serde_json::from_str::<CauchySpec>(&json.replace("\"steps\"", "\"nsteps\"")).is_err());
    }

    #[test]
    fn boundary_trace_round_trip() {
        let data = worked_example();
        let pf = match_cauchy(&data, 0.5, 1000).unwrap();
        let err = boundary_trace_error(&pf, &data, &samples(0.0, 0.45, 19)).unwrap();
        assert!(err <= 1e-6, "{err}");
    }
}
