//! Closed-form solution family of the parameter-free kinematic subsystem.
//!
//! With `w = A(u) s + u`, the family reads
//!
//! ```text
//! kappa   = -A^2 C' / (A' s + 1)            * e(C)
//! omega   =  A C'  / (F'(w) (A' s + 1))     * e(C)
//! upsilon =  1 / F'(w)                      * e(C)
//! t       =  F(w)
//! ```
//!
//! where `e(C) = (cos C, sin C)` and `A`, `C`, `F` are free functions of one
//! variable.

mod cauchy;
mod pools;
mod solution;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{EndCondition, SampledFn};

pub use cauchy::{
    boundary_trace_error, cauchy_round_trip, match_cauchy, verify_initial_match, CauchyData, CauchyReport,
    CauchySpec, Term,
};
pub use pools::{random_cauchy_spec, random_family, seeded_family, FamilyCoefficients};
pub use solution::{
    eval_magnitudes, eval_solution, invert_time, residual_parameter_free, sample_state,
    FamilyPoint, FamilyScalars, ParameterFreeResiduals,
};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth scalar function with derivative access.
#[derive(Clone)]
pub enum ScalarFn {
    Sampled(SampledFn),
    Analytic { value: RealFn, derivative: RealFn },
}

impl ScalarFn {
    pub fn analytic(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFn::Analytic {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::analytic(move |_| c, |_| 0.0)
    }

    /// `offset + slope * x`.
    pub fn linear(offset: f64, slope: f64) -> Self {
        Self::analytic(move |x| offset + slope * x, move |_| slope)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Sampled(s) => s.value(x),
            ScalarFn::Analytic { value, .. } => value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            ScalarFn::Sampled(s) => s.derivative(x),
            ScalarFn::Analytic { derivative, .. } => derivative(x),
        }
    }

    /// Natural-spline resampling on `knots`.
    pub fn resample(&self, knots: &[f64]) -> Result<SampledFn> {
        SampledFn::from_fn(knots.to_vec(), |x| self.value(x), EndCondition::Natural)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Sampled(s) => f.debug_tuple("Sampled").field(&s.knots().len()).finish(),
            ScalarFn::Analytic { .. } => f.write_str("Analytic"),
        }
    }
}

impl From<SampledFn> for ScalarFn {
    fn from(s: SampledFn) -> Self {
        ScalarFn::Sampled(s)
    }
}

/// The free data `A(u)`, `C(u)` and `F(w)` of the family.
#[derive(Clone, Debug)]
pub struct ParamFns {
    pub a: ScalarFn,
    pub c: ScalarFn,
    pub f: ScalarFn,
    u_range: (f64, f64),
}

impl ParamFns {
    pub fn new(a: ScalarFn, c: ScalarFn, f: ScalarFn, u_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = u_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "u range must be a finite increasing interval, got ({lo}, {hi})"
            )));
        }
        Ok(Self { a, c, f, u_range })
    }

    /// `A = 1`, `C(u) = u`, `F(w) = w`: a uniformly rotating unit circle
    /// with `t = s + u`.
    pub fn reference() -> Self {
        Self {
            a: ScalarFn::constant(1.0),
            c: ScalarFn::linear(0.0, 1.0),
            f: ScalarFn::linear(0.0, 1.0),
            u_range: (-20.0, 20.0),
        }
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn with_u_range(mut self, u_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = u_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput("invalid u range".into()));
        }
        self.u_range = u_range;
        Ok(self)
    }

    /// Sampled copy on explicit knots, with natural spline ends.
    pub fn sampled(&self, u_knots: &[f64], w_knots: &[f64]) -> Result<Self> {
        Self::from_fixture(&ParamFnsFixture {
            u_knots: u_knots.to_vec(),
            a: u_knots.iter().map(|&u| self.a.value(u)).collect(),
            c: u_knots.iter().map(|&u| self.c.value(u)).collect(),
            f_knots: w_knots.to_vec(),
            f: w_knots.iter().map(|&w| self.f.value(w)).collect(),
        })
    }

    pub fn from_fixture(fx: &ParamFnsFixture) -> Result<Self> {
        let a = SampledFn::new(fx.u_knots.clone(), fx.a.clone(), EndCondition::Natural)?;
        let c = SampledFn::new(fx.u_knots.clone(), fx.c.clone(), EndCondition::Natural)?;
        let f = SampledFn::new(fx.f_knots.clone(), fx.f.clone(), EndCondition::Natural)?;
        let range = a.domain();
        Self::new(a.into(), c.into(), f.into(), range)
    }

    /// Knot data of a fully sampled family. `A` and `C` must share knots.
    pub fn to_fixture(&self) -> Result<ParamFnsFixture> {
        match (&self.a, &self.c, &self.f) {
            (ScalarFn::Sampled(a), ScalarFn::Sampled(c), ScalarFn::Sampled(f))
                if a.knots() == c.knots() =>
            {
                Ok(ParamFnsFixture {
                    u_knots: a.knots().to_vec(),
                    a: a.values().to_vec(),
                    c: c.values().to_vec(),
                    f_knots: f.knots().to_vec(),
                    f: f.values().to_vec(),
                })
            }
            _ => Err(Error::InvalidInput(
                "only families sampled on shared u knots serialize; call `sampled` first".into(),
            )),
        }
    }
}

/// JSON form of a sampled family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFnsFixture {
    pub u_knots: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "F_knots")]
    pub f_knots: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn fixture_json_round_trip() {
        let pf = ParamFns::reference().sampled(&knots(-2.0, 2.0, 9), &knots(-3.0, 3.0, 7)).unwrap();
        let fx = pf.to_fixture().unwrap();
        let json = serde_json::to_string(&fx).unwrap();
        for key in ["\"u_knots\"", "\"A\"", "\"C\"", "\"F_knots\"", "\"F\""] {
            assert!(json.contains(key), "{json}");
        }
        let back: ParamFnsFixture = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fx);
        let pf2 = ParamFns::from_fixture(&back).unwrap();
        assert_eq!(pf2.u_range(), (-2.0, 2.0));
        assert_eq!(pf2.to_fixture().unwrap(), fx);
        // Linear data is reproduced by the natural spline.
        assert!((pf2.c.value(0.37) - 0.37).abs() < 1e-14);
        assert!((pf2.f.derivative(1.1) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fixture_rejects_unknown_keys() {
        let json = r#"{"u_knots":[0,1,2,3],"A":[1,1,1,1],"C":[0,1,2,3],"F_knots":[0,1,2,3],"F":[0,1,2,3],"B":[]}"#;
        assert!(serde_json::from_str::<ParamFnsFixture>(json).is_err());
    }

    #[test]
    fn analytic_families_do_not_serialize_directly() {
        assert!(ParamFns::reference().to_fixture().is_err());
    }

    #[test]
    fn invalid_range() {
        let r = ParamFns::reference();
        assert!(ParamFns::new(r.a.clone(), r.c.clone(), r.f.clone(), (1.0, 1.0)).is_err());
    }
}
