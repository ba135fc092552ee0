use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CauchySpec, ParamFns, ScalarFn, Term};

/// Coefficients of a pool family:
/// `A(u) = a + b sin(c u)`, `C(u) = d + e u`, `F'(w) = g + h cos(k w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
}

impl FamilyCoefficients {
    /// Draws coefficients with `A >= 0.7`, `|A'| <= 0.15`, `F' >= 0.75` and
    /// `0.4 <= |C'| <= 0.85`, so the family is regular on the strip
    /// `0 <= s <= 1` and the time inversion is monotone.
    pub fn draw(rng: &mut impl Rng) -> Self {
        let c = rng.gen_range(0.5..1.5);
        let b_max = (0.15f64 / c).min(0.15);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        Self {
            a: rng.gen_range(0.85..1.15),
            b: rng.gen_range(-b_max..b_max),
            c,
            d: rng.gen_range(-PI..PI),
            e: sign * rng.gen_range(0.4..0.85),
            g: rng.gen_range(0.95..1.2),
            h: rng.gen_range(-0.2..0.2),
            k: rng.gen_range(0.5..2.0),
        }
    }

    pub fn family(&self) -> ParamFns {
        let Self { a, b, c, d, e, g, h, k } = *self;
        ParamFns::new(
            ScalarFn::analytic(move |u| a + b * (c * u).sin(), move |u| b * c * (c * u).cos()),
            ScalarFn::linear(d, e),
            ScalarFn::analytic(
                move |w| g * w + h / k * (k * w).sin(),
                move |w| g + h * (k * w).cos(),
            ),
            (-6.0, 6.0),
        )
        .expect("pool u range is valid")
    }
}

/// Random family from the trigonometric pool.
pub fn random_family(rng: &mut impl Rng) -> ParamFns {
    FamilyCoefficients::draw(rng).family()
}

/// Pool family drawn from a ChaCha8 stream seeded with `seed`.
pub fn seeded_family(seed: u64) -> ParamFns {
    random_family(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random nonvanishing boundary data from trigonometric and polynomial pools.
pub fn random_cauchy_spec(rng: &mut impl Rng, u_max: f64, steps: usize) -> CauchySpec {
    let term = |rng: &mut dyn rand::RngCore| {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if rng.gen_bool(0.5) {
            let offset = sign * rng.gen_range(0.8..1.5);
            Term::Cos {
                amplitude: rng.gen_range(-0.4..0.4),
                frequency: rng.gen_range(0.5..2.0),
                phase: rng.gen_range(-PI..PI),
                offset,
            }
        } else {
            Term::Poly {
                coefficients: vec![
                    sign * rng.gen_range(0.8..1.5),
                    rng.gen_range(-0.4..0.4),
                    rng.gen_range(-0.3..0.3),
                ],
            }
        }
    };
    let f1 = term(rng);
    let f2 = term(rng);
    let f3 = term(rng);
    let c_sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    CauchySpec {
        f1,
        f2,
        f3,
        c1: c_sign * rng.gen_range(0.2..1.0),
        u_max,
        steps,
    }
}
