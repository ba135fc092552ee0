//! Rod description: material parameters, nodal state, the bending couple,
//! the contact-force closure, energy and centerline reconstruction.

mod centerline;
mod contact;
mod loads;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldValue, Grid1D, Vec2};

pub use centerline::{reconstruct_centerline, Centerline, Frame};
pub use contact::{assemble_contact_system, solve_contact_force};
pub use loads::{BoundaryConditions, ClampMotion, EndKind, Loads, SpaceTimeLoad, TimeSignal};

/// Material and discretization parameters of one rod.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    /// Mass density.
    pub density: f64,
    /// Cross-section area.
    pub area: f64,
    /// Second moment of area.
    pub inertia: f64,
    pub bending_stiffness: f64,
    pub length: f64,
    pub nodes: usize,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("density", self.density),
            ("area", self.area),
            ("inertia", self.inertia),
            ("bending_stiffness", self.bending_stiffness),
            ("length", self.length),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.nodes < 3 {
            return Err(Error::Size {
                required: 3,
                actual: self.nodes,
            });
        }
        Ok(())
    }

    /// Mass per unit length, `rho * A`.
    pub fn linear_density(&self) -> f64 {
        self.density * self.area
    }

    /// Rotary inertia per unit length, `rho * I`.
    pub fn rotary_inertia(&self) -> f64 {
        self.density * self.inertia
    }

    pub fn grid(&self) -> Result<Grid1D> {
        self.validate()?;
        Grid1D::new(self.length, self.nodes)
    }
}

/// Curvature, angular velocity and linear velocity at every node.
#[derive(Clone, Debug, PartialEq)]
pub struct RodState {
    pub grid: Grid1D,
    pub kappa: Vec<Vec2>,
    pub omega: Vec<Vec2>,
    pub upsilon: Vec<Vec2>,
}

impl RodState {
    pub fn new(grid: Grid1D, kappa: Vec<Vec2>, omega: Vec<Vec2>, upsilon: Vec<Vec2>) -> Result<Self> {
        let n = grid.nodes();
        for (name, f) in [("kappa", &kappa), ("omega", &omega), ("upsilon", &upsilon)] {
            if f.len() != n {
                return Err(Error::GridMismatch(format!(
                    "{name} has {} values on a {n}-node grid",
                    f.len()
                )));
            }
        }
        let state = Self {
            grid,
            kappa,
            omega,
            upsilon,
        };
        if !state.is_finite() {
            return Err(Error::InvalidInput("non-finite rod state".into()));
        }
        Ok(state)
    }

    /// Straight rod at rest.
    pub fn rest(grid: Grid1D) -> Self {
        let zero = vec![Vec2::zeros(); grid.nodes()];
        Self {
            grid,
            kappa: zero.clone(),
            omega: zero.clone(),
            upsilon: zero,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kappa
            .iter()
            .chain(&self.omega)
            .chain(&self.upsilon)
            .all(FieldValue::is_finite_value)
    }

    /// Every vector field multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |f: &[Vec2]| f.iter().map(|v| v * factor).collect();
        Self {
            grid: self.grid,
            kappa: scale(&self.kappa),
            omega: scale(&self.omega),
            upsilon: scale(&self.upsilon),
        }
    }
}

/// Linear isotropic bending law `m = EI * kappa`.
pub fn bending_couple(state: &RodState, params: &MaterialParams) -> Vec<Vec2> {
    state
        .kappa
        .iter()
        .map(|k| k * params.bending_stiffness)
        .collect()
}

/// `1/2 * integral(rhoA |upsilon|^2 + rhoI |omega|^2 + EI |kappa|^2) ds`, trapezoid rule.
pub fn energy(state: &RodState, params: &MaterialParams) -> f64 {
    let (ra, ri, ei) = (
        params.linear_density(),
        params.rotary_inertia(),
        params.bending_stiffness,
    );
    let density = |i: usize| {
        0.5 * (ra * state.upsilon[i].norm_squared()
            + ri * state.omega[i].norm_squared()
            + ei * state.kappa[i].norm_squared())
    };
    let n = state.grid.nodes();
    let inner: f64 = (1..n - 1).map(density).sum();
    state.grid.spacing() * (inner + 0.5 * (density(0) + density(n - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn params(nodes: usize) -> MaterialParams {
        MaterialParams {
            density: 1.0,
            area: 2.0,
            inertia: 0.5,
            bending_stiffness: 2.0,
            length: 1.0,
            nodes,
        }
    }

    #[test]
    fn validation() {
        assert!(params(11).validate().is_ok());
        assert!(MaterialParams { area: 0.0, ..params(11) }.validate().is_err());
        assert!(MaterialParams { inertia: -1.0, ..params(11) }.validate().is_err());
        assert!(params(2).validate().is_err());
    }

    #[test]
    fn state_shape_is_checked() {
        let g = Grid1D::new(1.0, 5).unwrap();
        let v = vec![Vec2::zeros(); 5];
        assert!(RodState::new(g, v.clone(), v.clone(), vec![Vec2::zeros(); 4]).is_err());
        let mut bad = v.clone();
        bad[2].x = f64::NAN;
        assert!(RodState::new(g, v.clone(), bad, v.clone()).is_err());
    }

    #[test]
    fn bending_couple_scales_curvature() {
        let g = Grid1D::new(1.0, 3).unwrap();
        let zero = RodState::rest(g);
        assert!(bending_couple(&zero, &params(3)).iter().all(|m| *m == Vec2::zeros()));
        let mut s = RodState::rest(g);
        s.kappa.fill(Vec2::new(1.0, -3.0));
        assert!(bending_couple(&s, &params(3)).iter().all(|m| *m == Vec2::new(2.0, -6.0)));
    }

    #[test]
    fn energy_examples() {
        let g = Grid1D::new(1.0, 11).unwrap();
        assert_eq!(energy(&RodState::rest(g), &params(11)), 0.0);
        let mut s = RodState::rest(g);
        s.upsilon.fill(Vec2::new(1.0, 0.0));
        assert!((energy(&s, &params(11)) - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn energy_is_quadratic_and_rotation_invariant(
            seed in prop::collection::vec(-2.0..2.0f64, 33),
            angle in -3.2..3.2f64,
        ) {
            let g = Grid1D::new(1.0, 11).unwrap();
            let v = |k: usize| (0..11).map(|i| Vec2::new(seed[(i + k) % 33], seed[(i + 2 * k + 1) % 33])).collect::<Vec<_>>();
            let s = RodState::new(g, v(0), v(5), v(11)).unwrap();
            let p = params(11);
            let e = energy(&s, &p);
            prop_assert!((energy(&s.scaled(2.0), &p) - 4.0 * e).abs() <= 1e-12 * (1.0 + e));
            let rot = nalgebra::Rotation2::new(angle);
            let r = |f: &[Vec2]| f.iter().map(|x| rot * x).collect::<Vec<_>>();
            let rs = RodState::new(g, r(&s.kappa), r(&s.omega), r(&s.upsilon)).unwrap();
            prop_assert!((energy(&rs, &p) - e).abs() <= 1e-12 * (1.0 + e));
        }
    }
}
