use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::grid::{direction, Grid1D, Vec2};
use crate::rod::RodState;

/// Rod state on the collinear manifold: `kappa`, `omega` and `upsilon` all
/// point along `(cos C, sin C)` at every node and are stored as signed
/// magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldState {
    pub grid: Grid1D,
    /// Shared direction angle `C`, radians.
    pub angle: Vec<f64>,
    pub kappa: Vec<f64>,
    pub omega: Vec<f64>,
    pub upsilon: Vec<f64>,
}

impl ManifoldState {
    pub fn new(
        grid: Grid1D,
        angle: Vec<f64>,
        kappa: Vec<f64>,
        omega: Vec<f64>,
        upsilon: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.nodes();
        for (name, f) in [
            ("angle", &angle),
            ("kappa", &kappa),
            ("omega", &omega),
            ("upsilon", &upsilon),
        ] {
            if f.len() != n {
                return Err(Error::GridMismatch(format!(
                    "{name} has {} values on a {n}-node grid",
                    f.len()
                )));
            }
        }
        let state = Self {
            grid,
            angle,
            kappa,
            omega,
            upsilon,
        };
        if !state.is_finite() {
            return Err(Error::InvalidInput("non-finite manifold state".into()));
        }
        Ok(state)
    }

    /// Zero magnitudes along a constant direction.
    pub fn rest(grid: Grid1D, angle: f64) -> Self {
        let n = grid.nodes();
        Self {
            grid,
            angle: vec![angle; n],
            kappa: vec![0.0; n],
            omega: vec![0.0; n],
            upsilon: vec![0.0; n],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.angle
            .iter()
            .chain(&self.kappa)
            .chain(&self.omega)
            .chain(&self.upsilon)
            .all(|v| v.is_finite())
    }

    /// `(max |omega x kappa|, max |upsilon x kappa|)` of the lifted vectors,
    /// evaluated in factored form `a b (cos C sin C - sin C cos C)`. The
    /// bracket is exactly zero in floating point, so both residuals are too.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let mut r5 = 0.0f64;
        let mut r6 = 0.0f64;
        for i in 0..self.grid.nodes() {
            let e = direction(self.angle[i]);
            let bracket = e.x * e.y - e.y * e.x;
            r5 = r5.max((self.omega[i] * self.kappa[i] * bracket).abs());
            r6 = r6.max((self.upsilon[i] * self.kappa[i] * bracket).abs());
        }
        (r5, r6)
    }

    /// Replaces consecutive angle jumps larger than `pi` by their `2 pi`
    /// equivalents, so that `angle` is continuous along the rod.
    pub fn unwrap_angle(&mut self) {
        for i in 1..self.angle.len() {
            let jump = self.angle[i] - self.angle[i - 1];
            let wrapped = jump - TAU * ((jump + PI) / TAU).floor();
            self.angle[i] = self.angle[i - 1] + wrapped;
        }
    }
}

/// Vectors `kappa_i = kappa_bar_i (cos C_i, sin C_i)` and likewise for
/// `omega` and `upsilon`.
pub fn lift(m: &ManifoldState) -> RodState {
    let n = m.grid.nodes();
    let mut kappa = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut upsilon = Vec::with_capacity(n);
    for i in 0..n {
        let e = direction(m.angle[i]);
        kappa.push(e * m.kappa[i]);
        omega.push(e * m.omega[i]);
        upsilon.push(e * m.upsilon[i]);
    }
    RodState {
        grid: m.grid,
        kappa,
        omega,
        upsilon,
    }
}

/// Direction from the velocity where it exceeds `eps`, otherwise carried
/// over from `prev_angle`; magnitudes are the components along that
/// direction and the normal parts are dropped.
pub fn project(r: &RodState, prev_angle: &[f64], eps: f64) -> Result<ManifoldState> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("projection threshold must be positive, got {eps}")));
    }
    check_angle_len(r, prev_angle)?;
    let angle = r
        .upsilon
        .iter()
        .zip(prev_angle)
        .map(|(v, &prev)| if v.norm() > eps { v.y.atan2(v.x) } else { prev })
        .collect::<Vec<_>>();
    project_onto(r, &angle)
}

/// Components of `r` along the given direction field.
pub fn project_onto(r: &RodState, angle: &[f64]) -> Result<ManifoldState> {
    check_angle_len(r, angle)?;
    let along = |f: &[Vec2]| -> Vec<f64> {
        f.iter()
            .zip(angle)
            .map(|(v, &c)| v.dot(&direction(c)))
            .collect()
    };
    Ok(ManifoldState {
        grid: r.grid,
        angle: angle.to_vec(),
        kappa: along(&r.kappa),
        omega: along(&r.omega),
        upsilon: along(&r.upsilon),
    })
}

fn check_angle_len(r: &RodState, angle: &[f64]) -> Result<()> {
    if angle.len() != r.grid.nodes() {
        return Err(Error::GridMismatch(format!(
            "{} angles for a {}-node rod",
            angle.len(),
            r.grid.nodes()
        )));
    }
    Ok(())
}
