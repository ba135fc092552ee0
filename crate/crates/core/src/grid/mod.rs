//! Uniform grids, nodal fields and the small numerical toolbox used by
//! everything else: finite differences, quadrature, splines, RK4, a 2x2
//! block-tridiagonal solver and a bracketed root finder.

mod banded;
mod diff;
mod ode;
mod root;
mod spline;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use banded::{Block, BlockTridiagonal};
pub use diff::{central_diff, cumtrapz, diff_first, diff_second, Derivative};
pub use ode::{integrate_ode_rk4, rk4_step, OdeTrajectory};
pub use root::find_root;
pub use spline::{EndCondition, SampledFn};

pub type Vec2 = nalgebra::Vector2<f64>;

/// Rotates a 2-vector by the antidiagonal matrix `[[0, 1], [-1, 0]]`.
#[inline]
pub fn adiag(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// Planar cross product `a.x * b.y - a.y * b.x`.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Unit vector at angle `angle`.
#[inline]
pub fn direction(angle: f64) -> Vec2 {
    let (sin, cos) = angle.sin_cos();
    Vec2::new(cos, sin)
}

/// Uniform grid on `[0, length]` with `nodes` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    length: f64,
    nodes: usize,
}

impl Grid1D {
    pub fn new(length: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::Size {
                required: 3,
                actual: nodes,
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "grid length must be positive, got {length}"
            )));
        }
        Ok(Self { length, nodes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.nodes).map(move |i| i as f64 * h)
    }
}

/// Values that can live on a grid node.
pub trait FieldValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn max_abs(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    /// Applies a scalar ternary operation componentwise.
    fn combine(a: Self, b: Self, c: Self, op: impl Fn(f64, f64, f64) -> f64) -> Self;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn combine(a: Self, b: Self, c: Self, op: impl Fn(f64, f64, f64) -> f64) -> Self {
        op(a, b, c)
    }
}

impl FieldValue for Vec2 {
    fn zero() -> Self {
        Vec2::zeros()
    }
    fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
    fn is_finite_value(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
    fn combine(a: Self, b: Self, c: Self, op: impl Fn(f64, f64, f64) -> f64) -> Self {
        Vec2::new(op(a.x, b.x, c.x), op(a.y, b.y, c.y))
    }
}

/// Largest componentwise magnitude over a slice.
pub fn max_norm<T: FieldValue>(values: &[T]) -> f64 {
    values.iter().map(FieldValue::max_abs).fold(0.0, f64::max)
}

/// Nodal values on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid1D,
    values: Vec<T>,
}

impl<T: FieldValue> Field<T> {
    pub fn new(grid: Grid1D, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.nodes()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> T) -> Result<Self> {
        Self::new(grid, grid.positions().map(f).collect())
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_nodes_are_exact_multiples() {
        let g = Grid1D::new(2.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        let s: Vec<f64> = g.positions().collect();
        assert_eq!(s, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn grid_rejects_small_or_degenerate() {
        assert!(matches!(Grid1D::new(1.0, 2), Err(Error::Size { .. })));
        assert!(Grid1D::new(0.0, 10).is_err());
        assert!(Grid1D::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn field_checks_length_and_finiteness() {
        let g = Grid1D::new(1.0, 4).unwrap();
        assert!(Field::new(g, vec![0.0; 3]).is_err());
        assert!(Field::new(g, vec![0.0, 1.0, f64::INFINITY, 0.0]).is_err());
        assert!(Field::new(g, vec![Vec2::zeros(); 4]).is_ok());
    }

    #[test]
    fn adiag_squares_to_minus_identity() {
        let v = Vec2::new(0.3, -1.7);
        assert_eq!(adiag(adiag(v)), -v);
        assert_eq!(cross(v, v), 0.0);
        assert_eq!(cross(Vec2::x(), Vec2::y()), 1.0);
    }
}
