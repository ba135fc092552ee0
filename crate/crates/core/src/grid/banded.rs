use nalgebra::{DMatrix, Matrix2};

use super::Vec2;
use crate::error::{Error, Result};

pub type Block = Matrix2<f64>;

/// Pivots smaller than this times the row scale count as singular.
const PIVOT_TOLERANCE: f64 = 1e-13;

/// Block-tridiagonal matrix with 2x2 blocks.
///
/// Row `i` couples unknowns `i - 1`, `i` and `i + 1` through `lower[i]`,
/// `diag[i]` and `upper[i]`; `lower[0]` and `upper[n - 1]` are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTridiagonal {
    lower: Vec<Block>,
    diag: Vec<Block>,
    upper: Vec<Block>,
}

impl BlockTridiagonal {
    pub fn zeros(rows: usize) -> Self {
        Self {
            lower: vec![Block::zeros(); rows],
            diag: vec![Block::zeros(); rows],
            upper: vec![Block::zeros(); rows],
        }
    }

    pub fn identity(rows: usize) -> Self {
        let mut m = Self::zeros(rows);
        m.diag.fill(Block::identity());
        m
    }

    pub fn rows(&self) -> usize {
        self.diag.len()
    }

    pub fn set_row(&mut self, row: usize, lower: Block, diag: Block, upper: Block) {
        self.lower[row] = lower;
        self.diag[row] = diag;
        self.upper[row] = upper;
    }

    pub fn row(&self, row: usize) -> (Block, Block, Block) {
        (self.lower[row], self.diag[row], self.upper[row])
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Vec2]) -> Vec<Vec2> {
        let n = self.rows();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.rows();
        (0..n)
            .flat_map(|i| {
                (0..2).map(move |r| {
                    let mut sum = 0.0;
                    for (j, b) in [(0, &self.lower[i]), (1, &self.diag[i]), (2, &self.upper[i])] {
                        let skip = (j == 0 && i == 0) || (j == 2 && i + 1 == n);
                        if !skip {
                            sum += b[(r, 0)].abs() + b[(r, 1)].abs();
                        }
                    }
                    sum
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.rows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&self.diag[i]);
            if i > 0 {
                m.fixed_view_mut::<2, 2>(2 * i, 2 * i - 2)
                    .copy_from(&self.lower[i]);
            }
            if i + 1 < n {
                m.fixed_view_mut::<2, 2>(2 * i, 2 * i + 2)
                    .copy_from(&self.upper[i]);
            }
        }
        m
    }

    fn row_scale(&self, i: usize) -> f64 {
        let n = self.rows();
        let mut scale = self.diag[i].abs().max();
        if i > 0 {
            scale = scale.max(self.lower[i].abs().max());
        }
        if i + 1 < n {
            scale = scale.max(self.upper[i].abs().max());
        }
        scale
    }

    /// Block Thomas elimination. Each reduced diagonal block is inverted by
    /// partially pivoted elimination and rejected when a pivot falls below
    /// the tolerance relative to the original row scale.
    pub fn solve(&self, rhs: &[Vec2]) -> Result<Vec<Vec2>> {
        let n = self.rows();
        if rhs.len() != n {
            return Err(Error::GridMismatch(format!(
                "{} right-hand sides for {} block rows",
                rhs.len(),
                n
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut inv = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut reduced = self.diag[0];
        inv.push(invert_pivoted(&reduced, self.row_scale(0), 0)?);
        y.push(rhs[0]);
        for i in 1..n {
            let w = self.lower[i] * inv[i - 1];
            reduced = self.diag[i] - w * self.upper[i - 1];
            inv.push(invert_pivoted(&reduced, self.row_scale(i), i)?);
            y.push(rhs[i] - w * y[i - 1]);
        }
        let mut x = vec![Vec2::zeros(); n];
        x[n - 1] = inv[n - 1] * y[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = inv[i] * (y[i] - self.upper[i] * x[i + 1]);
        }
        Ok(x)
    }
}

fn invert_pivoted(m: &Block, scale: f64, row: usize) -> Result<Block> {
    let tol = PIVOT_TOLERANCE * scale;
    let singular = || Error::Singular { row };
    if !(tol > 0.0) {
        return Err(singular());
    }
    // Pick the larger entry of the first column as the first pivot.
    let swap = m[(1, 0)].abs() > m[(0, 0)].abs();
    let (r0, r1) = if swap { (1, 0) } else { (0, 1) };
    let p0 = m[(r0, 0)];
    if p0.abs() < tol {
        return Err(singular());
    }
    let factor = m[(r1, 0)] / p0;
    let p1 = m[(r1, 1)] - factor * m[(r0, 1)];
    if p1.abs() < tol || !p1.is_finite() {
        return Err(singular());
    }
    let det = p0 * p1 * if swap { -1.0 } else { 1.0 };
    Ok(Block::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}
