use crate::error::{Error, Result};

/// End treatment for a cubic interpolating spline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndCondition {
    /// Zero second derivative at both ends.
    Natural,
    /// Prescribed first derivative at the first and last knot.
    Clamped { start: f64, end: f64 },
    /// Continuous third derivative across the second and penultimate knots.
    NotAKnot,
}

/// C2 cubic spline through strictly increasing knots.
///
/// Each interval stores `y_i + b (x - x_i) + c (x - x_i)^2 + d (x - x_i)^3`,
/// so evaluation at a knot returns the stored value exactly. Outside the
/// knot range the end polynomials are extended.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFn {
    knots: Vec<f64>,
    values: Vec<f64>,
    coeffs: Vec<[f64; 3]>,
    end: EndCondition,
}

impl SampledFn {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, end: EndCondition) -> Result<Self> {
        let n = knots.len();
        if n < 4 {
            return Err(Error::Size {
                required: 4,
                actual: n,
            });
        }
        if values.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} knots but {} values",
                n,
                values.len()
            )));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite spline data".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let m = second_derivatives(&knots, &values, end);
        let coeffs = knots
            .windows(2)
            .zip(values.windows(2))
            .zip(m.windows(2))
            .map(|((x, y), m)| {
                let h = x[1] - x[0];
                let b = (y[1] - y[0]) / h - h * (2.0 * m[0] + m[1]) / 6.0;
                [b, 0.5 * m[0], (m[1] - m[0]) / (6.0 * h)]
            })
            .collect();
        Ok(Self {
            knots,
            values,
            coeffs,
            end,
        })
    }

    /// Samples `f` at `knots`.
    pub fn from_fn(knots: Vec<f64>, f: impl Fn(f64) -> f64, end: EndCondition) -> Result<Self> {
        let values = knots.iter().map(|&x| f(x)).collect();
        Self::new(knots, values, end)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end_condition(&self) -> EndCondition {
        self.end
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn interval(&self, x: f64) -> usize {
        let last = self.knots.len() - 2;
        self.knots.partition_point(|&k| k <= x).saturating_sub(1).min(last)
    }

    pub fn value(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let dx = x - self.knots[i];
        if dx == 0.0 {
            return self.values[i];
        }
        if x == self.knots[i + 1] {
            return self.values[i + 1];
        }
        let [b, c, d] = self.coeffs[i];
        self.values[i] + dx * (b + dx * (c + dx * d))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let dx = x - self.knots[i];
        let [b, c, d] = self.coeffs[i];
        b + dx * (2.0 * c + 3.0 * dx * d)
    }
}

/// Knot second derivatives of the interpolating cubic.
fn second_derivatives(x: &[f64], y: &[f64], end: EndCondition) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = y
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1] - w[0]) / h)
        .collect();

    // Rows for the continuity of the first derivative at interior knots:
    // h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = 6 (slope[i] - slope[i-1]).
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }

    match end {
        EndCondition::Natural => {
            diag[0] = 1.0;
            diag[n - 1] = 1.0;
            tridiagonal_solve(&sub, &diag, &sup, &rhs)
        }
        EndCondition::Clamped { start, end } => {
            diag[0] = 2.0 * h[0];
            sup[0] = h[0];
            rhs[0] = 6.0 * (slope[0] - start);
            sub[n - 1] = h[n - 2];
            diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (end - slope[n - 2]);
            tridiagonal_solve(&sub, &diag, &sup, &rhs)
        }
        EndCondition::NotAKnot => {
            // M0 = ((h0 + h1) M1 - h0 M2) / h1, eliminated from the first
            // interior row, and the mirror image at the far end.
            let (h0, h1) = (h[0], h[1]);
            diag[1] += h0 * (h0 + h1) / h1;
            sup[1] -= h0 * h0 / h1;
            let (ha, hb) = (h[n - 2], h[n - 3]);
            diag[n - 2] += ha * (ha + hb) / hb;
            sub[n - 2] -= ha * ha / hb;
            let inner = tridiagonal_solve(
                &sub[1..n - 1],
                &diag[1..n - 1],
                &sup[1..n - 1],
                &rhs[1..n - 1],
            );
            let mut m = Vec::with_capacity(n);
            m.push(((h0 + h1) * inner[0] - h0 * inner[1]) / h1);
            m.extend_from_slice(&inner);
            let k = inner.len();
            m.push(((ha + hb) * inner[k - 1] - ha * inner[k - 2]) / hb);
            m
        }
    }
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
fn tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}
