use super::{Field, FieldValue};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    First,
    Second,
}

fn check_len(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::Size {
            required: 3,
            actual: n,
        })
    } else {
        Ok(())
    }
}

/// First derivative: central inside. The ends use the 4-point one-sided
/// stencil `(-4, 7, -4, 1) / 2h`, whose leading error `h^2 f''' / 6`
/// equals that of the central stencil, so the truncation error stays smooth
/// across the boundary and survives later integration and differencing.
/// With only three nodes the ends fall back to `(-3, 4, -1) / 2h`.
pub fn diff_first<T: FieldValue>(f: &[T], h: f64) -> Result<Vec<T>> {
    let n = f.len();
    check_len(n)?;
    let inv = 1.0 / (2.0 * h);
    let mut out = Vec::with_capacity(n);
    if n == 3 {
        out.push((f[1] * 4.0 - f[0] * 3.0 - f[2]) * inv);
        out.push((f[2] - f[0]) * inv);
        out.push((f[2] * 3.0 - f[1] * 4.0 + f[0]) * inv);
        return Ok(out);
    }
    out.push((f[1] * 7.0 + f[3] - (f[0] + f[2]) * 4.0) * inv);
    out.extend(f.windows(3).map(|w| (w[2] - w[0]) * inv));
    out.push(((f[n - 1] + f[n - 3]) * 4.0 - f[n - 2] * 7.0 - f[n - 4]) * inv);
    Ok(out)
}

/// Second derivative: central inside. The ends use the 4-point one-sided
/// stencil `(2, -5, 4, -1) / h^2`, which keeps second order; with only three
/// nodes the ends fall back to the shared 3-point stencil.
pub fn diff_second<T: FieldValue>(f: &[T], h: f64) -> Result<Vec<T>> {
    let n = f.len();
    check_len(n)?;
    let inv = 1.0 / (h * h);
    let mut out = Vec::with_capacity(n);
    let interior = |w: &[T]| (w[0] + w[2] - w[1] * 2.0) * inv;
    if n == 3 {
        let c = interior(f);
        return Ok(vec![c, c, c]);
    }
    out.push((f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) * inv);
    out.extend(f.windows(3).map(interior));
    out.push((f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) * inv);
    Ok(out)
}

pub fn central_diff<T: FieldValue>(field: &Field<T>, which: Derivative) -> Result<Field<T>> {
    let h = field.grid().spacing();
    let values = match which {
        Derivative::First => diff_first(field.values(), h)?,
        Derivative::Second => diff_second(field.values(), h)?,
    };
    Ok(Field {
        grid: field.grid(),
        values,
    })
}

/// Cumulative trapezoid integral from the first node; the first entry is zero.
///
/// Panel sums are accumulated with Neumaier compensation and scaled by `h`
/// afterwards, so long runs do not accumulate rounding drift.
pub fn cumtrapz<T: FieldValue>(f: &[T], h: f64) -> Vec<T> {
    let mut out = Vec::with_capacity(f.len());
    if f.is_empty() {
        return out;
    }
    let mut sum = T::zero();
    let mut carry = T::zero();
    out.push(T::zero());
    for w in f.windows(2) {
        let term = (w[0] + w[1]) * 0.5;
        let next = sum + term;
        carry = carry + neumaier_correction(sum, term, next);
        sum = next;
        out.push((sum + carry) * h);
    }
    out
}

/// Rounding error of `a + b = s`, componentwise.
fn neumaier_correction<T: FieldValue>(a: T, b: T, s: T) -> T {
    T::combine(a, b, s, |a, b, s| {
        if a.abs() >= b.abs() {
            (a - s) + b
        } else {
            (b - s) + a
        }
    })
}
