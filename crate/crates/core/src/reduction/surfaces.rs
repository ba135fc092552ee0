use serde::{Deserialize, Serialize};

use super::SpaceTimeField;
use crate::error::{Error, Result};
use crate::grid::{cumtrapz, EndCondition, SampledFn};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgResiduals {
    /// `f_st g_ss - g_st f_ss`.
    pub r9: f64,
    /// `g_ss g_t + f_ss f_t`.
    pub r10: f64,
    /// `g_st g_t + f_st f_t`.
    pub r12: f64,
}

fn check_shapes(f: &SpaceTimeField, g: &SpaceTimeField) -> Result<()> {
    if f.same_shape(g) {
        Ok(())
    } else {
        Err(Error::GridMismatch("f and g live on different rectangles".into()))
    }
}

pub fn residual_fg(f: &SpaceTimeField, g: &SpaceTimeField) -> Result<FgResiduals> {
    check_shapes(f, g)?;
    let (ft, gt) = (f.d_t()?, g.d_t()?);
    let (fss, gss) = (f.d_ss()?, g.d_ss()?);
    let (fst, gst) = (f.d_st()?, g.d_st()?);
    let mut r = FgResiduals {
        r9: 0.0,
        r10: 0.0,
        r12: 0.0,
    };
    for i in 0..f.ns() {
        for j in 0..f.nt() {
            let at = |x: &SpaceTimeField| x.get(i, j);
            r.r9 = r.r9.max((at(&fst) * at(&gss) - at(&gst) * at(&fss)).abs());
            r.r10 = r.r10.max((at(&gss) * at(&gt) + at(&fss) * at(&ft)).abs());
            r.r12 = r.r12.max((at(&gst) * at(&gt) + at(&fst) * at(&ft)).abs());
        }
    }
    Ok(r)
}

/// `h(t) = g_t^2 + f_t^2`, averaged over `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct HProfile {
    pub h: Vec<f64>,
    /// Largest deviation of `g_t^2 + f_t^2` from its average over `s`.
    pub s_uniformity: f64,
}

pub fn extract_h(f: &SpaceTimeField, g: &SpaceTimeField) -> Result<HProfile> {
    check_shapes(f, g)?;
    let (ft, gt) = (f.d_t()?, g.d_t()?);
    let speed = ft.zip_map(&gt, |a, b| a * a + b * b);
    let mut h = Vec::with_capacity(f.nt());
    let mut s_uniformity = 0.0f64;
    for j in 0..f.nt() {
        let column = speed.column(j);
        let mean = column.iter().sum::<f64>() / column.len() as f64;
        if !(mean > 0.0) {
            return Err(Error::NonPositiveH { index: j, value: mean });
        }
        s_uniformity = column.iter().fold(s_uniformity, |m, v| m.max((v - mean).abs()));
        h.push(mean);
    }
    Ok(HProfile { h, s_uniformity })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DevelopabilityResiduals {
    /// `f_xx f_yy - f_xy^2`.
    pub r22: f64,
    /// `g_xx g_yy - g_xy^2`.
    pub r23: f64,
    /// `f_y^2 + g_y^2 - 1`.
    pub r24: f64,
}

/// Residuals on an already uniform `(x, y)` rectangle; `x` plays the role
/// of `s` and `y` that of `t` in the field layout.
pub fn developability_residuals(f: &SpaceTimeField, g: &SpaceTimeField) -> Result<DevelopabilityResiduals> {
    check_shapes(f, g)?;
    let hessian_det = |x: &SpaceTimeField| -> Result<f64> {
        let (xx, yy, xy) = (x.d_ss()?, x.d_tt()?, x.d_st()?);
        let mut worst = 0.0f64;
        for i in 0..x.ns() {
            for j in 0..x.nt() {
                let v = xx.get(i, j) * yy.get(i, j) - xy.get(i, j) * xy.get(i, j);
                worst = worst.max(v.abs());
            }
        }
        Ok(worst)
    };
    let (fy, gy) = (f.d_t()?, g.d_t()?);
    let r24 = fy.zip_map(&gy, |a, b| a * a + b * b - 1.0).max_abs();
    Ok(DevelopabilityResiduals {
        r22: hessian_det(f)?,
        r23: hessian_det(g)?,
        r24,
    })
}

/// Reparametrizes time by `y = Psi(t)`, `Psi' = sqrt(h)`, resamples `f` and
/// `g` on a uniform `y` grid by not-a-knot cubic interpolation at fixed `s`,
/// and evaluates the developability residuals there.
pub fn transform_and_check(
    f: &SpaceTimeField,
    g: &SpaceTimeField,
    h: &[f64],
) -> Result<DevelopabilityResiduals> {
    check_shapes(f, g)?;
    if h.len() != f.nt() {
        return Err(Error::GridMismatch(format!(
            "{} h values for {} time samples",
            h.len(),
            f.nt()
        )));
    }
    if let Some((index, &value)) = h.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveH { index, value });
    }
    let root: Vec<f64> = h.iter().map(|v| v.sqrt()).collect();
    let y = cumtrapz(&root, f.dt());
    if y.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Inconsistent("time reparametrization is not monotone".into()));
    }
    let nt = f.nt();
    let dy = y[nt - 1] / (nt - 1) as f64;
    let uniform: Vec<f64> = (0..nt)
        .map(|k| if k + 1 == nt { y[nt - 1] } else { k as f64 * dy })
        .collect();
    let resample = |x: &SpaceTimeField| -> Result<SpaceTimeField> {
        let mut data = Vec::with_capacity(x.ns() * nt);
        for i in 0..x.ns() {
            let spline = SampledFn::new(y.clone(), x.row(i).to_vec(), EndCondition::NotAKnot)?;
            data.extend(uniform.iter().map(|&v| spline.value(v)));
        }
        SpaceTimeField::new(x.ns(), nt, x.ds(), dy, 0.0, data)
    };
    developability_residuals(&resample(f)?, &resample(g)?)
}
