use super::{KinematicSamples, SpaceTimeField};
use crate::error::{Error, Result};
use crate::grid::cumtrapz;

#[derive(Clone, Debug)]
pub struct Potentials {
    pub p1: SpaceTimeField,
    pub p2: SpaceTimeField,
    pub f: SpaceTimeField,
    pub g: SpaceTimeField,
}

/// Trapezoid potential of the gradient field `(d_s, d_t)`, pinned to zero
/// at the grid origin, integrating along `s` at the first time and then
/// along `t`. The other L-shaped path is integrated as well and must agree
/// within ten times the trapezoid error estimate.
pub(crate) fn potential(d_s: &SpaceTimeField, d_t: &SpaceTimeField, name: &str) -> Result<SpaceTimeField> {
    if !d_s.same_shape(d_t) {
        return Err(Error::GridMismatch(format!("{name}: gradient components differ in shape")));
    }
    let (ns, nt, ds, dt) = (d_s.ns(), d_s.nt(), d_s.ds(), d_s.dt());

    let base_s = cumtrapz(&d_s.column(0), ds);
    let mut along_s_first = Vec::with_capacity(ns * nt);
    for (i, start) in base_s.iter().enumerate() {
        along_s_first.extend(cumtrapz(d_t.row(i), dt).into_iter().map(|v| v + start));
    }

    let base_t = cumtrapz(d_t.row(0), dt);
    let mut along_t_first = vec![0.0; ns * nt];
    for (j, start) in base_t.iter().enumerate() {
        for (i, v) in cumtrapz(&d_s.column(j), ds).into_iter().enumerate() {
            along_t_first[i * nt + j] = v + start;
        }
    }

    let gap = along_s_first
        .iter()
        .zip(&along_t_first)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let length_s = ds * (ns - 1) as f64;
    let length_t = dt * (nt - 1) as f64;
    let estimate = ds * ds / 12.0 * length_s * d_s.d_ss()?.max_abs()
        + dt * dt / 12.0 * length_t * d_t.d_tt()?.max_abs();
    let magnitude = along_s_first.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let allowed = 10.0 * 2.0 * estimate + 1e-12 * magnitude;
    if gap > allowed {
        return Err(Error::Inconsistent(format!(
            "{name}: path integrals differ by {gap:.3e}, allowed {allowed:.3e}"
        )));
    }
    SpaceTimeField::new(ns, nt, ds, dt, d_s.t0(), along_s_first)
}

/// `p1` with gradient `(kappa_1, omega_1)`, `p2` with `(kappa_2, omega_2)`,
/// `f` with `(p2, upsilon_1)` and `g` with `(-p1, upsilon_2)`.
pub fn reconstruct_potentials(k: &KinematicSamples) -> Result<Potentials> {
    let p1 = potential(&k.kappa[0], &k.omega[0], "p1")?;
    let p2 = potential(&k.kappa[1], &k.omega[1], "p2")?;
    let f = potential(&p2, &k.upsilon[0], "f")?;
    let g = potential(&p1.map(|v| -v), &k.upsilon[1], "g")?;
    Ok(Potentials { p1, p2, f, g })
}
