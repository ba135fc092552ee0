use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{extract_h, reconstruct_potentials, residual_fg, transform_and_check, KinematicSamples};
use crate::analytic::{residual_parameter_free, ParamFns};
use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Rectangle `s in [0, (Ns - 1) ds]`, `t in [t0, t0 + (Nt - 1) dt]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationGrid {
    #[serde(rename = "Ns")]
    pub ns: usize,
    #[serde(rename = "Nt")]
    pub nt: usize,
    pub ds: f64,
    pub dt: f64,
}

impl VerificationGrid {
    /// Grid on the unit rod with `ns` nodes and `nt` time samples.
    pub fn unit(ns: usize, nt: usize, dt: f64) -> Result<Self> {
        if ns < 3 || nt < 3 {
            return Err(Error::Size {
                required: 3,
                actual: ns.min(nt),
            });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            ns,
            nt,
            ds: 1.0 / (ns - 1) as f64,
            dt,
        })
    }

    /// Same rectangle with both spacings halved.
    pub fn refined(&self) -> Self {
        Self {
            ns: 2 * self.ns - 1,
            nt: 2 * self.nt - 1,
            ds: self.ds / 2.0,
            dt: self.dt / 2.0,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.ds.max(self.dt)
    }
}

/// Max-norm residuals of every checked relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResiduals {
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "R4")]
    pub r4: f64,
    #[serde(rename = "R5")]
    pub r5: f64,
    #[serde(rename = "R6")]
    pub r6: f64,
    #[serde(rename = "R9")]
    pub r9: f64,
    #[serde(rename = "R10")]
    pub r10: f64,
    #[serde(rename = "R12")]
    pub r12: f64,
    #[serde(rename = "R22")]
    pub r22: f64,
    #[serde(rename = "R23")]
    pub r23: f64,
    #[serde(rename = "R24")]
    pub r24: f64,
    pub h_uniformity: f64,
}

impl ChainResiduals {
    pub fn named(&self) -> [(&'static str, f64); 11] {
        [
            ("R3", self.r3),
            ("R4", self.r4),
            ("R5", self.r5),
            ("R6", self.r6),
            ("R9", self.r9),
            ("R10", self.r10),
            ("R12", self.r12),
            ("R22", self.r22),
            ("R23", self.r23),
            ("R24", self.r24),
            ("h_uniformity", self.h_uniformity),
        ]
    }

    /// Acceptance bounds for a grid of spacing `h`: `10 h^2` for
    /// discretization residuals and `1e-12` for the collinearity ones.
    pub fn thresholds(h: f64) -> Self {
        let d = 10.0 * h * h;
        Self {
            r3: d,
            r4: d,
            r5: 1e-12,
            r6: 1e-12,
            r9: d,
            r10: d,
            r12: d,
            r22: d,
            r23: d,
            r24: d,
            h_uniformity: d,
        }
    }

    pub fn within(&self, bounds: &ChainResiduals) -> bool {
        self.named()
            .iter()
            .zip(bounds.named())
            .all(|((_, v), (_, b))| *v <= b)
    }
}

/// Runs the whole chain on family samples starting at time `t0`.
pub fn verify_chain(pf: &ParamFns, grid: VerificationGrid, t0: f64) -> Result<ChainResiduals> {
    let rod_grid = Grid1D::new(grid.ds * (grid.ns - 1) as f64, grid.ns)?;
    let k = KinematicSamples::from_family(pf, &rod_grid, t0, grid.dt, grid.nt)?;

    let mut pf_res = [0.0f64; 4];
    let mut prev = k.state(0)?;
    let mut cur = k.state(1)?;
    for j in 1..grid.nt - 1 {
        let next = k.state(j + 1)?;
        let r = residual_parameter_free(&prev, &cur, &next, grid.dt)?;
        for (acc, v) in pf_res.iter_mut().zip([r.r3, r.r4, r.r5, r.r6]) {
            *acc = acc.max(v);
        }
        prev = cur;
        cur = next;
    }

    let p = reconstruct_potentials(&k)?;
    let fg = residual_fg(&p.f, &p.g)?;
    let hp = extract_h(&p.f, &p.g)?;
    let dev = transform_and_check(&p.f, &p.g, &hp.h)?;
    Ok(ChainResiduals {
        r3: pf_res[0],
        r4: pf_res[1],
        r5: pf_res[2],
        r6: pf_res[3],
        r9: fg.r9,
        r10: fg.r10,
        r12: fg.r12,
        r22: dev.r22,
        r23: dev.r23,
        r24: dev.r24,
        h_uniformity: hp.s_uniformity,
    })
}

/// Observed orders `log2(coarse / fine)` keyed by residual name.
pub type ConvergenceOrders = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid: VerificationGrid,
    pub residuals: ChainResiduals,
    pub convergence_orders: ConvergenceOrders,
    pub thresholds: ChainResiduals,
    pub passed: bool,
}

/// Chain residuals on `grid` plus orders measured against the refined grid.
/// Residuals already at rounding level on both grids get no order.
pub fn verification_report(pf: &ParamFns, grid: VerificationGrid, t0: f64) -> Result<VerificationReport> {
    let coarse = verify_chain(pf, grid, t0)?;
    let fine = verify_chain(pf, grid.refined(), t0)?;
    let convergence_orders = coarse
        .named()
        .iter()
        .zip(fine.named())
        .filter(|((_, c), (_, f))| *c > 1e-12 && *f > 0.0)
        .map(|((name, c), (_, f))| (name.to_string(), (c / f).log2()))
        .collect();
    let thresholds = ChainResiduals::thresholds(grid.spacing());
    Ok(VerificationReport {
        grid,
        passed: coarse.within(&thresholds),
        residuals: coarse,
        convergence_orders,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_report() {
        let grid = VerificationGrid::unit(33, 33, 1.0 / 32.0).unwrap();
        let report = verification_report(&ParamFns::reference(), grid, 0.0).unwrap();
        assert!(report.passed, "{report:?}");
        for (name, order) in &report.convergence_orders {
            assert!(*order >= 1.7, "{name}: {order}");
        }
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["grid"]["Ns"], 33);
        assert!(json["residuals"]["R22"].is_number());
        assert!(json["residuals"]["h_uniformity"].is_number());
    }
}
