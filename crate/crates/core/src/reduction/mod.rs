//! Numerical checks of the reduction chain: kinematic fields to potentials
//! `p1, p2`, then to the pair `f, g`, then to the developable surfaces
//! obtained after reparametrizing time by `Psi' = sqrt(h)`.

mod potentials;
mod report;
mod surfaces;

use crate::analytic::{eval_solution, invert_time, ParamFns};
use crate::error::{Error, Result};
use crate::grid::{diff_first, diff_second, Grid1D};
use crate::rod::RodState;

pub use potentials::{reconstruct_potentials, Potentials};
pub use report::{
    verify_chain, verification_report, ChainResiduals, ConvergenceOrders, VerificationGrid,
    VerificationReport,
};
pub use surfaces::{
    developability_residuals, extract_h, residual_fg, transform_and_check,
    DevelopabilityResiduals, FgResiduals, HProfile,
};

/// Scalar samples on a uniform `(s, t)` rectangle, stored with `s` major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    ns: usize,
    nt: usize,
    ds: f64,
    dt: f64,
    t0: f64,
    data: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(ns: usize, nt: usize, ds: f64, dt: f64, t0: f64, data: Vec<f64>) -> Result<Self> {
        if ns < 3 || nt < 3 {
            return Err(Error::Size {
                required: 3,
                actual: ns.min(nt),
            });
        }
        if data.len() != ns * nt {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {ns} x {nt} rectangle",
                data.len()
            )));
        }
        if !(ds > 0.0 && dt > 0.0) {
            return Err(Error::InvalidInput("grid spacings must be positive".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite space-time sample".into()));
        }
        Ok(Self {
            ns,
            nt,
            ds,
            dt,
            t0,
            data,
        })
    }

    /// Samples `f(s, t)` on the rectangle.
    pub fn from_fn(ns: usize, nt: usize, ds: f64, dt: f64, t0: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(ns * nt);
        for i in 0..ns {
            for j in 0..nt {
                data.push(f(i as f64 * ds, t0 + j as f64 * dt));
            }
        }
        Self::new(ns, nt, ds, dt, t0, data)
    }

    pub fn ns(&self) -> usize {
        self.ns
    }
    pub fn nt(&self) -> usize {
        self.nt
    }
    pub fn ds(&self) -> f64 {
        self.ds
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nt + j]
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.ds
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// Values at fixed `s` index, along `t`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.nt..(i + 1) * self.nt]
    }

    /// Values at fixed `t` index, along `s`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.ns).map(|i| self.get(i, j)).collect()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.ns == other.ns
            && self.nt == other.nt
            && self.ds == other.ds
            && self.dt == other.dt
            && self.t0 == other.t0
    }

    fn with_data(&self, data: Vec<f64>) -> Self {
        Self { data, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_data(self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        self.with_data(self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn along_t(&self, op: impl Fn(&[f64], f64) -> Result<Vec<f64>>) -> Result<Self> {
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.ns {
            data.extend(op(self.row(i), self.dt)?);
        }
        Ok(self.with_data(data))
    }

    fn along_s(&self, op: impl Fn(&[f64], f64) -> Result<Vec<f64>>) -> Result<Self> {
        let mut data = vec![0.0; self.data.len()];
        for j in 0..self.nt {
            for (i, v) in op(&self.column(j), self.ds)?.into_iter().enumerate() {
                data[i * self.nt + j] = v;
            }
        }
        Ok(self.with_data(data))
    }

    pub fn d_s(&self) -> Result<Self> {
        self.along_s(|v, h| diff_first(v, h))
    }
    pub fn d_t(&self) -> Result<Self> {
        self.along_t(|v, h| diff_first(v, h))
    }
    pub fn d_ss(&self) -> Result<Self> {
        self.along_s(|v, h| diff_second(v, h))
    }
    pub fn d_tt(&self) -> Result<Self> {
        self.along_t(|v, h| diff_second(v, h))
    }
    pub fn d_st(&self) -> Result<Self> {
        self.d_t()?.d_s()
    }
}

/// Components of the three kinematic fields on a rectangle.
#[derive(Clone, Debug)]
pub struct KinematicSamples {
    pub kappa: [SpaceTimeField; 2],
    pub omega: [SpaceTimeField; 2],
    pub upsilon: [SpaceTimeField; 2],
}

impl KinematicSamples {
    /// Family samples for `s` on `grid` and `t = t0 + j dt`, `j < nt`.
    pub fn from_family(pf: &ParamFns, grid: &Grid1D, t0: f64, dt: f64, nt: usize) -> Result<Self> {
        let ns = grid.nodes();
        let mut comps = vec![Vec::with_capacity(ns * nt); 6];
        for s in grid.positions() {
            for j in 0..nt {
                let t = t0 + j as f64 * dt;
                let p = eval_solution(pf, s, invert_time(pf, s, t)?)?;
                for (k, v) in [p.kappa.x, p.kappa.y, p.omega.x, p.omega.y, p.upsilon.x, p.upsilon.y]
                    .into_iter()
                    .enumerate()
                {
                    comps[k].push(v);
                }
            }
        }
        let ds = grid.spacing();
        let mut fields = comps
            .into_iter()
            .map(|d| SpaceTimeField::new(ns, nt, ds, dt, t0, d))
            .collect::<Result<Vec<_>>>()?
            .into_iter();
        let mut next = || fields.next().expect("six components");
        Ok(Self {
            kappa: [next(), next()],
            omega: [next(), next()],
            upsilon: [next(), next()],
        })
    }

    /// Rod state at time index `j`.
    pub fn state(&self, j: usize) -> Result<RodState> {
        let ns = self.kappa[0].ns();
        let grid = Grid1D::new(self.kappa[0].ds() * (ns - 1) as f64, ns)?;
        let vec = |f: &[SpaceTimeField; 2]| {
            (0..ns)
                .map(|i| crate::grid::Vec2::new(f[0].get(i, j), f[1].get(i, j)))
                .collect()
        };
        RodState::new(grid, vec(&self.kappa), vec(&self.omega), vec(&self.upsilon))
    }
}
