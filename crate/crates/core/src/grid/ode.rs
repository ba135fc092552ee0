use crate::error::{Error, Result};

/// States of a fixed-step march, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeTrajectory {
    pub u: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl OdeTrajectory {
    pub fn last(&self) -> &[f64] {
        self.y.last().expect("trajectory always holds the initial state")
    }

    /// Values of component `k` along the march.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.y.iter().map(|y| y[k]).collect()
    }
}

/// One classical RK4 step. `rhs(u, y, dy)` writes the derivative into `dy`.
pub fn rk4_step<F>(rhs: &mut F, u: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut eval = |u: f64, y: &[f64]| -> Result<Vec<f64>> {
        let mut dy = vec![0.0; n];
        rhs(u, y, &mut dy);
        if dy.iter().all(|v| v.is_finite()) {
            Ok(dy)
        } else {
            Err(Error::Divergence { u })
        }
    };
    let shifted = |k: &[f64], a: f64| -> Vec<f64> { y.iter().zip(k).map(|(y, k)| y + a * k).collect() };
    let k1 = eval(u, y)?;
    let k2 = eval(u + 0.5 * h, &shifted(&k1, 0.5 * h))?;
    let k3 = eval(u + 0.5 * h, &shifted(&k2, 0.5 * h))?;
    let k4 = eval(u + h, &shifted(&k3, h))?;
    Ok((0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Fixed-step RK4 over `[u_range.0, u_range.1]` in `steps` equal steps.
pub fn integrate_ode_rk4<F>(
    mut rhs: F,
    y0: &[f64],
    u_range: (f64, f64),
    steps: usize,
) -> Result<OdeTrajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if steps == 0 {
        return Err(Error::InvalidInput("RK4 needs at least one step".into()));
    }
    let (a, b) = u_range;
    let h = (b - a) / steps as f64;
    let mut u = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps + 1);
    u.push(a);
    y.push(y0.to_vec());
    for k in 0..steps {
        let uk = a + k as f64 * h;
        let next = rk4_step(&mut rhs, uk, &y[k], h)?;
        u.push(if k + 1 == steps { b } else { a + (k + 1) as f64 * h });
        y.push(next);
    }
    Ok(OdeTrajectory { u, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    #[test]
    fn zero_rhs_keeps_state() {
        let tr = integrate_ode_rk4(|_, _, dy| dy[0] = 0.0, &[3.0], (0.0, 1.0), 10).unwrap();
        assert_eq!(tr.y.len(), 11);
        assert!(tr.y.iter().all(|y| y[0] == 3.0));
        assert_eq!(tr.u[0], 0.0);
        assert_eq!(tr.u[10], 1.0);
    }

    #[test]
    fn exponential_growth() {
        let tr = integrate_ode_rk4(|_, y, dy| dy[0] = y[0], &[1.0], (0.0, 1.0), 100).unwrap();
        assert!((tr.last()[0] - E).abs() <= 1e-8);
    }

    #[test]
    fn integrates_cosine() {
        let tr = integrate_ode_rk4(|u, _, dy| dy[0] = u.cos(), &[0.0], (0.0, FRAC_PI_2), 50)
            .unwrap();
        assert!((tr.last()[0] - 1.0).abs() <= 1e-7);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n| {
            let tr = integrate_ode_rk4(|_, y, dy| dy[0] = -y[0] * y[0], &[1.0], (0.0, 2.0), n)
                .unwrap();
            (tr.last()[0] - 1.0 / 3.0).abs()
        };
        let ratio = err(20) / err(40);
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn non_finite_rhs_reports_position() {
        let r = integrate_ode_rk4(
            |u, _, dy| dy[0] = if u >= 0.5 { f64::NAN } else { 1.0 },
            &[0.0],
            (0.0, 1.0),
            4,
        );
        match r {
            Err(Error::Divergence { u }) => assert_eq!(u, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(integrate_ode_rk4(|_, _, _| {}, &[0.0], (0.0, 1.0), 0).is_err());
    }
}
