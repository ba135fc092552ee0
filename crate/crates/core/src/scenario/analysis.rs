use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Peak of the one-sided amplitude spectrum of a uniformly sampled signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPeak {
    pub frequency: f64,
    /// Width of one frequency bin, `1 / (n * sample_interval)`.
    pub resolution: f64,
}

/// Dominant nonzero frequency of `signal`, mean removed.
pub fn dominant_frequency(signal: &[f64], sample_interval: f64) -> Result<SpectralPeak> {
    let n = signal.len();
    if n < 4 || !(sample_interval > 0.0) {
        return Err(Error::InvalidInput(
            "need at least 4 samples and a positive sample interval".into(),
        ));
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buffer: Vec<Complex<f64>> = signal.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let bin = (1..=n / 2)
        .max_by(|&a, &b| buffer[a].norm_sqr().total_cmp(&buffer[b].norm_sqr()))
        .expect("at least two positive bins");
    let resolution = 1.0 / (n as f64 * sample_interval);
    Ok(SpectralPeak {
        frequency: bin as f64 * resolution,
        resolution,
    })
}

/// Shift `tau` with `b(t) ~ a(t + tau)`, searched over `|tau| <= max_lag`
/// by normalized cross-correlation and refined by a parabola through the
/// best lag and its neighbours.
pub fn correlation_lag(a: &[f64], b: &[f64], sample_interval: f64, max_lag: f64) -> Result<f64> {
    let n = a.len();
    if b.len() != n || n < 3 || !(sample_interval > 0.0) {
        return Err(Error::InvalidInput(
            "signals must share a length of at least 3 and a positive interval".into(),
        ));
    }
    let centre = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / n as f64;
        x.iter().map(|v| v - m).collect::<Vec<f64>>()
    };
    let (a, b) = (centre(a), centre(b));
    let reach = ((max_lag / sample_interval).floor() as isize).clamp(1, n as isize - 2);
    let score = |lag: isize| {
        let (mut sum, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for i in 0..n as isize {
            let j = i + lag;
            if j < 0 || j >= n as isize {
                continue;
            }
            let (x, y) = (a[j as usize], b[i as usize]);
            sum += x * y;
            aa += x * x;
            bb += y * y;
        }
        if aa > 0.0 && bb > 0.0 {
            sum / (aa * bb).sqrt()
        } else {
            f64::NEG_INFINITY
        }
    };
    let scores: Vec<f64> = (-reach..=reach).map(score).collect();
    let best = (0..scores.len())
        .max_by(|&i, &j| scores[i].total_cmp(&scores[j]))
        .expect("non-empty lag range");
    let mut offset = 0.0;
    if best > 0 && best + 1 < scores.len() {
        let (l, c, r) = (scores[best - 1], scores[best], scores[best + 1]);
        let curvature = l - 2.0 * c + r;
        if curvature < 0.0 {
            offset = 0.5 * (l - r) / curvature;
        }
    }
    Ok((best as f64 - reach as f64 + offset) * sample_interval)
}
