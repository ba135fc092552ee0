use std::f64::consts::PI;

use super::config::DriveSpec;
use crate::grid::Vec2;
use crate::rod::Loads;

/// Envelope `r(t)` of the drive.
pub fn ramp(spec: &DriveSpec, t: f64) -> f64 {
    let rise = spec.ramp_periods / spec.frequency;
    if rise <= 0.0 || t >= rise {
        1.0
    } else if t <= 0.0 {
        0.0
    } else {
        0.5 * (1.0 - (PI * t / rise).cos())
    }
}

/// Couple density of the drive at `(s, t)` for a rod of length `length`.
pub fn drive_couple(spec: &DriveSpec, length: f64, phase: f64, s: f64, t: f64) -> Vec2 {
    if s > spec.active_fraction * length {
        return Vec2::zeros();
    }
    let value = spec.amplitude * ramp(spec, t) * (2.0 * PI * spec.frequency * t + phase).sin();
    Vec2::new(value, 0.0)
}

pub fn drive_loads(spec: DriveSpec, length: f64, phase: f64) -> Loads {
    if spec.amplitude == 0.0 {
        return Loads::none();
    }
    Loads::none().with_couple(move |s, t| drive_couple(&spec, length, phase, s, t))
}

/// Bending energy of the static cantilever response to the peak couple,
/// `l0^2 (aL)^3 / (6 EI)`.
pub fn static_energy(spec: &DriveSpec, length: f64, bending_stiffness: f64) -> f64 {
    let active = spec.active_fraction * length;
    spec.amplitude * spec.amplitude * active.powi(3) / (6.0 * bending_stiffness)
}
