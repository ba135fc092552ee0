use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::Scheme;
use crate::rod::{BoundaryConditions, EndKind, MaterialParams};

pub const SCENARIO_SCHEMA: &str = "rodsim/scenario-v1";

/// End condition as written in a config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndSpec {
    /// Clamped at rest.
    Clamped,
    Free,
}

impl EndSpec {
    fn kind(self) -> EndKind {
        match self {
            EndSpec::Clamped => EndKind::clamped(),
            EndSpec::Free => EndKind::Free,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub base: EndSpec,
    pub tip: EndSpec,
}

impl BoundarySpec {
    pub fn conditions(&self) -> BoundaryConditions {
        BoundaryConditions {
            base: self.base.kind(),
            tip: self.tip.kind(),
        }
    }
}

/// Distributed couple `l0 r(t) sin(2 pi nu t + phase)` on the basal
/// `active_fraction` of the rod, acting on the first curvature component.
/// `r` rises from 0 to 1 as `(1 - cos(pi t / T)) / 2` over
/// `T = ramp_periods / nu`; zero periods switch the ramp off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSpec {
    /// Couple per unit length.
    pub amplitude: f64,
    /// Cycles per unit time.
    pub frequency: f64,
    pub active_fraction: f64,
    /// Phase of rod 0, radians.
    pub phase: f64,
    pub ramp_periods: f64,
}

impl Default for DriveSpec {
    fn default() -> Self {
        Self {
            amplitude: 0.5,
            frequency: 1.0,
            active_fraction: 0.3,
            phase: 0.0,
            ramp_periods: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarpetSpec {
    pub rods: usize,
    /// Distance between neighbouring bases along x.
    pub spacing: f64,
    /// Phase added per rod, radians.
    pub phase_increment: f64,
}

impl Default for CarpetSpec {
    fn default() -> Self {
        Self {
            rods: 1,
            spacing: 0.25,
            phase_increment: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Steps between recorded frames.
    pub stride: usize,
    pub format: OutputFormat,
    pub path: Option<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            stride: 100,
            format: OutputFormat::Json,
            path: None,
        }
    }
}

/// Stability search and timing settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSpec {
    pub dt_min: f64,
    pub dt_max: f64,
    /// Bisection steps allowed per scheme.
    pub trials: usize,
    /// Tip-path tolerance relative to the largest tip deflection.
    pub accuracy: f64,
    /// Number of equally spaced tip samples compared for accuracy.
    pub samples: usize,
    /// Stability horizon; `t_end` when absent.
    pub horizon: Option<f64>,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            dt_min: 1e-7,
            dt_max: 1e-1,
            trials: 40,
            accuracy: 0.01,
            samples: 100,
            horizon: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub schema: String,
    pub material: MaterialParams,
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub boundary: BoundarySpec,
    pub drive: DriveSpec,
    pub carpet: CarpetSpec,
    pub output: OutputSpec,
    pub benchmark: BenchmarkSpec,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema: SCENARIO_SCHEMA.into(),
            material: MaterialParams {
                density: 1.0,
                area: 0.01,
                inertia: 0.01,
                bending_stiffness: 0.1,
                length: 1.0,
                nodes: 101,
            },
            scheme: Scheme::Semi,
            dt: 1e-3,
            t_end: 10.0,
            boundary: BoundarySpec {
                base: EndSpec::Clamped,
                tip: EndSpec::Free,
            },
            drive: DriveSpec::default(),
            carpet: CarpetSpec::default(),
            output: OutputSpec::default(),
            benchmark: BenchmarkSpec::default(),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Configuration(msg));
        if self.schema != SCENARIO_SCHEMA {
            return bad(format!("unsupported schema {:?}, expected {SCENARIO_SCHEMA:?}", self.schema));
        }
        self.material
            .validate()
            .map_err(|e| Error::Configuration(format!("material: {e}")))?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        let d = &self.drive;
        if !(d.amplitude.is_finite() && d.phase.is_finite()) {
            return bad("drive amplitude and phase must be finite".into());
        }
        if !(d.frequency.is_finite() && d.frequency > 0.0) {
            return bad(format!("drive frequency must be positive, got {}", d.frequency));
        }
        if !(d.active_fraction > 0.0 && d.active_fraction <= 1.0) {
            return bad(format!("active fraction must lie in (0, 1], got {}", d.active_fraction));
        }
        if !(d.ramp_periods.is_finite() && d.ramp_periods >= 0.0) {
            return bad(format!("ramp_periods must be non-negative, got {}", d.ramp_periods));
        }
        let c = &self.carpet;
        if c.rods < 1 {
            return bad("carpet needs at least one rod".into());
        }
        if !(c.spacing.is_finite() && c.phase_increment.is_finite()) {
            return bad("carpet spacing and phase increment must be finite".into());
        }
        if self.output.stride < 1 {
            return bad("output stride must be at least 1".into());
        }
        let b = &self.benchmark;
        if !(b.dt_min > 0.0 && b.dt_max >= b.dt_min && b.dt_max.is_finite()) {
            return bad(format!("benchmark step bounds ({}, {}) are invalid", b.dt_min, b.dt_max));
        }
        if b.horizon.is_some_and(|h| !(h.is_finite() && h > 0.0)) {
            return bad("benchmark horizon must be positive".into());
        }
        if !(b.accuracy > 0.0 && b.samples >= 2) {
            return bad("benchmark accuracy must be positive and samples at least 2".into());
        }
        if self.boundary.base == EndSpec::Free && self.boundary.tip == EndSpec::Free && d.amplitude != 0.0 {
            return bad("a driven rod needs at least one clamped end".into());
        }
        Ok(())
    }

    /// Number of steps and the step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_end / self.dt).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }

    /// Phase of rod `k`.
    pub fn rod_phase(&self, k: usize) -> f64 {
        self.drive.phase + k as f64 * self.carpet.phase_increment
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        let back = ScenarioConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_documents_fill_in_defaults() {
        let c = ScenarioConfig::from_json(
            r#"{"schema": "rodsim/scenario-v1", "t_end": 2.0, "carpet": {"rods": 4}}"#,
        )
        .unwrap();
        assert_eq!(c.t_end, 2.0);
        assert_eq!(c.carpet.rods, 4);
        assert_eq!(c.carpet.spacing, CarpetSpec::default().spacing);
        assert_eq!(c.material.nodes, 101);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"schema": "rodsim/scenario-v1", "colour": 3}"#),
            Err(Error::Json(_))
        ));
        assert!(ScenarioConfig::from_json(r#"{"schema": "rodsim/scenario-v1", "drive": {"phse": 1}}"#).is_err());
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"schema": "other"}"#),
            Err(Error::Configuration(_))
        ));
        for bad in [
            r#"{"carpet": {"rods": 0}}"#,
            r#"{"drive": {"active_fraction": 0.0}}"#,
            r#"{"drive": {"active_fraction": 1.5}}"#,
            r#"{"output": {"stride": 0}}"#,
            r#"{"dt": -1.0}"#,
            r#"{"boundary": {"base": "free", "tip": "free"}}"#,
        ] {
            let mut value: serde_json::Value = serde_json::from_str(bad).unwrap();
            value["schema"] = SCENARIO_SCHEMA.into();
            let r = ScenarioConfig::from_json(&value.to_string());
            assert!(matches!(r, Err(Error::Configuration(_))), "{bad}");
        }
    }

    #[test]
    fn steps_land_on_end_time() {
        let c = ScenarioConfig {
            dt: 0.3,
            t_end: 1.0,
            ..Default::default()
        };
        let (n, dt) = c.steps();
        assert_eq!(n, 4);
        assert!((dt * n as f64 - 1.0).abs() < 1e-15);
    }
}
