//! JSON scenario files.
//!
//! ```json
//! {
//!   "constants": {"hbar": 1, "c": 1, "g": 1},
//!   "box": {"M": 1000, "m": 1, "potential": {"type": "harmonic", "k": 1000}},
//!   "measurement": {"route": "p", "device_dx": 0.5, "device_dcl": 0},
//!   "time": {"t_emit": 2},
//!   "numeric": {"step": 0.001},
//!   "oracle": {"n": 60, "buffer": 8, "scale": 1, "step": 0.001}
//! }
//! ```
//!
//! `numeric` and `oracle` are optional; unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{BoxParams, PhysConstants, Potential};
use crate::dynamics::NumericOptions;
use crate::inference::{Route, MIN_PRECISION};
use crate::oracle::OracleConfig;
use crate::scenario::{Measurement, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub constants: ConstantsSection,
    #[serde(rename = "box")]
    pub box_section: BoxSection,
    pub measurement: MeasurementSection,
    pub time: TimeSection,
    #[serde(default)]
    pub numeric: NumericSection,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar: f64,
    pub c: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    #[serde(rename = "M")]
    pub mass: f64,
    pub m: f64,
    pub potential: PotentialSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSection {
    Free {},
    Harmonic { k: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum RouteName {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "q")]
    Q,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSection {
    pub route: RouteName,
    pub device_dx: f64,
    pub device_dcl: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_emit: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSection {
    #[serde(default = "default_step")]
    pub step: f64,
}

impl Default for NumericSection {
    fn default() -> Self {
        Self {
            step: default_step(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_buffer")]
    pub buffer: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    1e-3
}

fn default_n() -> usize {
    OracleConfig::default().n
}

fn default_buffer() -> usize {
    OracleConfig::default().buffer
}

fn default_scale() -> f64 {
    1.0
}

fn invalid(field: &str, reason: &str) -> ConfigError {
    ConfigError::Invalid(format!("`{field}` {reason}"))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let c = &self.constants;
        let constants = PhysConstants::new(c.hbar, c.c, c.g)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let potential = match self.box_section.potential {
            PotentialSection::Free {} => Potential::Free,
            PotentialSection::Harmonic { k } => Potential::Harmonic { k },
        };
        let box_params = BoxParams::new(self.box_section.mass, self.box_section.m, potential)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let m = &self.measurement;
        if !(m.device_dx.is_finite() && m.device_dx >= MIN_PRECISION) {
            return Err(invalid(
                "measurement.device_dx",
                "must be finite and >= 1e-12",
            ));
        }
        if !(m.device_dcl.is_finite() && m.device_dcl >= 0.0) {
            return Err(invalid("measurement.device_dcl", "must be finite and >= 0"));
        }
        let route = match m.route {
            RouteName::P => Route::ViaP,
            RouteName::Q => Route::ViaQ,
        };

        let t_emit = self.time.t_emit;
        if !(t_emit.is_finite() && t_emit >= 0.0) {
            return Err(invalid("time.t_emit", "must be finite and >= 0"));
        }
        let numeric = NumericOptions::new(self.numeric.step)
            .map_err(|_| invalid("numeric.step", "must be finite and > 0"))?;

        let oracle = match &self.oracle {
            None => None,
            Some(o) => {
                let cfg = OracleConfig {
                    n: o.n,
                    buffer: o.buffer,
                    scale: o.scale,
                    step: o.step,
                };
                cfg.validate()
                    .map_err(|e| ConfigError::Invalid(format!("`oracle` {e}")))?;
                Some(cfg)
            }
        };

        let scenario = Scenario {
            constants,
            box_params,
            measurement: Measurement {
                route,
                device_dx: m.device_dx,
                device_dcl: m.device_dcl,
            },
            t_emit,
            numeric,
            oracle,
        };
        scenario
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{
        "constants": {"hbar": 1, "c": 1, "g": 1},
        "box": {"M": 1000, "m": 1, "potential": {"type": "free"}},
        "measurement": {"route": "p", "device_dx": 0.5, "device_dcl": 0},
        "time": {"t_emit": 2}
    }"#;

    fn with(from: &str, to: &str) -> String {
        assert!(REFERENCE.contains(from));
        REFERENCE.replace(from, to)
    }

    #[test]
    fn reference_config_matches_builtin() {
        let s = ConfigFile::parse(REFERENCE).unwrap().to_scenario().unwrap();
        assert_eq!(s, Scenario::reference());
    }

    #[test]
    fn optional_sections_take_defaults() {
        let text = with(
            r#""time": {"t_emit": 2}"#,
            r#""time": {"t_emit": 2}, "numeric": {}, "oracle": {"n": 40}"#,
        );
        let s = ConfigFile::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(s.numeric.step, 1e-3);
        assert_eq!(
            s.oracle,
            Some(OracleConfig {
                n: 40,
                ..OracleConfig::default()
            })
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigFile::parse(&with(r#""g": 1"#, r#""g": 1, "G": 6.7e-11"#)).is_err());
        assert!(
            ConfigFile::parse(&with(r#"{"type": "free"}"#, r#"{"type": "free", "k": 3}"#)).is_err()
        );
        assert!(ConfigFile::parse(&with(r#"{"type": "free"}"#, r#"{"type": "quartic"}"#)).is_err());
        assert!(ConfigFile::parse(&with(r#""route": "p""#, r#""route": "E""#)).is_err());
        assert!(ConfigFile::parse(&with(
            r#""time": {"t_emit": 2}"#,
            r#""time": {"t_emit": 2}, "seed": 1"#
        ))
        .is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            (
                with(r#"{"type": "free"}"#, r#"{"type": "harmonic", "k": 0}"#),
                "box.potential.k",
            ),
            (
                with(r#""device_dx": 0.5"#, r#""device_dx": 0"#),
                "measurement.device_dx",
            ),
            (with(r#""t_emit": 2"#, r#""t_emit": -2"#), "time.t_emit"),
            (with(r#""hbar": 1"#, r#""hbar": -1"#), "constants.hbar"),
            (with(r#""M": 1000"#, r#""M": 0.5"#), "box.m"),
            (
                with(
                    r#""time": {"t_emit": 2}"#,
                    r#""time": {"t_emit": 2}, "numeric": {"step": 0}"#,
                ),
                "numeric.step",
            ),
        ];
        for (text, field) in cases {
            let err = ConfigFile::parse(&text).unwrap().to_scenario().unwrap_err();
            assert!(err.to_string().contains(field), "{err} should name {field}");
        }
    }

    #[test]
    fn missing_file_is_io() {
        let err = ConfigFile::load(Path::new("/definitely/not/here.json")).unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }
}
