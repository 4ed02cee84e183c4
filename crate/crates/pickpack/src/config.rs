//! Benchmark configuration: one TOML-loadable struct that carries every
//! tunable the trial executor needs. All sections have defaults matching the
//! reference benchmark, so an empty file is a valid configuration.

use crate::arm::ImpedanceParams;
use crate::gripper::GripperGeometry;
use crate::scene::SceneParams;
use crate::sensing::{DetectionThresholds, SensorModel};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Phase timing model: fixed motion budgets plus measured per-phase
/// overheads, and the control/descent rates that the simulated portions of
/// the cycle run at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingParams {
    /// Control tick, seconds.
    pub control_dt: f64,
    /// Vertical speed of the grasp descent, m/s.
    pub descent_speed: f64,
    /// Tool height above the crate floor when the descent starts, m.
    pub approach_height: f64,
    /// Homing motion budget of the initialisation phase, s.
    pub init_motion_s: f64,
    /// Non-motion overhead of the initialisation phase, s.
    pub init_overhead_s: f64,
    /// Transfer motion to the pre-grasp pose, s.
    pub approach_motion_s: f64,
    /// Non-motion overhead of the approach phase, s.
    pub approach_overhead_s: f64,
    /// Lift, carry and lower motion budget of the transport phase, s.
    pub transport_motion_s: f64,
    /// Non-motion overhead of the transport phase, s.
    pub transport_overhead_s: f64,
    /// Finger opening speed during placement, rad/s of crank travel.
    pub placement_open_speed: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            control_dt: 0.010,
            descent_speed: 0.05,
            approach_height: 0.343,
            init_motion_s: 5.0,
            init_overhead_s: 0.12,
            approach_motion_s: 10.0,
            approach_overhead_s: 0.37,
            transport_motion_s: 20.0,
            transport_overhead_s: 0.12,
            placement_open_speed: 15.0,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            self.control_dt,
            self.descent_speed,
            self.approach_height,
            self.init_motion_s,
            self.approach_motion_s,
            self.transport_motion_s,
            self.placement_open_speed,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(ConfigError::Invalid(
                "timing rates and motion budgets must be positive".into(),
            ));
        }
        let overheads = [
            self.init_overhead_s,
            self.approach_overhead_s,
            self.transport_overhead_s,
        ];
        if overheads.iter().any(|v| !(*v >= 0.0)) {
            return Err(ConfigError::Invalid(
                "phase overheads must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Which part of the scenario matrix to run and with what base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixParams {
    /// Master seed; every trial derives its own stream from it.
    pub master_seed: u64,
    /// Repetitions per scenario.
    pub repetitions: u32,
}

impl Default for MatrixParams {
    fn default() -> Self {
        Self {
            master_seed: 2024,
            repetitions: 5,
        }
    }
}

impl MatrixParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repetitions == 0 {
            return Err(ConfigError::Invalid(
                "repetitions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Complete benchmark configuration.
///
/// The default sensor model is noise-free so trials are exactly
/// reproducible; switch the noise on explicitly to study detection margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scene: SceneParams,
    pub gripper: GripperGeometry,
    pub impedance: ImpedanceParams,
    pub thresholds: DetectionThresholds,
    pub sensor: SensorModel,
    pub timing: TimingParams,
    pub matrix: MatrixParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: SceneParams::default(),
            gripper: GripperGeometry::default(),
            impedance: ImpedanceParams::default(),
            thresholds: DetectionThresholds::default(),
            // Noise-free by default: forces come out of a deterministic
            // model, so the reproducibility guarantee extends to traces.
            sensor: SensorModel::ideal(),
            timing: TimingParams::default(),
            matrix: MatrixParams::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read configuration: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Parses and validates a TOML configuration.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Loads and validates a TOML configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scene
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.gripper
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.impedance
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.thresholds
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.sensor
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.timing.validate()?;
        self.matrix.validate()?;
        Ok(())
    }
}
