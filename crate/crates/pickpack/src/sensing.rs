//! Wrist force/torque sensing and threshold-based contact detection.
//!
//! Contact is declared when the force or torque magnitude crosses an absolute
//! threshold, or when its one-tick backward difference (expressed per second)
//! crosses a rate threshold. The rate path exists to catch sudden impacts
//! well before the absolute level is reached: a blocked 0.05 m/s descent
//! through a 2000 N/m stiffness ramps at 100 N/s, so the rate trigger fires
//! on the first post-contact sample while the 5 N absolute level needs 50 ms.

use crate::arm::Wrench;
use crate::rng::derive_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Contact-detection thresholds on the wrench magnitude and its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionThresholds {
    /// Absolute force level, N.
    pub force_abs: f64,
    /// Absolute torque level, N·m.
    pub torque_abs: f64,
    /// Force magnitude rate, N/s.
    pub force_rate: f64,
    /// Torque magnitude rate, N·m/s.
    pub torque_rate: f64,
}

impl Default for DetectionThresholds {
    fn default() -> Self {
        Self {
            force_abs: 5.0,
            torque_abs: 1.0,
            force_rate: 3.0,
            torque_rate: 0.3,
        }
    }
}

impl DetectionThresholds {
    pub fn validate(&self) -> Result<(), SensingError> {
        let all = [self.force_abs, self.torque_abs, self.force_rate, self.torque_rate];
        if all.iter().any(|t| !(*t > 0.0)) {
            return Err(SensingError::InvalidThresholds);
        }
        Ok(())
    }
}

/// Additive sensor imperfections: a fixed bias plus seeded Gaussian noise.
///
/// Noise is drawn per `(seed, tick)`, so a reading is reproducible without
/// replaying the whole history and is independent of evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorModel {
    /// Per-axis force noise standard deviation, N.
    pub noise_std_force: f64,
    /// Per-axis torque noise standard deviation, N·m.
    pub noise_std_torque: f64,
    pub bias: Wrench,
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            noise_std_force: 0.05,
            noise_std_torque: 0.005,
            bias: Wrench::zero(),
            seed: 0,
        }
    }
}

impl SensorModel {
    /// Noise-free, bias-free sensor.
    pub fn ideal() -> Self {
        Self {
            noise_std_force: 0.0,
            noise_std_torque: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SensingError> {
        if self.noise_std_force < 0.0 || self.noise_std_torque < 0.0 {
            return Err(SensingError::InvalidNoise);
        }
        Ok(())
    }
}

/// What a sensor reports for a true wrench at a given tick.
pub fn sensed_wrench(true_wrench: &Wrench, model: &SensorModel, tick: u64) -> Wrench {
    let mut out = Wrench {
        force: true_wrench.force + model.bias.force,
        torque: true_wrench.torque + model.bias.torque,
    };
    if model.noise_std_force == 0.0 && model.noise_std_torque == 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(model.seed, tick));
    // Fixed draw order keeps samples stable across refactors: fx fy fz tx ty tz.
    let nf = Normal::new(0.0, model.noise_std_force).expect("validated std");
    let nt = Normal::new(0.0, model.noise_std_torque).expect("validated std");
    for axis in 0..3 {
        out.force[axis] += nf.sample(&mut rng);
    }
    for axis in 0..3 {
        out.torque[axis] += nt.sample(&mut rng);
    }
    out
}

/// Which condition fired. The declaration order is the tie-break order when
/// several conditions cross at the same sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContactTrigger {
    ForceAbs,
    TorqueAbs,
    ForceRate,
    TorqueRate,
}

/// A detected contact: which condition fired, when, and at which sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub trigger: ContactTrigger,
    pub time: f64,
    pub sample: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum SensingError {
    #[error("empty wrench history")]
    EmptyHistory,
    #[error("detection thresholds must be positive")]
    InvalidThresholds,
    #[error("noise standard deviations must be non-negative")]
    InvalidNoise,
}

/// Scans a uniformly sampled wrench history for the earliest threshold
/// crossing. Rates are one-tick backward differences of the magnitudes
/// divided by `dt`; the first sample therefore can only trigger on the
/// absolute conditions.
pub fn detect_contact(
    history: &[(f64, Wrench)],
    thresholds: &DetectionThresholds,
    dt: f64,
) -> Result<Option<ContactEvent>, SensingError> {
    if history.is_empty() {
        return Err(SensingError::EmptyHistory);
    }
    let mut prev: Option<(f64, f64)> = None;
    for (sample, (time, wrench)) in history.iter().enumerate() {
        let f = wrench.force_norm();
        let t = wrench.torque_norm();
        let mut trigger = None;
        if f >= thresholds.force_abs {
            trigger = Some(ContactTrigger::ForceAbs);
        } else if t >= thresholds.torque_abs {
            trigger = Some(ContactTrigger::TorqueAbs);
        } else if let Some((fp, tp)) = prev {
            if (f - fp) / dt >= thresholds.force_rate {
                trigger = Some(ContactTrigger::ForceRate);
            } else if (t - tp) / dt >= thresholds.torque_rate {
                trigger = Some(ContactTrigger::TorqueRate);
            }
        }
        if let Some(trigger) = trigger {
            return Ok(Some(ContactEvent {
                trigger,
                time: *time,
                sample,
            }));
        }
        prev = Some((f, t));
    }
    Ok(None)
}

/// Writes a wrench trace as CSV with columns `time_s,fx,fy,fz,tx,ty,tz`.
pub fn write_trace_csv<W: std::io::Write>(
    mut out: W,
    trace: &[(f64, Wrench)],
) -> std::io::Result<()> {
    writeln!(out, "time_s,fx,fy,fz,tx,ty,tz")?;
    for (t, w) in trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t, w.force.x, w.force.y, w.force.z, w.torque.x, w.torque.y, w.torque.z
        )?;
    }
    Ok(())
}
