//! Task-space impedance-controlled arm with a quasi-static plant.
//!
//! The arm tracks Cartesian waypoint trajectories produced by linear position
//! interpolation and shortest-arc orientation interpolation. The plant is
//! deliberately simple: the actual pose follows the desired pose exactly
//! unless a support surface blocks the descent, in which case the desired
//! pose keeps advancing and the wrist wrench grows along the stiffness path.
//! That is the only contact phenomenon the benchmark needs, and it keeps
//! every step bit-reproducible.

use nalgebra::{Point3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rigid-body pose: position plus unit orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Point3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Point3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    /// Pose at `position` with identity orientation.
    pub fn at(position: Point3<f64>) -> Self {
        Self::new(position, UnitQuaternion::identity())
    }

    /// Maps a point from this pose's local frame to the world.
    pub fn transform_point(&self, local: Point3<f64>) -> Point3<f64> {
        self.position + self.orientation * local.coords
    }

    /// Maps a world point into this pose's local frame.
    pub fn inverse_transform_point(&self, world: Point3<f64>) -> Point3<f64> {
        Point3::from(
            self.orientation
                .inverse_transform_vector(&(world - self.position)),
        )
    }

    /// Maps a direction from the local frame to the world.
    pub fn transform_vector(&self, local: Vector3<f64>) -> Vector3<f64> {
        self.orientation * local
    }
}

/// Force/torque reading at the wrist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn zero() -> Self {
        Self {
            force: Vector3::zeros(),
            torque: Vector3::zeros(),
        }
    }

    pub fn force_norm(&self) -> f64 {
        self.force.norm()
    }

    pub fn torque_norm(&self) -> f64 {
        self.torque.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|c| c.is_finite())
    }
}

/// Impedance controller gains. The plant is quasi-static, so `damping_ratio`
/// and `virtual_mass` are carried only for configs that want to try a dynamic
/// plant; the default stepping never reads them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpedanceParams {
    /// Translational stiffness, N/m (scalar times identity).
    pub stiffness_translational: f64,
    /// Rotational stiffness, N·m/rad (scalar times identity).
    pub stiffness_rotational: f64,
    pub damping_ratio: f64,
    pub virtual_mass: f64,
}

impl Default for ImpedanceParams {
    fn default() -> Self {
        Self {
            stiffness_translational: 2000.0,
            stiffness_rotational: 200.0,
            damping_ratio: 1.0,
            virtual_mass: 2.0,
        }
    }
}

impl ImpedanceParams {
    pub fn validate(&self) -> Result<(), ArmError> {
        if !(self.stiffness_translational > 0.0) || !(self.stiffness_rotational > 0.0) {
            return Err(ArmError::InvalidParams(
                "stiffness values must be positive".into(),
            ));
        }
        if !(self.damping_ratio >= 0.0) {
            return Err(ArmError::InvalidParams(
                "damping_ratio must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Arm controller state advanced tick by tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    pub actual_pose: Pose,
    pub desired_pose: Pose,
    /// Simulated time, seconds.
    pub time: f64,
    pub external_wrench: Wrench,
}

impl ArmState {
    /// State at rest on a pose: actual and desired coincide, zero wrench.
    pub fn settled(pose: Pose) -> Self {
        Self {
            actual_pose: pose,
            desired_pose: pose,
            time: 0.0,
            external_wrench: Wrench::zero(),
        }
    }
}

/// Horizontal surface the tool cannot descend through (world frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentStop {
    /// Lowest admissible `z` for the tool position, metres.
    pub height: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ArmError {
    #[error("interpolation time {t} outside [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },
    #[error("invalid impedance parameters: {0}")]
    InvalidParams(String),
}

/// Returns the equivalent quaternion with non-negative scalar part, so that
/// its axis-angle form is the short way around.
fn shortest_arc(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    if q.scalar() < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

/// Pose along the straight-line / geodesic path from `start` to `end`.
///
/// Endpoints are returned bit-exactly; interior samples interpolate the
/// position linearly and the orientation along the shortest great-circle arc.
pub fn interpolate_pose(
    start: &Pose,
    end: &Pose,
    duration: f64,
    t: f64,
) -> Result<Pose, ArmError> {
    if !(duration > 0.0) || !(0.0..=duration).contains(&t) {
        return Err(ArmError::OutOfRange { t, duration });
    }
    if t == 0.0 {
        return Ok(*start);
    }
    if t == duration {
        return Ok(*end);
    }
    let s = t / duration;
    let position = start.position + (end.position - start.position) * s;
    let relative = shortest_arc(start.orientation.inverse() * end.orientation);
    let orientation = start.orientation * relative.powf(s);
    Ok(Pose::new(position, orientation))
}

/// Wrench the impedance controller exerts for a desired-vs-actual error.
///
/// Force is stiffness times the position error; torque is stiffness times the
/// rotation vector (axis times angle) of the relative orientation.
pub fn impedance_wrench(params: &ImpedanceParams, desired: &Pose, actual: &Pose) -> Wrench {
    let force = params.stiffness_translational * (desired.position - actual.position);
    let relative = shortest_arc(desired.orientation * actual.orientation.inverse());
    let torque = params.stiffness_rotational * relative.scaled_axis();
    Wrench { force, torque }
}

/// Advances the plant one tick.
///
/// The caller moves `state.desired_pose` along the trajectory before calling.
/// Unobstructed, the actual pose snaps to the desired pose and the wrench is
/// zero. With a [`DescentStop`], the actual `z` is clamped at the surface
/// while the desired pose keeps advancing, and the measured wrench is the
/// impedance wrench of the resulting error.
pub fn step(
    state: &ArmState,
    params: &ImpedanceParams,
    stop: Option<DescentStop>,
    dt: f64,
) -> ArmState {
    debug_assert!(dt > 0.0);
    let desired = state.desired_pose;
    let mut actual = desired;
    if let Some(stop) = stop {
        if actual.position.z < stop.height {
            actual.position.z = stop.height;
        }
    }
    let external_wrench = if actual == desired {
        Wrench::zero()
    } else {
        impedance_wrench(params, &desired, &actual)
    };
    ArmState {
        actual_pose: actual,
        desired_pose: desired,
        time: state.time + dt,
        external_wrench,
    }
}
