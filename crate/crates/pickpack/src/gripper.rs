//! Four-finger, gear-coupled gripper with belt-based compliant fingers.
//!
//! Each finger is a planar four-bar linkage driven at the crank. The chain
//! that can touch the world runs base pivot → crank end → belt far end →
//! fingertip; contacts on the distal part of that chain behave rigidly, while
//! contacts on the belt span let the finger keep wrapping. A single gear
//! couples the adduction of all four fingers, parameterised here by a spread
//! value in `[0, 1]` that blends between two opposed finger pairs (parallel)
//! and an even 90° fan (concentric).
//!
//! # Finger frame
//!
//! Per finger the linkage lives in a plane through the grasp axis: origin at
//! the base pivot, `+x` pointing radially inward (toward the grasp axis) and
//! `+y` along the approach direction (toward the items). The fixed knuckle
//! pivot sits at `(ground_length, 0)`; the fingertip is the prolongation of
//! the rocker beyond the knuckle by `tip_offset`.

use crate::arm::Pose;
use crate::geom::{FaceSet, Solid};
use crate::scene::Scene;
use nalgebra::{Point2, Point3, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use std::f64::consts::{FRAC_PI_2, PI};

/// Link lengths of one finger mechanism, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerLinkage {
    pub ground_length: f64,
    pub crank_length: f64,
    /// Taut length of the belt segment between crank end and rocker end.
    pub coupler_length: f64,
    pub rocker_length: f64,
    /// Fingertip extension beyond the knuckle, along the rocker line.
    pub tip_offset: f64,
    pub finger_width: f64,
}

impl Default for FingerLinkage {
    fn default() -> Self {
        Self {
            ground_length: 0.030,
            crank_length: 0.020,
            coupler_length: 0.045,
            rocker_length: 0.040,
            tip_offset: 0.045,
            finger_width: 0.014,
        }
    }
}

impl FingerLinkage {
    /// Parameterisation whose zero-flexion configuration is a fully extended
    /// finger: crank, belt, rocker and tip all collinear, so the fingertip
    /// sits on the finger's long axis at `ground_length + tip_offset` from
    /// the base pivot. Useful as a calibration reference.
    pub fn straight() -> Self {
        Self {
            coupler_length: 0.030,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GripperError> {
        let lengths = [
            self.ground_length,
            self.crank_length,
            self.coupler_length,
            self.rocker_length,
            self.tip_offset,
            self.finger_width,
        ];
        if lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(GripperError::InvalidGeometry(
                "all linkage lengths must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether the loop closes at the given crank angle.
    pub fn assembles_at(&self, flexion: f64) -> bool {
        finger_fk(self, flexion).is_ok()
    }

    /// Whether the loop closes everywhere on `[flexion_min, flexion_max]`
    /// (sampled at 0.5° plus both endpoints).
    pub fn assembles_over(&self, flexion_min: f64, flexion_max: f64) -> bool {
        let step = 0.5_f64.to_radians();
        let n = ((flexion_max - flexion_min) / step).ceil().max(1.0) as usize;
        (0..=n).all(|i| {
            let f = flexion_min + (flexion_max - flexion_min) * i as f64 / n as f64;
            self.assembles_at(f)
        })
    }
}

/// Joint positions of one finger at a given flexion, in the finger frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerFk {
    /// Moving end of the crank (proximal belt anchor).
    pub crank_end: Point2<f64>,
    /// Far end of the rocker (distal belt anchor).
    pub rocker_end: Point2<f64>,
    /// Fixed knuckle pivot at `(ground_length, 0)`.
    pub knuckle: Point2<f64>,
    pub fingertip: Point2<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GripperError {
    #[error("linkage cannot assemble at flexion {flexion} rad")]
    NoClosure { flexion: f64 },
    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("finger {finger} did not settle within {max_steps} closure steps")]
    StepLimit { finger: usize, max_steps: usize },
    #[error("invalid gripper geometry: {0}")]
    InvalidGeometry(String),
}

/// Forward kinematics of one finger.
///
/// Solves the circle intersection of the belt circle around the crank end
/// and the rocker circle around the knuckle, taking the branch on which the
/// belt anchor folds back toward the chassis (negative `y`). Tangent
/// configurations (discriminant exactly zero up to rounding) are accepted.
pub fn finger_fk(linkage: &FingerLinkage, flexion: f64) -> Result<FingerFk, GripperError> {
    let crank = linkage.crank_length;
    let belt = linkage.coupler_length;
    let rocker = linkage.rocker_length;
    let knuckle = Point2::new(linkage.ground_length, 0.0);
    let crank_end = Point2::new(crank * flexion.cos(), crank * flexion.sin());

    let separation = (knuckle - crank_end).norm();
    let tolerance = 1e-9 * (belt + rocker);
    if separation < (belt - rocker).abs() - tolerance
        || separation > belt + rocker + tolerance
    {
        return Err(GripperError::NoClosure { flexion });
    }

    let along = (separation * separation + belt * belt - rocker * rocker)
        / (2.0 * separation);
    let across = (belt * belt - along * along).max(0.0).sqrt();
    let u = (knuckle - crank_end) / separation;
    let n = Vector2::new(-u.y, u.x);
    let rocker_end = crank_end + u * along - n * across;

    let tip_dir = (knuckle - rocker_end) / rocker;
    let fingertip = knuckle + tip_dir * linkage.tip_offset;
    Ok(FingerFk {
        crank_end,
        rocker_end,
        knuckle,
        fingertip,
    })
}

/// The polyline a finger can touch the world with: base pivot, crank end,
/// belt far end, fingertip. Arc positions are normalized cumulative length
/// along this chain, 0 at the base and 1 at the fingertip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactChain {
    pub points: [Point2<f64>; 4],
    cumulative: [f64; 4],
}

impl ContactChain {
    pub fn new(fk: &FingerFk) -> Self {
        let points = [
            Point2::origin(),
            fk.crank_end,
            fk.rocker_end,
            fk.fingertip,
        ];
        let mut cumulative = [0.0; 4];
        for i in 1..4 {
            cumulative[i] = cumulative[i - 1] + (points[i] - points[i - 1]).norm();
        }
        Self { points, cumulative }
    }

    pub fn total_length(&self) -> f64 {
        self.cumulative[3]
    }

    /// Arc position of the point at parameter `u` on segment `seg`.
    pub fn arc_position(&self, seg: usize, u: f64) -> f64 {
        let len = self.cumulative[seg + 1] - self.cumulative[seg];
        (self.cumulative[seg] + u * len) / self.total_length()
    }
}

/// How a finger behaves at a contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactMode {
    /// Fingertip-side contact: the structure acts as a rigid four-bar.
    Rigid,
    /// Belt-side contact: the distal segment keeps wrapping.
    Compliant,
}

/// Classifies a contact by its arc position along the chain. Positions at or
/// beyond `tip_threshold` count as fingertip (rigid) contacts.
pub fn contact_mode(arc_position: f64, tip_threshold: f64) -> Result<ContactMode, GripperError> {
    if !(0.0..=1.0).contains(&arc_position) {
        return Err(GripperError::OutOfRange {
            what: "contact_arc_position",
            value: arc_position,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(if arc_position >= tip_threshold {
        ContactMode::Rigid
    } else {
        ContactMode::Compliant
    })
}

/// Full mechanical parameterisation of the gripper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperGeometry {
    pub linkages: [FingerLinkage; 4],
    /// Radius at which the four base pivots sit around the grasp axis.
    pub mount_radius: f64,
    /// In the parallel configuration, distance between the base pivots of
    /// the two fingers forming one jaw.
    pub pair_gap: f64,
    /// Radius of the capsule swept around the contact chain (half the
    /// finger thickness).
    pub contact_radius: f64,
    /// Arc position at which belt behaviour hands over to fingertip
    /// behaviour.
    pub tip_arc_threshold: f64,
    pub flexion_min: f64,
    pub flexion_max: f64,
    /// Flexion increment per closure step, radians.
    pub flexion_step: f64,
    /// Extra flexion a finger may add after a belt contact, wrapping the
    /// distal segment around the obstruction.
    pub wrap_extra: f64,
    /// Closure step budget per finger.
    pub max_steps: usize,
}

impl Default for GripperGeometry {
    fn default() -> Self {
        Self {
            linkages: [FingerLinkage::default(); 4],
            mount_radius: 0.030,
            pair_gap: 0.030,
            contact_radius: 0.007,
            tip_arc_threshold: 0.8,
            flexion_min: 0.0,
            flexion_max: PI,
            flexion_step: 1.0_f64.to_radians(),
            wrap_extra: 15.0_f64.to_radians(),
            max_steps: 400,
        }
    }
}

impl GripperGeometry {
    pub fn validate(&self) -> Result<(), GripperError> {
        for linkage in &self.linkages {
            linkage.validate()?;
            if !linkage.assembles_over(self.flexion_min, self.flexion_max) {
                return Err(GripperError::InvalidGeometry(
                    "linkage does not assemble over the flexion range".into(),
                ));
            }
        }
        if !(self.mount_radius > 0.0) || !(self.contact_radius > 0.0) {
            return Err(GripperError::InvalidGeometry(
                "mount_radius and contact_radius must be positive".into(),
            ));
        }
        if !(self.pair_gap > 0.0) || self.pair_gap >= 2.0 * self.mount_radius {
            return Err(GripperError::InvalidGeometry(
                "pair_gap must be positive and below the pivot circle diameter".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.tip_arc_threshold) {
            return Err(GripperError::InvalidGeometry(
                "tip_arc_threshold must lie in [0, 1]".into(),
            ));
        }
        if !(self.flexion_max > self.flexion_min) || !(self.flexion_step > 0.0) {
            return Err(GripperError::InvalidGeometry(
                "flexion range must be non-empty and the step positive".into(),
            ));
        }
        Ok(())
    }

    /// Azimuth stations of the four fingers for a spread value.
    ///
    /// Spread 1 is the concentric fan {0°, 90°, 180°, 270°}; spread 0 packs
    /// the fingers into two opposed jaws whose in-jaw pivot distance equals
    /// `pair_gap`. Intermediate values interpolate each finger linearly, so
    /// all four deltas share one magnitude — the gear coupling has a single
    /// degree of freedom.
    pub fn spread_azimuths(&self, spread: f64) -> Result<[f64; 4], GripperError> {
        if !(0.0..=1.0).contains(&spread) {
            return Err(GripperError::OutOfRange {
                what: "spread",
                value: spread,
                min: 0.0,
                max: 1.0,
            });
        }
        let concentric = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
        // Half-angle subtended by one jaw's pivot pair on the pivot circle.
        let half_jaw = (self.pair_gap / (2.0 * self.mount_radius)).asin();
        let delta = FRAC_PI_2 / 2.0 - half_jaw;
        let signs = [-1.0, 1.0, -1.0, 1.0];
        let mut out = [0.0; 4];
        for i in 0..4 {
            let parallel = concentric[i] + signs[i] * delta;
            out[i] = (1.0 - spread) * parallel + spread * concentric[i];
        }
        Ok(out)
    }
}

/// One finger's actuation state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerState {
    /// Crank angle, radians.
    pub flexion: f64,
    /// Adduction station about the grasp axis, radians.
    pub azimuth: f64,
    pub mode: ContactMode,
}

/// Whole-hand state: one shared spread plus four fingers, posed in the world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperState {
    pub spread: f64,
    pub fingers: [FingerState; 4],
    pub base_pose: Pose,
}

impl GripperState {
    /// Fully open hand at the given spread.
    pub fn open(
        geometry: &GripperGeometry,
        spread: f64,
        base_pose: Pose,
    ) -> Result<Self, GripperError> {
        let azimuths = geometry.spread_azimuths(spread)?;
        let fingers = azimuths.map(|azimuth| FingerState {
            flexion: geometry.flexion_min,
            azimuth,
            mode: ContactMode::Rigid,
        });
        Ok(Self {
            spread,
            fingers,
            base_pose,
        })
    }
}

/// Maps a finger-frame point to the gripper frame (palm plane z = 0, +z along
/// the approach direction) for a finger stationed at `azimuth`.
pub fn finger_point_to_gripper(
    mount_radius: f64,
    azimuth: f64,
    planar: Point2<f64>,
) -> Point3<f64> {
    let radial = mount_radius - planar.x;
    Point3::new(radial * azimuth.cos(), radial * azimuth.sin(), planar.y)
}

/// Fingertip positions in the gripper frame.
pub fn fingertips_in_gripper(
    state: &GripperState,
    geometry: &GripperGeometry,
) -> Result<[Point3<f64>; 4], GripperError> {
    let mut out = [Point3::origin(); 4];
    for (i, finger) in state.fingers.iter().enumerate() {
        let fk = finger_fk(&geometry.linkages[i], finger.flexion)?;
        out[i] = finger_point_to_gripper(geometry.mount_radius, finger.azimuth, fk.fingertip);
    }
    Ok(out)
}

/// The convex fingertip region in the gripper's palm plane: one inward face
/// per finger, passing through that fingertip perpendicular to its azimuth.
/// Face offsets are the signed fingertip radial distances, so the region
/// degenerates as soon as a fingertip reaches or crosses the grasp axis.
pub fn face_set(state: &GripperState, geometry: &GripperGeometry) -> Result<FaceSet, GripperError> {
    let mut directions = Vec::with_capacity(4);
    let mut offsets = Vec::with_capacity(4);
    for (i, finger) in state.fingers.iter().enumerate() {
        let fk = finger_fk(&geometry.linkages[i], finger.flexion)?;
        directions.push(Vector2::new(finger.azimuth.cos(), finger.azimuth.sin()));
        offsets.push(geometry.mount_radius - fk.fingertip.x);
    }
    Ok(FaceSet::new(directions, offsets))
}

/// Diameter of the largest circle centred on the grasp axis inside the
/// fingertip polygon; zero once any fingertip touches or crosses the axis.
pub fn aperture(state: &GripperState, geometry: &GripperGeometry) -> Result<f64, GripperError> {
    let faces = face_set(state, geometry)?;
    Ok(2.0 * faces.inscribed_radius_at_origin())
}

/// Identity of the thing a finger touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactTarget {
    Item(u32),
    CrateFloor,
}

/// One registered finger contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub finger: usize,
    pub target: ContactTarget,
    /// Normalized position along the contact chain, 0 base → 1 fingertip.
    pub arc_position: f64,
    pub mode: ContactMode,
    /// Closest chain-axis point at detection, world frame.
    pub point: Point3<f64>,
    /// Flexion at which the contact was registered.
    pub flexion: f64,
}

struct Candidate {
    target: ContactTarget,
    arc: f64,
    point: Point3<f64>,
    penetration: f64,
}

/// Finds the deepest contact of one finger's chain against the filtered
/// obstacle list, at the given flexion. Fingertip-zone contacts with the
/// crate floor are ignored: the tip merely slides on the floor there, and
/// the descent logic already accounts for it.
fn deepest_contact(
    finger: usize,
    flexion: f64,
    state: &GripperState,
    geometry: &GripperGeometry,
    obstacles: &[(ContactTarget, Solid)],
) -> Result<Option<Candidate>, GripperError> {
    let fk = finger_fk(&geometry.linkages[finger], flexion)?;
    let chain = ContactChain::new(&fk);
    let azimuth = state.fingers[finger].azimuth;
    let world: Vec<Point3<f64>> = chain
        .points
        .iter()
        .map(|p| {
            state
                .base_pose
                .transform_point(finger_point_to_gripper(geometry.mount_radius, azimuth, *p))
        })
        .collect();

    let mut best: Option<Candidate> = None;
    for seg in 0..3 {
        let (a, b) = (world[seg], world[seg + 1]);
        for (target, solid) in obstacles {
            let distance = solid.segment_distance(a, b, 0.002) - geometry.contact_radius;
            if distance > 0.0 {
                continue;
            }
            let u = closest_param_to_solid(a, b, solid);
            let arc = chain.arc_position(seg, u);
            if *target == ContactTarget::CrateFloor && arc >= geometry.tip_arc_threshold {
                continue;
            }
            let penetration = -distance;
            if best.as_ref().map_or(true, |c| penetration > c.penetration) {
                best = Some(Candidate {
                    target: *target,
                    arc,
                    point: a + (b - a) * u,
                    penetration,
                });
            }
        }
    }
    Ok(best)
}

/// Parameter of the chain-segment point closest to the solid's surface.
fn closest_param_to_solid(a: Point3<f64>, b: Point3<f64>, solid: &Solid) -> f64 {
    match solid {
        Solid::Sphere { center, .. } => crate::geom::segment_closest_param(a, b, *center),
        Solid::Floor { .. } => {
            if a.z <= b.z {
                0.0
            } else {
                1.0
            }
        }
        Solid::Ellipsoid { .. } => {
            let mut best = (f64::INFINITY, 0.0);
            let n = ((b - a).norm() / 0.002).ceil().max(1.0) as usize;
            for i in 0..=n {
                let u = i as f64 / n as f64;
                let d = solid.signed_distance(a + (b - a) * u);
                if d < best.0 {
                    best = (d, u);
                }
            }
            best.1
        }
    }
}

/// Closes the fingers onto the scene.
///
/// Fingers are processed in index order; items are static, so the fingers do
/// not interact and each runs its own loop: check for contact at the current
/// flexion, then either settle (rigid-zone contact, or flexion exhausted),
/// keep wrapping (belt contact, up to `wrap_extra` more flexion), or advance
/// one step. Every distinct `(finger, target, mode)` contact is recorded at
/// the flexion where it first appeared.
pub fn close_fingers(
    state: &GripperState,
    geometry: &GripperGeometry,
    scene: &Scene,
) -> Result<(GripperState, Vec<Contact>), GripperError> {
    let obstacles: Vec<(ContactTarget, Solid)> = scene
        .items
        .iter()
        .map(|item| (ContactTarget::Item(item.id), item.solid()))
        .chain(std::iter::once((
            ContactTarget::CrateFloor,
            Solid::Floor {
                height: scene.floor_height(),
            },
        )))
        .collect();

    let mut next = *state;
    let mut contacts = Vec::new();
    for finger in 0..4 {
        let mut steps = 0usize;
        let mut wrap_until: Option<f64> = None;
        loop {
            steps += 1;
            if steps > geometry.max_steps {
                return Err(GripperError::StepLimit {
                    finger,
                    max_steps: geometry.max_steps,
                });
            }
            let flexion = next.fingers[finger].flexion;
            let candidate = deepest_contact(finger, flexion, &next, geometry, &obstacles)?;
            let mut settle = false;
            let mut advance = false;
            if let Some(c) = candidate {
                let mode = contact_mode(c.arc, geometry.tip_arc_threshold)?;
                let already = contacts.iter().any(|k: &Contact| {
                    k.finger == finger && k.target == c.target && k.mode == mode
                });
                if !already {
                    contacts.push(Contact {
                        finger,
                        target: c.target,
                        arc_position: c.arc,
                        mode,
                        point: c.point,
                        flexion,
                    });
                }
                match mode {
                    ContactMode::Rigid => settle = true,
                    ContactMode::Compliant => {
                        next.fingers[finger].mode = ContactMode::Compliant;
                        let until = *wrap_until.get_or_insert(flexion + geometry.wrap_extra);
                        if flexion + 1e-12 >= until.min(geometry.flexion_max) {
                            settle = true;
                        } else {
                            advance = true;
                        }
                    }
                }
            } else if flexion + 1e-12 >= geometry.flexion_max {
                settle = true;
            } else {
                advance = true;
            }
            if settle {
                break;
            }
            if advance {
                next.fingers[finger].flexion =
                    (flexion + geometry.flexion_step).min(geometry.flexion_max);
            }
        }
    }
    Ok((next, contacts))
}

/// Gripper-frame summary a grasp hands to the capture and retention
/// predicates: the fingertip polygon, how deep the finger material reaches
/// along the approach axis, and the pose that frames both.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspGeometry {
    pub faces: FaceSet,
    /// Deepest finger-material coordinate along gripper +z (fingertip depth
    /// plus the contact capsule radius).
    pub tip_reach: f64,
    pub base_pose: Pose,
}

pub fn grasp_geometry(
    state: &GripperState,
    geometry: &GripperGeometry,
) -> Result<GraspGeometry, GripperError> {
    let faces = face_set(state, geometry)?;
    let tips = fingertips_in_gripper(state, geometry)?;
    let tip_reach = tips
        .iter()
        .map(|t| t.z + geometry.contact_radius)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GraspGeometry {
        faces,
        tip_reach,
        base_pose: state.base_pose,
    })
}
