//! Crate, punnet and item model, plus the quasi-static grasp predicates.
//!
//! Items are convex solids resting on the crate floor. Three predicates
//! reproduce the benchmark's contact phenomenology without a dynamics
//! engine: `insertion_check` (can the fingers descend into the clutter?),
//! `capture_set` (which items ended up held after closing?) and
//! `retention_check` (which captured items survive transport?). All three
//! are pure geometry with seeded jitter, so trials replay bit-for-bit.

use crate::arm::Pose;
use crate::geom::Solid;
use crate::gripper::{Contact, ContactTarget, GraspGeometry};
use crate::rng::derive_seed;
use nalgebra::{Point3, UnitQuaternion, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Item geometry. Radii and semi-axes must stay within the supported
/// produce range of 2.5–25 mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ItemShape {
    Sphere { radius: f64 },
    Ellipsoid { semi_axes: Vector3<f64> },
}

pub const MIN_ITEM_RADIUS: f64 = 0.0025;
pub const MAX_ITEM_RADIUS: f64 = 0.025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compliance {
    Soft,
    Rigid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: u32,
    pub shape: ItemShape,
    pub compliance: Compliance,
    pub pose: Pose,
}

impl Item {
    pub fn is_soft(&self) -> bool {
        self.compliance == Compliance::Soft
    }

    pub fn solid(&self) -> Solid {
        match self.shape {
            ItemShape::Sphere { radius } => Solid::Sphere {
                center: self.pose.position,
                radius,
            },
            ItemShape::Ellipsoid { semi_axes } => Solid::Ellipsoid {
                center: self.pose.position,
                orientation: self.pose.orientation,
                semi_axes,
            },
        }
    }

    /// Largest surface distance from the centre, any direction.
    pub fn max_extent(&self) -> f64 {
        match self.shape {
            ItemShape::Sphere { radius } => radius,
            ItemShape::Ellipsoid { semi_axes } => semi_axes.max(),
        }
    }

    /// Surface extent from the centre along a world direction.
    pub fn support_extent(&self, direction: Vector3<f64>) -> f64 {
        match self.shape {
            ItemShape::Sphere { radius } => radius,
            ItemShape::Ellipsoid { semi_axes } => {
                let local = self.pose.orientation.inverse_transform_vector(&direction);
                semi_axes.component_mul(&local).norm()
            }
        }
    }

    fn radii_in_range(&self) -> bool {
        let (lo, hi) = match self.shape {
            ItemShape::Sphere { radius } => (radius, radius),
            ItemShape::Ellipsoid { semi_axes } => (semi_axes.min(), semi_axes.max()),
        };
        lo >= MIN_ITEM_RADIUS && hi <= MAX_ITEM_RADIUS
    }
}

/// Picking crate: an open box with inner floor `length × width` centred on
/// the origin, floor at z = 0, walls up to `wall_height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrateSpec {
    pub length: f64,
    pub width: f64,
    pub wall_height: f64,
}

impl Default for CrateSpec {
    fn default() -> Self {
        Self {
            length: 0.400,
            width: 0.300,
            wall_height: 0.120,
        }
    }
}

/// Placement punnet: an open box on the bench beside the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PunnetSpec {
    pub length: f64,
    pub width: f64,
    pub wall_height: f64,
    /// Centre of the punnet floor, world frame.
    pub center: Point3<f64>,
}

impl Default for PunnetSpec {
    fn default() -> Self {
        Self {
            length: 0.150,
            width: 0.150,
            wall_height: 0.060,
            center: Point3::new(0.5, 0.0, 0.0),
        }
    }
}

/// Everything the predicates need to know about the workspace, independent
/// of any particular trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneParams {
    pub storage_crate: CrateSpec,
    pub punnet: PunnetSpec,
    /// Rigid produce dummies: lying ellipsoids with these semi-axes.
    pub lime_semi_axes: Vector3<f64>,
    /// Soft sphere radius used when the crate is fully populated.
    pub pickle_radius_full: f64,
    /// Soft sphere radius of the single pre-placed pick item.
    pub pickle_radius_single: f64,
    /// Volumetric fill fraction targeted by full population.
    pub fill_fraction: f64,
    /// How many extra scattered items sparse population adds.
    pub sparse_extra: (u32, u32),
    /// Horizontal jitter of the pre-placed pick item.
    pub pick_jitter: f64,
    /// Soft items may interpenetrate by this fraction of the smaller radius.
    pub soft_overlap_fraction: f64,
    /// Allowed rigid-rigid penetration (manufacturing slack), metres.
    pub rigid_penetration_tolerance: f64,
    /// Intrusion a descending finger tolerates before counting as blocked.
    pub insertion_clearance: f64,
    /// Radius of the lateral dodge search during insertion.
    pub lateral_search_radius: f64,
    /// How far below the fingertip underside an item's lowest point may sit
    /// and still count as captured.
    pub lift_margin: f64,
    /// Captured items whose security margin falls below this are dropped.
    pub drop_threshold: f64,
    /// Seeded per-item perturbation of the security margin.
    pub retention_jitter: f64,
    /// Placement retries per item before population gives up.
    pub max_attempts: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            storage_crate: CrateSpec::default(),
            punnet: PunnetSpec::default(),
            lime_semi_axes: Vector3::new(0.025, 0.015, 0.015),
            pickle_radius_full: 0.010,
            pickle_radius_single: 0.020,
            fill_fraction: 0.055,
            sparse_extra: (2, 5),
            pick_jitter: 0.004,
            soft_overlap_fraction: 0.2,
            rigid_penetration_tolerance: 0.001,
            insertion_clearance: 0.002,
            lateral_search_radius: 0.012,
            lift_margin: 0.005,
            drop_threshold: 0.003,
            retention_jitter: 0.0005,
            max_attempts: 64,
        }
    }
}

impl SceneParams {
    pub fn validate(&self) -> Result<(), SceneError> {
        let positive = [
            self.storage_crate.length,
            self.storage_crate.width,
            self.storage_crate.wall_height,
            self.punnet.length,
            self.punnet.width,
            self.pickle_radius_full,
            self.pickle_radius_single,
            self.fill_fraction,
            self.insertion_clearance,
            self.lift_margin,
            self.drop_threshold,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(SceneError::InvalidParams(
                "crate, punnet and predicate parameters must be positive".into(),
            ));
        }
        if self.lime_semi_axes.min() < MIN_ITEM_RADIUS
            || self.lime_semi_axes.max() > MAX_ITEM_RADIUS
            || !(MIN_ITEM_RADIUS..=MAX_ITEM_RADIUS).contains(&self.pickle_radius_full)
            || !(MIN_ITEM_RADIUS..=MAX_ITEM_RADIUS).contains(&self.pickle_radius_single)
        {
            return Err(SceneError::InvalidParams(format!(
                "item dimensions must lie within [{MIN_ITEM_RADIUS}, {MAX_ITEM_RADIUS}] m"
            )));
        }
        if self.sparse_extra.0 > self.sparse_extra.1 {
            return Err(SceneError::InvalidParams(
                "sparse_extra range is inverted".into(),
            ));
        }
        if !(0.0..=0.5).contains(&self.soft_overlap_fraction) {
            return Err(SceneError::InvalidParams(
                "soft_overlap_fraction must lie in [0, 0.5]".into(),
            ));
        }
        Ok(())
    }
}

/// The produce being handled in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectType {
    Lime,
    Pickle,
}

/// How full the picking crate starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    /// One item at the picking pose plus a few scattered far away.
    SparseSingle,
    /// The crate packed to the configured fill fraction.
    Full,
}

/// Seeded recipe for one trial's starting scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub object_type: ObjectType,
    pub density: Density,
    pub seed: u64,
}

/// A fully laid-out workspace. Immutable within a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub storage_crate: CrateSpec,
    pub punnet: PunnetSpec,
    pub items: Vec<Item>,
    pub pick_pose: Pose,
}

impl Scene {
    pub fn floor_height(&self) -> f64 {
        0.0
    }

    /// Checks the scene invariants: unique ids, supported item sizes, items
    /// inside the crate, and pairwise penetrations within tolerance.
    pub fn validate(&self, params: &SceneParams) -> Result<(), SceneError> {
        let mut seen = std::collections::BTreeSet::new();
        for item in &self.items {
            if !seen.insert(item.id) {
                return Err(SceneError::InvalidScene(format!(
                    "duplicate item id {}",
                    item.id
                )));
            }
            if !item.radii_in_range() {
                return Err(SceneError::InvalidScene(format!(
                    "item {} outside the supported size range",
                    item.id
                )));
            }
            let p = item.pose.position;
            let ext = item.max_extent();
            let vertical = item.support_extent(Vector3::z());
            if p.x.abs() + ext > self.storage_crate.length / 2.0 + 1e-9
                || p.y.abs() + ext > self.storage_crate.width / 2.0 + 1e-9
                || p.z - vertical < -1e-9
            {
                return Err(SceneError::InvalidScene(format!(
                    "item {} extends outside the crate",
                    item.id
                )));
            }
        }
        for (i, a) in self.items.iter().enumerate() {
            for b in self.items.iter().skip(i + 1) {
                let gap = separation_deficit(a, b);
                let allowed = if a.is_soft() && b.is_soft() {
                    params.soft_overlap_fraction * a.max_extent().min(b.max_extent())
                } else {
                    params.rigid_penetration_tolerance
                };
                if gap > allowed + 1e-9 {
                    return Err(SceneError::InvalidScene(format!(
                        "items {} and {} interpenetrate by {:.4} m",
                        a.id, b.id, gap
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Upper bound on how deeply two items interpenetrate: the sum of their
/// support extents along the centre line minus the centre distance.
/// Non-positive values guarantee separation.
fn separation_deficit(a: &Item, b: &Item) -> f64 {
    let line = b.pose.position - a.pose.position;
    let dist = line.norm();
    if dist <= f64::EPSILON {
        return a.max_extent() + b.max_extent();
    }
    let dir = line / dist;
    a.support_extent(dir) + b.support_extent(dir) - dist
}

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("could not pack the requested density: {0}")]
    PackingFailure(String),
    #[error("invalid scene parameters: {0}")]
    InvalidParams(String),
    #[error("scene invariant violated: {0}")]
    InvalidScene(String),
}

/// Lays out a scene for the given recipe. Deterministic in the seed.
pub fn populate(spec: &PopulationSpec, params: &SceneParams) -> Result<Scene, SceneError> {
    params.validate()?;
    let pick_pose = Pose::at(Point3::new(0.0, 0.0, 0.0));
    let items = match spec.density {
        Density::SparseSingle => populate_sparse(spec, params)?,
        Density::Full => populate_full(spec, params)?,
    };
    let scene = Scene {
        storage_crate: params.storage_crate,
        punnet: params.punnet,
        items,
        pick_pose,
    };
    scene.validate(params)?;
    Ok(scene)
}

fn item_at(
    id: u32,
    object_type: ObjectType,
    x: f64,
    y: f64,
    yaw: f64,
    params: &SceneParams,
    single_size: bool,
) -> Item {
    match object_type {
        ObjectType::Pickle => {
            let radius = if single_size {
                params.pickle_radius_single
            } else {
                params.pickle_radius_full
            };
            Item {
                id,
                shape: ItemShape::Sphere { radius },
                compliance: Compliance::Soft,
                pose: Pose::at(Point3::new(x, y, radius)),
            }
        }
        ObjectType::Lime => Item {
            id,
            shape: ItemShape::Ellipsoid {
                semi_axes: params.lime_semi_axes,
            },
            compliance: Compliance::Rigid,
            pose: Pose::new(
                Point3::new(x, y, params.lime_semi_axes.z),
                UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw),
            ),
        },
    }
}

fn item_volume(object_type: ObjectType, params: &SceneParams) -> f64 {
    let c = 4.0 / 3.0 * std::f64::consts::PI;
    match object_type {
        ObjectType::Pickle => c * params.pickle_radius_full.powi(3),
        ObjectType::Lime => {
            let a = params.lime_semi_axes;
            c * a.x * a.y * a.z
        }
    }
}

fn max_extent_of(object_type: ObjectType, params: &SceneParams, single_size: bool) -> f64 {
    match object_type {
        ObjectType::Pickle if single_size => params.pickle_radius_single,
        ObjectType::Pickle => params.pickle_radius_full,
        ObjectType::Lime => params.lime_semi_axes.max(),
    }
}

/// Accepts a candidate placement if it does not violate the pairwise
/// penetration limits against the already placed items.
fn placement_ok(candidate: &Item, placed: &[Item], params: &SceneParams) -> bool {
    placed.iter().all(|other| {
        let allowed = if candidate.is_soft() && other.is_soft() {
            params.soft_overlap_fraction * candidate.max_extent().min(other.max_extent())
        } else {
            params.rigid_penetration_tolerance
        };
        separation_deficit(candidate, other) <= allowed
    })
}

fn populate_sparse(
    spec: &PopulationSpec,
    params: &SceneParams,
) -> Result<Vec<Item>, SceneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0x51));
    let mut items = Vec::new();

    // The pick item sits within pick_jitter of the picking pose.
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let radius = params.pick_jitter * rng.gen_range(0.0..1.0_f64).sqrt();
    let yaw = rng.gen_range(0.0..std::f64::consts::PI);
    items.push(item_at(
        0,
        spec.object_type,
        radius * angle.cos(),
        radius * angle.sin(),
        yaw,
        params,
        true,
    ));

    let extra = rng.gen_range(params.sparse_extra.0..=params.sparse_extra.1);
    let ext = max_extent_of(spec.object_type, params, false);
    let half_x = params.storage_crate.length / 2.0 - ext - 0.002;
    let half_y = params.storage_crate.width / 2.0 - ext - 0.002;
    for id in 1..=extra {
        let mut placed = false;
        for _ in 0..params.max_attempts {
            let x = rng.gen_range(-half_x..half_x);
            let y = rng.gen_range(-half_y..half_y);
            let yaw = rng.gen_range(0.0..std::f64::consts::PI);
            if (x * x + y * y).sqrt() < 0.080 {
                continue;
            }
            let candidate = item_at(id, spec.object_type, x, y, yaw, params, false);
            if placement_ok(&candidate, &items, params) {
                items.push(candidate);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SceneError::PackingFailure(format!(
                "no room for scattered item {id}"
            )));
        }
    }
    Ok(items)
}

fn populate_full(spec: &PopulationSpec, params: &SceneParams) -> Result<Vec<Item>, SceneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0xf011_u64));
    let crate_volume = params.storage_crate.length
        * params.storage_crate.width
        * params.storage_crate.wall_height;
    let target = (params.fill_fraction * crate_volume / item_volume(spec.object_type, params))
        .round() as usize;

    let ext = max_extent_of(spec.object_type, params, false);
    let usable_x = params.storage_crate.length - 2.0 * (ext + 0.002);
    let usable_y = params.storage_crate.width - 2.0 * (ext + 0.002);
    // Worst-case centre separation that the penetration limits always
    // accept, regardless of orientation.
    let min_sep = match spec.object_type {
        ObjectType::Pickle => 2.0 * ext - params.soft_overlap_fraction * ext,
        ObjectType::Lime => 2.0 * ext,
    };
    let capacity =
        (usable_x / min_sep).floor() as usize * (usable_y / min_sep).floor() as usize;

    let nx = ((target as f64 * usable_x / usable_y).sqrt().ceil() as usize).max(1);
    let ny = target.div_ceil(nx);
    let spacing_x = usable_x / nx as f64;
    let spacing_y = usable_y / ny as f64;
    // Jitter that can never violate the worst-case separation; orientation-
    // aware retries below admit lime layouts denser than the worst case.
    let jitter = ((spacing_x.min(spacing_y) - min_sep) / 2.0).clamp(0.0, 0.004);

    let mut items: Vec<Item> = Vec::with_capacity(target);
    'cells: for cell in 0..nx * ny {
        if items.len() == target {
            break;
        }
        let (i, j) = (cell % nx, cell / nx);
        let cx = -usable_x / 2.0 + (i as f64 + 0.5) * spacing_x;
        let cy = -usable_y / 2.0 + (j as f64 + 0.5) * spacing_y;
        for _ in 0..params.max_attempts {
            let x = cx + rng.gen_range(-jitter..=jitter);
            let y = cy + rng.gen_range(-jitter..=jitter);
            let yaw = rng.gen_range(0.0..std::f64::consts::PI);
            let candidate = item_at(items.len() as u32, spec.object_type, x, y, yaw, params, false);
            if placement_ok(&candidate, &items, params) {
                items.push(candidate);
                continue 'cells;
            }
        }
        return Err(SceneError::PackingFailure(format!(
            "cell ({i}, {j}) rejected every candidate orientation"
        )));
    }
    if items.len() < target {
        return Err(SceneError::PackingFailure(format!(
            "placed {} of {} items (worst-case capacity {})",
            items.len(),
            target,
            capacity
        )));
    }
    Ok(items)
}

/// The volume a finger sweeps while descending: a vertical capsule at a
/// fixed horizontal position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentCorridor {
    /// Horizontal position of the fingertip path, world frame.
    pub center_xy: Vector2<f64>,
    /// Capsule radius (fingertip capsule radius).
    pub radius: f64,
    /// Deepest fingertip-centre height the descent would reach, world z.
    pub bottom_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InsertionResult {
    Inserted,
    Blocked,
}

/// Outcome of checking all four descent corridors against the clutter.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionReport {
    pub results: [InsertionResult; 4],
    /// Per finger: for blocked fingers, the fingertip-centre z at which the
    /// descent first jams on a blocking item.
    pub jam_z: [Option<f64>; 4],
}

impl InsertionReport {
    pub fn all_inserted(&self) -> bool {
        self.results.iter().all(|r| *r == InsertionResult::Inserted)
    }

    /// Highest jam height across the blocked fingers.
    pub fn max_jam(&self) -> Option<f64> {
        self.jam_z
            .iter()
            .flatten()
            .copied()
            .fold(None, |acc, z| Some(acc.map_or(z, |a: f64| a.max(z))))
    }
}

/// Worst intrusion of a corridor into the rigid clutter, ignoring soft items
/// (they compress out of the way). Positive means the finger would displace
/// rigid material.
fn corridor_intrusion(corridor: &DescentCorridor, offset: Vector2<f64>, scene: &Scene) -> f64 {
    let xy = corridor.center_xy + offset;
    let top = Point3::new(xy.x, xy.y, scene.storage_crate.wall_height + 0.05);
    let bottom = Point3::new(xy.x, xy.y, corridor.bottom_z);
    scene
        .items
        .iter()
        .filter(|item| !item.is_soft())
        .map(|item| corridor.radius - item.solid().segment_distance(top, bottom, 0.002))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Checks whether each finger can descend into the scene.
///
/// A finger is blocked if rigid material intrudes into its corridor by more
/// than the clearance and no dodge offset within the lateral search radius
/// clears it. The dodge pattern is a fixed fan of eight directions at four
/// radii, searched in deterministic order.
pub fn insertion_check(
    corridors: &[DescentCorridor; 4],
    scene: &Scene,
    params: &SceneParams,
) -> InsertionReport {
    let mut results = [InsertionResult::Inserted; 4];
    let mut jam_z = [None; 4];
    for (finger, corridor) in corridors.iter().enumerate() {
        let mut cleared = false;
        'offsets: for offset in dodge_offsets(params.lateral_search_radius) {
            if corridor_intrusion(corridor, offset, scene) <= params.insertion_clearance {
                cleared = true;
                break 'offsets;
            }
        }
        if !cleared {
            results[finger] = InsertionResult::Blocked;
            jam_z[finger] = corridor_jam_height(corridor, scene, params);
        }
    }
    InsertionReport { results, jam_z }
}

fn dodge_offsets(search_radius: f64) -> impl Iterator<Item = Vector2<f64>> {
    std::iter::once(Vector2::zeros()).chain((1..=4).flat_map(move |ring| {
        let r = search_radius * ring as f64 / 4.0;
        (0..8).map(move |k| {
            let ang = std::f64::consts::TAU * k as f64 / 8.0;
            Vector2::new(r * ang.cos(), r * ang.sin())
        })
    }))
}

/// Highest fingertip-centre z at which the un-dodged corridor first touches
/// a blocking rigid item.
fn corridor_jam_height(
    corridor: &DescentCorridor,
    scene: &Scene,
    params: &SceneParams,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    for item in scene.items.iter().filter(|i| !i.is_soft()) {
        let solid = item.solid();
        let tip_at = |z: f64| {
            solid.signed_distance(Point3::new(
                corridor.center_xy.x,
                corridor.center_xy.y,
                z,
            )) - corridor.radius
        };
        let z_bottom = corridor.bottom_z;
        if tip_at(z_bottom) > params.insertion_clearance {
            // Use the corridor's own intrusion test for the deepest point;
            // if this item never intrudes there it cannot be the jam cause.
            let deep = corridor.radius
                - solid.segment_distance(
                    Point3::new(corridor.center_xy.x, corridor.center_xy.y, z_bottom),
                    Point3::new(
                        corridor.center_xy.x,
                        corridor.center_xy.y,
                        scene.storage_crate.wall_height,
                    ),
                    0.002,
                );
            if deep <= params.insertion_clearance {
                continue;
            }
        }
        let top = item.solid().highest_z().unwrap_or(0.0) + corridor.radius + 1e-4;
        // The contact height is the upper zero of the signed clearance along
        // the descent; bracket it from the closest-approach depth upward.
        let mut lo = z_bottom;
        let mut hi = top;
        if tip_at(hi) <= 0.0 {
            continue;
        }
        // Ternary search for the minimising depth to start the bracket low.
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if tip_at(m1) < tip_at(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let z_min = 0.5 * (lo + hi);
        if tip_at(z_min) > 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (z_min, top);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if tip_at(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let contact = 0.5 * (lo + hi);
        best = Some(best.map_or(contact, |b: f64| b.max(contact)));
    }
    best
}

/// Which items ended up held after the gripper closed.
///
/// An item is captured when the grasp achieved force closure (contacts on at
/// least one opposing finger pair), the item centre projects inside the
/// fingertip polygon, and the item does not hang below the fingertip
/// undersides by more than the lift margin. Evaluated in the gripper frame,
/// so a tilted grasp is penalised naturally.
pub fn capture_set(
    grasp: &GraspGeometry,
    contacts: &[Contact],
    scene: &Scene,
    params: &SceneParams,
) -> Vec<u32> {
    if !has_opposing_item_contacts(contacts) {
        return Vec::new();
    }
    let approach_dir = grasp.base_pose.transform_vector(Vector3::z());
    scene
        .items
        .iter()
        .filter(|item| {
            let local = grasp.base_pose.inverse_transform_point(item.pose.position);
            if !grasp.faces.contains(Vector2::new(local.x, local.y)) {
                return false;
            }
            let depth = local.z + item.support_extent(approach_dir);
            depth <= grasp.tip_reach + params.lift_margin
        })
        .map(|item| item.id)
        .collect()
}

/// Force-closure heuristic: some pair of opposed fingers (0–2 or 1–3) both
/// touched an item.
fn has_opposing_item_contacts(contacts: &[Contact]) -> bool {
    let touched = |finger: usize| {
        contacts
            .iter()
            .any(|c| c.finger == finger && matches!(c.target, ContactTarget::Item(_)))
    };
    (touched(0) && touched(2)) || (touched(1) && touched(3))
}

/// What happened to the captured items during transport.
#[derive(Debug, Clone, PartialEq)]
pub struct RetentionOutcome {
    pub retained: Vec<u32>,
    pub dropped_outside_punnet: Vec<u32>,
}

/// Decides which captured items survive the transport path.
///
/// Each item's security margin is its centre's clearance to the fingertip
/// polygon boundary, reduced by how far the item can shift when the hand
/// tilts (horizontal extent times the sine of the worst path tilt), plus a
/// small seeded jitter. Items below the drop threshold fall out during the
/// tilted lift segment — before the punnet — and therefore land outside it.
pub fn retention_check(
    captured: &[u32],
    grasp: &GraspGeometry,
    scene: &Scene,
    max_tilt: f64,
    seed: u64,
    params: &SceneParams,
) -> RetentionOutcome {
    let mut outcome = RetentionOutcome {
        retained: Vec::new(),
        dropped_outside_punnet: Vec::new(),
    };
    for &id in captured {
        let Some(item) = scene.items.iter().find(|i| i.id == id) else {
            continue;
        };
        let local = grasp.base_pose.inverse_transform_point(item.pose.position);
        let polygon_margin = grasp.faces.margin(Vector2::new(local.x, local.y));
        let shrink = item.max_extent() * max_tilt.sin().abs();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xd0_0000 + id as u64));
        let jitter = rng.gen_range(-params.retention_jitter..=params.retention_jitter);
        if polygon_margin - shrink + jitter < params.drop_threshold {
            outcome.dropped_outside_punnet.push(id);
        } else {
            outcome.retained.push(id);
        }
    }
    outcome
}
