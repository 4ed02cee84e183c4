//! Trial executor: drives one pick-and-place cycle through its five phases
//! and batches the full scenario matrix.
//!
//! A trial is a pure function of configuration, scenario and seed. Module
//! errors never unwind past a trial; they are recorded as system failures so
//! a batch always yields one record per planned trial, in plan order,
//! regardless of how many worker threads execute it.

use crate::arm::{self, ArmState, DescentStop, Pose, Wrench};
use crate::config::RunConfig;
use crate::gripper::{self, GripperState};
use crate::rng::derive_seed;
use crate::scene::{
    self, Density, DescentCorridor, ObjectType, PopulationSpec, Scene,
};
use crate::sensing::{self, ContactEvent, ContactTrigger};
use nalgebra::{Point3, UnitQuaternion, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seed-stream tags so the per-trial random streams never collide.
const STREAM_SENSOR: u64 = 2;
const STREAM_RETENTION: u64 = 3;

/// The five phases of a cycle, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Initialisation,
    Approach,
    Grasping,
    Transport,
    Placement,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::Initialisation,
        Phase::Approach,
        Phase::Grasping,
        Phase::Transport,
        Phase::Placement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Initialisation => "initialisation",
            Phase::Approach => "approach",
            Phase::Grasping => "grasping",
            Phase::Transport => "transport",
            Phase::Placement => "placement",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|p| *p == self).unwrap()
    }
}

/// Finger arrangement used for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FingerConfig {
    /// All four fingers evenly spaced around the grasp axis.
    Concentric,
    /// Fingers gathered into two opposing jaws.
    Parallel,
}

impl FingerConfig {
    /// Spread coordinate handed to the gripper (1 fully concentric,
    /// 0 fully parallel).
    pub fn spread(self) -> f64 {
        match self {
            FingerConfig::Concentric => 1.0,
            FingerConfig::Parallel => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FingerConfig::Concentric => "concentric",
            FingerConfig::Parallel => "parallel",
        }
    }
}

/// One cell of the benchmark matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub object_type: ObjectType,
    pub density: Density,
    pub approach_angle_deg: f64,
    pub finger_config: FingerConfig,
}

impl ScenarioSpec {
    /// Stable human-readable identifier, e.g. `lime-multi-60-parallel`.
    pub fn label(&self) -> String {
        let object = match self.object_type {
            ObjectType::Lime => "lime",
            ObjectType::Pickle => "pickle",
        };
        let density = match self.density {
            Density::SparseSingle => "single",
            Density::Full => "multi",
        };
        format!(
            "{object}-{density}-{:.0}-{}",
            self.approach_angle_deg,
            self.finger_config.name()
        )
    }

    /// The full benchmark matrix: 2 objects × 2 densities × 3 approach
    /// angles × 2 finger configurations = 24 scenarios, in a fixed order.
    pub fn matrix() -> Vec<ScenarioSpec> {
        let mut out = Vec::with_capacity(24);
        for object_type in [ObjectType::Lime, ObjectType::Pickle] {
            for density in [Density::SparseSingle, Density::Full] {
                for approach_angle_deg in [90.0, 60.0, 45.0] {
                    for finger_config in [FingerConfig::Concentric, FingerConfig::Parallel] {
                        out.push(ScenarioSpec {
                            object_type,
                            density,
                            approach_angle_deg,
                            finger_config,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Final classification of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialOutcome {
    /// At least one item ended up in the punnet.
    Success,
    /// The hand never held anything: blocked insertion or empty capture.
    GraspFailure,
    /// Items were held but all of them fell out during transport.
    DropFailure,
    /// An internal module reported an error; the trial does not count
    /// towards grasp statistics.
    SystemFailure,
}

/// Everything recorded about one executed trial. Flat so it serialises to
/// one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub object_type: ObjectType,
    pub density: Density,
    pub approach_angle_deg: f64,
    pub finger_config: FingerConfig,
    pub repetition: u32,
    pub seed: u64,
    pub outcome: TrialOutcome,
    /// Items retained all the way into the punnet.
    pub items_placed: u32,
    /// Items held right after the grasp closed.
    pub captured_items: u32,
    /// Distinct finger contacts registered while closing.
    pub contact_count: u32,
    pub detection_trigger: Option<ContactTrigger>,
    /// Detection instant within the grasp descent, s.
    pub detection_time_s: Option<f64>,
    pub initialisation_s: Option<f64>,
    pub approach_s: Option<f64>,
    pub grasping_s: Option<f64>,
    pub transport_s: Option<f64>,
    pub placement_s: Option<f64>,
    pub total_s: f64,
    pub error: Option<String>,
}

impl TrialRecord {
    fn base(scenario: &ScenarioSpec, repetition: u32, seed: u64) -> Self {
        Self {
            scenario: scenario.label(),
            object_type: scenario.object_type,
            density: scenario.density,
            approach_angle_deg: scenario.approach_angle_deg,
            finger_config: scenario.finger_config,
            repetition,
            seed,
            outcome: TrialOutcome::SystemFailure,
            items_placed: 0,
            captured_items: 0,
            contact_count: 0,
            detection_trigger: None,
            detection_time_s: None,
            initialisation_s: None,
            approach_s: None,
            grasping_s: None,
            transport_s: None,
            placement_s: None,
            total_s: 0.0,
            error: None,
        }
    }

    /// Durations in phase order; `None` marks phases the trial never reached.
    pub fn phase_durations(&self) -> [Option<f64>; 5] {
        [
            self.initialisation_s,
            self.approach_s,
            self.grasping_s,
            self.transport_s,
            self.placement_s,
        ]
    }

    pub fn is_success(&self) -> bool {
        self.outcome == TrialOutcome::Success
    }
}

/// Scenario subset selector, parsed from comma-separated `key=value`
/// clauses such as `object=pickle,pick=single,angle=90,config=concentric`.
/// Omitted keys match every level.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScenarioFilter {
    pub object_type: Option<ObjectType>,
    pub density: Option<Density>,
    pub approach_angle_deg: Option<f64>,
    pub finger_config: Option<FingerConfig>,
}

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("empty clause in scenario filter {0:?}")]
    EmptyClause(String),
    #[error("expected key=value, got {0:?}")]
    MissingValue(String),
    #[error("unknown filter key {0:?} (expected object, pick, angle or config)")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}; expected one of: {expected}")]
    InvalidValue {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
}

impl ScenarioFilter {
    pub fn parse(text: &str) -> Result<Self, FilterError> {
        let mut filter = ScenarioFilter::default();
        for clause in text.split(',') {
            let clause = clause.trim();
            if clause.is_empty() {
                return Err(FilterError::EmptyClause(text.to_string()));
            }
            let (key, value) = clause
                .split_once('=')
                .ok_or_else(|| FilterError::MissingValue(clause.to_string()))?;
            let key = key.trim().to_lowercase();
            let value = value.trim().to_lowercase();
            match key.as_str() {
                "object" => {
                    filter.object_type = Some(match value.as_str() {
                        "lime" => ObjectType::Lime,
                        "pickle" => ObjectType::Pickle,
                        _ => {
                            return Err(FilterError::InvalidValue {
                                key: "object",
                                value,
                                expected: "lime, pickle",
                            })
                        }
                    });
                }
                "pick" => {
                    filter.density = Some(match value.as_str() {
                        "single" | "sparse" => Density::SparseSingle,
                        "multi" | "full" => Density::Full,
                        _ => {
                            return Err(FilterError::InvalidValue {
                                key: "pick",
                                value,
                                expected: "single, multi",
                            })
                        }
                    });
                }
                "angle" => {
                    filter.approach_angle_deg =
                        Some(value.parse::<f64>().map_err(|_| FilterError::InvalidValue {
                            key: "angle",
                            value,
                            expected: "a number of degrees, e.g. 90",
                        })?);
                }
                "config" => {
                    filter.finger_config = Some(match value.as_str() {
                        "concentric" => FingerConfig::Concentric,
                        "parallel" => FingerConfig::Parallel,
                        _ => {
                            return Err(FilterError::InvalidValue {
                                key: "config",
                                value,
                                expected: "concentric, parallel",
                            })
                        }
                    });
                }
                _ => return Err(FilterError::UnknownKey(key)),
            }
        }
        Ok(filter)
    }

    pub fn matches(&self, scenario: &ScenarioSpec) -> bool {
        self.object_type
            .map_or(true, |object| object == scenario.object_type)
            && self.density.map_or(true, |density| density == scenario.density)
            && self
                .approach_angle_deg
                .map_or(true, |angle| angle == scenario.approach_angle_deg)
            && self
                .finger_config
                .map_or(true, |config| config == scenario.finger_config)
    }
}

/// One scheduled trial of the matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannedTrial {
    pub scenario: ScenarioSpec,
    pub repetition: u32,
    pub seed: u64,
}

/// Expands the matrix into per-trial plans with derived seeds.
///
/// Seeds derive from the position in the *full* matrix, so filtering
/// changes which trials run but never what any given trial does.
pub fn plan_matrix(config: &RunConfig, filter: Option<&ScenarioFilter>) -> Vec<PlannedTrial> {
    let mut plan = Vec::new();
    for (index, scenario) in ScenarioSpec::matrix().iter().enumerate() {
        if let Some(filter) = filter {
            if !filter.matches(scenario) {
                continue;
            }
        }
        for repetition in 0..config.matrix.repetitions {
            let flat = index as u64 * config.matrix.repetitions as u64 + repetition as u64;
            plan.push(PlannedTrial {
                scenario: *scenario,
                repetition,
                seed: derive_seed(config.matrix.master_seed, flat),
            });
        }
    }
    plan
}

/// Runs the planned trials in parallel on the ambient rayon pool and
/// returns the records in plan order.
pub fn run_matrix(config: &RunConfig, filter: Option<&ScenarioFilter>) -> Vec<TrialRecord> {
    plan_matrix(config, filter)
        .par_iter()
        .map(|trial| run_trial(config, &trial.scenario, trial.repetition, trial.seed))
        .collect()
}

/// Runs one trial end to end, populating the scene from the seed.
pub fn run_trial(
    config: &RunConfig,
    scenario: &ScenarioSpec,
    repetition: u32,
    seed: u64,
) -> TrialRecord {
    let population = PopulationSpec {
        object_type: scenario.object_type,
        density: scenario.density,
        seed,
    };
    match scene::populate(&population, &config.scene) {
        Ok(scene) => run_trial_on_scene(config, scenario, repetition, seed, &scene),
        Err(error) => {
            let mut record = TrialRecord::base(scenario, repetition, seed);
            record.error = Some(error.to_string());
            record
        }
    }
}

/// Runs one trial on an externally prepared scene.
pub fn run_trial_on_scene(
    config: &RunConfig,
    scenario: &ScenarioSpec,
    repetition: u32,
    seed: u64,
    scene: &Scene,
) -> TrialRecord {
    let mut record = TrialRecord::base(scenario, repetition, seed);
    if let Err(message) = trial_pipeline(config, scenario, seed, scene, &mut record) {
        record.outcome = TrialOutcome::SystemFailure;
        record.items_placed = 0;
        record.error = Some(message);
    }
    record.total_s = record.phase_durations().iter().flatten().sum();
    record
}

/// World orientation of the tool for a given approach angle: tool z points
/// down at 90° and tilts about the world y axis as the angle shallows.
pub fn grasp_orientation(approach_angle_deg: f64) -> UnitQuaternion<f64> {
    let tilt = (90.0 - approach_angle_deg).to_radians();
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), tilt)
        * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
}

fn trial_pipeline(
    config: &RunConfig,
    scenario: &ScenarioSpec,
    seed: u64,
    scene: &Scene,
    record: &mut TrialRecord,
) -> Result<(), String> {
    let timing = &config.timing;
    let spread = scenario.finger_config.spread();

    // Initialisation: home the arm, open the hand.
    record.initialisation_s = Some(timing.init_motion_s + timing.init_overhead_s);

    // Approach: aim the grasp focus at the picking pose and park above it.
    let orientation = grasp_orientation(scenario.approach_angle_deg);
    let probe = GripperState::open(
        &config.gripper,
        spread,
        Pose::new(Point3::origin(), orientation),
    )
    .map_err(|e| e.to_string())?;
    let tips_local =
        gripper::fingertips_in_gripper(&probe, &config.gripper).map_err(|e| e.to_string())?;
    let focus_depth = tips_local.iter().map(|t| t.z).sum::<f64>() / tips_local.len() as f64;
    let focus_offset = orientation * Vector3::new(0.0, 0.0, focus_depth);
    let pick = scene.pick_pose.position;
    let tool_xy = Vector2::new(pick.x - focus_offset.x, pick.y - focus_offset.y);
    let approach_pose = Pose::new(
        Point3::new(
            tool_xy.x,
            tool_xy.y,
            scene.floor_height() + timing.approach_height,
        ),
        orientation,
    );
    record.approach_s = Some(timing.approach_motion_s + timing.approach_overhead_s);

    // Grasping: check insertion, descend until the wrench reports the stop,
    // then close the fingers.
    let tip_offsets = tips_local.map(|t| orientation * t.coords);
    let tip_depths = tip_offsets.map(|o| -o.z);
    let max_depth = tip_depths.iter().fold(f64::NEG_INFINITY, |a, d| a.max(*d));
    let floor_stop_z = scene.floor_height() + config.gripper.contact_radius + max_depth;
    let corridors: [DescentCorridor; 4] = std::array::from_fn(|f| DescentCorridor {
        center_xy: tool_xy + Vector2::new(tip_offsets[f].x, tip_offsets[f].y),
        radius: config.gripper.contact_radius,
        bottom_z: floor_stop_z - tip_depths[f],
    });
    let insertion = scene::insertion_check(&corridors, scene, &config.scene);
    let jam_stop_z = insertion
        .jam_z
        .iter()
        .zip(tip_depths)
        .filter_map(|(jam, depth)| jam.map(|z| z + depth))
        .fold(f64::NEG_INFINITY, f64::max);
    let stop_z = jam_stop_z.max(floor_stop_z);

    let descent = simulate_descent(config, approach_pose, stop_z, seed)?;
    record.detection_trigger = Some(descent.event.trigger);
    record.detection_time_s = Some(descent.event.time);

    if !insertion.all_inserted() {
        // The fingers jammed on rigid clutter before reaching grasp depth.
        record.grasping_s = Some(descent.duration);
        record.outcome = TrialOutcome::GraspFailure;
        return Ok(());
    }

    let grasp_base = Pose::new(
        Point3::new(tool_xy.x, tool_xy.y, stop_z),
        orientation,
    );
    let open_state =
        GripperState::open(&config.gripper, spread, grasp_base).map_err(|e| e.to_string())?;
    let (closed, contacts) =
        gripper::close_fingers(&open_state, &config.gripper, scene).map_err(|e| e.to_string())?;
    record.contact_count = contacts.len() as u32;
    let close_steps = closed
        .fingers
        .iter()
        .map(|f| {
            ((f.flexion - config.gripper.flexion_min) / config.gripper.flexion_step).round() as u64
        })
        .max()
        .unwrap_or(0);
    record.grasping_s = Some(descent.duration + close_steps as f64 * timing.control_dt);

    let grasp = gripper::grasp_geometry(&closed, &config.gripper).map_err(|e| e.to_string())?;
    let captured = scene::capture_set(&grasp, &contacts, scene, &config.scene);
    record.captured_items = captured.len() as u32;
    if captured.is_empty() {
        record.outcome = TrialOutcome::GraspFailure;
        return Ok(());
    }

    // Transport: lift, carry to the punnet, lower. A tilted grasp keeps the
    // hand canted the whole way, which is when weakly held items fall out.
    record.transport_s = Some(timing.transport_motion_s + timing.transport_overhead_s);
    let max_tilt = (90.0 - scenario.approach_angle_deg).to_radians();
    let retention = scene::retention_check(
        &captured,
        &grasp,
        scene,
        max_tilt,
        derive_seed(seed, STREAM_RETENTION),
        &config.scene,
    );

    // Placement: open over the punnet through the full crank span.
    record.placement_s = Some(std::f64::consts::PI / timing.placement_open_speed);
    if retention.retained.is_empty() {
        record.outcome = TrialOutcome::DropFailure;
        record.items_placed = 0;
    } else {
        record.outcome = TrialOutcome::Success;
        record.items_placed = retention.retained.len() as u32;
    }
    Ok(())
}

struct Descent {
    duration: f64,
    event: ContactEvent,
}

/// Synthesises the grasp descent tick by tick: the commanded pose descends
/// at the configured speed, the actual pose stops at `stop_z`, and the
/// impedance wrench plus the sensor model feed the contact detector.
fn simulate_descent(
    config: &RunConfig,
    start_pose: Pose,
    stop_z: f64,
    seed: u64,
) -> Result<Descent, String> {
    let timing = &config.timing;
    let dt = timing.control_dt;
    let speed = timing.descent_speed;
    let mut sensor = config.sensor;
    sensor.seed = derive_seed(seed, STREAM_SENSOR);

    let travel = (start_pose.position.z - stop_z).max(0.0);
    let contact_tick = (travel / (speed * dt)).ceil() as u64;
    let max_ticks = contact_tick + 50;

    let mut state = ArmState {
        actual_pose: start_pose,
        desired_pose: start_pose,
        time: 0.0,
        external_wrench: Wrench::zero(),
    };
    let mut trace: Vec<(f64, Wrench)> = Vec::with_capacity(max_ticks as usize + 1);
    trace.push((0.0, sensing::sensed_wrench(&state.external_wrench, &sensor, 0)));
    for tick in 1..=max_ticks {
        let commanded_z = (start_pose.position.z - speed * tick as f64 * dt)
            .max(stop_z - 0.050);
        state.desired_pose = Pose::new(
            Point3::new(start_pose.position.x, start_pose.position.y, commanded_z),
            start_pose.orientation,
        );
        state = arm::step(
            &state,
            &config.impedance,
            Some(DescentStop { height: stop_z }),
            dt,
        );
        trace.push((
            state.time,
            sensing::sensed_wrench(&state.external_wrench, &sensor, tick),
        ));
    }
    let event = sensing::detect_contact(&trace, &config.thresholds, dt)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "descent finished without a contact event".to_string())?;
    Ok(Descent {
        duration: event.time,
        event,
    })
}

/// Writes trial records as CSV with a header row.
pub fn write_trials_csv<W: std::io::Write>(
    out: W,
    records: &[TrialRecord],
) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads trial records back from CSV.
pub fn read_trials_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
