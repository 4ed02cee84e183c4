//! Human demonstration baseline: parsing, summarising and comparing the
//! manual punnet-filling study against robot runs.
//!
//! The study had participants fill punnets under two instructions: pick
//! however comes naturally (multi-item scooping allowed) or pick strictly
//! one item at a time. The interesting quantities are the strategy mix in
//! the natural condition, the punnet-rate ratio between conditions, and how
//! much multi-item handling reduces the number of picks per punnet.

use crate::kpi::KpiReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Instruction condition of one study trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandlingMode {
    Natural,
    SinglePick,
}

/// Hand strategy the participant used to fill the punnet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Wide two-handed scoop moving many items at once.
    ScoopWide,
    /// A scoop to get close to the target weight, then single picks to top
    /// it off.
    ScoopPlusSingle,
    /// Several items pinched in one hand per transfer.
    MultiPinch,
    /// Strict one-item pinches.
    Pinch,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::ScoopWide => "scoop_wide",
            Strategy::ScoopPlusSingle => "scoop_plus_single",
            Strategy::MultiPinch => "multi_pinch",
            Strategy::Pinch => "pinch",
        }
    }
}

/// One punnet filled by one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanTrial {
    pub participant: String,
    pub item_type: String,
    pub mode: HandlingMode,
    pub strategy: Strategy,
    pub picks_per_punnet: u32,
    pub punnet_time_s: f64,
    pub wrist_rotation_max_deg: f64,
}

pub const MIN_PICKS_PER_PUNNET: u32 = 2;
pub const MAX_PICKS_PER_PUNNET: u32 = 12;

#[derive(Debug, Error)]
pub enum HumanError {
    #[error("cannot read human trial data: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid human trial row {row}: {message}")]
    InvalidRow { row: usize, message: String },
    #[error("no human trials in the {0:?} condition")]
    MissingMode(HandlingMode),
}

fn validate(trials: &[HumanTrial]) -> Result<(), HumanError> {
    for (index, trial) in trials.iter().enumerate() {
        let row = index + 2; // header is row 1
        if trial.mode == HandlingMode::SinglePick && trial.strategy != Strategy::Pinch {
            return Err(HumanError::InvalidRow {
                row,
                message: format!(
                    "single_pick trials must use the pinch strategy, found {}",
                    trial.strategy.name()
                ),
            });
        }
        if trial.mode == HandlingMode::Natural
            && !(MIN_PICKS_PER_PUNNET..=MAX_PICKS_PER_PUNNET).contains(&trial.picks_per_punnet)
        {
            return Err(HumanError::InvalidRow {
                row,
                message: format!(
                    "picks_per_punnet {} outside [{MIN_PICKS_PER_PUNNET}, {MAX_PICKS_PER_PUNNET}]",
                    trial.picks_per_punnet
                ),
            });
        }
        if !(trial.punnet_time_s > 0.0) {
            return Err(HumanError::InvalidRow {
                row,
                message: "punnet_time_s must be positive".into(),
            });
        }
        if !(trial.wrist_rotation_max_deg >= 0.0) {
            return Err(HumanError::InvalidRow {
                row,
                message: "wrist_rotation_max_deg must be non-negative".into(),
            });
        }
    }
    Ok(())
}

/// Parses and validates study rows from CSV.
pub fn parse_csv<R: std::io::Read>(input: R) -> Result<Vec<HumanTrial>, HumanError> {
    let trials: Vec<HumanTrial> = csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, csv::Error>>()?;
    validate(&trials)?;
    Ok(trials)
}

/// The study dataset bundled with the crate.
pub fn bundled_trials() -> Vec<HumanTrial> {
    let text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/human_trials.csv"
    ));
    parse_csv(text.as_bytes()).expect("bundled human trial data is valid")
}

/// Per-condition aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub punnets: u32,
    pub total_time_s: f64,
    pub punnets_per_hour: f64,
    pub mean_picks_per_punnet: f64,
}

fn mode_stats(trials: &[HumanTrial], mode: HandlingMode) -> Result<ModeStats, HumanError> {
    let subset: Vec<&HumanTrial> = trials.iter().filter(|t| t.mode == mode).collect();
    if subset.is_empty() {
        return Err(HumanError::MissingMode(mode));
    }
    let punnets = subset.len() as u32;
    let total_time_s: f64 = subset.iter().map(|t| t.punnet_time_s).sum();
    let picks: u32 = subset.iter().map(|t| t.picks_per_punnet).sum();
    Ok(ModeStats {
        punnets,
        total_time_s,
        punnets_per_hour: punnets as f64 * 3600.0 / total_time_s,
        mean_picks_per_punnet: picks as f64 / punnets as f64,
    })
}

/// Headline summary of the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanSummary {
    pub trials: u32,
    pub participants: u32,
    pub item_types: u32,
    pub natural: ModeStats,
    pub single_pick: ModeStats,
    /// Strategy mix within the natural condition, percent.
    pub strategy_share_percent: BTreeMap<String, f64>,
    /// Natural-condition punnet rate over single-pick punnet rate.
    pub speed_ratio: f64,
    /// Fraction by which natural handling reduces picks per punnet.
    pub picks_reduction: f64,
    pub wrist_rotation_range_deg: (f64, f64),
}

/// Summarises a validated trial set. Both conditions must be present.
pub fn summarize(trials: &[HumanTrial]) -> Result<HumanSummary, HumanError> {
    validate(trials)?;
    let natural = mode_stats(trials, HandlingMode::Natural)?;
    let single_pick = mode_stats(trials, HandlingMode::SinglePick)?;

    let natural_trials: Vec<&HumanTrial> = trials
        .iter()
        .filter(|t| t.mode == HandlingMode::Natural)
        .collect();
    let mut strategy_share_percent = BTreeMap::new();
    for trial in &natural_trials {
        *strategy_share_percent
            .entry(trial.strategy.name().to_string())
            .or_insert(0.0) += 100.0 / natural_trials.len() as f64;
    }

    let participants = trials
        .iter()
        .map(|t| t.participant.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len() as u32;
    let item_types = trials
        .iter()
        .map(|t| t.item_type.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len() as u32;
    let wrist_min = trials
        .iter()
        .map(|t| t.wrist_rotation_max_deg)
        .fold(f64::INFINITY, f64::min);
    let wrist_max = trials
        .iter()
        .map(|t| t.wrist_rotation_max_deg)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(HumanSummary {
        trials: trials.len() as u32,
        participants,
        item_types,
        natural,
        single_pick,
        strategy_share_percent,
        speed_ratio: natural.punnets_per_hour / single_pick.punnets_per_hour,
        picks_reduction: 1.0 - natural.mean_picks_per_punnet / single_pick.mean_picks_per_punnet,
        wrist_rotation_range_deg: (wrist_min, wrist_max),
    })
}

/// Robot multi-pick advantage set beside the human one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchComparison {
    /// Robot multi-pick UPH over single-pick UPH, when both subsets ran.
    pub robot_multi_over_single_uph: Option<f64>,
    /// Human natural-condition speed-up, when study data is available.
    pub human_natural_over_single_uph: Option<f64>,
    /// Human picks-per-punnet reduction, when study data is available.
    pub human_picks_reduction: Option<f64>,
}

/// Builds the comparison. Either side may be absent; the table then simply
/// omits those columns.
pub fn compare(robot: &KpiReport, human: Option<&HumanSummary>) -> BenchComparison {
    let single = robot.by_density.get("single").map(|g| g.units_per_hour);
    let multi = robot.by_density.get("multi").map(|g| g.units_per_hour);
    let robot_ratio = match (single, multi) {
        (Some(s), Some(m)) if s > 0.0 => Some(m / s),
        _ => None,
    };
    BenchComparison {
        robot_multi_over_single_uph: robot_ratio,
        human_natural_over_single_uph: human.map(|h| h.speed_ratio),
        human_picks_reduction: human.map(|h| h.picks_reduction),
    }
}

/// Writes the comparison as a two-line CSV, with columns only for the sides
/// that are present. Returns a diagnostic when the human side is missing.
pub fn write_comparison_csv<W: std::io::Write>(
    mut out: W,
    comparison: &BenchComparison,
) -> std::io::Result<Option<String>> {
    let mut headers = Vec::new();
    let mut values = Vec::new();
    if let Some(v) = comparison.robot_multi_over_single_uph {
        headers.push("robot_multi_over_single_uph");
        values.push(format!("{v:.2}"));
    }
    if let Some(v) = comparison.human_natural_over_single_uph {
        headers.push("human_natural_over_single_uph");
        values.push(format!("{v:.2}"));
    }
    if let Some(v) = comparison.human_picks_reduction {
        headers.push("human_picks_reduction");
        values.push(format!("{v:.2}"));
    }
    writeln!(out, "{}", headers.join(","))?;
    writeln!(out, "{}", values.join(","))?;
    Ok(if comparison.human_natural_over_single_uph.is_none() {
        Some("human baseline unavailable; comparison limited to robot subsets".to_string())
    } else {
        None
    })
}
