//! Command-line front end: runs the benchmark matrix and turns trial
//! records into KPI reports.
//!
//! All outputs are deterministic for a given configuration and master seed;
//! the worker count changes wall-clock time only, never file contents.
//! Configuration problems abort before any output file is created.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pickpack::config::RunConfig;
use pickpack::executor::{self, ScenarioFilter, TrialOutcome, TrialRecord};
use pickpack::humanbench::{self, HumanSummary};
use pickpack::kpi::{self, KpiReport};

/// Progress chatter, tolerant of a closed stdout: piping into `head`
/// must never abort a run between file writes.
macro_rules! note {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(
    name = "pickpack",
    version,
    about = "Deterministic pick-and-place benchmark: run the trial matrix and report KPIs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run trials and write trial records plus a KPI report.
    Run(RunArgs),
    /// Recompute a KPI report from an existing trial record file.
    Kpi(KpiArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML run configuration; defaults match the reference benchmark setup.
    #[arg(long, env = "PICKPACK_CONFIG")]
    config: Option<PathBuf>,

    /// Master seed override; every trial seed derives from it.
    #[arg(long, env = "PICKPACK_SEED")]
    seed: Option<u64>,

    /// Worker threads for trial execution (default: one per core).
    #[arg(long, env = "PICKPACK_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    /// Scenario subset, e.g. `object=pickle,pick=single,angle=90,config=concentric`.
    #[arg(long, env = "PICKPACK_SCENARIO", value_name = "FILTER")]
    scenario: Option<String>,

    /// Repetitions per scenario override.
    #[arg(long, env = "PICKPACK_REPS", value_parser = clap::value_parser!(u32).range(1..))]
    reps: Option<u32>,

    /// Output directory for trials.csv, trials.json, kpi.csv and kpi.json.
    #[arg(long, env = "PICKPACK_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct KpiArgs {
    /// Trial record CSV produced by `pickpack run`.
    #[arg(long, env = "PICKPACK_TRIALS")]
    trials: PathBuf,

    /// Add the human packing baseline: bare `--human` (or `--human bundled`)
    /// uses the bundled study, `--human PATH` reads another study file.
    #[arg(long, env = "PICKPACK_HUMAN", num_args = 0..=1, default_missing_value = "bundled")]
    human: Option<PathBuf>,

    /// Output directory for kpi.csv, kpi.json and comparison.csv.
    #[arg(long, env = "PICKPACK_OUT", default_value = "out")]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Kpi(args) => cmd_kpi(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    // Everything that can reject does so here, before any file is touched.
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)
            .with_context(|| format!("loading configuration {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.matrix.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        config.matrix.repetitions = reps;
    }
    config.validate().context("validating configuration")?;

    let filter = args
        .scenario
        .as_deref()
        .map(ScenarioFilter::parse)
        .transpose()
        .context("parsing --scenario")?;
    let plan = executor::plan_matrix(&config, filter.as_ref());
    if plan.is_empty() {
        bail!("the scenario filter matched no trials");
    }
    let scenarios = {
        let mut labels: Vec<String> = plan.iter().map(|t| t.scenario.label()).collect();
        labels.dedup();
        labels.len()
    };
    note!("planned {} trials across {} scenarios", plan.len(), scenarios);

    let started = Instant::now();
    let records = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build()
            .context("building worker pool")?
            .install(|| executor::run_matrix(&config, filter.as_ref())),
        None => executor::run_matrix(&config, filter.as_ref()),
    };
    note!("completed in {:.1} s", started.elapsed().as_secs_f64());

    let report = kpi::compute_report(&records);
    print_outcomes(&records);
    print_headline(&report);

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    write_trials(&args.out, &records)?;
    write_report(&args.out, &report)?;
    Ok(())
}

fn cmd_kpi(args: KpiArgs) -> Result<()> {
    let file = fs::File::open(&args.trials)
        .with_context(|| format!("opening trial records {}", args.trials.display()))?;
    let records = executor::read_trials_csv(file)
        .with_context(|| format!("reading trial records {}", args.trials.display()))?;
    let human = load_human(args.human.as_deref())?;

    let report = kpi::compute_report(&records);
    note!(
        "read {} trial records from {}",
        records.len(),
        args.trials.display()
    );
    print_headline(&report);
    print_phase_means(&report);

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;
    write_report(&args.out, &report)?;

    let comparison = humanbench::compare(&report, human.as_ref());
    let mut buffer = Vec::new();
    let diagnostic = humanbench::write_comparison_csv(&mut buffer, &comparison)?;
    let path = args.out.join("comparison.csv");
    fs::write(&path, buffer).with_context(|| format!("writing {}", path.display()))?;
    note!("wrote {}", path.display());
    if let Some(summary) = &human {
        print_human(summary);
    }
    if let Some(diagnostic) = diagnostic {
        note!("note: {diagnostic}");
    }
    Ok(())
}

/// Resolves the `--human` flag: absent, the bundled study, or a file.
fn load_human(flag: Option<&Path>) -> Result<Option<HumanSummary>> {
    let trials = match flag {
        None => return Ok(None),
        Some(path) if path.as_os_str() == "bundled" => humanbench::bundled_trials(),
        Some(path) => {
            let file = fs::File::open(path)
                .with_context(|| format!("opening human study {}", path.display()))?;
            humanbench::parse_csv(file)
                .with_context(|| format!("reading human study {}", path.display()))?
        }
    };
    let summary = humanbench::summarize(&trials).context("summarizing human study")?;
    Ok(Some(summary))
}

fn print_outcomes(records: &[TrialRecord]) {
    let count = |outcome: TrialOutcome| {
        records
            .iter()
            .filter(|record| record.outcome == outcome)
            .count()
    };
    note!(
        "outcomes: {} success, {} grasp failure, {} drop failure, {} system failure",
        count(TrialOutcome::Success),
        count(TrialOutcome::GraspFailure),
        count(TrialOutcome::DropFailure),
        count(TrialOutcome::SystemFailure),
    );
}

fn print_headline(report: &KpiReport) {
    note!(
        "TPH {:.1}  UPH {:.1}  success rate {:.2}%",
        report.overall.trials_per_hour,
        report.overall.units_per_hour,
        report.overall.success_rate_percent,
    );
}

fn print_phase_means(report: &KpiReport) {
    let cell = |value: Option<f64>| match value {
        Some(v) => format!("{v:.2}"),
        None => "-".to_string(),
    };
    note!(
        "phase means [s]: initialisation {}  approach {}  grasping {}  transport {}  placement {}",
        cell(report.phase_means_s[0]),
        cell(report.phase_means_s[1]),
        cell(report.phase_means_s[2]),
        cell(report.phase_means_s[3]),
        cell(report.phase_means_s[4]),
    );
}

fn print_human(summary: &HumanSummary) {
    note!(
        "human baseline: natural/single speed ratio {:.2}, picks reduction {:.2}",
        summary.speed_ratio, summary.picks_reduction,
    );
}

fn write_trials(out: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut buffer = Vec::new();
    executor::write_trials_csv(&mut buffer, records).context("serializing trial records")?;
    write_file(&out.join("trials.csv"), &buffer)?;
    let json = serde_json::to_string_pretty(records).context("serializing trial records")?;
    write_file(&out.join("trials.json"), format!("{json}\n").as_bytes())?;
    Ok(())
}

fn write_report(out: &Path, report: &KpiReport) -> Result<()> {
    let mut buffer = Vec::new();
    kpi::write_kpi_csv(&mut buffer, report).context("serializing KPI report")?;
    write_file(&out.join("kpi.csv"), &buffer)?;
    let json = serde_json::to_string_pretty(report).context("serializing KPI report")?;
    write_file(&out.join("kpi.json"), format!("{json}\n").as_bytes())?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    note!("wrote {}", path.display());
    Ok(())
}
