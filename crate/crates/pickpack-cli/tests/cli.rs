//! End-to-end checks of the installed binary: argument plumbing, output
//! atomicity and byte-level reproducibility.

use pickpack::executor;
use pickpack::kpi::reference;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pickpack_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pickpack"))
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
}

fn read(path: impl AsRef<Path>) -> String {
    let path = path.as_ref();
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn run_honours_a_fully_pinned_scenario_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = pickpack_cmd()
        .args(["run", "--scenario"])
        .arg("object=pickle,pick=single,angle=90,config=concentric")
        .args(["--reps", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_success(&output);

    let trials = read(out.join("trials.csv"));
    let mut lines = trials.lines();
    assert!(lines.next().unwrap().starts_with("scenario,"));
    assert_eq!(lines.clone().count(), 1, "expected exactly one data row");
    assert!(lines.next().unwrap().starts_with("pickle-single-90-concentric,"));

    let json: serde_json::Value = serde_json::from_str(&read(out.join("trials.json"))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1);
    assert!(out.join("kpi.csv").exists());
    assert!(out.join("kpi.json").exists());
}

#[test]
fn run_rejects_bad_input_without_writing_anything() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    // Unknown filter key.
    let output = pickpack_cmd()
        .args(["run", "--scenario", "object=tomato", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!out.exists(), "a failed run must not create the output dir");

    // Unreadable configuration.
    let config = dir.path().join("broken.toml");
    fs::write(&config, "[timing]\ndescent_speed = \"fast\"\n").unwrap();
    let output = pickpack_cmd()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!out.exists());
}

#[test]
fn run_outputs_are_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        let mut cmd = pickpack_cmd();
        cmd.args(["run", "--scenario"])
            .arg("object=lime,pick=single,angle=90")
            .args(["--reps", "2", "--out"])
            .arg(out);
        cmd
    };
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert_success(&args(&first).output().unwrap());
    assert_success(&args(&second).args(["--jobs", "3"]).output().unwrap());

    for name in ["trials.csv", "trials.json", "kpi.csv", "kpi.json"] {
        assert_eq!(
            fs::read(first.join(name)).unwrap(),
            fs::read(second.join(name)).unwrap(),
            "{name} differs between identical runs",
        );
    }
}

#[test]
fn run_seed_flag_reaches_the_trial_streams() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &Path| {
        let mut cmd = pickpack_cmd();
        cmd.args(["run", "--scenario"])
            .arg("object=pickle,pick=multi,angle=90,config=parallel")
            .args(["--reps", "1", "--seed", seed, "--out"])
            .arg(out);
        let output = cmd.output().unwrap();
        assert_success(&output);
        read(out.join("trials.csv"))
    };
    let a = run("2024", &dir.path().join("a"));
    let b = run("99", &dir.path().join("b"));
    assert_ne!(a, b, "changing the master seed must change the trial seeds");
}

#[test]
fn environment_variables_stand_in_for_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = pickpack_cmd()
        .arg("run")
        .env("PICKPACK_SCENARIO", "object=pickle,pick=single,angle=90")
        .env("PICKPACK_REPS", "1")
        .env("PICKPACK_OUT", &out)
        .output()
        .unwrap();
    assert_success(&output);
    let trials = read(out.join("trials.csv"));
    // Two finger configurations survive the filter, one repetition each.
    assert_eq!(trials.lines().count(), 3);
}

#[test]
fn kpi_reproduces_the_campaign_headline_from_a_trials_file() {
    let dir = tempfile::tempdir().unwrap();
    let trials_path = dir.path().join("campaign.csv");
    let mut file = fs::File::create(&trials_path).unwrap();
    executor::write_trials_csv(&mut file, &reference::campaign_records()).unwrap();
    drop(file);

    let out = dir.path().join("out");
    let output = pickpack_cmd()
        .args(["kpi", "--trials"])
        .arg(&trials_path)
        .arg("--human")
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_success(&output);

    let kpi = read(out.join("kpi.csv"));
    assert!(kpi.contains("UPH,65.5"), "kpi.csv:\n{kpi}");
    assert!(kpi.contains("TPH,47.9"));
    assert!(kpi.contains("Total time [s],3079.76"));

    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("65.5"), "stdout:\n{stdout}");

    let comparison = read(out.join("comparison.csv"));
    assert!(comparison.starts_with("robot_multi_over_single_uph"));
    assert!(comparison.contains("1.30"), "comparison.csv:\n{comparison}");
    assert!(comparison.contains("1.70"));
    assert!(comparison.contains("0.68"));
}
