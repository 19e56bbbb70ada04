//! End-to-end checks of the run pipeline: output contracts, error paths, and
//! the compiled binary's surface.

use std::process::Command;

use copysim_cli::config::{Experiment, RunConfig};
use copysim_cli::runner;

fn run_into_temp(config: &mut RunConfig) -> (runner::RunManifest, std::path::PathBuf, tempfile::TempDir) {
    let dir = tempfile::tempdir().expect("tempdir");
    config.output_dir = Some(dir.path().to_path_buf());
    let (manifest, run_dir) = runner::run(config).expect("run succeeds");
    (manifest, run_dir, dir)
}

#[test]
fn seq_bound_csv_contract() {
    let mut config = RunConfig::new(Experiment::SeqBound);
    config
        .apply_overrides(&["steps=11".into()])
        .unwrap();
    let (manifest, run_dir, _guard) = run_into_temp(&mut config);
    assert!(manifest.outputs.iter().any(|o| o.name == "seq_bound.csv"));

    let text = std::fs::read_to_string(run_dir.join("seq_bound.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,bound,p_plus,p_minus");
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (epsilon, bound, p_plus, p_minus) = (cells[0], cells[1], cells[2], cells[3]);
        assert!((bound - (1.0 - epsilon * epsilon).sqrt()).abs() < 1e-12);
        // |+> initial state saturates the bound.
        assert!(((p_plus - p_minus).abs() - bound).abs() < 1e-10);
    }
}

#[test]
fn povm_frontier_csv_contract() {
    let mut config = RunConfig::new(Experiment::PovmFrontier);
    config.apply_overrides(&["grid=20".into()]).unwrap();
    let (_, run_dir, _guard) = run_into_temp(&mut config);
    let text = std::fs::read_to_string(run_dir.join("frontier.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,delta,feasible,min_eigenvalue_of_M_pp"
    );
    let mut rows = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let epsilon: f64 = cells[0].parse().unwrap();
        let delta: f64 = cells[1].parse().unwrap();
        let feasible: bool = cells[2].parse().unwrap();
        let min_eig: f64 = cells[3].parse().unwrap();
        assert_eq!(feasible, epsilon * epsilon + delta * delta <= 1.0);
        // The reported eigenvalue is the frontier margin: its sign tracks
        // feasibility up to the positivity floor.
        if feasible {
            assert!(min_eig >= -1e-9);
        } else {
            assert!(min_eig < 1e-9);
        }
        rows += 1;
    }
    assert_eq!(rows, 400);
}

#[test]
fn faulty_frontier_uses_residual_columns() {
    let mut config = RunConfig::new(Experiment::PovmFrontier);
    config
        .apply_overrides(&["grid=15".into(), "family=\"faulty\"".into()])
        .unwrap();
    let (_, run_dir, _guard) = run_into_temp(&mut config);
    let text = std::fs::read_to_string(run_dir.join("frontier.csv")).unwrap();
    assert!(text.starts_with("lambda,eta,feasible,min_eigenvalue_of_M_mm"));
}

#[test]
fn born_spectrum_damped_pair_emits_widths() {
    // Combined pair: both lines present, the dominant one with a clean width.
    let mut config = RunConfig::new(Experiment::BornSpectrum);
    config
        .apply_overrides(&["signal=\"damped\"".into()])
        .unwrap();
    let (manifest, run_dir, _guard) = run_into_temp(&mut config);
    for name in ["timeseries.csv", "spectrum.csv", "peaks.json"] {
        assert!(manifest.outputs.iter().any(|o| o.name == name), "{name}");
    }
    let peaks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("peaks.json")).unwrap())
            .unwrap();
    let list = peaks["peaks"].as_array().unwrap();
    let near = |target: f64| {
        list.iter()
            .find(|p| (p["frequency"].as_f64().unwrap() - target).abs() < 0.05)
            .unwrap_or_else(|| panic!("no peak near {target}"))
    };
    let width_main = near(1.0)["half_width"].as_f64().unwrap();
    assert!((width_main - 0.1).abs() / 0.1 < 0.1, "width {width_main}");
    near(2.0); // resolvable secondary line

    // The secondary line's width is measured on its own run, away from the
    // dominant line's tail.
    let mut config = RunConfig::new(Experiment::BornSpectrum);
    config
        .apply_overrides(&[
            "signal=\"damped\"".into(),
            r#"components=[{"amplitude":0.1,"tau":5.0,"frequency":2.0}]"#.into(),
        ])
        .unwrap();
    let (_, run_dir, _guard2) = run_into_temp(&mut config);
    let peaks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("peaks.json")).unwrap())
            .unwrap();
    let list = peaks["peaks"].as_array().unwrap();
    let second = list
        .iter()
        .find(|p| (p["frequency"].as_f64().unwrap() - 2.0).abs() < 0.05)
        .expect("isolated secondary line");
    let width_second = second["half_width"].as_f64().unwrap();
    assert!(
        (width_second - 0.2).abs() / 0.2 < 0.1,
        "width {width_second}"
    );
}

#[test]
fn sorkin_summary_carries_both_routes() {
    let mut config = RunConfig::new(Experiment::Sorkin);
    config.apply_overrides(&["epsilon=0.25".into()]).unwrap();
    let (_, run_dir, _guard) = run_into_temp(&mut config);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("summary.json")).unwrap())
            .unwrap();
    assert!(summary["single_copy_combination"].as_f64().unwrap().abs() < 1e-12);
    let two = summary["two_copy_combination"].as_f64().unwrap();
    assert!((two - 1.0).abs() < 1e-10, "4 eps = 1.0, got {two}");
    assert!(summary["direct_vs_closed_form"].as_f64().unwrap() < 1e-10);
}

#[test]
fn manifest_digests_match_file_contents() {
    use sha2::{Digest, Sha256};
    let mut config = RunConfig::new(Experiment::Sorkin);
    let (manifest, run_dir, _guard) = run_into_temp(&mut config);
    assert!(!manifest.outputs.is_empty());
    for output in &manifest.outputs {
        let bytes = std::fs::read(run_dir.join(&output.name)).unwrap();
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(digest, output.sha256, "digest mismatch for {}", output.name);
    }
}

#[test]
fn binary_reports_range_errors_as_json() {
    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .args(["seq-bound", "--set", "epsilon_max=1.5"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.trim()).expect("machine-readable error");
    let message = parsed["error"]["message"].as_str().unwrap();
    assert!(message.contains("epsilon in [0, 1]"), "{message}");
}

#[test]
fn binary_lists_recipes_and_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .arg("recipes")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("povm-frontier"));
    assert!(text.contains("sorkin"));

    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .args(["bath-compare", "--defaults"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let defaults: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(defaults["levels"].as_array().unwrap().len(), 4);
}

#[test]
fn binary_runs_an_experiment_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .args([
            "collapse-evolve",
            "--set",
            "n_copies=2",
            "--set",
            "t_final=1.0",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("timeseries.csv"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{"experiment":"seq-bound","parameters":{"steps":5,"epsilon_max":0.5}}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .args(["seq-bound", "--config"])
        .arg(&config_path)
        .args(["--set", "epsilon_max=0.9", "--out"])
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    // The override wins: last epsilon row is 0.9.
    let run_dir = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.path().is_dir())
        .unwrap()
        .path();
    let text = std::fs::read_to_string(run_dir.join("seq_bound.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let epsilon: f64 = last.split(',').next().unwrap().parse().unwrap();
    assert!((epsilon - 0.9).abs() < 1e-12);

    // Mismatched subcommand is rejected.
    let out = Command::new(env!("CARGO_BIN_EXE_copysim"))
        .args(["sorkin", "--config"])
        .arg(&config_path)
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
}
