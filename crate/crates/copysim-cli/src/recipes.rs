//! Ready-to-run reproduction recipes, one per acceptance check, with the
//! expected outcome and tolerance spelled out.

use serde_json::json;

use crate::config::{Experiment, RunConfig};

pub struct Recipe {
    pub name: &'static str,
    pub expected: &'static str,
    pub config: RunConfig,
}

impl Recipe {
    /// The equivalent shell command.
    pub fn command(&self) -> String {
        let mut parts = vec![format!("copysim {}", self.config.experiment.name())];
        for (key, value) in &self.config.parameters {
            parts.push(format!("--set '{key}={value}'"));
        }
        if self.config.seed != 0 {
            parts.push(format!("--seed {}", self.config.seed));
        }
        parts.push("--out runs".into());
        parts.join(" ")
    }
}

fn recipe(
    name: &'static str,
    expected: &'static str,
    experiment: Experiment,
    parameters: serde_json::Value,
    seed: u64,
) -> Recipe {
    let mut config = RunConfig::new(experiment);
    config.parameters = parameters
        .as_object()
        .cloned()
        .expect("recipe parameters are an object");
    config.seed = seed;
    Recipe {
        name,
        expected,
        config,
    }
}

pub fn list_recipes() -> Vec<Recipe> {
    vec![
        recipe(
            "unsharp-frontier",
            "frontier.csv: feasible column flips exactly where epsilon^2 + delta^2 \
             crosses 1; min_eigenvalue_of_M_pp >= -1e-9 on the feasible side",
            Experiment::PovmFrontier,
            json!({"grid": 100, "family": "unsharp"}),
            0,
        ),
        recipe(
            "faulty-frontier",
            "frontier.csv: feasible column matches 2 - lambda - eta >= sqrt(lambda^2 + eta^2); \
             symmetric slice flips at lambda = 2 - sqrt(2) within 1e-9",
            Experiment::PovmFrontier,
            json!({"grid": 100, "family": "faulty"}),
            0,
        ),
        recipe(
            "collapse-born-weights",
            "summary.json: final_pointer_weights equal [0.64, 0.36] within 1e-6 \
             (|c|^2 and |d|^2 of the 0.8/0.6 superposition)",
            Experiment::CollapseEvolve,
            json!({"n_copies": 3, "alpha": 1.0,
                   "initial": {"amplitudes": [[0.8, 0.0], [0.6, 0.0]]}}),
            0,
        ),
        recipe(
            "branching-ratio-mc",
            "histogram.csv: pointer 1 frequency = 0.25 within 3 sigma ~ 0.013 \
             at 1e4 trajectories (one minus entry among four copies)",
            Experiment::CollapseJump,
            json!({"n_copies": 4, "alpha": 1.0, "n_traj": 10000,
                   "initial": {"label": "-+++"}}),
            42,
        ),
        recipe(
            "structured-six-qubits",
            "timeseries.csv: N = 6 structured run completes with trace column \
             within 1e-6 of one (the dense superoperator refuses at this size)",
            Experiment::CollapseEvolve,
            json!({"n_copies": 6, "alpha": 1.0, "engine": "structured",
                   "t_final": 3.0, "dt": 0.002}),
            0,
        ),
        recipe(
            "bath-reduction",
            "compare.csv: rate_rel_error decreases monotonically over 50/100/200/400 \
             levels and ends below 0.05; branch_abs_error below 0.05",
            Experiment::BathCompare,
            json!({}),
            0,
        ),
        recipe(
            "sequential-bound",
            "seq_bound.csv: p_plus - p_minus equals bound = sqrt(1 - epsilon^2) \
             within 1e-10 for the |+> initial state at every epsilon",
            Experiment::SeqBound,
            json!({"mode": "single", "steps": 101}),
            0,
        ),
        recipe(
            "sequential-many-copy-violation",
            "seq_many.csv: zero-delay two-copy readout gives |p_plus - p_minus| = 1, \
             violated = true for every epsilon > 0",
            Experiment::SeqBound,
            json!({"mode": "many", "n_copies": 2, "delay": 0.0, "steps": 21}),
            0,
        ),
        recipe(
            "born-harmonics",
            "spectrum.csv: power confined to Omega = 0, 2w, 4w above a 1e-8 \
             relative floor for xi = {1: 0.9, 2: 0.1}",
            Experiment::BornSpectrum,
            json!({"signal": "harmonics", "xi": {"1": 0.9, "2": 0.1},
                   "omega": 1.0, "periods": 16, "samples": 4096, "pad_factor": 1}),
            0,
        ),
        recipe(
            "born-damped-pair",
            "peaks.json: lines near Omega = 1 and 2 with half_width 0.1 and 0.2 \
             within 10%",
            Experiment::BornSpectrum,
            json!({"signal": "damped",
                   "components": [
                       {"amplitude": 1.0, "tau": 10.0, "frequency": 1.0},
                       {"amplitude": 0.1, "tau": 5.0, "frequency": 2.0}],
                   "t_max": 60.0, "dt": 0.01, "pad_factor": 16}),
            0,
        ),
        recipe(
            "sorkin-deviation",
            "summary.json: single_copy_combination = 0 within 1e-12; \
             two_copy_combination = 4 epsilon = 0.4 within 1e-10, matching the \
             closed form",
            Experiment::Sorkin,
            json!({"epsilon": 0.1, "copies": 2}),
            0,
        ),
        recipe(
            "determinism",
            "run this twice with the same seed: the data-file digests in \
             manifest.json are byte-identical across runs",
            Experiment::CollapseJump,
            json!({"n_copies": 2, "alpha": 1.0, "n_traj": 2000}),
            7,
        ),
    ]
}

pub fn render_recipes() -> String {
    let mut out = String::new();
    out.push_str("Reproduction recipes (one per acceptance check):\n\n");
    for r in list_recipes() {
        out.push_str(&format!("* {}\n", r.name));
        out.push_str(&format!("  expect: {}\n", r.expected));
        out.push_str(&format!("  run:    {}\n\n", r.command()));
    }
    out
}
