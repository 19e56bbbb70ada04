//! Experiment dispatch: executes a validated run configuration, writes the
//! CSV/JSON outputs into a digest-named directory, and returns the manifest.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use copysim::copyspace::{product_state, BasisLabel, CollapseModel, CopySpace};
use copysim::dynamics::{
    bath_evolve, evolve_dense_with_snapshots, evolve_structured_with_snapshots, final_state,
    fit_exponential_rate, jump_trajectories, BathModel, EvolutionResult, LindbladModel,
};
use copysim::exec::ExecMode;
use copysim::experiments::{
    jittered_signal, sequential_bound, sequential_many_copy, sequential_single_copy,
    sorkin_functional, spectrum_padded, two_copy_closed_form, HarmonicModel, SorkinCopies,
    Spectrum, ThreeStateConfig, Window,
};
use copysim::povm::{
    construct_joint_unsharp, faulty_feasible, faulty_residual_effect, unsharp_effect_matrix,
    unsharp_feasible, FaultyPair, UnsharpPair,
};
use copysim::qmath::{min_eigenvalue, DensityMatrix, Ket};

use crate::config::{
    BathCompareParams, BornSpectrumParams, CollapseEvolveParams, CollapseJumpParams, Engine,
    ExperimentParams, FrontierFamily, InitialSpec, PovmFrontierParams, RunConfig, SeqBoundParams,
    SeqMode, SignalKind, SorkinParams, WindowKind,
};
use crate::output::{Cell, RunWriter};

/// Echo of the run: inputs, artifact version, timing, and output digests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub version: String,
    pub started_utc: String,
    pub finished_utc: String,
    pub outputs: Vec<OutputDigest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDigest {
    pub name: String,
    pub sha256: String,
}

/// Execute the configuration and return the manifest plus the directory the
/// outputs landed in. One directory per run, named by the config digest.
pub fn run(config: &RunConfig) -> Result<(RunManifest, PathBuf)> {
    let params = config.validated()?;
    let base = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs"));
    let dir = base.join(format!(
        "{}-{}",
        config.experiment.name(),
        &config.digest()[..12]
    ));
    let started_utc = chrono::Utc::now().to_rfc3339();
    let mut writer = RunWriter::create(&dir)?;

    match &params {
        ExperimentParams::PovmFrontier(p) => run_povm_frontier(&mut writer, p)?,
        ExperimentParams::CollapseEvolve(p) => run_collapse_evolve(&mut writer, p)?,
        ExperimentParams::CollapseJump(p) => run_collapse_jump(&mut writer, p, config.seed)?,
        ExperimentParams::BathCompare(p) => run_bath_compare(&mut writer, p)?,
        ExperimentParams::SeqBound(p) => run_seq_bound(&mut writer, p)?,
        ExperimentParams::BornSpectrum(p) => run_born_spectrum(&mut writer, p)?,
        ExperimentParams::Sorkin(p) => run_sorkin(&mut writer, p)?,
    }

    let manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_utc,
        finished_utc: chrono::Utc::now().to_rfc3339(),
        outputs: writer
            .outputs()
            .iter()
            .map(|(name, sha256)| OutputDigest {
                name: name.clone(),
                sha256: sha256.clone(),
            })
            .collect(),
    };
    let manifest_text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("manifest.json"), manifest_text + "\n")
        .with_context(|| format!("writing manifest into {}", dir.display()))?;
    Ok((manifest, dir))
}

fn grid_01(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn run_povm_frontier(writer: &mut RunWriter, params: &PovmFrontierParams) -> Result<()> {
    let grid = grid_01(params.grid);
    let mut feasible_count = 0usize;
    match params.family {
        FrontierFamily::Unsharp => {
            let mut rows = Vec::with_capacity(grid.len() * grid.len());
            for &epsilon in &grid {
                for &delta in &grid {
                    let pair = UnsharpPair::new(epsilon, delta).map_err(map_lib)?;
                    let feasible = unsharp_feasible(pair);
                    let min =
                        min_eigenvalue(&unsharp_effect_matrix(pair, 1, 1)).map_err(map_lib)?;
                    // Feasible pairs must actually construct.
                    if feasible {
                        construct_joint_unsharp(pair).map_err(map_lib)?;
                        feasible_count += 1;
                    }
                    rows.push(vec![
                        Cell::from(epsilon),
                        Cell::from(delta),
                        Cell::from(feasible),
                        Cell::from(min),
                    ]);
                }
            }
            writer.write_csv(
                "frontier.csv",
                &["epsilon", "delta", "feasible", "min_eigenvalue_of_M_pp"],
                rows,
            )?;
        }
        FrontierFamily::Faulty => {
            let mut rows = Vec::with_capacity(grid.len() * grid.len());
            for &lambda in &grid {
                for &eta in &grid {
                    let pair = FaultyPair::new(lambda, eta).map_err(map_lib)?;
                    let feasible = faulty_feasible(pair);
                    if feasible {
                        feasible_count += 1;
                    }
                    let min = min_eigenvalue(&faulty_residual_effect(pair)).map_err(map_lib)?;
                    rows.push(vec![
                        Cell::from(lambda),
                        Cell::from(eta),
                        Cell::from(feasible),
                        Cell::from(min),
                    ]);
                }
            }
            writer.write_csv(
                "frontier.csv",
                &["lambda", "eta", "feasible", "min_eigenvalue_of_M_mm"],
                rows,
            )?;
        }
    }
    writer.write_json(
        "summary.json",
        &serde_json::json!({
            "family": params.family,
            "grid": params.grid,
            "feasible_points": feasible_count,
            "total_points": params.grid * params.grid,
        }),
    )
}

fn build_collapse_model(n_copies: usize, local_dim: usize, alpha: f64) -> Result<CollapseModel> {
    if local_dim == 2 {
        CollapseModel::qubit(n_copies, alpha).map_err(map_lib)
    } else {
        CollapseModel::qudit(n_copies, local_dim, alpha).map_err(map_lib)
    }
}

fn initial_density(spec: &InitialSpec, space: &CopySpace) -> Result<DensityMatrix> {
    if let Some(label_text) = &spec.label {
        let label = if space.local_dim() == 2 && label_text.chars().all(|c| c == '+' || c == '-') {
            BasisLabel::from_signs(label_text, space).map_err(map_lib)?
        } else {
            let symbols: Vec<u8> = label_text
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| anyhow!("label characters must be digits or +/-"))
                })
                .collect::<Result<_>>()?;
            BasisLabel::new(symbols, space).map_err(map_lib)?
        };
        let ket = Ket::basis(space.total_dim(), label.flat_index(space)).map_err(map_lib)?;
        return DensityMatrix::pure(&ket).map_err(map_lib);
    }
    let amplitudes: Vec<Complex64> = match &spec.amplitudes {
        Some(pairs) => pairs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
        None => {
            // Default: balanced superposition of the first two levels.
            let mut v = vec![Complex64::new(0.0, 0.0); space.local_dim()];
            v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            v[1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            v
        }
    };
    let local = DensityMatrix::pure(&Ket::normalized(amplitudes).map_err(map_lib)?).map_err(map_lib)?;
    product_state(&local, space).map_err(map_lib)
}

fn timeseries_rows(result: &EvolutionResult, space: &CopySpace) -> (Vec<&'static str>, Vec<Vec<Cell>>) {
    let d = space.local_dim();
    let pointer_cols: Vec<String> = (0..d).map(|m| format!("pointer_{m}")).collect();
    let mut header: Vec<&'static str> = vec!["time"];
    // Leak the small header strings: the writer wants &str and runs once.
    for name in &pointer_cols {
        header.push(Box::leak(name.clone().into_boxed_str()));
    }
    header.push("coherence_extremes");
    header.push("trace");

    let p0 = space.pointer_product_index(0);
    let p_last = space.pointer_product_index(d - 1);
    let pops = result.pointer_population_series(space);
    let rows = result
        .times
        .iter()
        .zip(result.states.iter())
        .zip(pops.iter())
        .map(|((&t, state), pointer_pops)| {
            let mut row = vec![Cell::from(t)];
            for &p in pointer_pops {
                row.push(Cell::from(p));
            }
            row.push(Cell::from(state.matrix().get(p0, p_last).norm()));
            row.push(Cell::from(state.matrix().trace().re));
            row
        })
        .collect();
    (header, rows)
}

fn run_collapse_evolve(writer: &mut RunWriter, params: &CollapseEvolveParams) -> Result<()> {
    let model = build_collapse_model(params.n_copies, params.local_dim, params.alpha)?;
    let space = *model.space();
    let rho0 = initial_density(&params.initial, &space)?;
    let rate = model.total_decay_rate();
    let t_final = params.t_final.unwrap_or(6.0 / rate);
    let dt = params.dt.unwrap_or(0.02 / rate);

    let result = match params.engine {
        Engine::Structured => {
            evolve_structured_with_snapshots(&model, None, &rho0, t_final, dt, 513)
                .map_err(map_lib)?
        }
        Engine::Dense => {
            let dense = LindbladModel::from_collapse(&model, None).map_err(map_lib)?;
            evolve_dense_with_snapshots(&dense, &rho0, t_final, dt, 513).map_err(map_lib)?
        }
    };

    let (header, rows) = timeseries_rows(&result, &space);
    writer.write_csv("timeseries.csv", &header, rows)?;

    let settled = final_state(&model, None, &rho0).map_err(map_lib)?;
    writer.write_json(
        "summary.json",
        &serde_json::json!({
            "trace_drift": result.trace_drift,
            "final_pointer_weights": settled.pointer_weights,
            "settled_at": settled.settled_at,
            "total_decay_rate": rate,
            "t_final": t_final,
            "dt": dt,
        }),
    )
}

fn run_collapse_jump(writer: &mut RunWriter, params: &CollapseJumpParams, seed: u64) -> Result<()> {
    let model = build_collapse_model(params.n_copies, 2, params.alpha)?;
    let space = *model.space();
    let rate = model.total_decay_rate();
    let t_final = params.t_final.unwrap_or(6.0 / rate);
    let dt = params.dt.unwrap_or(0.02 / rate);

    // Pure initial state for the unraveling.
    let psi0 = match (&params.initial.label, &params.initial.amplitudes) {
        (Some(_), _) => {
            let rho = initial_density(&params.initial, &space)?;
            // A basis label: recover the basis ket index from the density.
            let idx = (0..space.total_dim())
                .find(|&i| rho.population(i) > 0.5)
                .ok_or_else(|| anyhow!("label produced no basis state"))?;
            Ket::basis(space.total_dim(), idx).map_err(map_lib)?
        }
        (None, amps) => {
            let local: Vec<Complex64> = match amps {
                Some(pairs) => pairs
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect(),
                None => vec![
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
            };
            let mut full = vec![Complex64::new(1.0, 0.0)];
            for _ in 0..space.n_copies() {
                let mut next = Vec::with_capacity(full.len() * 2);
                for &a in &full {
                    for &l in &local {
                        next.push(a * l);
                    }
                }
                full = next;
            }
            Ket::normalized(full).map_err(map_lib)?
        }
    };

    let result = jump_trajectories(
        &model,
        None,
        &psi0,
        t_final,
        dt,
        params.n_traj,
        seed,
        ExecMode::default(),
    )
    .map_err(map_lib)?;

    let histogram_rows: Vec<Vec<Cell>> = (0..space.local_dim())
        .map(|m| {
            vec![
                Cell::from(m),
                Cell::from(result.histogram[m]),
                Cell::from(result.frequency(m)),
                Cell::from(result.frequency_sigma(m)),
            ]
        })
        .collect();
    writer.write_csv(
        "histogram.csv",
        &["pointer", "count", "frequency", "sigma"],
        histogram_rows,
    )?;

    let mut header: Vec<&'static str> = vec!["time"];
    for m in 0..space.local_dim() {
        header.push(Box::leak(format!("mean_pointer_{m}").into_boxed_str()));
    }
    let population_rows: Vec<Vec<Cell>> = result
        .times
        .iter()
        .zip(&result.mean_pointer_populations)
        .map(|(&t, pops)| {
            let mut row = vec![Cell::from(t)];
            for &p in pops {
                row.push(Cell::from(p));
            }
            row
        })
        .collect();
    writer.write_csv("populations.csv", &header, population_rows)?;

    writer.write_json(
        "summary.json",
        &serde_json::json!({
            "n_trajectories": result.n_trajectories,
            "unresolved": result.unresolved,
            "seed": result.seed,
            "t_final": t_final,
            "dt": dt,
        }),
    )
}

fn run_bath_compare(writer: &mut RunWriter, params: &BathCompareParams) -> Result<()> {
    let space = CopySpace::qubits(params.n_copies).map_err(map_lib)?;
    let label = BasisLabel::from_signs(&params.initial_label, &space).map_err(map_lib)?;
    let collapse = CollapseModel::qubit(params.n_copies, params.alpha).map_err(map_lib)?;
    let gamma = collapse.total_decay_rate();
    let fit_start = params.fit_start_lifetimes / gamma;

    // Lindblad reference: exact exponential survival plus settled branching.
    let dense = LindbladModel::from_collapse(&collapse, None).map_err(map_lib)?;
    let rho0 = DensityMatrix::pure(
        &Ket::basis(space.total_dim(), label.flat_index(&space)).map_err(map_lib)?,
    )
    .map_err(map_lib)?;
    let reference =
        evolve_dense_with_snapshots(&dense, &rho0, params.t_final, 0.02 / gamma, 513)
            .map_err(map_lib)?;
    let survival_ref = reference.population_series(label.flat_index(&space));
    let rate_ref = fit_exponential_rate(&reference.times, &survival_ref, fit_start, params.t_final)
        .ok_or_else(|| anyhow!("reference fit failed"))?;
    let weights = final_state(&collapse, None, &rho0).map_err(map_lib)?.pointer_weights;
    let branch_ref = weights[1] / (weights[0] + weights[1]);

    let mut compare_rows = Vec::new();
    let mut survival_columns: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for &n_levels in &params.levels {
        let bath = BathModel::from_rate(space, params.alpha, params.e_c, n_levels, params.e_max)
            .map_err(map_lib)?;
        let run = bath_evolve(&bath, &label, params.t_final, bath.suggested_dt()).map_err(map_lib)?;
        let fitted = fit_exponential_rate(&run.times, &run.survival, fit_start, params.t_final)
            .ok_or_else(|| anyhow!("bath fit failed at {n_levels} levels"))?;
        let branch = run.branching_fraction(1);
        compare_rows.push(vec![
            Cell::from(n_levels),
            Cell::from(fitted),
            Cell::from(rate_ref),
            Cell::from((fitted - rate_ref).abs() / rate_ref),
            Cell::from(branch),
            Cell::from(branch_ref),
            Cell::from((branch - branch_ref).abs()),
        ]);
        survival_columns.push((n_levels, run.times.clone(), run.survival.clone()));
    }
    writer.write_csv(
        "compare.csv",
        &[
            "n_levels",
            "fitted_rate",
            "reference_rate",
            "rate_rel_error",
            "branch_minus",
            "reference_branch_minus",
            "branch_abs_error",
        ],
        compare_rows,
    )?;

    // All baths share the snapshot grid (the step depends only on the band).
    let mut header: Vec<&'static str> = vec!["time"];
    for (n_levels, _, _) in &survival_columns {
        header.push(Box::leak(format!("survival_{n_levels}").into_boxed_str()));
    }
    header.push("survival_lindblad");
    let times = &survival_columns[0].1;
    let rows: Vec<Vec<Cell>> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![Cell::from(t)];
            for (_, _, survival) in &survival_columns {
                row.push(Cell::from(survival[i]));
            }
            row.push(Cell::from((-gamma * t).exp()));
            row
        })
        .collect();
    writer.write_csv("survival.csv", &header, rows)?;

    writer.write_json(
        "summary.json",
        &serde_json::json!({
            "total_rate": gamma,
            "reference_rate": rate_ref,
            "reference_branch_minus": branch_ref,
            "fit_window": [fit_start, params.t_final],
        }),
    )
}

fn run_seq_bound(writer: &mut RunWriter, params: &SeqBoundParams) -> Result<()> {
    let epsilons: Vec<f64> = if params.steps == 1 {
        vec![params.epsilon_min]
    } else {
        (0..params.steps)
            .map(|i| {
                params.epsilon_min
                    + (params.epsilon_max - params.epsilon_min) * i as f64
                        / (params.steps - 1) as f64
            })
            .collect()
    };
    match params.mode {
        SeqMode::Single => {
            let rho0 = DensityMatrix::pure(&Ket::basis(2, 0).map_err(map_lib)?).map_err(map_lib)?;
            let mut max_diff: f64 = 0.0;
            let rows: Vec<Vec<Cell>> = epsilons
                .iter()
                .map(|&epsilon| -> Result<Vec<Cell>> {
                    let bound = sequential_bound(epsilon).map_err(map_lib)?;
                    let (p_plus, p_minus) =
                        sequential_single_copy(epsilon, &rho0).map_err(map_lib)?;
                    max_diff = max_diff.max((p_plus - p_minus).abs());
                    Ok(vec![
                        Cell::from(epsilon),
                        Cell::from(bound),
                        Cell::from(p_plus),
                        Cell::from(p_minus),
                    ])
                })
                .collect::<Result<_>>()?;
            writer.write_csv(
                "seq_bound.csv",
                &["epsilon", "bound", "p_plus", "p_minus"],
                rows,
            )?;
            writer.write_json(
                "summary.json",
                &serde_json::json!({
                    "mode": "single",
                    "max_outcome_difference": max_diff,
                    "violated_any": false,
                }),
            )
        }
        SeqMode::Many => {
            let mut violated_any = false;
            let mut max_diff: f64 = 0.0;
            let rows: Vec<Vec<Cell>> = epsilons
                .iter()
                .map(|&epsilon| -> Result<Vec<Cell>> {
                    let out =
                        sequential_many_copy(epsilon, params.n_copies, params.alpha, params.delay)
                            .map_err(map_lib)?;
                    violated_any |= out.violated;
                    max_diff = max_diff.max((out.p_plus - out.p_minus).abs());
                    Ok(vec![
                        Cell::from(epsilon),
                        Cell::from(out.bound),
                        Cell::from(out.p_plus),
                        Cell::from(out.p_minus),
                        Cell::from(out.violated),
                    ])
                })
                .collect::<Result<_>>()?;
            writer.write_csv(
                "seq_many.csv",
                &["epsilon", "bound", "p_plus", "p_minus", "violated"],
                rows,
            )?;
            writer.write_json(
                "summary.json",
                &serde_json::json!({
                    "mode": "many",
                    "n_copies": params.n_copies,
                    "delay": params.delay,
                    "max_outcome_difference": max_diff,
                    "violated_any": violated_any,
                }),
            )
        }
    }
}

fn write_spectrum_files(
    writer: &mut RunWriter,
    times: &[f64],
    signal: &[f64],
    spectrum: &Spectrum,
    peaks_json: serde_json::Value,
) -> Result<()> {
    let series_rows: Vec<Vec<Cell>> = times
        .iter()
        .zip(signal)
        .map(|(&t, &v)| vec![Cell::from(t), Cell::from(v)])
        .collect();
    writer.write_csv("timeseries.csv", &["time", "value"], series_rows)?;

    let spec_rows: Vec<Vec<Cell>> = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.values)
        .map(|(&omega, z)| {
            vec![
                Cell::from(omega),
                Cell::from(z.re),
                Cell::from(z.im),
                Cell::from(z.norm()),
            ]
        })
        .collect();
    writer.write_csv("spectrum.csv", &["omega", "re", "im", "abs"], spec_rows)?;
    writer.write_json("peaks.json", &peaks_json)
}

fn run_born_spectrum(writer: &mut RunWriter, params: &BornSpectrumParams) -> Result<()> {
    let window = match params.window {
        WindowKind::Rectangular => Window::Rectangular,
        WindowKind::Hann => Window::Hann,
    };
    match params.signal {
        SignalKind::Harmonics => {
            let model = HarmonicModel::new(params.omega, params.xi_numeric(), params.jitter_sigma)
                .map_err(map_lib)?;
            let period = std::f64::consts::PI / params.omega;
            let t_max = params.periods as f64 * period;
            let dt = t_max / params.samples as f64;
            let times: Vec<f64> = (0..params.samples).map(|k| k as f64 * dt).collect();
            let signal = jittered_signal(&model, &times).map_err(map_lib)?;
            let spec = spectrum_padded(&signal, dt, window, params.pad_factor).map_err(map_lib)?;
            let peaks: Vec<_> = spec
                .peaks(1e-6)
                .into_iter()
                .map(|p| {
                    serde_json::json!({
                        "frequency": p.frequency,
                        "amplitude": p.amplitude,
                        "harmonic_index": p.frequency / (2.0 * params.omega),
                    })
                })
                .collect();
            write_spectrum_files(
                writer,
                &times,
                &signal,
                &spec,
                serde_json::json!({"peaks": peaks, "period_mean": model.period_mean()}),
            )
        }
        SignalKind::Damped => {
            let n = (params.t_max / params.dt).round() as usize;
            let times: Vec<f64> = (0..n).map(|k| k as f64 * params.dt).collect();
            let signal: Vec<f64> = times
                .iter()
                .map(|&t| {
                    params
                        .components
                        .iter()
                        .map(|c| c.amplitude * (-t / c.tau).exp() * (c.frequency * t).cos())
                        .sum()
                })
                .collect();
            let spec =
                spectrum_padded(&signal, params.dt, window, params.pad_factor).map_err(map_lib)?;
            let peaks: Vec<_> = spec
                .real_part_peaks(0.02)
                .into_iter()
                .map(|p| {
                    serde_json::json!({
                        "frequency": p.frequency,
                        "amplitude": p.amplitude,
                        "half_width": spec.lorentzian_half_width(p.index),
                    })
                })
                .collect();
            write_spectrum_files(
                writer,
                &times,
                &signal,
                &spec,
                serde_json::json!({ "peaks": peaks }),
            )
        }
    }
}

fn run_sorkin(writer: &mut RunWriter, params: &SorkinParams) -> Result<()> {
    let amplitudes = [
        Complex64::new(params.amplitudes[0][0], params.amplitudes[0][1]),
        Complex64::new(params.amplitudes[1][0], params.amplitudes[1][1]),
        Complex64::new(params.amplitudes[2][0], params.amplitudes[2][1]),
    ];
    let config = ThreeStateConfig::new(amplitudes, params.epsilon).map_err(map_lib)?;
    let single = sorkin_functional(&config, SorkinCopies::One);
    let two = sorkin_functional(&config, SorkinCopies::Two);
    let closed = two_copy_closed_form(&config);

    // Per-observable expectations under both readout rules.
    let labels = ["O_1", "O_2", "O_3", "O_12", "O_13", "O_23", "O_123"];
    let observables = copysim::experiments::observables();
    let psi = amplitudes;
    let rows: Vec<Vec<Cell>> = observables
        .iter()
        .zip(labels)
        .map(|(o, label)| {
            let mv = o.matvec(&psi);
            let single_value: f64 = psi
                .iter()
                .zip(&mv)
                .map(|(&a, &b)| (a.conj() * b).re)
                .sum();
            let two_copy_value = 2.0 * single_value + params.epsilon * single_value * single_value;
            vec![
                Cell::from(label),
                Cell::from(single_value),
                Cell::from(two_copy_value),
            ]
        })
        .collect();
    writer.write_csv(
        "expectations.csv",
        &["observable", "single_copy", "two_copy"],
        rows,
    )?;

    writer.write_json(
        "summary.json",
        &serde_json::json!({
            "single_copy_combination": single,
            "two_copy_combination": two,
            "two_copy_closed_form": closed,
            "direct_vs_closed_form": (two - closed).abs(),
            "requested_copies": params.copies,
            "combination_for_requested_copies": if params.copies == 1 { single } else { two },
            "epsilon": params.epsilon,
        }),
    )
}

/// Library errors carried into the CLI error chain.
fn map_lib(err: copysim::Error) -> anyhow::Error {
    anyhow!("{err}")
}

/// Shared helper for tests: load a manifest back.
pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}
