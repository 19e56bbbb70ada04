//! Run configuration: experiment selection, typed parameter validation, and
//! JSON/flag parsing with override semantics.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PovmFrontier,
    CollapseEvolve,
    CollapseJump,
    BathCompare,
    SeqBound,
    BornSpectrum,
    Sorkin,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PovmFrontier => "povm-frontier",
            Experiment::CollapseEvolve => "collapse-evolve",
            Experiment::CollapseJump => "collapse-jump",
            Experiment::BathCompare => "bath-compare",
            Experiment::SeqBound => "seq-bound",
            Experiment::BornSpectrum => "born-spectrum",
            Experiment::Sorkin => "sorkin",
        }
    }
}

/// A validated-on-demand run configuration. `parameters` stays a raw JSON
/// map so file values, `--set` overrides, and round-trips compose; the typed
/// view comes from [`RunConfig::validated`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            parameters: Map::new(),
            seed: 0,
            output_dir: None,
        }
    }

    /// Parse a config from JSON text (schema errors carry the field path).
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid run configuration")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Apply `key=value` overrides; values parse as JSON scalars first and
    /// fall back to strings.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for entry in overrides {
            let (key, raw) = entry
                .split_once('=')
                .ok_or_else(|| anyhow!("--set expects key=value, got '{entry}'"))?;
            let value = serde_json::from_str::<Value>(raw)
                .unwrap_or_else(|_| Value::String(raw.to_string()));
            self.parameters.insert(key.to_string(), value);
        }
        Ok(())
    }

    /// Digest identifying the run: sha256 of the canonical
    /// (experiment, parameters, seed) triple.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::json!({
            "experiment": self.experiment,
            "parameters": Value::Object(self.parameters.clone()),
            "seed": self.seed,
        });
        let mut hasher = Sha256::new();
        hasher.update(canonical.to_string().as_bytes());
        hex_string(&hasher.finalize())
    }

    /// Typed, range-checked view of the parameters.
    pub fn validated(&self) -> Result<ExperimentParams> {
        let value = Value::Object(self.parameters.clone());
        let params = match self.experiment {
            Experiment::PovmFrontier => {
                ExperimentParams::PovmFrontier(from_value::<PovmFrontierParams>(value)?)
            }
            Experiment::CollapseEvolve => {
                ExperimentParams::CollapseEvolve(from_value::<CollapseEvolveParams>(value)?)
            }
            Experiment::CollapseJump => {
                ExperimentParams::CollapseJump(from_value::<CollapseJumpParams>(value)?)
            }
            Experiment::BathCompare => {
                ExperimentParams::BathCompare(from_value::<BathCompareParams>(value)?)
            }
            Experiment::SeqBound => {
                ExperimentParams::SeqBound(from_value::<SeqBoundParams>(value)?)
            }
            Experiment::BornSpectrum => {
                ExperimentParams::BornSpectrum(from_value::<BornSpectrumParams>(value)?)
            }
            Experiment::Sorkin => ExperimentParams::Sorkin(from_value::<SorkinParams>(value)?),
        };
        params.validate()?;
        Ok(params)
    }
}

pub fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).context("parameter schema violation")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentParams {
    PovmFrontier(PovmFrontierParams),
    CollapseEvolve(CollapseEvolveParams),
    CollapseJump(CollapseJumpParams),
    BathCompare(BathCompareParams),
    SeqBound(SeqBoundParams),
    BornSpectrum(BornSpectrumParams),
    Sorkin(SorkinParams),
}

impl ExperimentParams {
    fn validate(&self) -> Result<()> {
        match self {
            ExperimentParams::PovmFrontier(p) => p.validate(),
            ExperimentParams::CollapseEvolve(p) => p.validate(),
            ExperimentParams::CollapseJump(p) => p.validate(),
            ExperimentParams::BathCompare(p) => p.validate(),
            ExperimentParams::SeqBound(p) => p.validate(),
            ExperimentParams::BornSpectrum(p) => p.validate(),
            ExperimentParams::Sorkin(p) => p.validate(),
        }
    }
}

fn check_range(name: &str, constraint: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        bail!("range violation: {name} must satisfy {constraint}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontierFamily {
    Unsharp,
    Faulty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PovmFrontierParams {
    pub grid: usize,
    pub family: FrontierFamily,
}

impl Default for PovmFrontierParams {
    fn default() -> Self {
        Self {
            grid: 100,
            family: FrontierFamily::Unsharp,
        }
    }
}

impl PovmFrontierParams {
    fn validate(&self) -> Result<()> {
        check_range("grid", "grid in [2, 2000]", (2..=2000).contains(&self.grid))
    }
}

/// Initial state of a collapse run: a product of identical local kets given
/// by complex amplitudes, or a single basis label such as "+-+" (qubits) or
/// "0120" (qudits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl InitialSpec {
    fn validate(&self, local_dim: usize) -> Result<()> {
        match (&self.amplitudes, &self.label) {
            (Some(_), Some(_)) => bail!("initial state: give either amplitudes or label, not both"),
            (Some(amps), None) => {
                check_range(
                    "initial.amplitudes",
                    "length = local_dim",
                    amps.len() == local_dim,
                )?;
                let norm_sq: f64 = amps.iter().map(|[re, im]| re * re + im * im).sum();
                check_range(
                    "initial.amplitudes",
                    "normalized within 1e-9",
                    (norm_sq - 1.0).abs() < 1e-9,
                )
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Dense,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseEvolveParams {
    pub n_copies: usize,
    pub local_dim: usize,
    pub alpha: f64,
    pub engine: Engine,
    pub initial: InitialSpec,
    /// Defaults to 6 collapse lifetimes when absent.
    pub t_final: Option<f64>,
    /// Defaults to 0.02 / total rate when absent.
    pub dt: Option<f64>,
}

impl Default for CollapseEvolveParams {
    fn default() -> Self {
        Self {
            n_copies: 2,
            local_dim: 2,
            alpha: 1.0,
            engine: Engine::Structured,
            initial: InitialSpec::default(),
            t_final: None,
            dt: None,
        }
    }
}

impl CollapseEvolveParams {
    fn validate(&self) -> Result<()> {
        check_range("n_copies", "n_copies >= 1", self.n_copies >= 1)?;
        check_range("local_dim", "local_dim >= 2", self.local_dim >= 2)?;
        check_range("alpha", "alpha > 0", self.alpha > 0.0 && self.alpha.is_finite())?;
        if let Some(t) = self.t_final {
            check_range("t_final", "t_final > 0", t > 0.0 && t.is_finite())?;
        }
        if let Some(dt) = self.dt {
            check_range("dt", "dt > 0", dt > 0.0 && dt.is_finite())?;
        }
        self.initial.validate(self.local_dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseJumpParams {
    pub n_copies: usize,
    pub alpha: f64,
    pub initial: InitialSpec,
    pub n_traj: usize,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
}

impl Default for CollapseJumpParams {
    fn default() -> Self {
        Self {
            n_copies: 2,
            alpha: 1.0,
            initial: InitialSpec::default(),
            n_traj: 1000,
            t_final: None,
            dt: None,
        }
    }
}

impl CollapseJumpParams {
    fn validate(&self) -> Result<()> {
        check_range("n_copies", "n_copies >= 1", self.n_copies >= 1)?;
        check_range("alpha", "alpha > 0", self.alpha > 0.0 && self.alpha.is_finite())?;
        check_range("n_traj", "n_traj >= 1", self.n_traj >= 1)?;
        self.initial.validate(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathCompareParams {
    pub n_copies: usize,
    pub alpha: f64,
    pub e_c: f64,
    pub e_max: f64,
    pub levels: Vec<usize>,
    pub initial_label: String,
    pub t_final: f64,
    /// Fit window starts this many lifetimes in, past the short-time bend.
    pub fit_start_lifetimes: f64,
}

impl Default for BathCompareParams {
    fn default() -> Self {
        Self {
            n_copies: 2,
            alpha: 0.1,
            e_c: 1.0,
            e_max: 8.0,
            levels: vec![50, 100, 200, 400],
            initial_label: "+-".into(),
            t_final: 200.0,
            fit_start_lifetimes: 0.25,
        }
    }
}

impl BathCompareParams {
    fn validate(&self) -> Result<()> {
        check_range("n_copies", "n_copies >= 1", self.n_copies >= 1)?;
        check_range("alpha", "alpha > 0", self.alpha > 0.0 && self.alpha.is_finite())?;
        check_range("e_c", "e_c > 0", self.e_c > 0.0)?;
        let n = self.n_copies as f64;
        check_range("e_max", "e_max > e_c * N^2", self.e_max > self.e_c * n * n)?;
        check_range("levels", "at least one bath size", !self.levels.is_empty())?;
        for &m in &self.levels {
            check_range("levels", "each >= 2", m >= 2)?;
        }
        check_range("t_final", "t_final > 0", self.t_final > 0.0)?;
        check_range(
            "initial_label",
            "length = n_copies over {+,-}",
            self.initial_label.len() == self.n_copies
                && self.initial_label.chars().all(|c| c == '+' || c == '-'),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeqMode {
    Single,
    Many,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqBoundParams {
    pub epsilon_min: f64,
    pub epsilon_max: f64,
    pub steps: usize,
    pub mode: SeqMode,
    pub n_copies: usize,
    pub alpha: f64,
    pub delay: f64,
}

impl Default for SeqBoundParams {
    fn default() -> Self {
        Self {
            epsilon_min: 0.0,
            epsilon_max: 1.0,
            steps: 101,
            mode: SeqMode::Single,
            n_copies: 2,
            alpha: 1.0,
            delay: 0.0,
        }
    }
}

impl SeqBoundParams {
    fn validate(&self) -> Result<()> {
        check_range(
            "epsilon_min",
            "epsilon in [0, 1]",
            (0.0..=1.0).contains(&self.epsilon_min),
        )?;
        check_range(
            "epsilon_max",
            "epsilon in [0, 1]",
            (0.0..=1.0).contains(&self.epsilon_max),
        )?;
        check_range(
            "epsilon_max",
            "epsilon_min <= epsilon_max",
            self.epsilon_min <= self.epsilon_max,
        )?;
        check_range("steps", "steps >= 1", self.steps >= 1)?;
        if self.mode == SeqMode::Many {
            check_range("n_copies", "n_copies >= 2 in many mode", self.n_copies >= 2)?;
            check_range("alpha", "alpha > 0", self.alpha > 0.0)?;
            check_range("delay", "delay >= 0", self.delay >= 0.0)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Harmonics,
    Damped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampedComponent {
    pub amplitude: f64,
    pub tau: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BornSpectrumParams {
    pub signal: SignalKind,
    /// Harmonic coefficients keyed by the power index m (string keys for
    /// JSON), e.g. {"1": 0.9, "2": 0.1}.
    pub xi: BTreeMap<String, f64>,
    pub omega: f64,
    pub jitter_sigma: f64,
    pub periods: usize,
    pub samples: usize,
    /// Damped-mode components f(t) = sum amp e^{-t/tau} cos(freq t).
    pub components: Vec<DampedComponent>,
    pub t_max: f64,
    pub dt: f64,
    pub window: WindowKind,
    pub pad_factor: usize,
}

impl Default for BornSpectrumParams {
    fn default() -> Self {
        Self {
            signal: SignalKind::Harmonics,
            xi: [("1".to_string(), 1.0)].into_iter().collect(),
            omega: 1.0,
            jitter_sigma: 0.0,
            periods: 16,
            samples: 4096,
            components: vec![
                DampedComponent {
                    amplitude: 1.0,
                    tau: 10.0,
                    frequency: 1.0,
                },
                DampedComponent {
                    amplitude: 0.1,
                    tau: 5.0,
                    frequency: 2.0,
                },
            ],
            t_max: 60.0,
            dt: 0.01,
            window: WindowKind::Rectangular,
            pad_factor: 16,
        }
    }
}

impl BornSpectrumParams {
    fn validate(&self) -> Result<()> {
        check_range("omega", "omega > 0", self.omega > 0.0 && self.omega.is_finite())?;
        check_range("jitter_sigma", "jitter_sigma >= 0", self.jitter_sigma >= 0.0)?;
        match self.signal {
            SignalKind::Harmonics => {
                check_range("xi", "at least one coefficient", !self.xi.is_empty())?;
                for key in self.xi.keys() {
                    check_range(
                        "xi",
                        "keys are nonnegative integers",
                        key.parse::<u32>().is_ok(),
                    )?;
                }
                check_range("periods", "periods >= 1", self.periods >= 1)?;
                check_range("samples", "samples >= 16", self.samples >= 16)?;
            }
            SignalKind::Damped => {
                check_range("components", "at least one component", !self.components.is_empty())?;
                for c in &self.components {
                    check_range("components.tau", "tau > 0", c.tau > 0.0)?;
                    check_range(
                        "components.frequency",
                        "frequency > 0",
                        c.frequency > 0.0,
                    )?;
                }
                check_range("t_max", "t_max > 0", self.t_max > 0.0)?;
                check_range("dt", "dt > 0 and t_max/dt >= 16", self.dt > 0.0 && self.t_max / self.dt >= 16.0)?;
            }
        }
        check_range("pad_factor", "pad_factor >= 1", self.pad_factor >= 1)
    }

    pub fn xi_numeric(&self) -> BTreeMap<u32, f64> {
        self.xi
            .iter()
            .map(|(k, &v)| (k.parse::<u32>().expect("validated key"), v))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SorkinParams {
    /// Three complex amplitudes as [re, im] pairs; normalized.
    pub amplitudes: Vec<[f64; 2]>,
    pub epsilon: f64,
    pub copies: u8,
}

impl Default for SorkinParams {
    fn default() -> Self {
        let r = 1.0 / 3.0f64.sqrt();
        Self {
            amplitudes: vec![[r, 0.0], [r, 0.0], [r, 0.0]],
            epsilon: 0.1,
            copies: 2,
        }
    }
}

impl SorkinParams {
    fn validate(&self) -> Result<()> {
        check_range(
            "amplitudes",
            "exactly three [re, im] pairs",
            self.amplitudes.len() == 3,
        )?;
        let norm_sq: f64 = self
            .amplitudes
            .iter()
            .map(|[re, im]| re * re + im * im)
            .sum();
        check_range(
            "amplitudes",
            "normalized within 1e-9",
            (norm_sq - 1.0).abs() < 1e-9,
        )?;
        check_range("epsilon", "finite", self.epsilon.is_finite())?;
        check_range("copies", "copies in {1, 2}", self.copies == 1 || self.copies == 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_seq_bound() {
        let config =
            RunConfig::from_json(r#"{"experiment":"seq-bound","parameters":{"epsilon_max":0.6}}"#)
                .unwrap();
        assert_eq!(config.experiment, Experiment::SeqBound);
        assert!(config.validated().is_ok());
    }

    #[test]
    fn range_violation_names_the_precondition() {
        let mut config = RunConfig::new(Experiment::SeqBound);
        config
            .apply_overrides(&["epsilon_max=1.5".to_string()])
            .unwrap();
        let err = config.validated().unwrap_err();
        assert!(err.to_string().contains("epsilon in [0, 1]"), "{err}");
    }

    #[test]
    fn missing_experiment_is_a_schema_error() {
        let err = RunConfig::from_json(r#"{"parameters":{}}"#).unwrap_err();
        assert!(format!("{err:?}").contains("experiment"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let config = RunConfig::from_json(
            r#"{"experiment":"sorkin","parameters":{"bogus": 1}}"#,
        )
        .unwrap();
        let err = config.validated().unwrap_err();
        assert!(format!("{err:?}").contains("bogus"));
    }

    #[test]
    fn round_trip_preserves_config() {
        let mut config = RunConfig::new(Experiment::BornSpectrum);
        config
            .apply_overrides(&["omega=2.0".to_string(), "signal=\"harmonics\"".to_string()])
            .unwrap();
        config.seed = 97;
        let text = config.to_json();
        let parsed = RunConfig::from_json(&text).unwrap();
        assert_eq!(parsed, config);
        assert_eq!(parsed.digest(), config.digest());
    }

    #[test]
    fn overrides_parse_json_scalars() {
        let mut config = RunConfig::new(Experiment::BathCompare);
        config
            .apply_overrides(&[
                "levels=[50,100]".to_string(),
                "alpha=0.2".to_string(),
                "initial_label=\"+-\"".to_string(),
            ])
            .unwrap();
        match config.validated().unwrap() {
            ExperimentParams::BathCompare(p) => {
                assert_eq!(p.levels, vec![50, 100]);
                assert_eq!(p.alpha, 0.2);
                assert_eq!(p.initial_label, "+-");
            }
            other => panic!("wrong params {other:?}"),
        }
    }
}
