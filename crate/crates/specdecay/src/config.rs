//! Experiment configuration: a JSON description of one run, plus the
//! builder that turns it into ready solver inputs.
//!
//! Unknown fields are rejected so typos surface as parse errors instead of
//! silently ignored knobs. Everything derivable is optional with documented
//! defaults; `operator`, `theta`, `sigma`, `initial_data`, and `time` are
//! required.

use crate::analysis::VerifyWindows;
use crate::error::{Error, Result};
use crate::evolution::{CoefficientVector, InitialData, NonlinearitySpec, TimeGrid};
use crate::propagator::DEFAULT_DEGENERACY_TOL;
use crate::realization::{torus_realization, GridRealization};
use crate::rng::SplitMix64;
use crate::spectrum::{
    build_spectrum, DampingParams, SharedSpectrum, SpectrumSpec, DEFAULT_PARTITION_TOL,
};
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

/// Rule for one initial-data channel.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataRule {
    /// All coefficients zero.
    Zero,
    /// Explicit coefficients, one per spectrum slot.
    List { values: Vec<f64> },
    /// Power profile lambda^{-s} per slot; the zero mode gets 1 when s = 0
    /// (flat profile) and 0 otherwise (the profile blows up there, so the
    /// mode is left empty).
    Formula { s: f64 },
    /// Independent uniform draws from [-1, 1], consumed from the run's
    /// seeded generator in slot order (u0 first, then u1).
    Random,
}

impl DataRule {
    fn build(&self, spectrum: &SharedSpectrum, rng: &mut SplitMix64) -> Result<CoefficientVector> {
        let slots = spectrum.total_multiplicity();
        match self {
            DataRule::Zero => Ok(CoefficientVector::zeros(spectrum.clone())),
            DataRule::List { values } => {
                CoefficientVector::new(spectrum.clone(), values.clone())
                    .map_err(|e| Error::config(format!("initial data list: {e}")))
            }
            DataRule::Formula { s } => {
                if !s.is_finite() {
                    return Err(Error::config(format!(
                        "formula exponent must be finite, got {s}"
                    )));
                }
                let mut values = Vec::with_capacity(slots);
                for slot in 0..slots {
                    let lam = spectrum.slot_eigenvalue(slot);
                    let v = if lam > 0.0 {
                        lam.powf(-s)
                    } else if *s == 0.0 {
                        1.0
                    } else {
                        0.0
                    };
                    values.push(v);
                }
                CoefficientVector::new(spectrum.clone(), values)
                    .map_err(|e| Error::config(format!("initial data formula: {e}")))
            }
            DataRule::Random => {
                let values = (0..slots).map(|_| rng.next_symmetric()).collect();
                Ok(CoefficientVector::new(spectrum.clone(), values)
                    .expect("draws are finite and sized to the spectrum"))
            }
        }
    }
}

/// Per-channel initial data rules.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    pub u0: DataRule,
    pub u1: DataRule,
}

/// Time grid description. A uniform grid covers [0, t_max]; the log-spaced
/// variant covers [t_min, t_max] and exists for small-time rate fits, where
/// uniform grids waste points at large times.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    pub steps: usize,
    #[serde(default)]
    pub log_spaced_small_time: bool,
    /// First point of the log-spaced grid; ignored for uniform grids.
    #[serde(default = "default_t_min")]
    pub t_min: f64,
}

fn default_t_min() -> f64 {
    1e-3
}

impl TimeSpec {
    pub fn build(&self) -> Result<TimeGrid> {
        if self.log_spaced_small_time {
            TimeGrid::log_spaced(self.t_min, self.t_max, self.steps)
        } else {
            TimeGrid::uniform(self.t_max, self.steps)
        }
    }
}

/// Spatial realization recipe (needed by pointwise nonlinearities).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealizationSpec {
    /// Circle grid with m points for the torus spectrum of order n; must
    /// agree with the operator block.
    Torus { n: i64, m: i64 },
}

/// Numerical tolerances; every field has a sensible default.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_degeneracy_tol")]
    pub degeneracy_tol: f64,
    #[serde(default = "default_partition_tol")]
    pub partition_tol: f64,
    #[serde(default = "default_max_picard_iters")]
    pub max_picard_iters: usize,
}

fn default_picard_tol() -> f64 {
    1e-10
}
fn default_degeneracy_tol() -> f64 {
    DEFAULT_DEGENERACY_TOL
}
fn default_partition_tol() -> f64 {
    DEFAULT_PARTITION_TOL
}
fn default_max_picard_iters() -> usize {
    64
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            picard_tol: default_picard_tol(),
            degeneracy_tol: default_degeneracy_tol(),
            partition_tol: default_partition_tol(),
            max_picard_iters: default_max_picard_iters(),
        }
    }
}

/// Knobs for the bound-verification command.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Also check plain exponential decay rows when the spectrum has no
    /// zero mode (every quantity then decays at the data-supported rate).
    #[serde(default)]
    pub strict_positive: bool,
    /// Window for singular small-time checks; must sit inside (0, 1].
    #[serde(default = "default_small_window")]
    pub small_window: (f64, f64),
    /// Window for long-time checks; None means [5, end of trace].
    #[serde(default)]
    pub large_window: Option<(f64, f64)>,
}

fn default_small_window() -> (f64, f64) {
    (1e-3, 1.0)
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            strict_positive: false,
            small_window: default_small_window(),
            large_window: None,
        }
    }
}

impl VerifySpec {
    pub fn windows(&self) -> VerifyWindows {
        VerifyWindows {
            small: self.small_window,
            large: self.large_window.unwrap_or((5.0, f64::INFINITY)),
        }
    }
}

/// One experiment: operator, damping exponents, data, requested norm
/// channels, time grid, optional nonlinearity and realization.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: SpectrumSpec,
    pub theta: f64,
    pub sigma: f64,
    pub initial_data: InitialDataSpec,
    /// Sobolev orders beta to track as norm columns.
    #[serde(default)]
    pub beta: Vec<f64>,
    /// Time-derivative orders k to track as norm columns.
    #[serde(default)]
    pub k: Vec<u32>,
    pub time: TimeSpec,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub realization: Option<RealizationSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Seed for random initial data; fixed seed means byte-identical output.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub verify: Option<VerifySpec>,
}

fn default_nonlinearity() -> NonlinearitySpec {
    NonlinearitySpec::None
}

/// Fully built experiment inputs.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub params: DampingParams,
    pub spectrum: SharedSpectrum,
    pub data: InitialData,
    pub grid: TimeGrid,
    pub betas: Vec<f64>,
    pub ks: Vec<u32>,
    pub nonlinearity: NonlinearitySpec,
    pub realization: Option<GridRealization>,
    pub tolerances: Tolerances,
    pub verify: VerifySpec,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Parse a config from a JSON file. Read failures are IO errors; parse
    /// failures are config errors carrying serde's field-level message.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("config parse: {e}")))
    }

    /// Validate and build all solver inputs. The same seed always yields the
    /// same data: the generator is consumed in u0-then-u1 slot order.
    pub fn build(&self) -> Result<Experiment> {
        let params = DampingParams::new(self.theta, self.sigma)
            .map_err(|e| Error::config(format!("damping exponents: {e}")))?;
        let spectrum: SharedSpectrum = Arc::new(
            build_spectrum(&self.operator).map_err(|e| Error::config(format!("operator: {e}")))?,
        );

        for &b in &self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::config(format!(
                    "beta entries must be > 0 and finite, got {b}"
                )));
            }
        }
        self.nonlinearity
            .validate()
            .map_err(|e| Error::config(format!("nonlinearity: {e}")))?;
        if !self.nonlinearity.is_none() {
            if let Some(&k) = self.k.iter().find(|&&k| k > 2) {
                return Err(Error::config(format!(
                    "derivative order k = {k} is not available for semilinear \
                     runs (only k <= 2)"
                )));
            }
        }
        if !(self.tolerances.picard_tol > 0.0 && self.tolerances.picard_tol.is_finite()) {
            return Err(Error::config(format!(
                "picard_tol must be > 0, got {}",
                self.tolerances.picard_tol
            )));
        }
        if self.tolerances.max_picard_iters < 1 {
            return Err(Error::config("max_picard_iters must be >= 1"));
        }

        let realization = match &self.realization {
            None => {
                if matches!(self.nonlinearity, NonlinearitySpec::PointwisePower { .. }) {
                    return Err(Error::config(
                        "pointwise_power nonlinearity needs a realization block \
                         (grid to evaluate the power on)",
                    ));
                }
                None
            }
            Some(RealizationSpec::Torus { n, m }) => {
                let n = u32::try_from(*n)
                    .map_err(|_| Error::config(format!("realization n must be >= 0, got {n}")))?;
                let m = usize::try_from(*m)
                    .map_err(|_| Error::config(format!("realization m must be >= 0, got {m}")))?;
                let real = torus_realization(n, m)
                    .map_err(|e| Error::config(format!("realization: {e}")))?;
                if !real.matches_spectrum(&spectrum) {
                    return Err(Error::config(format!(
                        "realization torus order {n} does not match the operator \
                         spectrum; use a torus_1d operator with the same n"
                    )));
                }
                Some(real)
            }
        };

        let mut rng = SplitMix64::new(self.seed);
        let u0 = self.initial_data.u0.build(&spectrum, &mut rng)?;
        let u1 = self.initial_data.u1.build(&spectrum, &mut rng)?;
        let data = InitialData::new(u0, u1).expect("channels share the spectrum");

        let grid = self
            .time
            .build()
            .map_err(|e| Error::config(format!("time grid: {e}")))?;

        if let Some(v) = &self.verify {
            let (lo, hi) = v.small_window;
            if !(lo > 0.0 && hi <= 1.0 && lo < hi) {
                return Err(Error::config(format!(
                    "verify.small_window must lie inside (0, 1], got [{lo}, {hi}]"
                )));
            }
            if let Some((lo, hi)) = v.large_window {
                if !(lo >= 0.0 && lo < hi) {
                    return Err(Error::config(format!(
                        "verify.large_window must be increasing, got [{lo}, {hi}]"
                    )));
                }
            }
        }

        Ok(Experiment {
            params,
            spectrum,
            data,
            grid,
            betas: self.beta.clone(),
            ks: self.k.clone(),
            nonlinearity: self.nonlinearity,
            realization,
            tolerances: self.tolerances.clone(),
            verify: self.verify.clone().unwrap_or_default(),
            seed: self.seed,
        })
    }
}
