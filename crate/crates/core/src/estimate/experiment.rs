//! Monte Carlo experiments: `trials` independent `(x, y)` pairs, one
//! estimator series per trial, aggregated per grid point.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    aggregate, match_estimator, statistic_series, waiting_estimator, AggregateSeries, EstimateSeries,
};
use crate::matching::{match_profile_from_waiting, MatchIndex, PrefixScanner, WaitingProfile};
use crate::model::file::{load_model_def, ModelDef};
use crate::model::{cross_entropy_rate, partial_cross_entropy, word_count, Model, Symbol};
use crate::rng::{pair_seeds, trial_seed};
use crate::scalar::Scalar;

/// Cap on the streamed reference length for waiting-time estimators.
pub const DEFAULT_Y_STREAM_LIMIT: usize = 1 << 26;

const RATE_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Wait,
    Match,
    Statistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

/// A model file path (relative to the spec file) or an inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(ModelDef),
}

impl ModelSource {
    fn describe(&self) -> String {
        match self {
            ModelSource::Path(p) => p.display().to_string(),
            ModelSource::Inline(d) => format!("inline:{}", model_kind(d)),
        }
    }

    fn resolve(&self, base: Option<&Path>) -> Result<ModelDef> {
        match self {
            ModelSource::Inline(d) => Ok(d.clone()),
            ModelSource::Path(p) => {
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                load_model_def(full)
            }
        }
    }
}

fn model_kind(d: &ModelDef) -> &'static str {
    match d {
        ModelDef::Markov { .. } => "markov",
        ModelDef::FunctionMarkov { .. } => "function_markov",
        ModelDef::Ladder { .. } => "ladder",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub estimator: EstimatorKind,
    pub model_x: ModelSource,
    pub model_y: ModelSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub plot: bool,
    #[serde(default)]
    pub log_base: LogBase,
    /// Pattern length for the match estimator; sized from the rates when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_length: Option<usize>,
    /// Longest reference stream scanned by the waiting-time estimators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_length: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn grid(&self) -> Result<&[usize]> {
        let grid = match self.estimator {
            EstimatorKind::Match => self.m_grid.as_deref(),
            EstimatorKind::Wait | EstimatorKind::Statistic => self.n_grid.as_deref(),
        };
        let grid = grid.ok_or_else(|| {
            Error::InvalidSpec(match self.estimator {
                EstimatorKind::Match => "match estimator needs m_grid".into(),
                _ => "waiting-time estimators need n_grid".into(),
            })
        })?;
        crate::matching::check_grid(grid)?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be at least 1".into()));
        }
        self.grid().map(|_| ())
    }
}

/// A validated spec with its models loaded.
#[derive(Debug, Clone)]
pub struct Experiment<T> {
    pub spec: ExperimentSpec,
    pub model_x: Model<T>,
    pub model_y: Model<T>,
}

impl<T: Scalar> Experiment<T> {
    /// `base` resolves relative model paths (normally the spec file's directory).
    pub fn new(spec: ExperimentSpec, base: Option<&Path>) -> Result<Self> {
        spec.validate()?;
        let model_x = spec.model_x.resolve(base)?.build()?;
        let model_y = spec.model_y.resolve(base)?.build()?;
        if model_x.alphabet_size() != model_y.alphabet_size() {
            return Err(Error::AlphabetMismatch(model_x.alphabet_size(), model_y.alphabet_size()));
        }
        Ok(Self { spec, model_x, model_y })
    }

    pub fn from_models(spec: ExperimentSpec, model_x: Model<T>, model_y: Model<T>) -> Result<Self> {
        spec.validate()?;
        if model_x.alphabet_size() != model_y.alphabet_size() {
            return Err(Error::AlphabetMismatch(model_x.alphabet_size(), model_y.alphabet_size()));
        }
        Ok(Self { spec, model_x, model_y })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let spec = ExperimentSpec::from_json(&std::fs::read_to_string(path)?)?;
        Self::new(spec, path.parent())
    }

    /// Crude per-symbol rate used to size `x` so that `L_m` never exhausts
    /// the pattern: the Markov cross-entropy rate when available, otherwise
    /// half of a short-block enumeration, floored at 0.05 nats.
    pub fn rate_floor(&self) -> f64 {
        let rate = match (self.model_x.as_markov(), self.model_y.as_markov()) {
            (Some(x), Some(y)) => cross_entropy_rate(x, y).map(|h| h.as_f64()).ok(),
            _ => {
                let size = self.model_x.alphabet_size();
                let n = (1..=8).rev().find(|&n| word_count(size, n) <= 4096).unwrap_or(1);
                partial_cross_entropy(&self.model_x, &self.model_y, n, 4096).map(|h| 0.5 * h.as_f64()).ok()
            }
        };
        rate.filter(|h| h.is_finite()).unwrap_or(RATE_FLOOR).max(RATE_FLOOR)
    }

    pub fn x_length(&self) -> Result<usize> {
        let grid = self.spec.grid()?;
        let max = *grid.last().expect("grid checked non-empty");
        Ok(match self.spec.estimator {
            EstimatorKind::Match => self.spec.x_length.unwrap_or_else(|| {
                let sized = 4.0 * ((max as f64).ln() / self.rate_floor()).ceil();
                (sized as usize).clamp(1, max)
            }),
            _ => max,
        })
    }

    fn refs(&self) -> (String, String) {
        (self.spec.model_x.describe(), self.spec.model_y.describe())
    }

    fn stream_profile(&self, x: &[Symbol], n_max: usize, seed_y: u64) -> Result<WaitingProfile> {
        let limit = self.spec.y_length.unwrap_or(DEFAULT_Y_STREAM_LIMIT);
        let table = self.model_y.sampling_table();
        let mut sampler = self.model_y.sampler(&table, seed_y);
        let profile = PrefixScanner::new(x, n_max)?.scan(sampler.by_ref(), limit);
        if let Some(position) = sampler.first_breach() {
            return Err(Error::TruncationBreach { position });
        }
        Ok(profile)
    }

    /// One trial's estimator series.
    pub fn run_trial(&self, trial: usize) -> Result<EstimateSeries> {
        let tseed = trial_seed(self.spec.seed, trial as u64);
        let (seed_x, seed_y) = pair_seeds(tseed);
        let grid = self.spec.grid()?;
        let n_x = self.x_length()?;
        let x = self.model_x.sample_path(n_x, seed_x, "x")?;
        let mut series = match self.spec.estimator {
            EstimatorKind::Match => {
                let m_max = *grid.last().expect("grid checked non-empty");
                let y = self.model_y.sample_path(m_max, seed_y, "y")?;
                let index = MatchIndex::build(y.as_slice());
                let profile = index.waiting_profile(x.as_slice(), n_x)?;
                let mp = match_profile_from_waiting(&profile, grid)?;
                if let Some(e) = mp.entries().iter().find(|e| mp.is_saturated(e)) {
                    return Err(Error::PatternExhausted { m: e.m, n_max: n_x });
                }
                match_estimator(&mp)?
            }
            EstimatorKind::Wait => {
                let profile = self.stream_profile(x.as_slice(), n_x, seed_y)?;
                waiting_estimator(&profile, grid)?
            }
            EstimatorKind::Statistic => {
                let profile = self.stream_profile(x.as_slice(), n_x, seed_y)?;
                statistic_series(&profile, x.as_slice(), &self.model_y, grid)?
            }
        };
        series.model_refs = self.refs();
        series.seed = tseed;
        Ok(series)
    }
}

/// Every trial's series, in trial order. Trials run in parallel on the
/// current rayon pool; the output does not depend on the worker count.
pub fn run_trials<T: Scalar>(expt: &Experiment<T>) -> Result<Vec<EstimateSeries>> {
    let results: Vec<Result<EstimateSeries>> =
        (0..expt.spec.trials).into_par_iter().map(|t| expt.run_trial(t)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(trial, r)| r.map_err(|e| Error::Trial { trial, source: Box::new(e) }))
        .collect()
}

pub fn monte_carlo<T: Scalar>(expt: &Experiment<T>) -> Result<AggregateSeries> {
    aggregate(&run_trials(expt)?)
}
