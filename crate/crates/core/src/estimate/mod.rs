//! Cross-entropy estimates from waiting and match profiles, the
//! normalised waiting-time statistic, and Monte Carlo aggregation.

mod experiment;

pub use experiment::{
    monte_carlo, run_trials, EstimatorKind, Experiment, ExperimentSpec, LogBase, ModelSource,
    DEFAULT_Y_STREAM_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{MatchProfile, PrefixScanner, WaitingProfile};
use crate::model::{Model, Symbol};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    N,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatePoint {
    pub index: usize,
    /// Estimate in nats; `None` when the point is censored.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSeries {
    pub axis: Axis,
    pub points: Vec<EstimatePoint>,
    pub model_refs: (String, String),
    pub seed: u64,
}

impl EstimateSeries {
    fn new(axis: Axis, points: Vec<EstimatePoint>) -> Self {
        Self { axis, points, model_refs: (String::new(), String::new()), seed: 0 }
    }

    pub fn value_at(&self, index: usize) -> Option<f64> {
        self.points.iter().find(|p| p.index == index).and_then(|p| p.value)
    }
}

/// `log W_n / n` on `n_grid`; censored where `W_n` is absent.
pub fn waiting_estimator(profile: &WaitingProfile, n_grid: &[usize]) -> Result<EstimateSeries> {
    crate::matching::check_grid(n_grid)?;
    if let Some(&n) = n_grid.iter().find(|&&n| n > profile.n_max()) {
        return Err(Error::PatternTooLong { requested: n, available: profile.n_max() });
    }
    let points = n_grid
        .iter()
        .map(|&n| EstimatePoint { index: n, value: profile.get(n).map(|w| (w as f64).ln() / n as f64) })
        .collect();
    Ok(EstimateSeries::new(Axis::N, points))
}

/// `log m / L_m`; censored where `L_m = 0`.
pub fn match_estimator(profile: &MatchProfile) -> Result<EstimateSeries> {
    if profile.entries().is_empty() {
        return Err(Error::InvalidGrid);
    }
    let points = profile
        .entries()
        .iter()
        .map(|e| EstimatePoint {
            index: e.m,
            value: (e.length > 0).then(|| (e.m as f64).ln() / e.length as f64),
        })
        .collect();
    Ok(EstimateSeries::new(Axis::M, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedStatistic {
    pub n: usize,
    /// `(log W_n + log P_Y(x[1..n])) / n`, `None` when `W_n` is absent.
    pub value: Option<f64>,
}

fn statistic_value(n: usize, waiting: Option<usize>, log_py: f64) -> Result<NormalizedStatistic> {
    if log_py == f64::NEG_INFINITY {
        return Err(Error::AbsoluteContinuityViolation { n });
    }
    let value = waiting.map(|w| ((w as f64).ln() + log_py) / n as f64);
    Ok(NormalizedStatistic { n, value })
}

/// The statistic for one `n`, scanning `y` directly.
pub fn normalized_statistic<T: Scalar>(
    x: &[Symbol],
    y: &[Symbol],
    model_y: &Model<T>,
    n: usize,
) -> Result<NormalizedStatistic> {
    let log_py = model_y.marginal_log_prob(x.get(..n).ok_or(Error::PatternTooLong { requested: n, available: x.len() })?)?;
    let profile = PrefixScanner::new(x, n)?.scan(y.iter().copied(), y.len());
    statistic_value(n, profile.get(n), log_py.as_f64())
}

/// The statistic on every point of `n_grid`, sharing one profile and one
/// forward pass of `model_y` over `x`.
pub fn statistic_series<T: Scalar>(
    profile: &WaitingProfile,
    x: &[Symbol],
    model_y: &Model<T>,
    n_grid: &[usize],
) -> Result<EstimateSeries> {
    crate::matching::check_grid(n_grid)?;
    let n_max = *n_grid.last().expect("grid checked non-empty");
    if n_max > profile.n_max() || n_max > x.len() {
        return Err(Error::PatternTooLong { requested: n_max, available: profile.n_max().min(x.len()) });
    }
    let log_py = model_y.prefix_log_probs(&x[..n_max])?;
    let points = n_grid
        .iter()
        .map(|&n| {
            statistic_value(n, profile.get(n), log_py[n - 1].as_f64())
                .map(|s| EstimatePoint { index: n, value: s.value })
        })
        .collect::<Result<_>>()?;
    Ok(EstimateSeries::new(Axis::N, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub index: usize,
    /// Mean over non-censored trials; `None` if every trial was censored.
    pub mean: Option<f64>,
    pub sem: Option<f64>,
    pub trials: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub axis: Axis,
    pub points: Vec<AggregatePoint>,
}

impl AggregateSeries {
    pub fn point(&self, index: usize) -> Option<&AggregatePoint> {
        self.points.iter().find(|p| p.index == index)
    }
}

/// Mean and standard error of the mean per grid point.
///
/// Values are sorted before summation so the result does not depend on the
/// order of `series`. The SEM uses the unbiased sample deviation and is 0
/// for a single observation.
pub fn aggregate(series: &[EstimateSeries]) -> Result<AggregateSeries> {
    let first = series.first().ok_or_else(|| Error::InvalidSpec("no trials to aggregate".into()))?;
    let indices: Vec<usize> = first.points.iter().map(|p| p.index).collect();
    for s in series {
        if s.axis != first.axis || s.points.len() != indices.len() || s.points.iter().zip(&indices).any(|(p, &i)| p.index != i) {
            return Err(Error::InvalidSpec("trial series do not share a grid".into()));
        }
    }
    let points = indices
        .iter()
        .enumerate()
        .map(|(k, &index)| {
            let mut vals: Vec<f64> = series.iter().filter_map(|s| s.points[k].value).collect();
            vals.sort_by(f64::total_cmp);
            let count = vals.len();
            let (mean, sem) = match count {
                0 => (None, None),
                1 => (Some(vals[0]), Some(0.0)),
                _ => {
                    let mean = vals.iter().sum::<f64>() / count as f64;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                    (Some(mean), Some((var / count as f64).sqrt()))
                }
            };
            AggregatePoint { index, mean, sem, trials: series.len(), censored: series.len() - count }
        })
        .collect();
    Ok(AggregateSeries { axis: first.axis, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{match_profile_from_waiting, waiting_profile_naive};
    use crate::model::FiniteMarkovChain;

    #[test]
    fn self_waiting_is_zero() {
        let y: Vec<u32> = (0..40).map(|i| (i % 3 == 1) as u32).collect();
        let prof = waiting_profile_naive(&y, &y, 10).unwrap();
        let s = waiting_estimator(&prof, &[1, 5, 10]).unwrap();
        assert!(s.points.iter().all(|p| p.value == Some(0.0)));
    }

    #[test]
    fn synthetic_exponential_waiting() {
        // Large n keeps the integer rounding of e^(0.7 n) below 1e-12 after dividing by n.
        let values = (1..=60).map(|n| Some((0.7 * n as f64).exp().round() as usize)).collect();
        let prof = WaitingProfile::new(values, usize::MAX);
        let s = waiting_estimator(&prof, &[40, 50, 60]).unwrap();
        for p in &s.points {
            assert!((p.value.unwrap() - 0.7).abs() < 1e-12);
        }
        let exact = WaitingProfile::new(vec![Some(1), Some(1), None], 9);
        let s = waiting_estimator(&exact, &[1, 3]).unwrap();
        assert_eq!(s.points[1].value, None);
    }

    #[test]
    fn match_censoring_and_self_match() {
        let prof = WaitingProfile::new(vec![None; 3], 100);
        let mp = match_profile_from_waiting(&prof, &[10, 100]).unwrap();
        assert!(match_estimator(&mp).unwrap().points.iter().all(|p| p.value.is_none()));

        let y: Vec<u32> = (0..10_000).map(|i| (i * 31 % 7) as u32).collect();
        let prof = waiting_profile_naive(&y, &y, 9_999).unwrap();
        let mp = match_profile_from_waiting(&prof, &[10_000]).unwrap();
        let v = match_estimator(&mp).unwrap().points[0].value.unwrap();
        assert!((v - (1e4f64).ln() / 9_999.0).abs() < 1e-15);
        assert!((v - 9.21e-4).abs() < 1e-6);
    }

    #[test]
    fn statistic_for_cycle() {
        let c = Model::Markov(FiniteMarkovChain::new(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        let x = c.sample_path(20, 1, "c").unwrap().symbols;
        for n in [1, 5, 12] {
            let s = normalized_statistic(&x, &x, &c, n).unwrap();
            assert!((s.value.unwrap() - 0.5f64.ln() / n as f64).abs() < 1e-15);
        }
        let forbidden = [0, 0, 1];
        assert_eq!(
            normalized_statistic(&forbidden, &x, &c, 2),
            Err(Error::AbsoluteContinuityViolation { n: 2 })
        );
    }

    #[test]
    fn statistic_cancels_for_inverse_probability_waiting() {
        // W_n chosen as 1 / P_Y(x_1^n) for an i.i.d. fair coin.
        let c = Model::Markov(FiniteMarkovChain::iid(&[0.5, 0.5]).unwrap());
        let x = vec![0u32; 12];
        let prof = WaitingProfile::new((1..=12).map(|n| Some(1usize << n)).collect(), usize::MAX);
        let s = statistic_series(&prof, &x, &c, &[3, 7, 12]).unwrap();
        for p in &s.points {
            assert!(p.value.unwrap().abs() < 1e-15);
        }
    }

    fn series(vals: &[Option<f64>]) -> EstimateSeries {
        EstimateSeries::new(Axis::M, vals.iter().map(|&v| EstimatePoint { index: 10, value: v }).take(1).collect())
    }

    #[test]
    fn aggregate_excludes_censored() {
        let runs: Vec<_> = [Some(1.0), None, Some(3.0), None].iter().map(|&v| series(&[v])).collect();
        let agg = aggregate(&runs).unwrap();
        let p = agg.points[0];
        assert_eq!((p.mean, p.trials, p.censored), (Some(2.0), 4, 2));
        assert!((p.sem.unwrap() - 1.0).abs() < 1e-15);
        let single = aggregate(&runs[..1]).unwrap().points[0];
        assert_eq!((single.mean, single.sem), (Some(1.0), Some(0.0)));
        let none = aggregate(&runs[1..2]).unwrap().points[0];
        assert_eq!((none.mean, none.sem, none.censored), (None, None, 1));
    }
}
