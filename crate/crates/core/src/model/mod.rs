//! Stationary source models: finite Markov chains, function-Markov images
//! and the truncated ladder chain, with exact marginals, samplers and
//! entropy / cross-entropy rates.

pub mod alphabet;
pub mod file;
mod function_markov;
pub(crate) mod graph;
mod ladder;
mod markov;
mod sampling;

pub use alphabet::{word_count, Alphabet, Symbol, Words};
pub use function_markov::{FunctionMarkovModel, Scaled};
pub use ladder::{LadderChain, Ramp, DEFAULT_TAIL_TOLERANCE};
pub use markov::{cross_entropy_rate, stationary_distribution, FiniteMarkovChain};
pub use sampling::{SamplePath, Sampler, SamplingTable};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on `|A|^n` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Markov(FiniteMarkovChain<T>),
    FunctionMarkov(FunctionMarkovModel<T>),
    Ladder(LadderChain<T>),
}

impl<T: Scalar> Model<T> {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Model::Markov(c) => c.alphabet(),
            Model::FunctionMarkov(f) => f.alphabet(),
            Model::Ladder(l) => l.chain().alphabet(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet().size()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Markov(_) => "markov",
            Model::FunctionMarkov(_) => "function_markov",
            Model::Ladder(_) => "ladder",
        }
    }

    /// The chain whose states are sampled: the chain itself, or the hidden chain.
    pub fn state_chain(&self) -> &FiniteMarkovChain<T> {
        match self {
            Model::Markov(c) => c,
            Model::FunctionMarkov(f) => f.hidden(),
            Model::Ladder(l) => l.chain(),
        }
    }

    /// The observed process as a Markov chain, when it is one.
    pub fn as_markov(&self) -> Option<&FiniteMarkovChain<T>> {
        match self {
            Model::Markov(c) => Some(c),
            Model::Ladder(l) => Some(l.chain()),
            Model::FunctionMarkov(_) => None,
        }
    }

    pub fn marginal_log_prob(&self, word: &[Symbol]) -> Result<T> {
        match self {
            Model::Markov(c) => c.marginal_log_prob(word),
            Model::FunctionMarkov(f) => f.marginal_log_prob(word),
            Model::Ladder(l) => l.marginal_log_prob(word),
        }
    }

    /// `log P(word[..l])` for `l = 1..=word.len()`.
    pub fn prefix_log_probs(&self, word: &[Symbol]) -> Result<Vec<T>> {
        match self {
            Model::Markov(c) => c.prefix_log_probs(word),
            Model::FunctionMarkov(f) => f.prefix_log_probs(word),
            Model::Ladder(l) => l.chain().prefix_log_probs(word),
        }
    }

    pub fn sampling_table(&self) -> SamplingTable {
        SamplingTable::new(self.state_chain())
    }

    /// A symbol stream over a precomputed table (see [`Model::sampling_table`]).
    pub fn sampler<'a>(&'a self, table: &'a SamplingTable, seed: u64) -> Sampler<'a> {
        match self {
            Model::Markov(_) => Sampler::new(table, None, None, seed),
            Model::FunctionMarkov(f) => Sampler::new(table, Some(f.observation_map()), None, seed),
            Model::Ladder(l) => Sampler::new(table, None, Some(l.boundary()), seed),
        }
    }

    /// Deterministic sample of `length` symbols.
    ///
    /// Ladder walks that ever take the reflected climb at the top state
    /// fail with [`Error::TruncationBreach`].
    pub fn sample_path(&self, length: usize, seed: u64, model_id: &str) -> Result<SamplePath> {
        if length == 0 {
            return Err(Error::InvalidSpec("sample length must be at least 1".into()));
        }
        let table = self.sampling_table();
        let mut sampler = self.sampler(&table, seed);
        let symbols: Vec<Symbol> = sampler.by_ref().take(length).collect();
        if let Some(position) = sampler.first_breach() {
            return Err(Error::TruncationBreach { position });
        }
        Ok(SamplePath { symbols, model_id: model_id.to_string(), seed })
    }
}

pub fn entropy_rate<T: Scalar>(chain: &FiniteMarkovChain<T>) -> T {
    chain.entropy_rate()
}

/// `-(1/n) sum_{a in A^n} P_X(a) log P_Y(a)` by exhaustive enumeration.
///
/// Words with `P_X(a) = 0` contribute nothing; a word with `P_X(a) > 0`
/// and `P_Y(a) = 0` makes the result `+inf`.
pub fn partial_cross_entropy<T: Scalar>(x: &Model<T>, y: &Model<T>, n: usize, budget: u128) -> Result<T> {
    let size = x.alphabet_size();
    if size != y.alphabet_size() {
        return Err(Error::AlphabetMismatch(size, y.alphabet_size()));
    }
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let words = word_count(size, n);
    if words > budget {
        return Err(Error::BudgetExceeded { words, budget });
    }
    let mut total = T::zero();
    for w in Words::new(size, n) {
        let lx = x.marginal_log_prob(&w)?;
        if lx == T::neg_infinity() {
            continue;
        }
        let ly = y.marginal_log_prob(&w)?;
        if ly == T::neg_infinity() {
            return Ok(T::infinity());
        }
        total -= lx.exp() * ly;
    }
    Ok(total / T::of(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn chain(rows: &[Vec<f64>]) -> Model<f64> {
        Model::Markov(FiniteMarkovChain::new(rows).unwrap())
    }

    #[test]
    fn cycle_sample_alternates() {
        let m = chain(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let p = m.sample_path(6, 11, "swap").unwrap();
        let a = p.symbols[0];
        assert_eq!(p.symbols, vec![a, 1 - a, a, 1 - a, a, 1 - a]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = chain(&[vec![0.7, 0.3], vec![0.1, 0.9]]);
        assert_eq!(m.sample_path(500, 3, "m").unwrap(), m.sample_path(500, 3, "m").unwrap());
        assert_ne!(m.sample_path(500, 3, "m").unwrap().symbols, m.sample_path(500, 4, "m").unwrap().symbols);
    }

    #[test]
    fn fair_coin_frequencies() {
        let m = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let p = m.sample_path(100_000, 2024, "coin").unwrap();
        let ones = p.symbols.iter().filter(|&&s| s == 1).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01, "frequency {ones}");
    }

    #[test]
    fn function_markov_sampler_maps_states() {
        let hidden = FiniteMarkovChain::new(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let m = Model::FunctionMarkov(FunctionMarkovModel::lump(hidden, vec![0, 0, 1], None).unwrap());
        let p = m.sample_path(30, 5, "f").unwrap();
        let start = p.symbols.iter().position(|&s| s == 1).unwrap();
        for (i, &s) in p.symbols.iter().enumerate().skip(start) {
            assert_eq!(s, ((i - start) % 3 == 0) as u32);
        }
    }

    #[test]
    fn ladder_breach_is_reported() {
        // A shallow truncation makes the top state easy to reach.
        let l = LadderChain::build(0.45, Ramp::Identity, 3, 1.0).unwrap();
        let m = Model::Ladder(l);
        let err = (0..50).find_map(|s| m.sample_path(2000, s, "ladder").err()).unwrap();
        assert!(matches!(err, Error::TruncationBreach { .. }));
    }

    #[test]
    fn partial_cross_entropy_first_order() {
        let x = chain(&[vec![0.7, 0.3], vec![0.1, 0.9]]);
        let y = chain(&[vec![0.4, 0.6], vec![0.5, 0.5]]);
        let (px, py) = (x.state_chain().stationary(), y.state_chain().stationary());
        let want = -(px[0] * py[0].ln() + px[1] * py[1].ln());
        assert_abs_diff_eq!(partial_cross_entropy(&x, &y, 1, DEFAULT_ENUMERATION_BUDGET).unwrap(), want, epsilon = 1e-14);
    }

    #[test]
    fn partial_cross_entropy_fair_coin() {
        let c = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        for n in [1, 5, 9] {
            assert_abs_diff_eq!(partial_cross_entropy(&c, &c, n, DEFAULT_ENUMERATION_BUDGET).unwrap(), 2f64.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_cross_entropy_budget() {
        let c = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(matches!(partial_cross_entropy(&c, &c, 12, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn partial_cross_entropy_singular() {
        let x = chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let y = chain(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(partial_cross_entropy(&x, &y, 2, DEFAULT_ENUMERATION_BUDGET).unwrap(), f64::INFINITY);
    }
}
