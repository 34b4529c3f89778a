//! Truncated ladder chain on the integers.
//!
//! From `j <= 0` the walk climbs to `j + 1` surely; from `j > 0` it climbs
//! with probability `gamma` or resets to `-h(j)` with probability
//! `1 - gamma`. The state space is cut to `[-h(J+), J+]`; the climb out of
//! `J+` is reflected back onto `J+`, which is the only self-loop of the
//! truncated chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::alphabet::{Alphabet, Symbol};
use crate::model::function_markov::FunctionMarkovModel;
use crate::model::markov::FiniteMarkovChain;
use crate::scalar::Scalar;

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// The reset depth `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ramp {
    /// `h(n) = n`
    Identity,
    /// `h(n) = r (n + 1)`
    Affine { r: u64 },
    /// `h(n) = values[n - 1]`
    Table { values: Vec<u64> },
}

impl Ramp {
    pub fn eval(&self, n: u64) -> Option<u64> {
        match self {
            Ramp::Identity => Some(n),
            Ramp::Affine { r } => Some(r * (n + 1)),
            Ramp::Table { values } => values.get(n.checked_sub(1)? as usize).copied(),
        }
    }

    /// `min { i >= 1 : h(i) >= |j| }` over `i <= limit`.
    pub fn inverse(&self, j: i64, limit: u64) -> Option<u64> {
        (1..=limit).find(|&i| self.eval(i).is_some_and(|h| h >= j.unsigned_abs()))
    }

    fn check(&self, upto: u64) -> Result<()> {
        if let Ramp::Affine { r: 0 } = self {
            return Err(Error::InvalidLadder("affine ramp needs r >= 1".into()));
        }
        let mut prev = 0;
        for n in 1..=upto {
            let h = self
                .eval(n)
                .ok_or_else(|| Error::InvalidLadder(format!("ramp undefined at {n}")))?;
            if h < prev {
                return Err(Error::InvalidLadder(format!("ramp decreases at {n}")));
            }
            prev = h;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderChain<T> {
    gamma: T,
    ramp: Ramp,
    j_minus: u64,
    j_plus: u64,
    chain: FiniteMarkovChain<T>,
    tail_mass_bound: T,
}

impl<T: Scalar> LadderChain<T> {
    /// Builds the chain on `[-h(j_plus), j_plus]` and certifies that the
    /// stationary mass on the outermost tenth of each side stays below
    /// `tolerance`.
    pub fn build(gamma: T, ramp: Ramp, j_plus: u64, tolerance: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma < T::of(0.5)) {
            return Err(Error::InvalidLadder(format!("gamma {gamma} outside (0, 1/2)")));
        }
        if j_plus == 0 {
            return Err(Error::InvalidLadder("j_plus must be at least 1".into()));
        }
        ramp.check(j_plus)?;
        let j_minus = ramp.eval(j_plus).expect("checked");
        let size = (j_minus + j_plus + 1) as usize;
        let idx = |j: i64| (j + j_minus as i64) as usize;
        let mut p = Matrix::zeros(size, size);
        for j in -(j_minus as i64)..=j_plus as i64 {
            if j <= 0 {
                p[(idx(j), idx(j + 1))] = T::one();
            } else {
                let up = if j == j_plus as i64 { j } else { j + 1 };
                let down = -(ramp.eval(j as u64).expect("checked") as i64);
                p[(idx(j), idx(up))] += gamma;
                p[(idx(j), idx(down))] += T::one() - gamma;
            }
        }
        let labels = (-(j_minus as i64)..=j_plus as i64).map(|j| j.to_string()).collect();
        let chain = FiniteMarkovChain::from_matrix(Alphabet::with_labels(labels)?, p)?;

        let top = (j_plus as f64 * 0.1).ceil().max(1.0) as usize;
        let bottom = (j_minus as f64 * 0.1).ceil().max(1.0) as usize;
        let pi = chain.stationary();
        let tail_mass_bound: T = if j_minus == 0 {
            pi[size - top..].iter().copied().sum()
        } else {
            pi[..bottom].iter().copied().sum::<T>() + pi[size - top..].iter().copied().sum()
        };
        if tail_mass_bound > tolerance {
            return Err(Error::TruncationTooSmall {
                tail_mass: tail_mass_bound.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(Self { gamma, ramp, j_minus, j_plus, chain, tail_mass_bound })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn ramp(&self) -> &Ramp {
        &self.ramp
    }

    /// Truncation bounds `(J-, J+)`; states run over `[-J-, J+]`.
    pub fn truncation(&self) -> (u64, u64) {
        (self.j_minus, self.j_plus)
    }

    pub fn chain(&self) -> &FiniteMarkovChain<T> {
        &self.chain
    }

    pub fn tail_mass_bound(&self) -> T {
        self.tail_mass_bound
    }

    pub fn state(&self, index: Symbol) -> i64 {
        index as i64 - self.j_minus as i64
    }

    pub fn index(&self, j: i64) -> Option<Symbol> {
        (j >= -(self.j_minus as i64) && j <= self.j_plus as i64).then(|| (j + self.j_minus as i64) as Symbol)
    }

    pub fn stationary_at(&self, j: i64) -> Option<T> {
        self.index(j).map(|i| self.chain.stationary()[i as usize])
    }

    /// Index of the top state, whose self-loop stands for the truncated climb.
    pub fn boundary(&self) -> Symbol {
        self.index(self.j_plus as i64).expect("top state exists")
    }

    /// `log pi(j) / log gamma - j` for `j = 1..=J+`; bounded when the
    /// stationary vector decays like `gamma^(j + O(1))`.
    pub fn decay_offsets(&self) -> Vec<(i64, T)> {
        let lg = self.gamma.ln();
        (1..=self.j_plus as i64)
            .filter_map(|j| {
                let p = self.stationary_at(j)?;
                (p > T::zero()).then(|| (j, p.ln() / lg - T::of(j as f64)))
            })
            .collect()
    }

    /// Observation map `j > 0 -> 1`, `j <= 0 -> 0`.
    pub fn sign_map(&self) -> Vec<Symbol> {
        (0..self.chain.size() as Symbol).map(|i| (self.state(i) > 0) as Symbol).collect()
    }

    pub fn lump(&self, observation_map: Vec<Symbol>) -> Result<FunctionMarkovModel<T>> {
        FunctionMarkovModel::lump(self.chain.clone(), observation_map, None)
    }

    /// The binary image process with the sign map.
    pub fn lump_sign(&self) -> Result<FunctionMarkovModel<T>> {
        self.lump(self.sign_map())
    }

    pub fn marginal_log_prob(&self, word: &[Symbol]) -> Result<T> {
        self.chain.marginal_log_prob(word)
    }
}
