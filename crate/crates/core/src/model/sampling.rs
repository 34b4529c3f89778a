use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::alphabet::Symbol;
use crate::model::markov::FiniteMarkovChain;
use crate::rng::{path_rng, PathRng};
use crate::scalar::Scalar;

/// A finite realisation of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePath {
    pub symbols: Vec<Symbol>,
    pub model_id: String,
    pub seed: u64,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// Cumulative distribution over the support of one row.
#[derive(Debug, Clone)]
struct Cdf {
    cumulative: Vec<f64>,
    states: Vec<u32>,
}

impl Cdf {
    fn new<T: Scalar>(probs: &[T]) -> Self {
        let mut acc = 0.0;
        let (mut cumulative, mut states) = (Vec::new(), Vec::new());
        for (i, &p) in probs.iter().enumerate() {
            let p = p.as_f64();
            if p > 0.0 {
                acc += p;
                cumulative.push(acc);
                states.push(i as u32);
            }
        }
        Self { cumulative, states }
    }

    fn draw(&self, u: f64) -> u32 {
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.states[k.min(self.states.len() - 1)]
    }
}

/// Inverse-CDF tables of a chain, shared by every sampler drawn from it.
#[derive(Debug, Clone)]
pub struct SamplingTable {
    initial: Cdf,
    rows: Vec<Cdf>,
}

impl SamplingTable {
    pub fn new<T: Scalar>(chain: &FiniteMarkovChain<T>) -> Self {
        let p = chain.transitions();
        Self {
            initial: Cdf::new(chain.stationary()),
            rows: (0..p.rows()).map(|i| Cdf::new(p.row(i))).collect(),
        }
    }
}

/// An endless stream of observed symbols driven by a seeded generator.
///
/// The hidden state starts from the stationary vector and evolves row by
/// row; when a map is present the stream emits `map[state]`.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    table: &'a SamplingTable,
    map: Option<&'a [Symbol]>,
    boundary: Option<u32>,
    rng: PathRng,
    state: Option<u32>,
    position: usize,
    first_breach: Option<usize>,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(table: &'a SamplingTable, map: Option<&'a [Symbol]>, boundary: Option<u32>, seed: u64) -> Self {
        Self { table, map, boundary, rng: path_rng(seed), state: None, position: 0, first_breach: None }
    }

    /// Position (0-based) of the first step that used the reflected
    /// boundary transition, if any.
    pub fn first_breach(&self) -> Option<usize> {
        self.first_breach
    }

    pub fn hidden_state(&self) -> Option<u32> {
        self.state
    }
}

impl Iterator for Sampler<'_> {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        let u: f64 = self.rng.gen();
        let next = match self.state {
            None => self.table.initial.draw(u),
            Some(s) => {
                let n = self.table.rows[s as usize].draw(u);
                if self.boundary == Some(s) && n == s && self.first_breach.is_none() {
                    self.first_breach = Some(self.position);
                }
                n
            }
        };
        self.state = Some(next);
        self.position += 1;
        Some(self.map.map_or(next, |m| m[next as usize]))
    }
}
