use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::alphabet::{Alphabet, Symbol};
use crate::model::markov::FiniteMarkovChain;
use crate::scalar::Scalar;

/// A hidden Markov chain observed through a symbol-wise map `F`.
///
/// Marginals are products of the transfer matrices
/// `M_a[z, z'] = P[z, z'] * [F(z') == a]`, so that `P(a) = pi M_{a_1} ... M_{a_n} 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionMarkovModel<T> {
    hidden: FiniteMarkovChain<T>,
    alphabet: Alphabet,
    observation_map: Vec<Symbol>,
    transfer: Vec<Matrix<T>>,
}

/// A vector carried with a separate log scale: the represented value is
/// `exp(log_scale) * vector`, with `vector` summing to one unless the
/// represented value is zero (then `log_scale == -inf`).
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled<T> {
    pub vector: Vec<T>,
    pub log_scale: T,
}

impl<T: Scalar> Scaled<T> {
    pub(crate) fn normalized(mut vector: Vec<T>, log_scale: T) -> Self {
        let s: T = vector.iter().copied().sum();
        if s > T::zero() && log_scale > T::neg_infinity() {
            vector.iter_mut().for_each(|v| *v /= s);
            Self { vector, log_scale: log_scale + s.ln() }
        } else {
            Self { vector, log_scale: T::neg_infinity() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == T::neg_infinity()
    }

    /// `log(self . other)` for a row vector `self` and column vector `other`.
    pub fn log_dot(&self, other: &Scaled<T>) -> T {
        if self.is_zero() || other.is_zero() {
            return T::neg_infinity();
        }
        let d: T = self.vector.iter().zip(&other.vector).map(|(&a, &b)| a * b).sum();
        if d > T::zero() {
            self.log_scale + other.log_scale + d.ln()
        } else {
            T::neg_infinity()
        }
    }
}

impl<T: Scalar> FunctionMarkovModel<T> {
    /// Lumps `hidden` through `observation_map`; the observed alphabet has
    /// `max(map) + 1` symbols unless `alphabet` is supplied.
    pub fn lump(
        hidden: FiniteMarkovChain<T>,
        observation_map: Vec<Symbol>,
        alphabet: Option<Alphabet>,
    ) -> Result<Self> {
        if observation_map.len() != hidden.size() {
            return Err(Error::MapLength { expected: hidden.size(), got: observation_map.len() });
        }
        let alphabet = match alphabet {
            Some(a) => a,
            None => {
                let size = observation_map.iter().max().map_or(0, |&m| m as usize + 1);
                Alphabet::new(size)?
            }
        };
        alphabet.validate()?;
        alphabet.check_symbols(&observation_map)?;
        let mut hit = vec![false; alphabet.size()];
        observation_map.iter().for_each(|&a| hit[a as usize] = true);
        if let Some(missing) = hit.iter().position(|&h| !h) {
            return Err(Error::NotSurjective(missing as Symbol));
        }
        let n = hidden.size();
        let mut transfer = vec![Matrix::zeros(n, n); alphabet.size()];
        for z in 0..n {
            for (zp, &a) in observation_map.iter().enumerate() {
                transfer[a as usize][(z, zp)] = hidden.transitions()[(z, zp)];
            }
        }
        Ok(Self { hidden, alphabet, observation_map, transfer })
    }

    pub fn hidden(&self) -> &FiniteMarkovChain<T> {
        &self.hidden
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn observation_map(&self) -> &[Symbol] {
        &self.observation_map
    }

    pub fn transfer(&self, a: Symbol) -> &Matrix<T> {
        &self.transfer[a as usize]
    }

    /// Scaled row vector `pi M_{a_1} ... M_{a_n}`, renormalised every step.
    pub fn forward(&self, word: &[Symbol]) -> Result<Scaled<T>> {
        self.alphabet.check_symbols(word)?;
        let mut state = Scaled { vector: self.hidden.stationary().to_vec(), log_scale: T::zero() };
        for &a in word {
            state = self.step_forward(&state, a);
        }
        Ok(state)
    }

    pub(crate) fn step_forward(&self, state: &Scaled<T>, a: Symbol) -> Scaled<T> {
        if state.is_zero() {
            return state.clone();
        }
        Scaled::normalized(self.transfer[a as usize].left_mul(&state.vector), state.log_scale)
    }

    /// Scaled column vector `M_{b_1} ... M_{b_m} 1`.
    pub fn backward(&self, word: &[Symbol]) -> Result<Scaled<T>> {
        self.alphabet.check_symbols(word)?;
        let n = self.hidden.size();
        let mut state = Scaled { vector: vec![T::one(); n], log_scale: T::zero() };
        // Keep the unit vector itself for the empty word.
        if word.is_empty() {
            return Ok(state);
        }
        for &b in word.iter().rev() {
            if state.is_zero() {
                break;
            }
            state = Scaled::normalized(self.transfer[b as usize].right_mul(&state.vector), state.log_scale);
        }
        Ok(state)
    }

    pub fn prefix_log_probs(&self, word: &[Symbol]) -> Result<Vec<T>> {
        self.alphabet.check_word(word)?;
        let mut state = Scaled { vector: self.hidden.stationary().to_vec(), log_scale: T::zero() };
        Ok(word
            .iter()
            .map(|&a| {
                state = self.step_forward(&state, a);
                state.log_scale
            })
            .collect())
    }

    /// `log(pi M_{a_1} ... M_{a_n} 1)`.
    pub fn marginal_log_prob(&self, word: &[Symbol]) -> Result<T> {
        self.alphabet.check_word(word)?;
        Ok(self.forward(word)?.log_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::alphabet::Words;
    use approx::assert_abs_diff_eq;

    fn hidden3() -> FiniteMarkovChain<f64> {
        FiniteMarkovChain::new(&[vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.4, 0.0, 0.6]]).unwrap()
    }

    /// Sum over all hidden paths `z_1..z_n` with `F(z_i) = a_i` of
    /// `pi_{z_1} prod P_{z_i z_{i+1}}`.
    fn brute_force(chain: &FiniteMarkovChain<f64>, map: &[u32], word: &[u32]) -> f64 {
        Words::new(chain.size(), word.len())
            .filter(|path| path.iter().zip(word).all(|(&z, &a)| map[z as usize] == a))
            .map(|path| {
                let mut p = chain.stationary()[path[0] as usize];
                for w in path.windows(2) {
                    p *= chain.p(w[0], w[1]);
                }
                p
            })
            .sum()
    }

    #[test]
    fn matches_hidden_path_enumeration() {
        let map = vec![0, 1, 1];
        let m = FunctionMarkovModel::lump(hidden3(), map.clone(), None).unwrap();
        for n in 1..=6 {
            for w in Words::new(2, n) {
                let want = brute_force(m.hidden(), &map, &w);
                let got = m.marginal_log_prob(&w).unwrap().exp();
                assert_abs_diff_eq!(got, want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn transfer_matrices_sum_to_hidden() {
        let m = FunctionMarkovModel::lump(hidden3(), vec![1, 0, 1], None).unwrap();
        for z in 0..3 {
            for zp in 0..3 {
                let s = m.transfer(0)[(z, zp)] + m.transfer(1)[(z, zp)];
                assert_eq!(s, m.hidden().transitions()[(z, zp)]);
            }
        }
    }

    #[test]
    fn identity_lump_matches_chain() {
        let c = hidden3();
        let m = FunctionMarkovModel::lump(c.clone(), vec![0, 1, 2], None).unwrap();
        for n in 1..=5 {
            for w in Words::new(3, n) {
                let a = c.marginal_log_prob(&w).unwrap();
                let b = m.marginal_log_prob(&w).unwrap();
                if a == f64::NEG_INFINITY {
                    assert_eq!(b, a);
                } else {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_maps() {
        assert_eq!(
            FunctionMarkovModel::lump(hidden3(), vec![0, 2, 2], None).unwrap_err(),
            Error::NotSurjective(1)
        );
        assert!(matches!(
            FunctionMarkovModel::lump(hidden3(), vec![0, 1], None),
            Err(Error::MapLength { .. })
        ));
    }

    #[test]
    fn long_words_do_not_underflow() {
        let m = FunctionMarkovModel::lump(hidden3(), vec![0, 1, 1], None).unwrap();
        let word: Vec<u32> = (0..5000).map(|i| (i % 3 == 0) as u32).collect();
        let lp = m.marginal_log_prob(&word).unwrap();
        assert!(lp.is_finite() && lp < -500.0);
    }
}
