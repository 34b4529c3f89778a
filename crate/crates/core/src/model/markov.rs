use crate::error::{Error, Result};
use crate::linalg::{solve_full_rank, Matrix};
use crate::model::alphabet::{Alphabet, Symbol};
use crate::model::graph;
use crate::scalar::Scalar;

/// A stationary finite-state Markov chain: row-stochastic transitions and
/// their unique, strictly positive invariant vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMarkovChain<T> {
    alphabet: Alphabet,
    transitions: Matrix<T>,
    stationary: Vec<T>,
}

fn check_stochastic<T: Scalar>(p: &Matrix<T>) -> Result<()> {
    let tol = T::row_sum_tol();
    for i in 0..p.rows() {
        let row = p.row(i);
        let sum: T = row.iter().copied().sum();
        let bad_entry = row.iter().any(|&x| !(x >= T::zero() && x <= T::one()));
        if bad_entry || (sum - T::one()).abs() > tol {
            return Err(Error::NonStochastic { row: i, sum: sum.as_f64() });
        }
    }
    Ok(())
}

fn square_matrix<T: Scalar>(rows: &[Vec<T>]) -> Result<Matrix<T>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidAlphabet("empty transition matrix".into()));
    }
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::NotSquare { rows: n, row, cols: r.len() });
    }
    Ok(Matrix::from_rows(rows).expect("rows checked square"))
}

/// Invariant probability vector of a row-stochastic matrix, by a direct
/// solve of `(P^T - I) pi = 0` stacked with the normalisation row.
///
/// Power iteration is avoided on purpose: it oscillates on periodic chains.
pub fn stationary_distribution<T: Scalar>(transitions: &Matrix<T>) -> Result<Vec<T>> {
    let n = transitions.rows();
    if transitions.cols() != n {
        return Err(Error::NotSquare { rows: n, row: 0, cols: transitions.cols() });
    }
    check_stochastic(transitions)?;
    let mut system = Matrix::zeros(n + 1, n);
    for i in 0..n {
        for j in 0..n {
            system[(i, j)] = transitions[(j, i)] - if i == j { T::one() } else { T::zero() };
        }
    }
    for j in 0..n {
        system[(n, j)] = T::one();
    }
    let mut rhs = vec![T::zero(); n + 1];
    rhs[n] = T::one();
    let mut pi = solve_full_rank(&system, &rhs).ok_or(Error::NonUniqueStationary)?;
    for p in pi.iter_mut() {
        if *p < T::zero() {
            *p = T::zero();
        }
    }
    let total: T = pi.iter().copied().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

impl<T: Scalar> FiniteMarkovChain<T> {
    pub fn new(rows: &[Vec<T>]) -> Result<Self> {
        let alphabet = Alphabet::new(rows.len())?;
        Self::with_alphabet(alphabet, rows)
    }

    pub fn with_alphabet(alphabet: Alphabet, rows: &[Vec<T>]) -> Result<Self> {
        let transitions = square_matrix(rows)?;
        Self::from_matrix(alphabet, transitions)
    }

    pub fn from_matrix(alphabet: Alphabet, transitions: Matrix<T>) -> Result<Self> {
        alphabet.validate()?;
        if alphabet.size() != transitions.rows() {
            return Err(Error::AlphabetMismatch(alphabet.size(), transitions.rows()));
        }
        let stationary = stationary_distribution(&transitions)?;
        let chain = Self { alphabet, transitions, stationary };
        chain.check_balance()?;
        if let Some(state) = chain.stationary.iter().position(|&p| p <= T::zero()) {
            return Err(Error::TransientState { state });
        }
        Ok(chain)
    }

    fn check_balance(&self) -> Result<()> {
        let image = self.transitions.left_mul(&self.stationary);
        let residual = image
            .iter()
            .zip(&self.stationary)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        if residual > T::balance_tol() {
            return Err(Error::NotInvariant { residual: residual.as_f64() });
        }
        Ok(())
    }

    /// An i.i.d. source: every row equals `probs`.
    pub fn iid(probs: &[T]) -> Result<Self> {
        Self::new(&vec![probs.to_vec(); probs.len()])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn transitions(&self) -> &Matrix<T> {
        &self.transitions
    }

    pub fn stationary(&self) -> &[T] {
        &self.stationary
    }

    pub fn p(&self, a: Symbol, b: Symbol) -> T {
        self.transitions[(a as usize, b as usize)]
    }

    pub fn support_graph(&self) -> Vec<Vec<usize>> {
        graph::adjacency(self.size(), |i, j| self.transitions[(i, j)] > T::zero())
    }

    pub fn is_irreducible(&self) -> bool {
        graph::is_strongly_connected(&self.support_graph())
    }

    /// Period of the chain, `None` if reducible.
    pub fn period(&self) -> Option<usize> {
        graph::period(&self.support_graph())
    }

    /// `log pi_{a_1} + sum log P_{a_i, a_{i+1}}`, `-inf` for impossible words.
    pub fn marginal_log_prob(&self, word: &[Symbol]) -> Result<T> {
        Ok(self.prefix_log_probs(word)?.pop().expect("non-empty word"))
    }

    /// Log-probabilities of every prefix `word[..l]`, `l = 1..=len`.
    pub fn prefix_log_probs(&self, word: &[Symbol]) -> Result<Vec<T>> {
        self.alphabet.check_word(word)?;
        let mut out = Vec::with_capacity(word.len());
        let mut acc = self.stationary[word[0] as usize].ln();
        out.push(acc);
        for w in word.windows(2) {
            acc += self.p(w[0], w[1]).ln();
            out.push(acc);
        }
        Ok(out)
    }

    pub fn entropy_rate(&self) -> T {
        cross_entropy_rate(self, self).expect("a chain shares its own alphabet")
    }
}

/// `-sum_a pi^X_a sum_b P^X_ab log P^Y_ab`, or `+inf` when some transition
/// charged by `X` is forbidden under `Y`.
///
/// The `log pi^Y` boundary term vanishes in the rate and is not included.
pub fn cross_entropy_rate<T: Scalar>(x: &FiniteMarkovChain<T>, y: &FiniteMarkovChain<T>) -> Result<T> {
    if x.size() != y.size() {
        return Err(Error::AlphabetMismatch(x.size(), y.size()));
    }
    let mut total = T::zero();
    for a in 0..x.size() {
        let mut row = T::zero();
        for b in 0..x.size() {
            let px = x.transitions[(a, b)];
            if px == T::zero() {
                continue;
            }
            let py = y.transitions[(a, b)];
            if py == T::zero() {
                return Ok(T::infinity());
            }
            row += px * py.ln();
        }
        total -= x.stationary[a] * row;
    }
    Ok(total)
}
