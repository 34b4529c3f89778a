//! Small reference models shared by tests, examples and the CLI.

use crate::error::Result;
use crate::model::{FiniteMarkovChain, FunctionMarkovModel, LadderChain, Ramp, DEFAULT_TAIL_TOLERANCE};
use crate::scalar::Scalar;

fn chain<T: Scalar>(rows: [[f64; 4]; 4]) -> FiniteMarkovChain<T> {
    let rows: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&v| T::of(v)).collect()).collect();
    FiniteMarkovChain::new(&rows).expect("fixture is a valid chain")
}

/// Period-2 chain on four letters alternating between `{0,1}` and `{2,3}`.
pub fn figure1_y<T: Scalar>() -> FiniteMarkovChain<T> {
    chain([
        [0.0, 0.0, 0.7, 0.3],
        [0.0, 0.0, 0.4, 0.6],
        [0.5, 0.5, 0.0, 0.0],
        [0.2, 0.8, 0.0, 0.0],
    ])
}

/// Same support as [`figure1_y`], different positive entries.
pub fn figure1_x_diff<T: Scalar>() -> FiniteMarkovChain<T> {
    chain([
        [0.0, 0.0, 0.5, 0.5],
        [0.0, 0.0, 0.8, 0.2],
        [0.3, 0.7, 0.0, 0.0],
        [0.6, 0.4, 0.0, 0.0],
    ])
}

/// `[[0,1],[1,0]]`.
pub fn swap<T: Scalar>() -> FiniteMarkovChain<T> {
    FiniteMarkovChain::new(&[vec![T::zero(), T::one()], vec![T::one(), T::zero()]]).expect("valid")
}

pub fn fair_coin<T: Scalar>() -> FiniteMarkovChain<T> {
    FiniteMarkovChain::iid(&[T::of(0.5), T::of(0.5)]).expect("valid")
}

pub fn two_state<T: Scalar>(p01: f64, p10: f64) -> FiniteMarkovChain<T> {
    let rows = vec![vec![T::of(1.0 - p01), T::of(p01)], vec![T::of(p10), T::of(1.0 - p10)]];
    FiniteMarkovChain::new(&rows).expect("valid")
}

/// Three hidden states observed through `[0, 1, 1]`.
pub fn hidden_three<T: Scalar>() -> FunctionMarkovModel<T> {
    let rows: Vec<Vec<T>> = [[0.5, 0.3, 0.2], [0.1, 0.6, 0.3], [0.4, 0.0, 0.6]]
        .iter()
        .map(|r| r.iter().map(|&v| T::of(v)).collect())
        .collect();
    let hidden = FiniteMarkovChain::new(&rows).expect("valid");
    FunctionMarkovModel::lump(hidden, vec![0, 1, 1], None).expect("valid")
}

/// Identity-ramp ladder with `gamma = 0.3` truncated at `J+ = 40`.
pub fn ladder_identity<T: Scalar>() -> Result<LadderChain<T>> {
    LadderChain::build(T::of(0.3), Ramp::Identity, 40, T::of(DEFAULT_TAIL_TOLERANCE))
}
