//! Waiting times `W_n(x, y)` and longest-match lengths `L_m(x, y)`.
//!
//! Positions are 1-based: `W_n` is the least `k >= 1` with
//! `y[k..k+n-1] == x[1..n]`, and `L_m` is the largest `l` such that `x[1..l]`
//! occurs in `y` starting at some `k <= m - l`. On a finite `y` a waiting
//! time can be absent; absent entries are censored, not errors.

mod automaton;
mod scanner;

pub use automaton::MatchIndex;
pub use scanner::PrefixScanner;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Symbol;

/// `W_l` for `l = 1..=n_max`; `None` where `x[1..l]` does not occur in the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaitingProfile {
    values: Vec<Option<usize>>,
    y_length: usize,
}

impl WaitingProfile {
    pub fn new(values: Vec<Option<usize>>, y_length: usize) -> Self {
        Self { values, y_length }
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn y_length(&self) -> usize {
        self.y_length
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.values
    }

    /// `W_l`, 1-based `l`.
    pub fn get(&self, l: usize) -> Option<usize> {
        l.checked_sub(1).and_then(|i| self.values.get(i).copied().flatten())
    }

    /// Longest `l` with a defined waiting time.
    pub fn defined_len(&self) -> usize {
        self.values.iter().take_while(|v| v.is_some()).count()
    }

    /// Monotone, absent-closed and inside the window.
    pub fn is_well_formed(&self) -> bool {
        let d = self.defined_len();
        let tail_absent = self.values[d..].iter().all(Option::is_none);
        let monotone = self.values[..d].windows(2).all(|w| w[0] <= w[1]);
        let inside = self.values[..d]
            .iter()
            .enumerate()
            .all(|(i, v)| v.is_some_and(|k| k >= 1 && k + i <= self.y_length));
        tail_absent && monotone && inside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub m: usize,
    /// `L_m`; zero encodes an empty admissible set.
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchProfile {
    entries: Vec<MatchEntry>,
    n_max: usize,
}

impl MatchProfile {
    pub fn entries(&self) -> &[MatchEntry] {
        &self.entries
    }

    /// Length of the pattern the profile was computed from.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// True when `L_m` reached the pattern length, so the true match may be longer.
    pub fn is_saturated(&self, e: &MatchEntry) -> bool {
        e.length >= self.n_max && e.m > self.n_max + 1
    }

    pub fn is_well_formed(&self) -> bool {
        let bounded = self.entries.iter().all(|e| e.length < e.m.max(1));
        let steps = self
            .entries
            .windows(2)
            .all(|w| w[0].length <= w[1].length && w[1].length <= w[0].length + (w[1].m - w[0].m));
        bounded && steps
    }
}

pub(crate) fn check_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// Direct scan for `W_n`; the oracle for the indexed paths.
pub fn waiting_time_naive(x: &[Symbol], y: &[Symbol], n: usize) -> Result<Option<usize>> {
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    if n > x.len() {
        return Err(Error::PatternTooLong { requested: n, available: x.len() });
    }
    let pat = &x[..n];
    Ok(y.windows(n).position(|w| w == pat).map(|i| i + 1))
}

pub fn waiting_profile_naive(x: &[Symbol], y: &[Symbol], n_max: usize) -> Result<WaitingProfile> {
    if n_max > x.len() {
        return Err(Error::PatternTooLong { requested: n_max, available: x.len() });
    }
    let values = (1..=n_max).map(|n| waiting_time_naive(x, y, n)).collect::<Result<_>>()?;
    Ok(WaitingProfile::new(values, y.len()))
}

/// Brute-force `L_m`: maximum over starts `k` of the common prefix length
/// of `x` and `y[k..]`, capped by `m - k`.
pub fn match_length_naive(x: &[Symbol], y: &[Symbol], m: usize) -> Result<usize> {
    if m > y.len() {
        return Err(Error::GridExceedsWindow { m, y_length: y.len() });
    }
    let mut best = 0;
    for k in 1..m {
        let cap = (m - k).min(x.len());
        let lcp = x[..cap].iter().zip(&y[k - 1..]).take_while(|(a, b)| a == b).count();
        best = best.max(lcp);
    }
    Ok(best)
}

/// `L_m = max { l : W_l defined and W_l <= m - l }`, 0 if none.
pub fn match_profile_from_waiting(profile: &WaitingProfile, m_grid: &[usize]) -> Result<MatchProfile> {
    check_grid(m_grid)?;
    if let Some(&m) = m_grid.iter().find(|&&m| m > profile.y_length()) {
        return Err(Error::GridExceedsWindow { m, y_length: profile.y_length() });
    }
    // W_l + l is strictly increasing over the defined prefix.
    let reach: Vec<usize> = profile.values()[..profile.defined_len()]
        .iter()
        .enumerate()
        .map(|(i, w)| w.expect("defined prefix") + i + 1)
        .collect();
    let entries = m_grid
        .iter()
        .map(|&m| MatchEntry { m, length: reach.partition_point(|&r| r <= m) })
        .collect();
    Ok(MatchProfile { entries, n_max: profile.n_max() })
}

#[cfg(test)]
mod tests {
    use super::*;

    // a = 0, b = 1
    const X: [u32; 2] = [0, 1];
    const Y: [u32; 5] = [1, 0, 0, 1, 0];

    #[test]
    fn small_waiting_times() {
        assert_eq!(waiting_time_naive(&X, &Y, 2).unwrap(), Some(3));
        assert_eq!(waiting_time_naive(&Y, &Y, 4).unwrap(), Some(1));
        assert_eq!(waiting_time_naive(&[2, 0], &Y, 1).unwrap(), None);
        assert!(matches!(waiting_time_naive(&X, &Y, 3), Err(Error::PatternTooLong { .. })));
    }

    #[test]
    fn small_match_lengths() {
        assert_eq!(match_length_naive(&X, &Y, 1).unwrap(), 0);
        assert_eq!(match_length_naive(&X, &Y, 4).unwrap(), 1);
        assert_eq!(match_length_naive(&X, &Y, 5).unwrap(), 2);
        assert!(match_length_naive(&X, &Y, 6).is_err());
    }

    #[test]
    fn duality_on_small_example() {
        let prof = waiting_profile_naive(&X, &Y, 2).unwrap();
        let mp = match_profile_from_waiting(&prof, &[1, 2, 3, 4, 5]).unwrap();
        let got: Vec<usize> = mp.entries().iter().map(|e| e.length).collect();
        assert_eq!(got, vec![0, 0, 1, 1, 2]);
        assert!(mp.is_well_formed());
    }

    #[test]
    fn self_match_profile() {
        let y: Vec<u32> = (0..50).map(|i| (i * 7 % 3) as u32).collect();
        let prof = waiting_profile_naive(&y, &y, 20).unwrap();
        assert!(prof.values().iter().all(|&v| v == Some(1)));
        let grid: Vec<usize> = (1..=21).collect();
        let mp = match_profile_from_waiting(&prof, &grid).unwrap();
        assert!(mp.entries().iter().all(|e| e.length == e.m - 1));
    }

    #[test]
    fn absent_profile_gives_zero() {
        let prof = WaitingProfile::new(vec![None; 4], 10);
        let mp = match_profile_from_waiting(&prof, &[2, 5, 10]).unwrap();
        assert!(mp.entries().iter().all(|e| e.length == 0));
        assert!(matches!(match_profile_from_waiting(&prof, &[11]), Err(Error::GridExceedsWindow { .. })));
        assert_eq!(match_profile_from_waiting(&prof, &[5, 5]), Err(Error::InvalidGrid));
    }
}
