//! Streaming waiting-time profile: a prefix-function automaton on the
//! pattern consumes `y` symbol by symbol, so `y` never has to be stored and
//! the scan stops as soon as every prefix has been seen.

use crate::error::{Error, Result};
use crate::matching::WaitingProfile;
use crate::model::Symbol;

#[derive(Debug, Clone)]
pub struct PrefixScanner {
    pattern: Vec<Symbol>,
    /// `border[i]`: length of the longest proper border of `pattern[..=i]`.
    border: Vec<usize>,
}

impl PrefixScanner {
    pub fn new(x: &[Symbol], n_max: usize) -> Result<Self> {
        if n_max > x.len() {
            return Err(Error::PatternTooLong { requested: n_max, available: x.len() });
        }
        let pattern = x[..n_max].to_vec();
        let mut border = vec![0; n_max];
        let mut k = 0;
        for i in 1..n_max {
            while k > 0 && pattern[i] != pattern[k] {
                k = border[k - 1];
            }
            if pattern[i] == pattern[k] {
                k += 1;
            }
            border[i] = k;
        }
        Ok(Self { pattern, border })
    }

    /// Reads at most `limit` symbols of `y`. The matched-prefix length
    /// grows by at most one per symbol, so the first time it reaches `l`
    /// is the earliest end of `x[1..l]`.
    pub fn scan(&self, y: impl IntoIterator<Item = Symbol>, limit: usize) -> WaitingProfile {
        let n = self.pattern.len();
        let mut values = vec![None; n];
        if n == 0 {
            return WaitingProfile::new(values, limit);
        }
        let (mut k, mut reached, mut consumed) = (0usize, 0usize, 0usize);
        for c in y.into_iter().take(limit) {
            consumed += 1;
            if k == n {
                k = self.border[k - 1];
            }
            while k > 0 && self.pattern[k] != c {
                k = self.border[k - 1];
            }
            if self.pattern[k] == c {
                k += 1;
            }
            if k > reached {
                reached = k;
                values[k - 1] = Some(consumed - k + 1);
                if reached == n {
                    break;
                }
            }
        }
        // The window is the full `limit` even when the scan stopped early:
        // every later symbol could only add longer matches than requested.
        let window = if reached == n { limit.max(consumed) } else { consumed };
        WaitingProfile::new(values, window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::waiting_profile_naive;

    #[test]
    fn matches_naive() {
        let y = vec![0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0];
        for s in 0..y.len() {
            let x = &y[s..];
            let scan = PrefixScanner::new(x, x.len()).unwrap().scan(y.iter().copied(), y.len());
            assert_eq!(scan, waiting_profile_naive(x, &y, x.len()).unwrap());
        }
    }

    #[test]
    fn periodic_pattern_borders() {
        let x = [0, 0, 0, 0, 1];
        let y = [0, 0, 0, 1, 0, 0, 0, 0, 0, 1];
        let scan = PrefixScanner::new(&x, 5).unwrap().scan(y, 10);
        assert_eq!(scan, waiting_profile_naive(&x, &y, 5).unwrap());
    }
}
