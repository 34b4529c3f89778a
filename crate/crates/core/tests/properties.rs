use crossent::estimate::{aggregate, EstimatePoint, EstimateSeries, Axis};
use crossent::matching::{
    match_length_naive, match_profile_from_waiting, waiting_profile_naive, MatchIndex, PrefixScanner,
};
use crossent::model::{FiniteMarkovChain, FunctionMarkovModel, Model, Words};
use proptest::prelude::*;

/// `(alphabet size, x, y)` with x often overlapping y so long matches occur.
fn pattern_and_text() -> impl Strategy<Value = (u32, Vec<u32>, Vec<u32>)> {
    (1u32..=4).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(0..k, 1..200),
            prop::collection::vec(0..k, 1..40),
            any::<prop::sample::Index>(),
            any::<bool>(),
        )
            .prop_map(|(k, y, x, at, splice)| {
                let x = if splice {
                    let start = at.index(y.len());
                    let mut x: Vec<u32> = y[start..].iter().take(x.len()).copied().collect();
                    x.extend(&y[..y.len().min(3)]);
                    x
                } else {
                    x
                };
                (k, x, y)
            })
    })
}

fn stochastic_rows(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.05f64..1.0, k), k)
        .prop_map(|rows| rows.into_iter().map(|r| { let s: f64 = r.iter().sum(); r.iter().map(|v| v / s).collect() }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn index_scanner_and_naive_agree((_k, x, y) in pattern_and_text()) {
        let n_max = x.len();
        let naive = waiting_profile_naive(&x, &y, n_max).unwrap();
        let indexed = MatchIndex::build(&y).waiting_profile(&x, n_max).unwrap();
        let scanned = PrefixScanner::new(&x, n_max).unwrap().scan(y.iter().copied(), y.len());
        prop_assert_eq!(indexed.values(), naive.values());
        prop_assert_eq!(scanned.values(), naive.values());
        prop_assert!(indexed.is_well_formed());
    }

    #[test]
    fn duality_matches_direct_match_lengths((_k, x, y) in pattern_and_text()) {
        let grid: Vec<usize> = (1..=y.len()).step_by(7).chain([y.len()]).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let profile = MatchIndex::build(&y).waiting_profile(&x, x.len()).unwrap();
        let mp = match_profile_from_waiting(&profile, &grid).unwrap();
        for e in mp.entries() {
            prop_assert_eq!(e.length, match_length_naive(&x, &y[..e.m], e.m).unwrap());
        }
    }

    #[test]
    fn markov_marginals_are_consistent(rows in (1usize..=3).prop_flat_map(stochastic_rows)) {
        let chain = FiniteMarkovChain::new(&rows).unwrap();
        let k = chain.size();
        let model = Model::Markov(chain.clone());
        check_marginals(&model, k, 5);
        let pi = chain.stationary();
        for j in 0..k {
            let flow: f64 = (0..k).map(|i| pi[i] * rows[i][j]).sum();
            prop_assert!((flow - pi[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn lumped_marginals_are_consistent(rows in stochastic_rows(3), split in 0usize..3) {
        let map: Vec<u32> = (0..3).map(|z| (z > split.min(1)) as u32).collect();
        let hidden = FiniteMarkovChain::new(&rows).unwrap();
        let model = Model::FunctionMarkov(FunctionMarkovModel::lump(hidden, map, None).unwrap());
        check_marginals(&model, 2, 6);
    }

    #[test]
    fn aggregation_ignores_trial_order(
        values in prop::collection::vec(prop::collection::vec(prop::option::of(-5.0f64..5.0), 3), 1..20),
        shuffle in any::<u64>(),
    ) {
        let series: Vec<EstimateSeries> = values.iter().map(|v| series_of(v)).collect();
        let mut permuted = series.clone();
        let mut state = shuffle;
        for i in (1..permuted.len()).rev() {
            state = crossent::rng::splitmix64(state);
            permuted.swap(i, (state % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(aggregate(&series).unwrap(), aggregate(&permuted).unwrap());
    }
}

fn series_of(values: &[Option<f64>]) -> EstimateSeries {
    EstimateSeries {
        axis: Axis::N,
        points: values.iter().enumerate().map(|(i, v)| EstimatePoint { index: i + 1, value: *v }).collect(),
        model_refs: ("x".into(), "y".into()),
        seed: 0,
    }
}

fn check_marginals(model: &Model<f64>, k: usize, n_max: usize) {
    for n in 1..=n_max {
        let mut total = 0.0;
        for w in Words::new(k, n) {
            let p = model.marginal_log_prob(&w).unwrap().exp();
            total += p;
            let ext: f64 = (0..k as u32)
                .map(|a| {
                    let mut wa = w.clone();
                    wa.push(a);
                    model.marginal_log_prob(&wa).unwrap().exp()
                })
                .sum();
            assert!((ext - p).abs() < 1e-12, "extension sum {ext} vs {p}");
        }
        assert!((total - 1.0).abs() < 1e-12, "total {total} at n = {n}");
    }
}
