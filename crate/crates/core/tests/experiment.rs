use crossent::estimate::{monte_carlo, run_trials, EstimatorKind, Experiment, ExperimentSpec, LogBase, ModelSource};
use crossent::fixtures;
use crossent::model::file::ModelDef;
use crossent::model::Model;
use crossent::{Error, MarkovChain};

fn spec(estimator: EstimatorKind, grid: Vec<usize>, trials: usize, seed: u64) -> ExperimentSpec {
    let (n_grid, m_grid) = match estimator {
        EstimatorKind::Match => (None, Some(grid)),
        _ => (Some(grid), None),
    };
    ExperimentSpec {
        estimator,
        model_x: ModelSource::Path("x".into()),
        model_y: ModelSource::Path("y".into()),
        n_grid,
        m_grid,
        trials,
        seed,
        output: None,
        output_dir: None,
        plot: false,
        log_base: LogBase::Nats,
        x_length: None,
        y_length: None,
    }
}

fn expt(s: ExperimentSpec, x: MarkovChain, y: MarkovChain) -> Experiment<f64> {
    Experiment::from_models(s, Model::Markov(x), Model::Markov(y)).unwrap()
}

#[test]
fn single_trial_aggregate_is_the_trial() {
    let e = expt(spec(EstimatorKind::Match, vec![100, 1000], 1, 5), fixtures::figure1_y(), fixtures::figure1_y());
    let trials = run_trials(&e).unwrap();
    let agg = monte_carlo(&e).unwrap();
    for (p, q) in agg.points.iter().zip(&trials[0].points) {
        assert_eq!(p.mean, q.value);
        assert_eq!(p.sem, Some(0.0));
        assert_eq!(p.trials, 1);
    }
}

#[test]
fn runs_are_deterministic_and_pool_independent() {
    let e = expt(spec(EstimatorKind::Wait, vec![2, 4, 8], 12, 99), fixtures::two_state(0.3, 0.6), fixtures::two_state(0.5, 0.2));
    let a = monte_carlo(&e).unwrap();
    let b = monte_carlo(&e).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| monte_carlo(&e)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = expt(spec(EstimatorKind::Wait, vec![2, 4, 8], 12, 100), fixtures::two_state(0.3, 0.6), fixtures::two_state(0.5, 0.2));
    assert_ne!(a, monte_carlo(&other).unwrap());
}

#[test]
fn fair_coin_waiting_times_estimate_log_two() {
    let mut s = spec(EstimatorKind::Wait, vec![20], 32, 11);
    s.y_length = Some(10_000_000);
    let e = expt(s, fixtures::fair_coin(), fixtures::fair_coin());
    let p = monte_carlo(&e).unwrap().points[0];
    assert_eq!(p.censored, 0);
    assert!((p.mean.unwrap() - 2f64.ln()).abs() < 0.1, "{p:?}");
}

#[test]
fn short_stream_censors_instead_of_guessing() {
    let mut s = spec(EstimatorKind::Wait, vec![30], 3, 1);
    s.y_length = Some(50);
    let e = expt(s, fixtures::fair_coin(), fixtures::fair_coin());
    let p = monte_carlo(&e).unwrap().points[0];
    assert_eq!(p.censored, 3);
    assert_eq!(p.mean, None);
}

#[test]
fn forbidden_words_are_reported_with_the_trial() {
    // X emits 00, which the swap chain never does.
    let e = expt(spec(EstimatorKind::Statistic, vec![20], 2, 3), fixtures::fair_coin(), fixtures::swap());
    match run_trials(&e) {
        Err(Error::Trial { trial: 0, source }) => assert!(matches!(*source, Error::AbsoluteContinuityViolation { .. })),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn undersized_pattern_is_detected() {
    let mut s = spec(EstimatorKind::Match, vec![1000], 1, 3);
    s.x_length = Some(3);
    let e = expt(s, fixtures::figure1_y(), fixtures::figure1_y());
    assert!(matches!(run_trials(&e), Err(Error::Trial { source, .. }) if matches!(*source, Error::PatternExhausted { .. })));
}

#[test]
fn spec_validation() {
    let mut s = spec(EstimatorKind::Match, vec![10, 5], 1, 0);
    assert!(matches!(s.validate(), Err(Error::InvalidGrid)));
    s.m_grid = None;
    assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
    let s = spec(EstimatorKind::Wait, vec![1], 0, 0);
    assert!(s.validate().is_err());
    let s = spec(EstimatorKind::Wait, vec![1], 1, 0);
    let bad = Experiment::<f64>::from_models(s, Model::Markov(fixtures::fair_coin()), Model::Markov(fixtures::figure1_y()));
    assert!(matches!(bad, Err(Error::AlphabetMismatch(2, 4))));
}

#[test]
fn spec_json_with_inline_and_path_models() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let text = format!(
        r#"{{"estimator": "match", "model_x": {}, "model_y": "figure1_y.json", "m_grid": [100, 1000], "trials": 2, "seed": 4}}"#,
        ModelDef::markov(&fixtures::figure1_x_diff::<f64>()).to_json()
    );
    let s = ExperimentSpec::from_json(&text).unwrap();
    assert!(matches!(s.model_x, ModelSource::Inline(_)));
    let e = Experiment::<f64>::new(s, Some(&dir)).unwrap();
    assert_eq!(e.model_y.alphabet_size(), 4);
    assert_eq!(monte_carlo(&e).unwrap().points.len(), 2);
    assert!(ExperimentSpec::from_json(r#"{"estimator": "wait", "bogus": 1}"#).is_err());
}

#[test]
fn single_precision_models_run() {
    let s = spec(EstimatorKind::Statistic, vec![5, 10], 4, 8);
    let e = Experiment::<f32>::from_models(s, Model::Markov(fixtures::two_state(0.3, 0.6)), Model::Markov(fixtures::two_state(0.3, 0.6))).unwrap();
    let agg = monte_carlo(&e).unwrap();
    assert!(agg.points.iter().all(|p| p.mean.is_some_and(f64::is_finite)));
}
