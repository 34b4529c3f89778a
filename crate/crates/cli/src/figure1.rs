//! The 4-state periodic fixture: match-length estimates for X = Y and for a
//! different chain X on the same support, with exact reference rates.

use std::path::{Path, PathBuf};

use anyhow::{ensure, Result};
use crossent::estimate::{monte_carlo, AggregateSeries, EstimatorKind, Experiment, ExperimentSpec, LogBase, ModelSource};
use crossent::fixtures::{figure1_x_diff, figure1_y};
use crossent::model::file::ModelDef;
use crossent::model::{cross_entropy_rate, Model};
use crossent::MarkovChain;

use crate::plot::{render, PlotCase, PlotMeta};
use crate::table::{aggregate_csv, read_aggregate};

pub const DEFAULT_M_GRID: [usize; 7] = [1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000];
pub const DEFAULT_TRIALS: usize = 32;

pub struct Figure1Fixture {
    pub chain_y: MarkovChain,
    pub chain_x_diff: MarkovChain,
}

impl Default for Figure1Fixture {
    fn default() -> Self {
        Self { chain_y: figure1_y(), chain_x_diff: figure1_x_diff() }
    }
}

impl Figure1Fixture {
    pub fn chain_x_same(&self) -> &MarkovChain {
        &self.chain_y
    }

    /// Both chains irreducible with period 2 and sharing one support.
    pub fn verify(&self) -> Result<()> {
        for c in [&self.chain_y, &self.chain_x_diff] {
            ensure!(c.is_irreducible(), "fixture chain is reducible");
            ensure!(c.period() == Some(2), "fixture chain has period {:?}", c.period());
        }
        ensure!(self.chain_y.support_graph() == self.chain_x_diff.support_graph(), "fixture supports differ");
        Ok(())
    }
}

pub struct Case {
    pub name: &'static str,
    pub label: &'static str,
    pub series: AggregateSeries,
    /// Exact cross-entropy rate in nats.
    pub reference: f64,
}

pub fn spec(trials: usize, seed: u64, m_grid: &[usize]) -> ExperimentSpec {
    ExperimentSpec {
        estimator: EstimatorKind::Match,
        model_x: ModelSource::Path("x".into()),
        model_y: ModelSource::Path("y".into()),
        n_grid: None,
        m_grid: Some(m_grid.to_vec()),
        trials,
        seed,
        output: None,
        output_dir: None,
        plot: true,
        log_base: LogBase::Nats,
        x_length: None,
        y_length: None,
    }
}

/// Runs both cases with the same base seed.
pub fn run(fixture: &Figure1Fixture, trials: usize, seed: u64, m_grid: &[usize]) -> Result<Vec<Case>> {
    fixture.verify()?;
    let pairs = [
        ("same", "X = Y", fixture.chain_x_same()),
        ("diff", "X != Y", &fixture.chain_x_diff),
    ];
    let mut out = Vec::new();
    for (name, label, x) in pairs {
        let mut sp = spec(trials, seed, m_grid);
        sp.model_x = ModelSource::Inline(ModelDef::markov(x));
        sp.model_y = ModelSource::Inline(ModelDef::markov(&fixture.chain_y));
        let expt = Experiment::from_models(sp, Model::Markov(x.clone()), Model::Markov(fixture.chain_y.clone()))?;
        let series = monte_carlo(&expt)?;
        let reference = cross_entropy_rate(x, &fixture.chain_y)?;
        out.push(Case { name, label, series, reference });
    }
    Ok(out)
}

/// Writes `figure1_<case>.csv`, `figure1_meta.json` and `figure1.svg` into `dir`.
pub fn write(dir: &Path, cases: &[Case], seed: u64, trials: usize, base: LogBase) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut plot_cases = Vec::new();
    let mut rows = Vec::new();
    for c in cases {
        let csv_name = PathBuf::from(format!("figure1_{}.csv", c.name));
        let text = aggregate_csv(&c.series, base);
        std::fs::write(dir.join(&csv_name), &text)?;
        written.push(dir.join(&csv_name));
        rows.push(read_aggregate(text.as_bytes())?.1);
        plot_cases.push(PlotCase { label: c.label.into(), csv: csv_name, reference: Some(base.convert(c.reference)) });
    }
    let meta = PlotMeta {
        title: "log m / L_m on the periodic 4-state chain".into(),
        x_label: "m".into(),
        unit: base,
        seed,
        trials,
        cases: plot_cases,
        svg: "figure1.svg".into(),
    };
    std::fs::write(dir.join("figure1_meta.json"), meta.to_json())?;
    written.push(dir.join("figure1_meta.json"));
    std::fs::write(dir.join(&meta.svg), render(&meta, &rows))?;
    written.push(dir.join(&meta.svg));
    Ok(written)
}
