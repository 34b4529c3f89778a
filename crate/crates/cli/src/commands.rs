use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use crossent::audit::{
    as_function_markov, audit_with_budget, gap_report, psi_report, Condition, DecouplingReport, DEFAULT_AUDIT_BUDGET,
};
use crossent::estimate::{monte_carlo, EstimatorKind, Experiment, ExperimentSpec, LogBase};
use crossent::model::file::ModelDef;
use crossent::model::{cross_entropy_rate, partial_cross_entropy, Model, DEFAULT_ENUMERATION_BUDGET};
use crossent::{Error, SourceModel};

use crate::args::{AuditArgs, Cli, Command, ConditionArg, EstimatorArg, ExactCommand, ExperimentCommand, ModelCommand, RunArgs};
use crate::exit;
use crate::figure1::{self, Figure1Fixture};
use crate::plot::{render_from_meta, PlotCase, PlotMeta};
use crate::table::aggregate_csv;

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Model(ModelCommand::Validate { file }) => validate(&file),
        Command::Sample { file, length, seed, labels } => sample(&file, length, seed, labels),
        Command::Estimate { estimator, spec, out, run } => estimate(estimator, &spec, out, &run),
        Command::Exact(cmd) => exact(cmd),
        Command::Audit(args) => audit(&args),
        Command::Experiment(ExperimentCommand::Figure1 { trials, seed, out, m_grid, run }) => {
            experiment_figure1(trials, seed, &out, &m_grid, &run)
        }
        Command::Plot { meta, out } => plot(&meta, out),
    }
}

fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()?;
            Ok(pool.install(f))
        }
    }
}

fn load(file: &Path) -> Result<SourceModel> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(ModelDef::from_json(&text)?.build()?)
}

/// `NonStochastic { .. }` -> `NonStochastic`.
fn error_kind(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

/// Row-level problems in a transition table, all reported at once.
fn row_failures(def: &ModelDef, out: &mut Vec<String>) {
    match def {
        ModelDef::Markov { transitions, .. } => {
            let k = transitions.len();
            for (i, row) in transitions.iter().enumerate() {
                if row.len() != k {
                    out.push(format!("NotSquare: row {i} has {} entries, expected {k}", row.len()));
                    continue;
                }
                if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    out.push(format!("NonStochastic: row {i} has entry {v}"));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    out.push(format!("NonStochastic: row {i} sums to {sum}"));
                }
            }
        }
        ModelDef::FunctionMarkov { hidden, .. } => row_failures(hidden, out),
        ModelDef::Ladder { .. } => {}
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn validate(file: &Path) -> Result<u8> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut failures = Vec::new();
    let model = match ModelDef::from_json(&text) {
        Err(e) => {
            failures.push(format!("{}: {e}", error_kind(&e)));
            None
        }
        Ok(def) => {
            row_failures(&def, &mut failures);
            match def.build::<f64>() {
                Ok(m) => Some(m),
                Err(e) => {
                    let item = format!("{}: {e}", error_kind(&e));
                    if !failures.iter().any(|f| f.starts_with(&error_kind(&e))) {
                        failures.push(item);
                    }
                    None
                }
            }
        }
    };
    match model {
        Some(m) if failures.is_empty() => {
            let chain = m.state_chain();
            println!("model: {}", m.kind());
            println!("alphabet size: {}", m.alphabet_size());
            if !matches!(m, Model::Markov(_)) {
                println!("hidden states: {}", chain.size());
            }
            println!("irreducible: {}", if chain.is_irreducible() { "yes" } else { "no" });
            match chain.period() {
                Some(p) => println!("period: {p}"),
                None => println!("period: undefined"),
            }
            println!("stationary: {}", fmt_vec(chain.stationary()));
            if let Model::Ladder(l) = &m {
                let (jm, jp) = l.truncation();
                println!("truncation: [-{jm}, {jp}]");
                println!("tail mass bound: {:e}", l.tail_mass_bound());
            }
            if let Some(c) = m.as_markov() {
                println!("entropy rate: {:.12} nats", c.entropy_rate());
            }
            println!("valid");
            Ok(exit::OK)
        }
        _ => {
            println!("invalid: {}", file.display());
            for f in &failures {
                println!("  - {f}");
            }
            Ok(exit::FAILURE)
        }
    }
}

fn sample(file: &Path, length: usize, seed: u64, labels: bool) -> Result<u8> {
    let model = load(file)?;
    let path = model.sample_path(length, seed, &file.display().to_string())?;
    let alphabet = model.alphabet();
    let tokens: Vec<String> = path
        .as_slice()
        .iter()
        .map(|&s| if labels { alphabet.label(s) } else { s.to_string() })
        .collect();
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", tokens.join(" "))?;
    Ok(exit::OK)
}

fn estimate(estimator: EstimatorArg, spec_path: &Path, out: Option<PathBuf>, run: &RunArgs) -> Result<u8> {
    let text = std::fs::read_to_string(spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    let mut spec = ExperimentSpec::from_json(&text)?;
    spec.estimator = match estimator {
        EstimatorArg::Wait => EstimatorKind::Wait,
        EstimatorArg::Match => EstimatorKind::Match,
        EstimatorArg::Statistic => EstimatorKind::Statistic,
    };
    if run.bits {
        spec.log_base = LogBase::Bits;
    }
    let base = spec.log_base;
    let want_plot = spec.plot || run.plot;
    let target = out.or_else(|| spec.output.clone()).map(|p| match &spec.output_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p,
    });
    let expt = Experiment::<f64>::new(spec, spec_path.parent())?;
    let series = with_jobs(run.jobs, || monte_carlo(&expt))??;
    let csv = aggregate_csv(&series, base);
    let Some(target) = target else {
        if want_plot {
            bail!("plotting needs an output path (spec `output` or --out)");
        }
        print!("{csv}");
        return Ok(exit::OK);
    };
    if let Some(dir) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&target, &csv)?;
    println!("wrote {}", target.display());
    if want_plot {
        let reference = match expt.spec.estimator {
            EstimatorKind::Statistic => Some(0.0),
            _ => match (expt.model_x.as_markov(), expt.model_y.as_markov()) {
                (Some(x), Some(y)) => Some(cross_entropy_rate(x, y)?).filter(|h| h.is_finite()).map(|h| base.convert(h)),
                _ => None,
            },
        };
        let stem = target.file_stem().and_then(|s| s.to_str()).unwrap_or("estimate").to_string();
        let meta = PlotMeta {
            title: format!("{:?} estimator", expt.spec.estimator).to_lowercase(),
            x_label: if expt.spec.estimator == EstimatorKind::Match { "m" } else { "n" }.into(),
            unit: base,
            seed: expt.spec.seed,
            trials: expt.spec.trials,
            cases: vec![PlotCase {
                label: "estimate".into(),
                csv: PathBuf::from(target.file_name().expect("file target")),
                reference,
            }],
            svg: PathBuf::from(format!("{stem}.svg")),
        };
        let meta_path = target.with_file_name(format!("{stem}.meta.json"));
        std::fs::write(&meta_path, meta.to_json())?;
        let (_, svg) = render_from_meta(&meta_path)?;
        let svg_path = target.with_file_name(&meta.svg);
        std::fs::write(&svg_path, svg)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(exit::OK)
}

fn show_value(v: f64, bits: bool) -> String {
    let base = if bits { LogBase::Bits } else { LogBase::Nats };
    format!("{} {}", base.convert(v), base.suffix())
}

fn exact(cmd: ExactCommand) -> Result<u8> {
    match cmd {
        ExactCommand::CrossEntropy { file_x, file_y, n, bits } => {
            let (x, y) = (load(&file_x)?, load(&file_y)?);
            match (n, x.as_markov(), y.as_markov()) {
                (None, Some(cx), Some(cy)) => println!("{}", show_value(cross_entropy_rate(cx, cy)?, bits)),
                (n, _, _) => {
                    let n = n.unwrap_or(8);
                    let v = partial_cross_entropy(&x, &y, n, DEFAULT_ENUMERATION_BUDGET)?;
                    println!("{} (n = {n})", show_value(v, bits));
                }
            }
        }
        ExactCommand::Entropy { file, bits } => {
            let m = load(&file)?;
            match m.as_markov() {
                Some(c) => println!("{}", show_value(c.entropy_rate(), bits)),
                None => bail!("entropy rate needs an observed Markov chain; use cross-entropy with --n"),
            }
        }
    }
    Ok(exit::OK)
}

fn audit(args: &AuditArgs) -> Result<u8> {
    let model = load(&args.file)?;
    let budget = args.budget.unwrap_or(DEFAULT_AUDIT_BUDGET);
    let report: DecouplingReport = match args.condition {
        ConditionArg::Sld => audit_with_budget(&model, Condition::Sld, args.n_max, args.m_max, args.tau, budget)?,
        ConditionArg::Ild => audit_with_budget(&model, Condition::Ild, args.n_max, args.m_max, 0, budget)?,
        ConditionArg::Ud => audit_with_budget(&model, Condition::Ud, args.n_max, args.m_max, 0, budget)?,
        ConditionArg::Psi => {
            let chain = model.as_markov().context("psi audit needs an observed Markov chain")?;
            psi_report(chain, args.ell, args.target)
        }
        ConditionArg::Gap => {
            if args.a.is_empty() || args.b.is_empty() {
                bail!("gap audit needs --a and --b");
            }
            gap_report(&as_function_markov(&model)?, &args.a, &args.b, args.gap_budget)?
        }
    };
    if args.print_json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    if let Some(p) = &args.json {
        std::fs::write(p, report.to_json() + "\n")?;
    }
    Ok(if report.certified() { exit::OK } else { exit::FAILURE })
}

fn experiment_figure1(trials: usize, seed: u64, out: &Path, m_grid: &[usize], run: &RunArgs) -> Result<u8> {
    let grid = if m_grid.is_empty() { figure1::DEFAULT_M_GRID.to_vec() } else { m_grid.to_vec() };
    let base = if run.bits { LogBase::Bits } else { LogBase::Nats };
    let fixture = Figure1Fixture::default();
    let cases = with_jobs(run.jobs, || figure1::run(&fixture, trials, seed, &grid))??;
    for c in &cases {
        println!("{}: reference {}", c.label, show_value(c.reference, run.bits));
        for p in &c.series.points {
            let mean = p.mean.map_or("censored".to_string(), |m| format!("{:.6}", base.convert(m)));
            println!("  m = {:>8}  mean {mean}  sem {:.6}", p.index, p.sem.map_or(0.0, |s| base.convert(s)));
        }
    }
    for p in figure1::write(out, &cases, seed, trials, base)? {
        println!("wrote {}", p.display());
    }
    Ok(exit::OK)
}

fn plot(meta_path: &Path, out: Option<PathBuf>) -> Result<u8> {
    let (meta, svg) = render_from_meta(meta_path)?;
    let target = out.unwrap_or_else(|| meta_path.parent().unwrap_or(Path::new(".")).join(&meta.svg));
    std::fs::write(&target, svg)?;
    println!("wrote {}", target.display());
    Ok(exit::OK)
}
