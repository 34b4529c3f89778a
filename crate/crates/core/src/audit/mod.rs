//! Exhaustive audits of the decoupling inequalities on finite models.
//!
//! Lower decoupling (SLD, and its gapless form ILD) asks for a gap `l` and a
//! constant `c_n >= 0` with `P(a, gap l, b) >= e^{-c_n} P(a) P(b)`; upper
//! decoupling (UD) asks for `P(ab) <= e^{d_n} P(a) P(b)`. Both are checked
//! word pair by word pair over `|a| <= n_max`, `|b| <= m_max`, in log space.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{word_count, FiniteMarkovChain, FunctionMarkovModel, Model, Scaled, Symbol, Words};
use crate::scalar::Scalar;

/// Cap on the number of `(a, b)` pairs an audit may enumerate.
pub const DEFAULT_AUDIT_BUDGET: u128 = 1 << 22;

/// Violating pairs kept verbatim in a report; the rest are only counted.
const MAX_LISTED_VIOLATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Condition {
    Sld,
    Ild,
    Ud,
    Psi,
    Gap,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Sld => "SLD",
            Condition::Ild => "ILD",
            Condition::Ud => "UD",
            Condition::Psi => "PSI",
            Condition::Gap => "GAP",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordPair {
    pub a: Vec<Symbol>,
    pub b: Vec<Symbol>,
}

/// One audited length. For `PSI` rows `n` is the separation `l`; for `GAP`
/// rows `tau` is the minimal gap found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: usize,
    pub constant: f64,
    pub tau: usize,
    /// `c_n + log(tau_n + 1)`, the constant SLD implies for set-valued futures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implied_wld: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<WordPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub condition: Condition,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub tau_budget: usize,
    pub per_n: Vec<AuditRow>,
    pub worst_pair: Option<WordPair>,
    /// Analytic ceiling checked by `UD` audits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub violation_count: usize,
    pub violations: Vec<WordPair>,
}

impl DecouplingReport {
    pub fn certified(&self) -> bool {
        self.violation_count == 0
    }

    pub fn max_constant(&self) -> f64 {
        self.per_n.iter().map(|r| r.constant).fold(0.0, f64::max)
    }

    pub fn max_tau(&self) -> usize {
        self.per_n.iter().map(|r| r.tau).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn fmt_word(w: &[Symbol]) -> String {
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for DecouplingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} audit  n in {}..={}  m in {}..={}  tau budget {}",
            self.condition, self.n_range.0, self.n_range.1, self.m_range.0, self.m_range.1, self.tau_budget
        )?;
        let label = match self.condition {
            Condition::Psi => "l",
            _ => "n",
        };
        writeln!(f, "{label:>4}  {:>14}  {:>5}  {:>14}  worst pair", "constant", "tau", "implied WLD")?;
        for r in &self.per_n {
            let wld = r.implied_wld.map_or("-".to_string(), |v| format!("{v:.10}"));
            let pair = r.worst_pair.as_ref().map_or("-".to_string(), |p| format!("[{}] [{}]", fmt_word(&p.a), fmt_word(&p.b)));
            writeln!(f, "{:>4}  {:>14.10}  {:>5}  {:>14}  {}", r.n, r.constant, r.tau, wld, pair)?;
        }
        if let Some(b) = self.bound {
            writeln!(f, "bound {b:.10}")?;
        }
        if self.certified() {
            write!(f, "certified")
        } else {
            write!(f, "{} violation(s)", self.violation_count)?;
            for v in &self.violations {
                write!(f, "\n  a=[{}] b=[{}]", fmt_word(&v.a), fmt_word(&v.b))?;
            }
            Ok(())
        }
    }
}

/// Precomputed matrix powers for the gapped joint probability.
enum Kernel<'a, T> {
    /// `q[l] = P^(l+1)` for an observed Markov chain.
    Markov { chain: &'a FiniteMarkovChain<T>, q: Vec<Matrix<T>> },
    /// `powers[l] = P^l` of the hidden chain.
    Hidden { model: &'a FunctionMarkovModel<T>, powers: Vec<Matrix<T>> },
}

fn powers<T: Scalar>(p: &Matrix<T>, first: Matrix<T>, count: usize) -> Vec<Matrix<T>> {
    let mut out = Vec::with_capacity(count);
    let mut cur = first;
    for _ in 0..count {
        let next = cur.matmul(p);
        out.push(cur);
        cur = next;
    }
    out
}

impl<'a, T: Scalar> Kernel<'a, T> {
    fn new(model: &'a Model<T>, max_gap: usize) -> Self {
        match model {
            Model::FunctionMarkov(f) => {
                let p = f.hidden().transitions();
                Kernel::Hidden { model: f, powers: powers(p, Matrix::identity(p.rows()), max_gap + 1) }
            }
            _ => {
                let chain = model.as_markov().expect("markov or ladder");
                let p = chain.transitions();
                Kernel::Markov { chain, q: powers(p, p.clone(), max_gap + 1) }
            }
        }
    }
}

/// Per-`a` state reused across all `b` and gaps.
enum Prepared<T> {
    Markov { last: usize },
    Hidden { shifted: Vec<Scaled<T>> },
}

/// Per-`b` state.
struct Future<T> {
    word: Vec<Symbol>,
    log_p: T,
    backward: Option<Scaled<T>>,
}

impl<T: Scalar> Kernel<'_, T> {
    fn prepare(&self, a: &[Symbol]) -> Result<Prepared<T>> {
        Ok(match self {
            Kernel::Markov { .. } => Prepared::Markov { last: *a.last().expect("non-empty") as usize },
            Kernel::Hidden { model, powers } => {
                let alpha = model.forward(a)?;
                let shifted = powers
                    .iter()
                    .map(|pl| {
                        if alpha.is_zero() {
                            alpha.clone()
                        } else {
                            Scaled::normalized(pl.left_mul(&alpha.vector), alpha.log_scale)
                        }
                    })
                    .collect();
                Prepared::Hidden { shifted }
            }
        })
    }

    fn future(&self, model: &Model<T>, b: Vec<Symbol>) -> Result<Future<T>> {
        let log_p = model.marginal_log_prob(&b)?;
        let backward = match self {
            Kernel::Markov { .. } => None,
            Kernel::Hidden { model, .. } => Some(model.backward(&b)?),
        };
        Ok(Future { word: b, log_p, backward })
    }

    /// `log P(a, gap l, b) - log P(a) - log P(b)`.
    fn log_ratio(&self, a: &Prepared<T>, log_pa: T, l: usize, b: &Future<T>) -> T {
        match (self, a) {
            (Kernel::Markov { chain, q }, Prepared::Markov { last }) => {
                let b1 = b.word[0] as usize;
                let v = q[l][(*last, b1)];
                if v > T::zero() {
                    v.ln() - chain.stationary()[b1].ln()
                } else {
                    T::neg_infinity()
                }
            }
            (Kernel::Hidden { .. }, Prepared::Hidden { shifted }) => {
                let joint = shifted[l].log_dot(b.backward.as_ref().expect("hidden future"));
                if joint == T::neg_infinity() {
                    joint
                } else {
                    joint - log_pa - b.log_p
                }
            }
            _ => unreachable!("kernel and prepared state come from the same model"),
        }
    }
}

/// `log P_Y{y_1^n = a, y_{n+l+1}^{n+l+m} = b}`; `-inf` when the event is impossible.
pub fn gapped_joint_log_prob<T: Scalar>(model: &Model<T>, a: &[Symbol], ell: usize, b: &[Symbol]) -> Result<T> {
    model.alphabet().check_word(a)?;
    model.alphabet().check_word(b)?;
    match model {
        Model::FunctionMarkov(f) => {
            let alpha = f.forward(a)?;
            if alpha.is_zero() {
                return Ok(T::neg_infinity());
            }
            let shifted = Scaled::normalized(f.hidden().transitions().pow(ell).left_mul(&alpha.vector), alpha.log_scale);
            Ok(shifted.log_dot(&f.backward(b)?))
        }
        _ => {
            let chain = model.as_markov().expect("markov or ladder");
            let (la, lb) = (chain.marginal_log_prob(a)?, chain.marginal_log_prob(b)?);
            let (an, b1) = (*a.last().expect("checked") as usize, b[0] as usize);
            let link = chain.transitions().pow(ell + 1)[(an, b1)];
            if la == T::neg_infinity() || lb == T::neg_infinity() || link <= T::zero() {
                return Ok(T::neg_infinity());
            }
            Ok(la + link.ln() + lb - chain.stationary()[b1].ln())
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Lower,
    Upper,
}

/// Outcome for one `a` against every future.
struct Partial {
    worst: Option<(f64, usize)>,
    tau: usize,
    violations: Vec<usize>,
}

fn positive_words<T: Scalar>(model: &Model<T>, n: usize) -> Result<Vec<(Vec<Symbol>, T)>> {
    let mut out = Vec::new();
    for w in Words::new(model.alphabet_size(), n) {
        let lp = model.marginal_log_prob(&w)?;
        if lp > T::neg_infinity() {
            out.push((w, lp));
        }
    }
    Ok(out)
}

fn check_budget(size: usize, n_max: usize, m_max: usize, budget: u128) -> Result<()> {
    let words = word_count(size, n_max).saturating_mul(word_count(size, m_max));
    if words > budget {
        return Err(Error::BudgetExceeded { words, budget });
    }
    Ok(())
}

fn check_ranges(n_max: usize, m_max: usize) -> Result<()> {
    if n_max == 0 || m_max == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(())
}

fn search<T: Scalar>(
    model: &Model<T>,
    condition: Condition,
    n_max: usize,
    m_max: usize,
    tau_budget: usize,
    budget: u128,
) -> Result<DecouplingReport> {
    check_ranges(n_max, m_max)?;
    check_budget(model.alphabet_size(), n_max, m_max, budget)?;
    let side = if condition == Condition::Ud { Side::Upper } else { Side::Lower };
    let kernel = Kernel::new(model, tau_budget);
    let mut futures = Vec::new();
    for m in 1..=m_max {
        for (b, _) in positive_words(model, m)? {
            futures.push(kernel.future(model, b)?);
        }
    }
    // Ratios within this many nats of the best count as ties, so the
    // smallest near-optimal gap is reported.
    let tie = T::row_sum_tol();

    let bound = (side == Side::Upper).then(|| {
        let pi = model.state_chain().stationary();
        let min = pi.iter().copied().fold(T::infinity(), T::min).as_f64();
        let factor = if model.as_markov().is_some() { 1.0 } else { 2.0 };
        -factor * min.ln()
    });

    let mut per_n = Vec::with_capacity(n_max);
    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut overall: Option<(f64, WordPair)> = None;
    for n in 1..=n_max {
        let pasts = positive_words(model, n)?;
        let partials: Vec<Result<Partial>> = pasts
            .par_iter()
            .map(|(a, log_pa)| {
                let prep = kernel.prepare(a)?;
                let mut part = Partial { worst: None, tau: 0, violations: Vec::new() };
                for (j, fut) in futures.iter().enumerate() {
                    let cost = match side {
                        Side::Lower => {
                            let ratios: Vec<T> =
                                (0..=tau_budget).map(|l| kernel.log_ratio(&prep, *log_pa, l, fut)).collect();
                            let best = ratios.iter().copied().fold(T::neg_infinity(), T::max);
                            if best == T::neg_infinity() {
                                part.violations.push(j);
                                continue;
                            }
                            let l = ratios.iter().position(|&r| r >= best - tie).expect("best attained");
                            part.tau = part.tau.max(l);
                            -best.as_f64()
                        }
                        Side::Upper => {
                            let r = kernel.log_ratio(&prep, *log_pa, 0, fut);
                            if r == T::neg_infinity() {
                                continue;
                            }
                            let r = r.as_f64();
                            if bound.is_some_and(|bd| r > bd + T::balance_tol().as_f64()) {
                                part.violations.push(j);
                            }
                            r
                        }
                    };
                    if part.worst.is_none_or(|(w, _)| cost > w) {
                        part.worst = Some((cost, j));
                    }
                }
                Ok(part)
            })
            .collect();

        let mut worst: Option<(f64, WordPair)> = None;
        let mut tau = 0;
        for ((a, _), part) in pasts.iter().zip(partials) {
            let part = part?;
            tau = tau.max(part.tau);
            violation_count += part.violations.len();
            for j in part.violations {
                if violations.len() < MAX_LISTED_VIOLATIONS {
                    violations.push(WordPair { a: a.clone(), b: futures[j].word.clone() });
                }
            }
            if let Some((c, j)) = part.worst {
                if worst.as_ref().is_none_or(|(w, _)| c > *w) {
                    worst = Some((c, WordPair { a: a.clone(), b: futures[j].word.clone() }));
                }
            }
        }
        let constant = worst.as_ref().map_or(0.0, |(c, _)| c.max(0.0));
        if let Some((c, pair)) = &worst {
            if overall.as_ref().is_none_or(|(w, _)| c > w) {
                overall = Some((*c, pair.clone()));
            }
        }
        per_n.push(AuditRow {
            n,
            constant,
            tau,
            implied_wld: (condition == Condition::Sld).then(|| constant + ((tau + 1) as f64).ln()),
            worst_pair: worst.map(|(_, p)| p),
        });
    }
    Ok(DecouplingReport {
        condition,
        n_range: (1, n_max),
        m_range: (1, m_max),
        tau_budget,
        per_n,
        worst_pair: overall.map(|(_, p)| p),
        bound,
        violation_count,
        violations,
    })
}

/// Lower decoupling with gaps `l <= tau_budget`. For each pair the smallest
/// gap maximising `P(a, gap l, b) / (P(a) P(b))` is chosen; `c_n` is the
/// largest `-log` of those best ratios, clamped at zero.
pub fn check_sld<T: Scalar>(model: &Model<T>, n_max: usize, m_max: usize, tau_budget: usize) -> Result<DecouplingReport> {
    search(model, Condition::Sld, n_max, m_max, tau_budget, DEFAULT_AUDIT_BUDGET)
}

/// Gapless lower decoupling: [`check_sld`] with the gap forced to zero.
pub fn check_ild<T: Scalar>(model: &Model<T>, n_max: usize, m_max: usize) -> Result<DecouplingReport> {
    search(model, Condition::Ild, n_max, m_max, 0, DEFAULT_AUDIT_BUDGET)
}

/// Upper decoupling without gaps. `d_n` is the largest `log P(ab)/(P(a)P(b))`,
/// clamped at zero, and is checked against `-log min pi` (Markov) or
/// `-2 log min pi_z` over the hidden states.
pub fn check_ud<T: Scalar>(model: &Model<T>, n_max: usize, m_max: usize) -> Result<DecouplingReport> {
    search(model, Condition::Ud, n_max, m_max, 0, DEFAULT_AUDIT_BUDGET)
}

/// Same audits with an explicit pair budget.
pub fn audit_with_budget<T: Scalar>(
    model: &Model<T>,
    condition: Condition,
    n_max: usize,
    m_max: usize,
    tau_budget: usize,
    budget: u128,
) -> Result<DecouplingReport> {
    match condition {
        Condition::Sld => search(model, condition, n_max, m_max, tau_budget, budget),
        Condition::Ild | Condition::Ud => search(model, condition, n_max, m_max, 0, budget),
        Condition::Psi | Condition::Gap => Err(Error::Unsupported("psi and gap audits have their own entry points")),
    }
}

/// `max_{a,b} |(P^l)_{ab} / pi_b - 1|`, the transition-ratio form of the
/// psi-mixing coefficient at separation `l`.
pub fn psi_coefficient<T: Scalar>(chain: &FiniteMarkovChain<T>, ell: usize) -> T {
    let pl = chain.transitions().pow(ell);
    let pi = chain.stationary();
    let k = chain.size();
    let mut worst = T::zero();
    for a in 0..k {
        for (b, &pb) in pi.iter().enumerate() {
            worst = worst.max((pl[(a, b)] / pb - T::one()).abs());
        }
    }
    worst
}

/// `psi(l)` for `l = 1..=ell_max`; certified when the last value is below `target`.
pub fn psi_report<T: Scalar>(chain: &FiniteMarkovChain<T>, ell_max: usize, target: Option<f64>) -> DecouplingReport {
    let per_n: Vec<AuditRow> = (1..=ell_max.max(1))
        .map(|l| AuditRow { n: l, constant: psi_coefficient(chain, l).as_f64(), tau: l, implied_wld: None, worst_pair: None })
        .collect();
    let failed = match (target, per_n.last()) {
        (Some(t), Some(r)) => r.constant >= t,
        _ => false,
    };
    DecouplingReport {
        condition: Condition::Psi,
        n_range: (1, ell_max.max(1)),
        m_range: (0, 0),
        tau_budget: 0,
        per_n,
        worst_pair: None,
        bound: target,
        violation_count: failed as usize,
        violations: Vec::new(),
    }
}

fn support_forward<T: Scalar>(model: &FunctionMarkovModel<T>, word: &[Symbol]) -> Vec<bool> {
    let p = model.hidden().transitions();
    let map = model.observation_map();
    let k = p.rows();
    let mut live: Vec<bool> = model.hidden().stationary().iter().map(|&v| v > T::zero()).collect();
    for &a in word {
        let mut next = vec![false; k];
        for z in (0..k).filter(|&z| live[z]) {
            for (zp, nx) in next.iter_mut().enumerate() {
                if map[zp] == a && p[(z, zp)] > T::zero() {
                    *nx = true;
                }
            }
        }
        live = next;
    }
    live
}

/// States from which the next emitted symbols can be `word`.
fn support_backward<T: Scalar>(model: &FunctionMarkovModel<T>, word: &[Symbol]) -> Vec<bool> {
    let p = model.hidden().transitions();
    let map = model.observation_map();
    let k = p.rows();
    let mut live = vec![true; k];
    for &b in word.iter().rev() {
        live = (0..k).map(|z| (0..k).any(|zp| live[zp] && map[zp] == b && p[(z, zp)] > T::zero())).collect();
    }
    live
}

/// Smallest `l <= gap_budget` with `P(a, gap l, b) > 0`, found by boolean
/// reachability on the hidden support so long gaps cannot underflow.
pub fn minimal_positive_gap<T: Scalar>(
    model: &FunctionMarkovModel<T>,
    a: &[Symbol],
    b: &[Symbol],
    gap_budget: usize,
) -> Result<usize> {
    model.alphabet().check_word(a)?;
    model.alphabet().check_word(b)?;
    if model.marginal_log_prob(a)? == T::neg_infinity() || model.marginal_log_prob(b)? == T::neg_infinity() {
        return Err(Error::ZeroProbabilityWord);
    }
    let p = model.hidden().transitions();
    let k = p.rows();
    let target = support_backward(model, b);
    let mut live = support_forward(model, a);
    for l in 0..=gap_budget {
        if live.iter().zip(&target).any(|(&x, &y)| x && y) {
            return Ok(l);
        }
        let mut next = vec![false; k];
        for z in (0..k).filter(|&z| live[z]) {
            for (zp, nx) in next.iter_mut().enumerate() {
                *nx |= p[(z, zp)] > T::zero();
            }
        }
        live = next;
    }
    Err(Error::NoGapFound { budget: gap_budget })
}

/// A `GAP` report: one row with the minimal gap, or a violation when none
/// exists within budget.
pub fn gap_report<T: Scalar>(
    model: &FunctionMarkovModel<T>,
    a: &[Symbol],
    b: &[Symbol],
    gap_budget: usize,
) -> Result<DecouplingReport> {
    let pair = WordPair { a: a.to_vec(), b: b.to_vec() };
    let (per_n, violations) = match minimal_positive_gap(model, a, b, gap_budget) {
        Ok(l) => (
            vec![AuditRow { n: a.len(), constant: 0.0, tau: l, implied_wld: None, worst_pair: Some(pair.clone()) }],
            Vec::new(),
        ),
        Err(Error::NoGapFound { .. }) => (Vec::new(), vec![pair.clone()]),
        Err(e) => return Err(e),
    };
    Ok(DecouplingReport {
        condition: Condition::Gap,
        n_range: (a.len(), a.len()),
        m_range: (b.len(), b.len()),
        tau_budget: gap_budget,
        per_n,
        worst_pair: Some(pair),
        bound: None,
        violation_count: violations.len(),
        violations,
    })
}

/// Any model viewed as a function of a Markov chain (identity map for
/// observed chains).
pub fn as_function_markov<T: Scalar>(model: &Model<T>) -> Result<FunctionMarkovModel<T>> {
    match model {
        Model::FunctionMarkov(f) => Ok(f.clone()),
        _ => {
            let chain = model.as_markov().expect("markov or ladder").clone();
            let map = (0..chain.size() as Symbol).collect();
            let alphabet = chain.alphabet().clone();
            FunctionMarkovModel::lump(chain, map, Some(alphabet))
        }
    }
}
