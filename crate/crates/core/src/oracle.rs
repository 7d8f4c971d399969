//! Independent ground truth: exhaustive trajectory trees and Monte Carlo.
//!
//! Nothing here goes through the chain kernel. Tree enumeration multiplies
//! schedule weights and Born factors along every branch of the qubit's
//! history; Monte Carlo runs the measurement process directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::bound::{evaluate, InfoReport};
use crate::chain::{
    answer_var, answer_variable, history_var_names, question_var, question_variable, run, LongRun, NEXT_ANSWER,
    NEXT_QUESTION,
};
use crate::error::{ObserverError, Result};
use crate::info::from_counts;
use crate::joint::{JointDistribution, Variable};
use crate::process::QuestionProcess;
use crate::qubit::{collapse, outcome_probability, Answer, BlochVector, Question};
use crate::scenario::Scenario;
use crate::strategy::{apply_strategy, Strategy};

/// Cap on leaves of an enumerated trajectory tree.
pub const TREE_CAP: u128 = 10_000_000;
/// Pass threshold for exact-vs-exact comparisons.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Bootstrap resamples behind Monte Carlo standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    pub horizon: usize,
    /// Exact joint over `Q1, A1, ..., QT, AT`.
    pub joint: JointDistribution,
    pub leaf_count: u128,
}

fn tree_vars(questions: &[Question], horizon: usize) -> Vec<Variable> {
    (1..=horizon)
        .flat_map(|t| {
            [
                question_variable(format!("Q{t}"), questions),
                answer_variable(format!("A{t}")),
            ]
        })
        .collect()
}

/// Probability of every question/answer string of length `horizon`.
pub fn brute_force_joint(
    questions: &[Question],
    process: &QuestionProcess,
    initial: &BlochVector,
    horizon: usize,
) -> Result<EnumerationResult> {
    let k = questions.len();
    process.validate_for(k)?;
    if horizon == 0 {
        return Err(ObserverError::validation("horizon must be >= 1"));
    }
    let leaves = ((2 * k) as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if leaves > TREE_CAP {
        return Err(ObserverError::SizeCap {
            what: "trajectory tree",
            required: leaves,
            cap: TREE_CAP,
            hint: "; lower the horizon",
        });
    }
    let mut probs = vec![0.0; leaves as usize];
    descend(questions, process, initial, None, 0, horizon, 1.0, 0, &mut probs)?;
    let joint = JointDistribution::with_mass_tolerance(tree_vars(questions, horizon), probs, 1e-12)?;
    Ok(EnumerationResult {
        horizon,
        joint,
        leaf_count: leaves,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    questions: &[Question],
    process: &QuestionProcess,
    state: &BlochVector,
    previous: Option<usize>,
    t: usize,
    horizon: usize,
    weight: f64,
    prefix: usize,
    out: &mut [f64],
) -> Result<()> {
    if t == horizon {
        out[prefix] = weight;
        return Ok(());
    }
    let k = questions.len();
    let law = process.next_question_distribution(k, previous, t)?;
    for (q, &pq) in law.iter().enumerate() {
        for a in Answer::ALL {
            let index = prefix * 2 * k + 2 * q + a.index();
            let branch = weight * pq * outcome_probability(state, &questions[q].axis, a);
            if branch == 0.0 {
                // zero subtree; cells stay 0
                continue;
            }
            let next = collapse(&questions[q].axis, a);
            descend(questions, process, &next, Some(q), t + 1, horizon, branch, index, out)?;
        }
    }
    Ok(())
}

/// The last `w + 1` steps of an enumeration, renamed to the window-joint layout.
pub fn tail_window(result: &EnumerationResult, w: usize) -> Result<JointDistribution> {
    let t = result.horizon;
    if w + 1 > t {
        return Err(ObserverError::validation(format!(
            "horizon {t} is shorter than window {w} + 1"
        )));
    }
    let oracle_names: Vec<String> = (t - w..=t).flat_map(|s| [format!("Q{s}"), format!("A{s}")]).collect();
    let refs: Vec<&str> = oracle_names.iter().map(String::as_str).collect();
    let tail = result.joint.marginal(&refs)?;
    let mut chain_names = history_var_names(w);
    chain_names.push(NEXT_QUESTION.into());
    chain_names.push(NEXT_ANSWER.into());
    let renames: Vec<(&str, &str)> = refs
        .iter()
        .copied()
        .zip(chain_names.iter().map(String::as_str))
        .collect();
    tail.renamed(&renames)
}

fn averaged_tail(scenario: &Scenario, horizon: usize, period: usize) -> Result<JointDistribution> {
    let w = scenario.window;
    let mut acc: Option<Vec<f64>> = None;
    let mut vars = Vec::new();
    for h in horizon..horizon + period {
        let e = brute_force_joint(&scenario.questions, &scenario.process, &scenario.initial, h)?;
        let tail = tail_window(&e, w)?;
        vars = tail.vars().to_vec();
        match &mut acc {
            None => acc = Some(tail.probs().to_vec()),
            Some(a) => a.iter_mut().zip(tail.probs()).for_each(|(x, y)| *x += y),
        }
    }
    let probs = acc
        .expect("period >= 1")
        .into_iter()
        .map(|p| p / period as f64)
        .collect();
    JointDistribution::with_mass_tolerance(vars, probs, 1e-10)
}

/// Tail window of growing trajectory trees.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTail {
    pub joint: JointDistribution,
    /// Last horizon enumerated.
    pub horizon: usize,
    /// False when the tree cap stopped the horizon before successive tails agreed.
    pub converged: bool,
}

/// Oracle window with burn-in: the horizon grows until successive tails
/// (averaged over `period` consecutive horizons) agree within `1e-12`.
pub fn converged_tail(scenario: &Scenario, period: usize) -> Result<OracleTail> {
    let period = period.max(1);
    let mut horizon = scenario.window + 1;
    let mut prev = averaged_tail(scenario, horizon, period)?;
    loop {
        let next = match averaged_tail(scenario, horizon + 1, period) {
            Ok(t) => t,
            Err(ObserverError::SizeCap { .. }) => {
                return Ok(OracleTail {
                    joint: prev,
                    horizon: horizon + period - 1,
                    converged: false,
                })
            }
            Err(e) => return Err(e),
        };
        horizon += 1;
        if next.max_abs_deviation(&prev)? < 1e-12 {
            return Ok(OracleTail {
                joint: next,
                horizon: horizon + period - 1,
                converged: true,
            });
        }
        prev = next;
    }
}

/// Largest absolute entry difference between a chain joint and an oracle joint.
pub fn cross_validate(chain_joint: &JointDistribution, oracle_joint: &JointDistribution) -> Result<f64> {
    chain_joint.max_abs_deviation(oracle_joint)
}

/// One verification outcome, serialized as `{check, scenario, deviation, tolerance, pass}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub scenario: String,
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(check: impl Into<String>, scenario: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Verdict {
            check: check.into(),
            scenario: scenario.into(),
            deviation: Some(deviation),
            tolerance,
            pass: deviation.is_finite() && deviation <= tolerance,
        }
    }

    /// A check that could not run.
    pub fn skipped(check: impl Into<String>, scenario: impl Into<String>, tolerance: f64) -> Self {
        Verdict {
            check: check.into(),
            scenario: scenario.into(),
            deviation: None,
            tolerance,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardErrors {
    pub i_mem: f64,
    pub i_pred: f64,
    pub nostalgia: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub estimate: InfoReport,
    pub standard_errors: StandardErrors,
    pub samples: usize,
    pub burn_in: usize,
}

/// Steps after which the chain law from the scenario's start is within `1e-12`
/// of its long-run law, or, for periodic laws, of itself one period later.
fn burn_in(scenario: &Scenario, lr: &LongRun) -> Result<usize> {
    const MAX_BURN: usize = 4096;
    let kernel = scenario.kernel()?;
    let n = kernel.num_states();
    let step = |v: &[f64]| {
        let mut next = vec![0.0; n];
        for (i, &p) in v.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot += p * kernel.get(i, j);
            }
        }
        next
    };
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut laws = vec![scenario.initial_distribution()?];
    for _ in 0..lr.period {
        let next = step(laws.last().expect("non-empty"));
        laws.push(next);
    }
    for b in 0..MAX_BURN {
        let converged = if lr.cesaro {
            gap(&laws[b], &laws[b + lr.period]) <= 1e-12
        } else {
            gap(&laws[b], &lr.dist) <= 1e-12
        };
        if converged {
            return Ok(b);
        }
        let next = step(laws.last().expect("non-empty"));
        laws.push(next);
    }
    Ok(MAX_BURN)
}

/// Window counts from `n` independent runs of the measurement process.
pub fn sample_window_counts(scenario: &Scenario, n: usize, seed: u64) -> Result<(Vec<u64>, usize)> {
    let w = scenario.window;
    let k = scenario.num_questions();
    let lr = scenario.long_run()?;
    let burn = burn_in(scenario, &lr)?;
    let periodic_span = if lr.cesaro { lr.period } else { 1 };
    let cells = (2 * k).pow(w as u32 + 1);
    let mut counts = vec![0u64; cells];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(burn + periodic_span + w + 1);
    for i in 0..n {
        steps.clear();
        // rotate the start so periodic laws are sampled phase-averaged
        let extra = i % periodic_span;
        let len = burn + extra + w + 1;
        run(
            &scenario.questions,
            &scenario.process,
            &scenario.initial,
            len,
            &mut rng,
            &mut steps,
        );
        let cell = steps[len - w - 1..].iter().fold(0, |acc, s| acc * 2 * k + s.index());
        counts[cell] += 1;
    }
    Ok((counts, burn))
}

fn window_vars(scenario: &Scenario) -> Vec<Variable> {
    let w = scenario.window as isize;
    (0..=w)
        .flat_map(|i| {
            let off = i - (w - 1);
            [
                question_variable(question_var(off), &scenario.questions),
                answer_variable(answer_var(off)),
            ]
        })
        .collect()
}

/// Plug-in report at sample size `n` with bootstrap standard errors.
pub fn monte_carlo_check(scenario: &Scenario, strategy: &Strategy, n: usize, seed: u64) -> Result<MonteCarloReport> {
    if n < 1000 {
        return Err(ObserverError::validation("monte carlo needs at least 1000 samples"));
    }
    let (counts, burn) = sample_window_counts(scenario, n, seed)?;
    let vars = window_vars(scenario);
    let report = |c: &[u64]| -> Result<InfoReport> {
        let joint = from_counts(vars.clone(), c)?;
        evaluate(&apply_strategy(strategy, &joint)?, None)
    };
    let estimate = report(&counts)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut resampled = vec![0u64; counts.len()];
    let mut stats = [Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        // multinomial resample via sequential binomials
        let mut remaining = n as u64;
        let mut mass_left = 1.0;
        for (slot, &c) in resampled.iter_mut().zip(&counts) {
            let p = c as f64 / n as f64;
            *slot = if remaining == 0 || p == 0.0 {
                0
            } else if p >= mass_left {
                remaining
            } else {
                Binomial::new(remaining, (p / mass_left).min(1.0))
                    .map_err(|e| ObserverError::validation(e.to_string()))?
                    .sample(&mut rng)
            };
            remaining -= *slot;
            mass_left -= p;
        }
        let r = report(&resampled)?;
        stats[0].push(r.i_mem.bits());
        stats[1].push(r.i_pred.bits());
        stats[2].push(r.nostalgia.bits());
    }
    let sd = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    Ok(MonteCarloReport {
        estimate,
        standard_errors: StandardErrors {
            i_mem: sd(&stats[0]),
            i_pred: sd(&stats[1]),
            nostalgia: sd(&stats[2]),
        },
        samples: n,
        burn_in: burn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_a_tree_has_only_constant_strings() {
        let s = Scenario::single_question(1);
        let e = brute_force_joint(&s.questions, &s.process, &s.initial, 3).unwrap();
        assert_eq!(e.leaf_count, 8);
        for (c, p) in e.joint.iter() {
            let constant = c[1] == c[3] && c[3] == c[5];
            assert_eq!(p, if constant { 0.5 } else { 0.0 });
        }
    }

    #[test]
    fn case_b_tree_sums() {
        let s = Scenario::orthogonal_pair(1);
        let e = brute_force_joint(&s.questions, &s.process, &s.initial, 2).unwrap();
        assert_eq!(e.leaf_count, 16);
        let same: f64 = e.joint.iter().filter(|(c, _)| c[1] == c[3]).map(|(_, p)| p).sum();
        assert!((same - 0.75).abs() < 1e-15);

        let e3 = brute_force_joint(&s.questions, &s.process, &s.initial, 3).unwrap();
        let pair = e3.joint.marginal(&["A1", "A2"]).unwrap();
        for (c, p) in pair.iter() {
            let expect = if c[0] == c[1] { 0.375 } else { 0.125 };
            assert!((p - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn tree_cap() {
        let s = Scenario::orthogonal_pair(1);
        assert!(matches!(
            brute_force_joint(&s.questions, &s.process, &s.initial, 12),
            Err(ObserverError::SizeCap { .. })
        ));
    }

    #[test]
    fn identical_tables_do_not_deviate() {
        let s = Scenario::orthogonal_pair(2);
        let j = s.window_joint().unwrap();
        assert_eq!(cross_validate(&j, &j).unwrap(), 0.0);
        let other = Scenario::single_question(2).window_joint().unwrap();
        assert!(cross_validate(&j, &other).is_err());
    }

    #[test]
    fn nothing_strategy_estimates_are_exactly_zero() {
        let s = Scenario::orthogonal_pair(2);
        let r = monte_carlo_check(&s, &Strategy::Nothing, 2000, 1).unwrap();
        assert_eq!(r.estimate.i_mem.bits(), 0.0);
        assert_eq!(r.estimate.i_pred.bits(), 0.0);
        assert_eq!(r.standard_errors.i_pred, 0.0);
    }
}
