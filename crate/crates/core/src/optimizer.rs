//! Minimizing the dissipation bound over memory strategies.
//!
//! The soft optimizer minimizes `I(M;H) - beta * I(M;X')` over stochastic
//! assignments `p(m|h)`, where `X' = (Q[t+1], A[t+1])`, by alternating updates:
//!
//! ```text
//! p(m)     <- sum_h p(h) p(m|h)
//! p(x'|m)  <- sum_h p(x',h) p(m|h) / p(m)
//! p(m|h)   ∝ p(m) exp(-beta KL(p(x'|h) || p(x'|m)))
//! ```
//!
//! At `beta = 1` the objective is exactly the nostalgia, so the minimum is zero
//! and is shared by the constant map and every zero-nostalgia predictor.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{ObserverError, Result};
use crate::joint::JointDistribution;
use crate::strategy::{
    enumerate_deterministic, window_view, window_view_size, HistoryLayout, KernelStrategy, DEFAULT_ENUMERATION_CAP,
};

/// Floor for `p(x'|m)` inside logarithms.
const LOG_FLOOR: f64 = 1e-300;
/// Per-iteration slack on the descent property.
pub const DESCENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSettings {
    pub memory_size: usize,
    #[serde(default = "one")]
    pub beta_min: f64,
    #[serde(default = "sixteen")]
    pub beta_max: f64,
    #[serde(default = "nine")]
    pub beta_steps: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn sixteen() -> f64 {
    16.0
}
fn nine() -> usize {
    9
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_max_iterations() -> usize {
    10_000
}
fn default_restarts() -> usize {
    8
}

impl OptimizerSettings {
    pub fn new(memory_size: usize) -> Self {
        OptimizerSettings {
            memory_size,
            beta_min: one(),
            beta_max: sixteen(),
            beta_steps: nine(),
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
            restarts: default_restarts(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.memory_size == 0 {
            return Err(ObserverError::validation("optimizer.memory_size must be >= 1"));
        }
        if !(self.beta_min.is_finite() && self.beta_min >= 1.0) {
            return Err(ObserverError::validation("optimizer.beta_min must be >= 1"));
        }
        if !(self.beta_max.is_finite() && self.beta_max >= self.beta_min) {
            return Err(ObserverError::validation("optimizer.beta_max must be >= beta_min"));
        }
        if self.beta_steps == 0 {
            return Err(ObserverError::validation("optimizer.beta_steps must be >= 1"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ObserverError::validation("optimizer.tolerance must be > 0"));
        }
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(ObserverError::validation(
                "optimizer.max_iterations and restarts must be >= 1",
            ));
        }
        Ok(())
    }

    /// Geometric schedule from `beta_min` to `beta_max`.
    pub fn betas(&self) -> Vec<f64> {
        if self.beta_steps == 1 {
            return vec![self.beta_min];
        }
        let ratio = self.beta_max / self.beta_min;
        (0..self.beta_steps)
            .map(|i| {
                if i + 1 == self.beta_steps {
                    self.beta_max
                } else {
                    self.beta_min * ratio.powf(i as f64 / (self.beta_steps - 1) as f64)
                }
            })
            .collect()
    }
}

/// Which part of the history the optimized strategy may read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum HistoryView {
    /// Every question and answer in the window.
    #[default]
    Full,
    /// Only the last `k` interactions; with `labeled = false` only their answers.
    Window { k: usize, labeled: bool },
}

/// `p(h, x')` for a history view `h` and next interaction `x'`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveJoint {
    layout: HistoryLayout,
    view: HistoryView,
    /// Full history index -> view symbol.
    view_of: Vec<usize>,
    history_size: usize,
    next_size: usize,
    /// Row-major `history_size x next_size`.
    joint: Vec<f64>,
    p_h: Vec<f64>,
    p_next: Vec<f64>,
}

impl PredictiveJoint {
    pub fn from_window(window: &JointDistribution, view: HistoryView) -> Result<Self> {
        let layout = HistoryLayout::of_joint(window)?;
        let (history_size, view_of): (usize, Vec<usize>) = match view {
            HistoryView::Full => (layout.size(), (0..layout.size()).collect()),
            HistoryView::Window { k, labeled } => {
                if k == 0 || k > layout.window {
                    return Err(ObserverError::validation(format!(
                        "optimizer.history.k = {k} must lie in 1..={}",
                        layout.window
                    )));
                }
                (
                    window_view_size(&layout, k, labeled),
                    (0..layout.size())
                        .map(|h| window_view(&layout, k, labeled, h))
                        .collect(),
                )
            }
        };
        let next_size = layout.pair_count();
        let mut joint = vec![0.0; history_size * next_size];
        for (i, &p) in window.probs().iter().enumerate() {
            let h = view_of[i / next_size];
            joint[h * next_size + i % next_size] += p;
        }
        Ok(Self::assemble(layout, view, view_of, history_size, next_size, joint))
    }

    fn assemble(
        layout: HistoryLayout,
        view: HistoryView,
        view_of: Vec<usize>,
        history_size: usize,
        next_size: usize,
        joint: Vec<f64>,
    ) -> Self {
        let p_h: Vec<f64> = joint.chunks(next_size).map(|r| r.iter().sum()).collect();
        let mut p_x = vec![0.0; next_size];
        for row in joint.chunks(next_size) {
            for (a, b) in p_x.iter_mut().zip(row) {
                *a += b;
            }
        }
        PredictiveJoint {
            layout,
            view,
            view_of,
            history_size,
            next_size,
            joint,
            p_h,
            p_next: p_x,
        }
    }

    pub fn history_size(&self) -> usize {
        self.history_size
    }

    pub fn view(&self) -> HistoryView {
        self.view
    }

    pub fn layout(&self) -> HistoryLayout {
        self.layout
    }

    /// View symbols with positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.history_size).filter(|&h| self.p_h[h] > 0.0).collect()
    }

    /// `(I(M;H), I(M;X'))` in bits for an assignment over view symbols.
    pub fn information(&self, rows: &[Vec<f64>]) -> (f64, f64) {
        let m = rows.first().map_or(0, Vec::len);
        let mut p_m = vec![0.0; m];
        let mut p_mx = vec![0.0; m * self.next_size];
        let mut total = 0.0;
        for h in 0..self.history_size {
            let ph = self.p_h[h];
            if ph == 0.0 {
                continue;
            }
            total += ph;
            for (mem, &q) in rows[h].iter().enumerate() {
                if q == 0.0 {
                    continue;
                }
                p_m[mem] += ph * q;
                let row = &self.joint[h * self.next_size..(h + 1) * self.next_size];
                for (slot, &p) in p_mx[mem * self.next_size..(mem + 1) * self.next_size]
                    .iter_mut()
                    .zip(row)
                {
                    *slot += q * p;
                }
            }
        }
        let mut i_mem = 0.0;
        for h in 0..self.history_size {
            let ph = self.p_h[h];
            if ph == 0.0 {
                continue;
            }
            for (mem, &q) in rows[h].iter().enumerate() {
                if q > 0.0 {
                    i_mem += ph * q * ((q * total) / p_m[mem]).log2();
                }
            }
        }
        ((i_mem / total).max(0.0), self.predictive_bits(&p_m, &p_mx, total))
    }

    /// Same as [`information`](Self::information) for a deterministic map.
    pub fn information_of_map(&self, map: &[usize], memory_size: usize) -> (f64, f64) {
        let mut p_m = vec![0.0; memory_size];
        let mut p_mx = vec![0.0; memory_size * self.next_size];
        let mut total = 0.0;
        for h in 0..self.history_size {
            let ph = self.p_h[h];
            if ph == 0.0 {
                continue;
            }
            total += ph;
            let m = map[h];
            p_m[m] += ph;
            let row = &self.joint[h * self.next_size..(h + 1) * self.next_size];
            for (slot, &p) in p_mx[m * self.next_size..(m + 1) * self.next_size].iter_mut().zip(row) {
                *slot += p;
            }
        }
        let i_mem: f64 = p_m.iter().filter(|&&p| p > 0.0).map(|&p| p * (total / p).log2()).sum();
        ((i_mem / total).max(0.0), self.predictive_bits(&p_m, &p_mx, total))
    }

    /// `I(M;X')` summed directly, so a single memory state gives exactly zero.
    fn predictive_bits(&self, p_m: &[f64], p_mx: &[f64], total: f64) -> f64 {
        let mut bits = 0.0;
        for (mem, &pm) in p_m.iter().enumerate() {
            for (x, &p) in p_mx[mem * self.next_size..(mem + 1) * self.next_size]
                .iter()
                .enumerate()
            {
                if p > 0.0 {
                    bits += p * ((p * total) / (pm * self.p_next[x])).log2();
                }
            }
        }
        (bits / total).max(0.0)
    }

    /// Lifts an assignment over view symbols to one over full histories.
    pub fn lift(&self, rows: &[Vec<f64>]) -> Result<KernelStrategy> {
        let m = rows.first().map_or(0, Vec::len);
        let full = self.view_of.iter().map(|&v| rows[v].clone()).collect();
        KernelStrategy::new(self.layout, m, full)
    }

    pub fn lift_map(&self, map: &[usize], memory_size: usize) -> Result<KernelStrategy> {
        let full: Vec<usize> = self.view_of.iter().map(|&v| map[v]).collect();
        KernelStrategy::from_map(self.layout, memory_size, &full)
    }
}

/// One optimized strategy on the information frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub beta: f64,
    pub i_mem: f64,
    pub i_pred: f64,
    pub nostalgia: f64,
    /// `i_mem - beta * i_pred`, bits.
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Assignment over the optimizer's history view.
    pub assignment: Vec<Vec<f64>>,
    /// The same assignment over full window histories.
    pub strategy: KernelStrategy,
    /// Largest objective increase seen between consecutive iterations.
    pub max_objective_increase: f64,
}

impl FrontierPoint {
    fn build(pj: &PredictiveJoint, beta: f64, rows: Vec<Vec<f64>>, run: RunStats) -> Result<Self> {
        let (i_mem, i_pred) = pj.information(&rows);
        Ok(FrontierPoint {
            beta,
            i_mem,
            i_pred,
            nostalgia: (i_mem - i_pred).max(0.0),
            objective: i_mem - beta * i_pred,
            converged: run.converged,
            iterations: run.iterations,
            strategy: pj.lift(&rows)?,
            assignment: rows,
            max_objective_increase: run.max_increase,
        })
    }

    /// Argmax assignment over the optimizer's view; ties to the lowest index.
    pub fn hardened_map(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold(
                        (0, f64::NEG_INFINITY),
                        |best, (m, &p)| if p > best.1 { (m, p) } else { best },
                    )
                    .0
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct RunStats {
    converged: bool,
    iterations: usize,
    max_increase: f64,
}

fn objective(pj: &PredictiveJoint, rows: &[Vec<f64>], beta: f64) -> f64 {
    let (i_mem, i_pred) = pj.information(rows);
    i_mem - beta * i_pred
}

/// One round of the three alternating updates, in place.
fn update(pj: &PredictiveJoint, rows: &mut [Vec<f64>], beta: f64) {
    let m = rows[0].len();
    let n = pj.next_size;
    let mut p_m = vec![0.0; m];
    let mut p_mx = vec![0.0; m * n];
    for h in 0..pj.history_size {
        let ph = pj.p_h[h];
        if ph == 0.0 {
            continue;
        }
        for mem in 0..m {
            let q = rows[h][mem];
            p_m[mem] += ph * q;
            for x in 0..n {
                p_mx[mem * n + x] += q * pj.joint[h * n + x];
            }
        }
    }
    let log_cond: Vec<f64> = (0..m * n)
        .map(|i| {
            let pm = p_m[i / n];
            if pm > 0.0 {
                (p_mx[i] / pm).max(LOG_FLOOR).ln()
            } else {
                LOG_FLOOR.ln()
            }
        })
        .collect();
    let log_pm: Vec<f64> = p_m
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut logits = vec![0.0; m];
    for h in 0..pj.history_size {
        let ph = pj.p_h[h];
        if ph == 0.0 {
            // unreachable histories follow the memory marginal
            let total: f64 = p_m.iter().sum();
            rows[h].iter_mut().zip(&p_m).for_each(|(r, p)| *r = p / total);
            continue;
        }
        let cond = &pj.joint[h * n..(h + 1) * n];
        for mem in 0..m {
            // KL(p(x'|h) || p(x'|m)) up to a term constant in m
            let cross: f64 = cond
                .iter()
                .zip(&log_cond[mem * n..(mem + 1) * n])
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &lq)| p / ph * lq)
                .sum();
            logits[mem] = log_pm[mem] + beta * cross;
        }
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (r, &l) in rows[h].iter_mut().zip(&logits) {
            *r = if l == f64::NEG_INFINITY { 0.0 } else { (l - top).exp() };
            total += *r;
        }
        rows[h].iter_mut().for_each(|r| *r /= total);
    }
}

fn iterate(
    pj: &PredictiveJoint,
    mut rows: Vec<Vec<f64>>,
    beta: f64,
    settings: &OptimizerSettings,
) -> (Vec<Vec<f64>>, RunStats) {
    let mut current = objective(pj, &rows, beta);
    let mut stats = RunStats {
        converged: false,
        iterations: 0,
        max_increase: 0.0,
    };
    if rows[0].len() == 1 {
        stats.converged = true;
        return (rows, stats);
    }
    for it in 1..=settings.max_iterations {
        update(pj, &mut rows, beta);
        let next = objective(pj, &rows, beta);
        stats.iterations = it;
        stats.max_increase = stats.max_increase.max(next - current);
        let change = (current - next).abs();
        current = next;
        if change <= settings.tolerance {
            stats.converged = true;
            break;
        }
    }
    (rows, stats)
}

/// Random hard assignment blended with a flat Dirichlet draw.
fn initial_rows<R: Rng>(history: usize, memory: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let gamma = Gamma::new(1.0, 1.0).expect("valid gamma");
    (0..history)
        .map(|_| {
            let hard = rng.random_range(0..memory);
            let noise: Vec<f64> = (0..memory).map(|_| gamma.sample(rng)).collect();
            let total: f64 = noise.iter().sum();
            (0..memory)
                .map(|m| 0.5 * f64::from(m == hard) + 0.5 * noise[m] / total)
                .collect()
        })
        .collect()
}

fn restart_rng(seed: u64, beta_index: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((beta_index << 32) | restart);
    rng
}

fn best_of(
    pj: &PredictiveJoint,
    beta: f64,
    settings: &OptimizerSettings,
    beta_index: u64,
    warm: Option<&[Vec<f64>]>,
) -> Result<FrontierPoint> {
    let m = settings.memory_size;
    let mut starts: Vec<Vec<Vec<f64>>> = Vec::with_capacity(settings.restarts + 1);
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    for r in 0..settings.restarts {
        let mut rng = restart_rng(settings.seed, beta_index, r as u64);
        starts.push(initial_rows(pj.history_size, m, &mut rng));
    }
    let mut best: Option<FrontierPoint> = None;
    for start in starts {
        let (rows, stats) = iterate(pj, start, beta, settings);
        let point = FrontierPoint::build(pj, beta, rows, stats)?;
        let better = match &best {
            None => true,
            Some(b) => point.objective < b.objective - 1e-15,
        };
        if better {
            best = Some(point);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Best of `settings.restarts` seeded runs at a single `beta`.
pub fn optimize_soft(pj: &PredictiveJoint, beta: f64, settings: &OptimizerSettings) -> Result<FrontierPoint> {
    settings.validate()?;
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(ObserverError::validation(format!("beta = {beta} must be >= 1")));
    }
    best_of(pj, beta, settings, 0, None)
}

/// Deterministic annealing over the geometric beta schedule, warm-starting each
/// point from the previous one.
pub fn sweep_beta(pj: &PredictiveJoint, settings: &OptimizerSettings) -> Result<Vec<FrontierPoint>> {
    settings.validate()?;
    let mut out: Vec<FrontierPoint> = Vec::with_capacity(settings.beta_steps);
    for (i, beta) in settings.betas().into_iter().enumerate() {
        let warm = out.last().map(|p| p.assignment.clone());
        let point = best_of(pj, beta, settings, i as u64 + 1, warm.as_deref())?;
        out.push(point);
    }
    Ok(out)
}

/// What [`exhaustive_best`] optimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExhaustiveObjective {
    /// Minimize `I(M;H) - beta I(M;X')`.
    Lagrangian { beta: f64 },
    /// Maximize `I(M;X')`, breaking ties by lower nostalgia.
    MaxPredictive,
    /// Minimize nostalgia among maps with `I(M;X') >= target`.
    MinNostalgia { i_pred_target: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveBest {
    /// Map over view symbols.
    pub map: Vec<usize>,
    pub point: FrontierPoint,
    /// Number of maps evaluated.
    pub searched: u128,
}

/// Certified optimum over deterministic maps, one per partition of the
/// supported histories.
pub fn exhaustive_best(
    pj: &PredictiveJoint,
    memory_size: usize,
    target: ExhaustiveObjective,
    cap: u128,
) -> Result<ExhaustiveBest> {
    let support = pj.support();
    let maps = enumerate_deterministic(support.len(), memory_size, true, cap)?;
    let searched = maps.count_total();
    let mut full = vec![0usize; pj.history_size];
    let tol = 1e-12;
    let mut best: Option<(Vec<usize>, f64, f64, f64)> = None; // map, score, i_mem, i_pred
    for map in maps {
        for (&h, &m) in support.iter().zip(&map) {
            full[h] = m;
        }
        let (i_mem, i_pred) = pj.information_of_map(&full, memory_size);
        let score = match target {
            ExhaustiveObjective::Lagrangian { beta } => Some(i_mem - beta * i_pred),
            ExhaustiveObjective::MaxPredictive => Some(-i_pred + 1e-6 * (i_mem - i_pred)),
            ExhaustiveObjective::MinNostalgia { i_pred_target } => {
                (i_pred >= i_pred_target - 1e-10).then_some(i_mem - i_pred)
            }
        };
        let Some(score) = score else { continue };
        let better = match &best {
            None => true,
            Some((_, s, mem, pred)) => match target {
                ExhaustiveObjective::MaxPredictive => {
                    i_pred > pred + tol || ((i_pred - pred).abs() <= tol && i_mem - i_pred < mem - pred - tol)
                }
                _ => score < s - tol,
            },
        };
        if better {
            best = Some((full.clone(), score, i_mem, i_pred));
        }
    }
    let (map, _, _, _) = best.ok_or_else(|| ObserverError::validation("no deterministic map meets the target"))?;
    let beta = match target {
        ExhaustiveObjective::Lagrangian { beta } => beta,
        _ => 1.0,
    };
    let rows: Vec<Vec<f64>> = map
        .iter()
        .map(|&m| (0..memory_size).map(|j| f64::from(j == m)).collect())
        .collect();
    let point = FrontierPoint::build(
        pj,
        beta,
        rows,
        RunStats {
            converged: true,
            iterations: 0,
            max_increase: 0.0,
        },
    )?;
    Ok(ExhaustiveBest { map, point, searched })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateMember {
    /// Map over view symbols.
    pub map: Vec<usize>,
    pub i_mem: f64,
    pub i_pred: f64,
    pub nostalgia: f64,
    /// Carries predictive information, as opposed to recording nothing useful.
    pub observer_like: bool,
}

/// Every deterministic map with zero nostalgia (within `1e-9`).
pub fn degeneracy_report(pj: &PredictiveJoint, memory_size: usize, cap: u128) -> Result<Vec<DegenerateMember>> {
    let maps = enumerate_deterministic(pj.history_size, memory_size, false, cap)?;
    Ok(maps
        .filter_map(|map| {
            let (i_mem, i_pred) = pj.information_of_map(&map, memory_size);
            let nostalgia = (i_mem - i_pred).max(0.0);
            (nostalgia <= 1e-9).then_some(DegenerateMember {
                map,
                i_mem,
                i_pred,
                nostalgia,
                observer_like: i_pred > 1e-9,
            })
        })
        .collect())
}

/// Default-capped [`degeneracy_report`].
pub fn degeneracy_members(pj: &PredictiveJoint, memory_size: usize) -> Result<Vec<DegenerateMember>> {
    degeneracy_report(pj, memory_size, DEFAULT_ENUMERATION_CAP)
}

/// CSV with header `beta,i_mem_bits,i_pred_bits,nostalgia_bits,objective,converged,iterations`.
pub fn write_frontier_csv<W: std::io::Write>(points: &[FrontierPoint], writer: W) -> Result<()> {
    use crate::report::fmt_sig;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record([
        "beta",
        "i_mem_bits",
        "i_pred_bits",
        "nostalgia_bits",
        "objective",
        "converged",
        "iterations",
    ])?;
    for p in points {
        w.write_record([
            fmt_sig(p.beta),
            fmt_sig(p.i_mem),
            fmt_sig(p.i_pred),
            fmt_sig(p.nostalgia),
            fmt_sig(p.objective),
            p.converged.to_string(),
            p.iterations.to_string(),
        ])?;
    }
    w.flush().map_err(|e| ObserverError::io("<csv>", e))?;
    Ok(())
}
