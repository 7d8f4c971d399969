//! The analyze / optimize / sample / verify workflows behind the `observer` binary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bound::{evaluate, markov_violation, predictive_cap_check, CapReport, InfoReport};
use crate::chain::{answer_var, question_var, LongRun, NEXT_ANSWER, NEXT_QUESTION};
use crate::config::ScenarioConfig;
use crate::error::{ObserverError, Result};
use crate::info::{binary_entropy, mutual_information};
use crate::joint::JointDistribution;
use crate::optimizer::{
    degeneracy_members, sweep_beta, write_frontier_csv, DegenerateMember, FrontierPoint, PredictiveJoint,
};
use crate::oracle::{converged_tail, cross_validate, monte_carlo_check, Verdict, EXACT_TOLERANCE};
use crate::qubit::{Axis, Question};
use crate::report::{to_json_line, write_file, write_json};
use crate::scenario::Scenario;
use crate::strategy::{answer_record_states, apply_strategy, strategy_summary, HistoryLayout, Strategy};

/// A loaded config with its scenario and strategy resolved.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub strategy: Option<Strategy>,
    pub base_dir: PathBuf,
}

impl Prepared {
    pub fn load(path: &Path) -> Result<Self> {
        let config = ScenarioConfig::load(path)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_config(config, base_dir)
    }

    pub fn from_config(config: ScenarioConfig, base_dir: PathBuf) -> Result<Self> {
        let scenario = config.scenario()?;
        let strategy = config.strategy(&base_dir)?;
        Ok(Prepared {
            config,
            scenario,
            strategy,
            base_dir,
        })
    }

    /// `--out` if given, else the config's `output`, else `out/<name>`,
    /// relative to the working directory.
    pub fn output_dir(&self, out: Option<&Path>) -> PathBuf {
        match (out, &self.config.output) {
            (Some(o), _) => o.to_path_buf(),
            (None, Some(o)) => o.clone(),
            (None, None) => PathBuf::from("out").join(&self.config.name),
        }
    }

    fn require_strategy(&self) -> Result<&Strategy> {
        self.strategy
            .as_ref()
            .ok_or_else(|| ObserverError::validation("strategy: required for this command"))
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ObserverError::io(dir, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct LongRunSummary {
    /// Averaged over the chain's period because the plain limit does not exist.
    pub cesaro: bool,
    pub period: usize,
}

impl From<&LongRun> for LongRunSummary {
    fn from(lr: &LongRun) -> Self {
        LongRunSummary {
            cesaro: lr.cesaro,
            period: lr.period,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Readings {
    /// The full window recorded with question labels.
    pub labeled: InfoReport,
    /// The full window's answers only.
    pub unlabeled: InfoReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub theta_deg: f64,
    pub i_mem: f64,
    pub i_pred: f64,
    pub nostalgia: f64,
    /// `1 - H_b(cos^2(theta/2)) / 2`, present for a labeled one-step record under a
    /// uniform two-question schedule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub scenario: String,
    pub strategy: String,
    pub report: InfoReport,
    pub memory_size: usize,
    pub long_run: LongRunSummary,
    /// Window variables, oldest first, as ordered in `window_joint.csv`.
    pub history_order: Vec<String>,
    /// Distinct answer records of each length `k` that occur.
    pub answer_record_states: Vec<usize>,
    pub readings: Readings,
    pub markov_violation: f64,
    pub cap_check: CapReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub angle_sweep: Vec<SweepPoint>,
}

/// The second question rotated to angle `theta` from the first, in the plane the two span.
pub fn rotate_second(questions: &[Question], theta: f64) -> Result<Vec<Question>> {
    let n1 = questions[0].axis.as_array();
    let n2 = questions[1].axis.as_array();
    let c = questions[0].axis.dot(&questions[1].axis);
    let mut u = [n2[0] - c * n1[0], n2[1] - c * n1[1], n2[2] - c * n1[2]];
    let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if norm < 1e-9 {
        // parallel axes: any perpendicular direction
        let pick = if n1[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let d = pick[0] * n1[0] + pick[1] * n1[1] + pick[2] * n1[2];
        u = [pick[0] - d * n1[0], pick[1] - d * n1[1], pick[2] - d * n1[2]];
    }
    let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let u = [u[0] / norm, u[1] / norm, u[2] / norm];
    let (s, c) = theta.sin_cos();
    let axis = Axis::new([c * n1[0] + s * u[0], c * n1[1] + s * u[1], c * n1[2] + s * u[2]])?;
    let mut out = questions.to_vec();
    out[1] = Question::new(questions[1].label.clone(), axis)?;
    Ok(out)
}

/// Closed-form predictive information of a labeled last-interaction record
/// for two questions at angle `theta`, each asked with probability 1/2.
pub fn angle_closed_form(theta: f64) -> f64 {
    1.0 - 0.5 * binary_entropy((theta / 2.0).cos().powi(2))
}

fn is_uniform_pair(scenario: &Scenario) -> bool {
    matches!(&scenario.process, crate::process::QuestionProcess::Iid { weights }
        if weights.len() == 2 && weights.iter().all(|w| (w - 0.5).abs() < 1e-12))
}

/// Exact analysis of the configured strategy.
pub fn analysis(prepared: &Prepared) -> Result<(Analysis, JointDistribution, JointDistribution)> {
    let scenario = &prepared.scenario;
    let strategy = prepared.require_strategy()?;
    let temp = prepared.config.temperature_kelvin;
    let lr = scenario.long_run()?;
    let window = scenario.window_joint()?;
    let with_memory = apply_strategy(strategy, &window)?;
    let report = evaluate(&with_memory, temp)?;
    let w = scenario.window;
    let k = scenario.num_questions();
    let read = |labeled| evaluate(&apply_strategy(&Strategy::Window { k: w, labeled }, &window)?, temp);
    let readings = Readings {
        labeled: read(true)?,
        unlabeled: read(false)?,
    };
    let mut candidates = vec![strategy.clone(), Strategy::Nothing];
    for kk in 1..=w {
        candidates.push(Strategy::Window { k: kk, labeled: true });
        candidates.push(Strategy::Window { k: kk, labeled: false });
    }
    let cap_check = predictive_cap_check(&window, &scenario.process, &candidates)?;
    let mut angle_sweep = Vec::new();
    if let Some(sweep) = &prepared.config.sweep {
        let closed = matches!(strategy, Strategy::Window { k: 1, labeled: true }) && is_uniform_pair(scenario);
        for &deg in &sweep.angles_deg {
            let theta = deg.to_radians();
            let mut s = scenario.clone();
            s.questions = rotate_second(&scenario.questions, theta)?;
            let r = s.analyze(strategy, None)?;
            angle_sweep.push(SweepPoint {
                theta_deg: deg,
                i_mem: r.i_mem.bits(),
                i_pred: r.i_pred.bits(),
                nostalgia: r.nostalgia.bits(),
                closed_form: closed.then(|| angle_closed_form(theta)),
            });
        }
    }
    let mut history_order: Vec<String> = window.var_names().iter().map(|s| s.to_string()).collect();
    history_order.truncate(2 * w);
    let a = Analysis {
        scenario: scenario.name.clone(),
        strategy: strategy_summary(strategy),
        report,
        memory_size: strategy.memory_size(k),
        long_run: (&lr).into(),
        history_order,
        answer_record_states: (1..=w)
            .map(|kk| answer_record_states(&window, kk))
            .collect::<Result<_>>()?,
        readings,
        markov_violation: markov_violation(&with_memory)?.bits(),
        cap_check,
        angle_sweep,
    };
    Ok((a, window, with_memory))
}

/// Writes `report.json`, `analysis.json`, `window_joint.csv` and `memory_joint.csv`.
pub fn analyze(prepared: &Prepared, out_dir: &Path) -> Result<Analysis> {
    let (a, window, with_memory) = analysis(prepared)?;
    ensure_dir(out_dir)?;
    write_json(&out_dir.join("report.json"), &a.report)?;
    write_json(&out_dir.join("analysis.json"), &a)?;
    write_file(&out_dir.join("window_joint.csv"), |buf| window.write_csv(buf))?;
    write_file(&out_dir.join("memory_joint.csv"), |buf| with_memory.write_csv(buf))?;
    Ok(a)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracySummary {
    pub memory_size: usize,
    /// Set when enumeration exceeded the cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub members: Vec<DegenerateMember>,
    pub observer_like: usize,
    pub non_observer_like: usize,
}

#[derive(Debug, Clone)]
pub struct Optimization {
    pub points: Vec<FrontierPoint>,
    pub degeneracy: DegeneracySummary,
    pub all_converged: bool,
}

/// Frontier sweep and β=1 degeneracy for the configured optimizer settings.
pub fn optimization(prepared: &Prepared, seed: Option<u64>) -> Result<(Optimization, PredictiveJoint)> {
    let opt = prepared
        .config
        .optimizer
        .as_ref()
        .ok_or_else(|| ObserverError::validation("optimizer: required for optimize"))?;
    let mut settings = opt.settings()?;
    if let Some(s) = seed {
        settings.seed = s;
    }
    let pj = PredictiveJoint::from_window(&prepared.scenario.window_joint()?, opt.history)?;
    let points = sweep_beta(&pj, &settings)?;
    let degeneracy = match degeneracy_members(&pj, settings.memory_size) {
        Ok(members) => DegeneracySummary {
            memory_size: settings.memory_size,
            skipped: None,
            observer_like: members.iter().filter(|m| m.observer_like).count(),
            non_observer_like: members.iter().filter(|m| !m.observer_like).count(),
            members,
        },
        Err(e @ ObserverError::SizeCap { .. }) => DegeneracySummary {
            memory_size: settings.memory_size,
            skipped: Some(e.to_string()),
            members: Vec::new(),
            observer_like: 0,
            non_observer_like: 0,
        },
        Err(e) => return Err(e),
    };
    let all_converged = points.iter().all(|p| p.converged);
    Ok((
        Optimization {
            points,
            degeneracy,
            all_converged,
        },
        pj,
    ))
}

/// Writes `frontier.csv`, `strategy_beta_<i>.csv` per point and `degeneracy.json`.
pub fn optimize(prepared: &Prepared, seed: Option<u64>, out_dir: &Path) -> Result<Optimization> {
    let (o, _) = optimization(prepared, seed)?;
    ensure_dir(out_dir)?;
    write_file(&out_dir.join("frontier.csv"), |buf| write_frontier_csv(&o.points, buf))?;
    for (i, p) in o.points.iter().enumerate() {
        write_file(&out_dir.join(format!("strategy_beta_{i}.csv")), |buf| {
            p.strategy.write_csv(&prepared.scenario.questions, buf)
        })?;
    }
    write_json(&out_dir.join("degeneracy.json"), &o.degeneracy)?;
    Ok(o)
}

/// Writes `trajectory.csv`.
pub fn sample(prepared: &Prepared, length: usize, seed: u64, out_dir: &Path) -> Result<PathBuf> {
    let t = prepared.scenario.sample(length, seed)?;
    let path = out_dir.join("trajectory.csv");
    write_file(&path, |buf| t.write_csv(&prepared.scenario.questions, buf))?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub reference_joint: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 1_000_000,
            seed: 0,
            reference_joint: None,
        }
    }
}

/// Slack under a Monte Carlo tolerance of three standard errors, for
/// estimators whose bootstrap spread is exactly zero.
const MC_FLOOR: f64 = 1e-12;

/// Every check against the independent oracles.
pub fn verification(prepared: &Prepared, options: &VerifyOptions) -> Result<Vec<Verdict>> {
    let scenario = &prepared.scenario;
    let name = scenario.name.as_str();
    let mut verdicts = Vec::new();
    let window = scenario.window_joint()?;
    let lr = scenario.long_run()?;

    match converged_tail(scenario, lr.period) {
        Ok(tail) if tail.converged => verdicts.push(Verdict::new(
            "oracle_tail",
            name,
            cross_validate(&window, &tail.joint)?,
            EXACT_TOLERANCE,
        )),
        Ok(tail) => {
            eprintln!(
                "notice: oracle_tail skipped, tails still moving at the tree cap (horizon {})",
                tail.horizon
            );
            verdicts.push(Verdict::skipped("oracle_tail", name, EXACT_TOLERANCE));
        }
        Err(ObserverError::SizeCap { .. }) => {
            eprintln!("notice: oracle_tail skipped, trajectory tree exceeds the cap");
            verdicts.push(Verdict::skipped("oracle_tail", name, EXACT_TOLERANCE));
        }
        Err(e) => return Err(e),
    }

    verdicts.push(Verdict::new("mass", name, (window.total_mass() - 1.0).abs(), 1e-12));

    if scenario.process.is_iid() {
        let history: Vec<String> = window.var_names()[..2 * scenario.window]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let refs: Vec<&str> = history.iter().map(String::as_str).collect();
        let mi = mutual_information(&window, &[NEXT_QUESTION], &refs)?;
        verdicts.push(Verdict::new("exogeneity", name, mi.bits(), EXACT_TOLERANCE));
    }

    // one step of the kernel from the long-run state law
    let kernel = scenario.kernel()?;
    let k = scenario.num_questions();
    let pair = window.marginal(&[&question_var(0), &answer_var(0), NEXT_QUESTION, NEXT_ANSWER])?;
    let mut dev: f64 = 0.0;
    if kernel.phases() == 1 {
        for (c, p) in pair.iter() {
            let from = 2 * c[0] + c[1];
            let to = 2 * c[2] + c[3];
            dev = dev.max((p - lr.dist[from] * kernel.get(from, to)).abs());
        }
    } else {
        let n = 2 * k;
        for (c, p) in pair.iter() {
            let mut expect = 0.0;
            for phase in 0..kernel.phases() {
                let from = phase * n + 2 * c[0] + c[1];
                let next_phase = (phase + 1) % kernel.phases();
                let to = next_phase * n + 2 * c[2] + c[3];
                expect += lr.dist[from] * kernel.get(from, to);
            }
            dev = dev.max((p - expect).abs());
        }
    }
    verdicts.push(Verdict::new("one_step", name, dev, EXACT_TOLERANCE));

    if let Some(strategy) = &prepared.strategy {
        let with_memory = apply_strategy(strategy, &window)?;
        verdicts.push(Verdict::new(
            "markov_property",
            name,
            markov_violation(&with_memory)?.bits(),
            EXACT_TOLERANCE,
        ));
        let exact = evaluate(&with_memory, None)?;
        verdicts.push(Verdict::new(
            "data_processing",
            name,
            (exact.i_pred.bits() - exact.i_mem.bits()).max(0.0),
            EXACT_TOLERANCE,
        ));
        let mc = monte_carlo_check(scenario, strategy, options.samples, options.seed)?;
        verdicts.push(Verdict::new(
            "monte_carlo_i_pred",
            name,
            (mc.estimate.i_pred.bits() - exact.i_pred.bits()).abs(),
            3.0 * mc.standard_errors.i_pred + MC_FLOOR,
        ));
        verdicts.push(Verdict::new(
            "monte_carlo_nostalgia",
            name,
            (mc.estimate.nostalgia.bits() - exact.nostalgia.bits()).abs(),
            3.0 * mc.standard_errors.nostalgia + MC_FLOOR,
        ));
    }

    if let Some(path) = &options.reference_joint {
        let full = prepared.base_dir.join(path);
        let path = if path.exists() { path.clone() } else { full };
        let file = fs::File::open(&path).map_err(|e| ObserverError::io(&path, e))?;
        let reference = JointDistribution::read_csv(file, &window)?;
        verdicts.push(Verdict::new(
            "reference_joint",
            name,
            cross_validate(&window, &reference)?,
            EXACT_TOLERANCE,
        ));
    }
    Ok(verdicts)
}

/// Runs [`verification`], writes `verify.jsonl` and returns the verdicts.
pub fn verify(prepared: &Prepared, options: &VerifyOptions, out_dir: &Path) -> Result<Vec<Verdict>> {
    let verdicts = verification(prepared, options)?;
    let mut text = String::new();
    for v in &verdicts {
        text.push_str(&to_json_line(v)?);
        text.push('\n');
    }
    write_file(&out_dir.join("verify.jsonl"), |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })?;
    Ok(verdicts)
}

/// History layout of a prepared scenario.
pub fn layout(prepared: &Prepared) -> Result<HistoryLayout> {
    HistoryLayout::new(prepared.scenario.num_questions(), prepared.scenario.window)
}
