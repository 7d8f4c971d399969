//! The Markov chain of post-measurement eigenstates induced by repeated questioning.
//!
//! A chain state names the last question asked and the answer it got; that pair
//! fixes the qubit's state (`+axis` or `-axis`). For a periodic schedule the
//! chain is unrolled over the schedule's phase so that it becomes
//! time-homogeneous.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ObserverError, Result};
use crate::joint::{JointDistribution, Variable};
use crate::process::QuestionProcess;
use crate::qubit::{collapse, outcome_probability, validate_questions, Answer, BlochVector, Question};

/// Default cap on the number of cells in an exact window table.
pub const DEFAULT_TABLE_CAP: usize = 10_000_000;

pub const NEXT_QUESTION: &str = "Q[t+1]";
pub const NEXT_ANSWER: &str = "A[t+1]";

fn offset_suffix(offset: isize) -> String {
    match offset {
        0 => "t".to_string(),
        o if o > 0 => format!("t+{o}"),
        o => format!("t{o}"),
    }
}

/// Name of the question variable `offset` steps from the present.
pub fn question_var(offset: isize) -> String {
    format!("Q[{}]", offset_suffix(offset))
}

pub fn answer_var(offset: isize) -> String {
    format!("A[{}]", offset_suffix(offset))
}

/// Names of the `w` most recent `(Q, A)` pairs, oldest first.
pub fn history_var_names(w: usize) -> Vec<String> {
    (0..w)
        .flat_map(|i| {
            let offset = i as isize - (w as isize - 1);
            [question_var(offset), answer_var(offset)]
        })
        .collect()
}

pub(crate) fn answer_variable(name: String) -> Variable {
    Variable::new(name, vec!["0".into(), "1".into()])
}

pub(crate) fn question_variable(name: String, questions: &[Question]) -> Variable {
    Variable::new(name, questions.iter().map(|q| q.label.clone()).collect())
}

/// `(question, answer)` after a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainState {
    pub question: usize,
    pub answer: Answer,
}

impl ChainState {
    pub fn index(self) -> usize {
        2 * self.question + self.answer.index()
    }

    pub fn from_index(i: usize) -> Self {
        ChainState {
            question: i / 2,
            answer: Answer::from_index(i % 2),
        }
    }
}

/// Row-stochastic transition matrix over `phases x 2K` states.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    questions: usize,
    phases: usize,
    matrix: Vec<f64>,
}

impl Kernel {
    pub fn num_states(&self) -> usize {
        self.phases * 2 * self.questions
    }

    pub fn num_questions(&self) -> usize {
        self.questions
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    /// `P(to | from)` over full (phase-aware) state indices.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.matrix[from * self.num_states() + to]
    }

    /// `P((q',a') | (q,a))` for a homogeneous chain.
    pub fn transition(&self, from: ChainState, to: ChainState) -> f64 {
        self.get(from.index(), to.index())
    }

    pub fn row(&self, from: usize) -> &[f64] {
        let s = self.num_states();
        &self.matrix[from * s..(from + 1) * s]
    }

    fn max_row_error(&self) -> f64 {
        (0..self.num_states())
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn step(&self, v: &[f64]) -> Vec<f64> {
        vec_mat(v, &self.matrix, self.num_states())
    }
}

fn vec_mat(v: &[f64], m: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        for (o, &mij) in out.iter_mut().zip(&m[i * n..(i + 1) * n]) {
            *o += vi * mij;
        }
    }
    out
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = vec_mat(&a[i * n..(i + 1) * n], b, n);
        let total: f64 = row.iter().sum();
        for (o, r) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
            *o = r / total;
        }
    }
    out
}

/// Born factors this close to 0 or 1 are taken as exact. Round-off leaks of
/// order 1e-16 out of a certain outcome would otherwise connect classes that
/// are closed, and the long-run power would amplify them.
const CERTAINTY_SNAP: f64 = 1e-12;

fn born_step(questions: &[Question], from: ChainState, to: ChainState) -> f64 {
    let state = collapse(&questions[from.question].axis, from.answer);
    let p = outcome_probability(&state, &questions[to.question].axis, to.answer);
    if p < CERTAINTY_SNAP {
        0.0
    } else if p > 1.0 - CERTAINTY_SNAP {
        1.0
    } else {
        p
    }
}

/// Transition kernel for IID or Markov schedules.
pub fn build_chain(questions: &[Question], process: &QuestionProcess) -> Result<Kernel> {
    if process.is_periodic() {
        return Err(ObserverError::PeriodicProcess);
    }
    build_unrolled_chain(questions, process)
}

/// Kernel for any schedule; periodic schedules get one phase per schedule slot.
pub fn build_unrolled_chain(questions: &[Question], process: &QuestionProcess) -> Result<Kernel> {
    validate_questions(questions)?;
    let k = questions.len();
    process.validate_for(k)?;
    let phases = match process {
        QuestionProcess::Periodic { sequence } => sequence.len(),
        _ => 1,
    };
    let per_phase = 2 * k;
    let n = phases * per_phase;
    let mut matrix = vec![0.0; n * n];
    for phase in 0..phases {
        let next_phase = (phase + 1) % phases;
        for from in 0..per_phase {
            let s = ChainState::from_index(from);
            let q_law = match process {
                QuestionProcess::Periodic { .. } => process.next_question_distribution(k, None, phase + 1)?,
                _ => process.next_question_distribution(k, Some(s.question), 1)?,
            };
            for to in 0..per_phase {
                let t = ChainState::from_index(to);
                let p = q_law[t.question] * born_step(questions, s, t);
                matrix[(phase * per_phase + from) * n + next_phase * per_phase + to] = p;
            }
        }
    }
    let kernel = Kernel {
        questions: k,
        phases,
        matrix,
    };
    debug_assert!(kernel.max_row_error() <= 1e-12);
    Ok(kernel)
}

/// Law of the first chain state: first question, then a Born draw on `initial`.
pub fn initial_distribution(
    questions: &[Question],
    process: &QuestionProcess,
    initial: &BlochVector,
) -> Result<Vec<f64>> {
    let k = questions.len();
    let first = process.first_distribution(k)?;
    let phases = match process {
        QuestionProcess::Periodic { sequence } => sequence.len(),
        _ => 1,
    };
    let mut v = vec![0.0; phases * 2 * k];
    for (q, &pq) in first.iter().enumerate() {
        for a in Answer::ALL {
            v[ChainState { question: q, answer: a }.index()] = pq * outcome_probability(initial, &questions[q].axis, a);
        }
    }
    Ok(v)
}

/// Limit of the chain law from a given start.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRun {
    /// Distribution over full (phase-aware) states.
    pub dist: Vec<f64>,
    /// True when the plain limit does not exist and a Cesàro average was taken.
    pub cesaro: bool,
    /// Least common multiple of the periods of the chain's communicating classes.
    pub period: usize,
}

impl LongRun {
    /// Marginal over `(question, answer)`, summing out the phase.
    pub fn state_marginal(&self, k: usize) -> Vec<f64> {
        let per_phase = 2 * k;
        let mut out = vec![0.0; per_phase];
        for (i, p) in self.dist.iter().enumerate() {
            out[i % per_phase] += p;
        }
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// lcm over strongly connected components of each component's period.
fn chain_period(kernel: &Kernel) -> usize {
    let n = kernel.num_states();
    let edge = |i: usize, j: usize| kernel.get(i, j) > 0.0;
    // transitive closure; chains here have at most a few dozen states
    let mut reach = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            reach[i * n + j] = i == j || edge(i, j);
        }
    }
    for m in 0..n {
        for i in 0..n {
            if reach[i * n + m] {
                for j in 0..n {
                    if reach[m * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut period = 1;
    for root in 0..n {
        if assigned[root] {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| reach[root * n + j] && reach[j * n + root]).collect();
        for &m in &members {
            assigned[m] = true;
        }
        // breadth-first levels inside the component
        let mut level = vec![usize::MAX; n];
        level[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &members {
                if edge(u, v) && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut d = 0;
        for &u in &members {
            for &v in &members {
                if edge(u, v) {
                    d = gcd(d, (level[u] + 1).abs_diff(level[v]));
                }
            }
        }
        if d > 1 {
            period = period / gcd(period, d) * d;
        }
    }
    period
}

/// Limit of `initial . P^n`, falling back to a Cesàro average over the chain
/// period when the plain limit oscillates.
pub fn long_run_distribution(kernel: &Kernel, initial: &[f64]) -> Result<LongRun> {
    let n = kernel.num_states();
    if initial.len() != n {
        return Err(ObserverError::validation(
            "initial distribution does not match the kernel",
        ));
    }
    if kernel.max_row_error() > 1e-12 {
        return Err(ObserverError::validation("kernel is not row-stochastic"));
    }
    // P^(2^60): every geometric transient is gone
    let mut power = kernel.matrix.clone();
    for _ in 0..60 {
        power = mat_mul(&power, &power, n);
    }
    let base = vec_mat(initial, &power, n);
    let moved = kernel.step(&base);
    let drift = base.iter().zip(&moved).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let period = chain_period(kernel);
    if drift <= 1e-12 {
        return Ok(LongRun {
            dist: base,
            cesaro: false,
            period,
        });
    }
    let mut avg = vec![0.0; n];
    let mut v = base;
    for _ in 0..period {
        for (a, x) in avg.iter_mut().zip(&v) {
            *a += x / period as f64;
        }
        v = kernel.step(&v);
    }
    Ok(LongRun {
        dist: avg,
        cesaro: true,
        period,
    })
}

/// Exact joint of the last `w` interactions and the next one, at the long run.
pub fn window_joint(
    kernel: &Kernel,
    long_run: &LongRun,
    questions: &[Question],
    w: usize,
    cap: usize,
) -> Result<JointDistribution> {
    if w == 0 {
        return Err(ObserverError::validation("window must be >= 1"));
    }
    let k = kernel.num_questions();
    if questions.len() != k {
        return Err(ObserverError::validation("question set does not match the kernel"));
    }
    let per_phase = 2 * k;
    let cells = (per_phase as u128).checked_pow(w as u32 + 1).unwrap_or(u128::MAX);
    if cells > cap as u128 {
        return Err(ObserverError::SizeCap {
            what: "window joint",
            required: cells,
            cap: cap as u128,
            hint: "; raise the table cap or shorten the window",
        });
    }
    let mut names = history_var_names(w);
    names.push(NEXT_QUESTION.to_string());
    names.push(NEXT_ANSWER.to_string());
    let vars: Vec<Variable> = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            if i % 2 == 0 {
                question_variable(name, questions)
            } else {
                answer_variable(name)
            }
        })
        .collect();

    let phases = kernel.phases();
    let n = kernel.num_states();
    let steps = w + 1;
    let mut probs = vec![0.0; cells as usize];
    let mut path = vec![0usize; steps];
    for (cell, slot) in probs.iter_mut().enumerate() {
        let mut rest = cell;
        for s in path.iter_mut().rev() {
            *s = rest % per_phase;
            rest /= per_phase;
        }
        let mut total = 0.0;
        for phase in 0..phases {
            let mut state = phase * per_phase + path[0];
            let mut p = long_run.dist[state];
            for &next in &path[1..] {
                if p == 0.0 {
                    break;
                }
                let next_state = ((state / per_phase + 1) % phases) * per_phase + next;
                p *= kernel.matrix[state * n + next_state];
                state = next_state;
            }
            total += p;
        }
        *slot = total;
    }
    JointDistribution::with_mass_tolerance(vars, probs, 1e-10)
}

/// The question/answer string produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<ChainState>,
    pub seed: u64,
    pub initial: BlochVector,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Fraction of steps whose answer equals the previous answer.
    pub fn repeat_rate(&self) -> f64 {
        if self.steps.len() < 2 {
            return 0.0;
        }
        let same = self.steps.windows(2).filter(|p| p[0].answer == p[1].answer).count();
        same as f64 / (self.steps.len() - 1) as f64
    }

    /// CSV with columns `t,question,answer`, `t` counting from 1.
    pub fn write_csv<W: Write>(&self, questions: &[Question], writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(["t", "question", "answer"])?;
        for (t, s) in self.steps.iter().enumerate() {
            w.write_record([
                (t + 1).to_string(),
                questions[s.question].label.clone(),
                s.answer.bit().to_string(),
            ])?;
        }
        w.flush().map_err(|e| ObserverError::io("<csv>", e))?;
        Ok(())
    }
}

/// Runs the measurement process on the qubit directly.
pub(crate) fn run<R: Rng>(
    questions: &[Question],
    process: &QuestionProcess,
    initial: &BlochVector,
    length: usize,
    rng: &mut R,
    out: &mut Vec<ChainState>,
) {
    let k = questions.len();
    let mut state = *initial;
    let mut prev = None;
    for t in 0..length {
        let q = process.draw(k, prev, t, rng);
        let p_plus = outcome_probability(&state, &questions[q].axis, Answer::Plus);
        let answer = if rng.random::<f64>() < p_plus {
            Answer::Plus
        } else {
            Answer::Minus
        };
        state = collapse(&questions[q].axis, answer);
        out.push(ChainState { question: q, answer });
        prev = Some(q);
    }
}

pub fn sample_trajectory(
    questions: &[Question],
    process: &QuestionProcess,
    initial: &BlochVector,
    length: usize,
    seed: u64,
) -> Result<Trajectory> {
    if length == 0 {
        return Err(ObserverError::validation("length must be >= 1"));
    }
    validate_questions(questions)?;
    process.validate_for(questions.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(length);
    run(questions, process, initial, length, &mut rng, &mut steps);
    Ok(Trajectory {
        steps,
        seed,
        initial: *initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Axis;

    fn qs(axes: &[Axis]) -> Vec<Question> {
        axes.iter()
            .enumerate()
            .map(|(i, a)| Question::new(format!("Q{}", i + 1), *a).unwrap())
            .collect()
    }

    fn st(q: usize, plus: bool) -> ChainState {
        ChainState {
            question: q,
            answer: if plus { Answer::Plus } else { Answer::Minus },
        }
    }

    #[test]
    fn variable_names() {
        assert_eq!(history_var_names(2), vec!["Q[t-1]", "A[t-1]", "Q[t]", "A[t]"]);
    }

    #[test]
    fn single_question_kernel_is_identity() {
        let k = build_chain(&qs(&[Axis::z()]), &QuestionProcess::uniform(1)).unwrap();
        assert_eq!(k.transition(st(0, true), st(0, true)), 1.0);
        assert_eq!(k.transition(st(0, false), st(0, false)), 1.0);
        assert_eq!(k.transition(st(0, true), st(0, false)), 0.0);
    }

    #[test]
    fn orthogonal_pair_kernel() {
        let k = build_chain(&qs(&[Axis::z(), Axis::x()]), &QuestionProcess::uniform(2)).unwrap();
        assert!((k.transition(st(0, true), st(0, true)) - 0.5).abs() < 1e-15);
        assert_eq!(k.transition(st(0, true), st(0, false)), 0.0);
        assert!((k.transition(st(0, true), st(1, true)) - 0.25).abs() < 1e-15);
        assert!((k.transition(st(1, false), st(0, true)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn angled_pair_repeat_probability() {
        let theta = 0.7;
        let k = build_chain(&qs(&[Axis::z(), Axis::polar(theta)]), &QuestionProcess::uniform(2)).unwrap();
        let c2 = (theta / 2.0).cos().powi(2);
        assert!((k.transition(st(0, true), st(1, true)) - 0.5 * c2).abs() < 1e-15);
    }

    #[test]
    fn periodic_process_is_rejected() {
        let p = QuestionProcess::periodic(vec![0]).unwrap();
        assert!(matches!(
            build_chain(&qs(&[Axis::z()]), &p),
            Err(ObserverError::PeriodicProcess)
        ));
    }

    #[test]
    fn long_run_examples() {
        let one = qs(&[Axis::z()]);
        let iid1 = QuestionProcess::uniform(1);
        let k = build_chain(&one, &iid1).unwrap();
        let mixed = initial_distribution(&one, &iid1, &BlochVector::mixed()).unwrap();
        let lr = long_run_distribution(&k, &mixed).unwrap();
        assert_eq!(lr.dist, vec![0.5, 0.5]);
        assert!(!lr.cesaro);
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let lr = long_run_distribution(&k, &initial_distribution(&one, &iid1, &up).unwrap()).unwrap();
        assert_eq!(lr.dist, vec![0.0, 1.0]);

        let two = qs(&[Axis::z(), Axis::x()]);
        let iid2 = QuestionProcess::uniform(2);
        let k = build_chain(&two, &iid2).unwrap();
        let lr = long_run_distribution(&k, &initial_distribution(&two, &iid2, &up).unwrap()).unwrap();
        for p in lr.dist {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_chain_gets_cesaro_average() {
        // swap schedule on a shared axis: (Q1,+) -> (Q2,+) -> (Q1,+)
        let same = qs(&[Axis::z(), Axis::z()]);
        let swap = QuestionProcess::markov(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 0.0]).unwrap();
        let k = build_chain(&same, &swap).unwrap();
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let lr = long_run_distribution(&k, &initial_distribution(&same, &swap, &up).unwrap()).unwrap();
        assert!(lr.cesaro);
        assert_eq!(lr.period, 2);
        assert!((lr.dist[st(0, true).index()] - 0.5).abs() < 1e-12);
        assert!((lr.dist[st(1, true).index()] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_examples() {
        let two = qs(&[Axis::z(), Axis::x()]);
        let iid = QuestionProcess::uniform(2);
        let k = build_chain(&two, &iid).unwrap();
        let lr = long_run_distribution(&k, &initial_distribution(&two, &iid, &BlochVector::mixed()).unwrap()).unwrap();
        let j = window_joint(&k, &lr, &two, 2, DEFAULT_TABLE_CAP).unwrap();
        assert_eq!(j.len(), 64);
        let aa = j.marginal(&["A[t-1]", "A[t]"]).unwrap();
        for (c, p) in aa.iter() {
            let expect = if c[0] == c[1] { 0.375 } else { 0.125 };
            assert!((p - expect).abs() < 1e-12, "{c:?} {p}");
        }
        let next_q = j.marginal(&[NEXT_QUESTION]).unwrap();
        assert!((next_q.probs()[0] - 0.5).abs() < 1e-12);

        // final pair equals the long-run law pushed one step
        let last = j.marginal(&[NEXT_QUESTION, NEXT_ANSWER]).unwrap();
        let pushed = k.step(&lr.dist);
        for (a, b) in last.probs().iter().zip(&pushed) {
            assert!((a - b).abs() < 1e-10);
        }

        assert!(matches!(
            window_joint(&k, &lr, &two, 2, 10),
            Err(ObserverError::SizeCap { required: 64, .. })
        ));
        assert!(window_joint(&k, &lr, &two, 0, 10).is_err());
    }

    #[test]
    fn case_a_window_repeats() {
        let one = qs(&[Axis::z()]);
        let iid = QuestionProcess::uniform(1);
        let k = build_chain(&one, &iid).unwrap();
        let lr = long_run_distribution(&k, &initial_distribution(&one, &iid, &BlochVector::mixed()).unwrap()).unwrap();
        let j = window_joint(&k, &lr, &one, 1, DEFAULT_TABLE_CAP).unwrap();
        let same: f64 = j.iter().filter(|(c, _)| c[1] == c[3]).map(|(_, p)| p).sum();
        assert_eq!(same, 1.0);
    }

    #[test]
    fn unrolled_periodic_matches_degenerate_iid() {
        let one = qs(&[Axis::z(), Axis::x()]);
        let per = QuestionProcess::periodic(vec![0, 0, 0]).unwrap();
        let iid = QuestionProcess::iid(vec![1.0, 0.0]).unwrap();
        let mixed = BlochVector::mixed();
        let kp = build_unrolled_chain(&one, &per).unwrap();
        let lp = long_run_distribution(&kp, &initial_distribution(&one, &per, &mixed).unwrap()).unwrap();
        let jp = window_joint(&kp, &lp, &one, 2, DEFAULT_TABLE_CAP).unwrap();
        let ki = build_chain(&one, &iid).unwrap();
        let li = long_run_distribution(&ki, &initial_distribution(&one, &iid, &mixed).unwrap()).unwrap();
        let ji = window_joint(&ki, &li, &one, 2, DEFAULT_TABLE_CAP).unwrap();
        assert!(jp.max_abs_deviation(&ji).unwrap() < 1e-12);
    }

    #[test]
    fn trajectory_examples() {
        let one = qs(&[Axis::z()]);
        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let t = sample_trajectory(&one, &QuestionProcess::uniform(1), &up, 5, 3).unwrap();
        assert!(t.steps.iter().all(|s| s.answer == Answer::Plus));
        assert!(sample_trajectory(&one, &QuestionProcess::uniform(1), &up, 0, 3).is_err());

        let two = qs(&[Axis::z(), Axis::x()]);
        let t = sample_trajectory(&two, &QuestionProcess::uniform(2), &BlochVector::mixed(), 1_000_000, 11).unwrap();
        assert!((t.repeat_rate() - 0.75).abs() < 0.002, "{}", t.repeat_rate());

        let mut buf = Vec::new();
        t.write_csv(&two, &mut buf).unwrap();
        assert!(buf.starts_with(b"t,question,answer\n1,Q"));
    }

    #[test]
    fn periodic_single_question_matches_degenerate_iid_in_distribution() {
        let two = qs(&[Axis::z(), Axis::x()]);
        let mixed = BlochVector::mixed();
        let per = QuestionProcess::periodic(vec![0]).unwrap();
        let iid = QuestionProcess::iid(vec![1.0, 0.0]).unwrap();
        let a = sample_trajectory(&two, &per, &mixed, 2000, 1).unwrap();
        let b = sample_trajectory(&two, &iid, &mixed, 2000, 2).unwrap();
        assert!(a.steps.iter().chain(&b.steps).all(|s| s.question == 0));
        // both strings are constant after the first answer
        assert_eq!(a.repeat_rate(), 1.0);
        assert_eq!(b.repeat_rate(), 1.0);
    }
}
