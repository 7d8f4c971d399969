//! Observer memory strategies: rules writing a function of the recent
//! question/answer history into a finite memory.

use std::io::{Read, Write};

use crate::chain::{history_var_names, ChainState, NEXT_ANSWER, NEXT_QUESTION};
use crate::error::{ObserverError, Result};
use crate::joint::{JointDistribution, Variable};
use crate::qubit::Question;
use crate::report::fmt_sig;

/// Name of the memory variable in applied joints.
pub const MEMORY: &str = "M";
/// Default cap on the number of deterministic maps an enumeration may yield.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

const ROW_TOLERANCE: f64 = 1e-12;

/// Shape of a history window: `window` pairs over `questions` questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryLayout {
    pub questions: usize,
    pub window: usize,
}

impl HistoryLayout {
    pub fn new(questions: usize, window: usize) -> Result<Self> {
        if questions == 0 || window == 0 {
            return Err(ObserverError::validation(
                "history layout needs >= 1 question and window >= 1",
            ));
        }
        Ok(HistoryLayout { questions, window })
    }

    /// Reads `K` and `w` off a window joint's variables, checking their names.
    pub fn of_joint(joint: &JointDistribution) -> Result<Self> {
        let vars = joint.vars();
        if vars.len() < 4 || !vars.len().is_multiple_of(2) {
            return Err(ObserverError::validation("joint is not a window joint"));
        }
        let w = vars.len() / 2 - 1;
        let mut expected = history_var_names(w);
        expected.push(NEXT_QUESTION.into());
        expected.push(NEXT_ANSWER.into());
        if joint.var_names() != expected {
            return Err(ObserverError::validation(format!(
                "joint variables {:?} are not the window layout {:?}",
                joint.var_names(),
                expected
            )));
        }
        HistoryLayout::new(vars[0].size(), w)
    }

    pub fn pair_count(&self) -> usize {
        2 * self.questions
    }

    /// `(2K)^w`.
    pub fn size(&self) -> usize {
        self.pair_count().pow(self.window as u32)
    }

    /// Pairs of a history index, oldest first.
    pub fn pairs(&self, mut index: usize) -> Vec<ChainState> {
        let mut out = vec![ChainState::from_index(0); self.window];
        for slot in out.iter_mut().rev() {
            *slot = ChainState::from_index(index % self.pair_count());
            index /= self.pair_count();
        }
        out
    }

    pub fn label(&self, index: usize, questions: &[Question]) -> String {
        self.pairs(index)
            .iter()
            .map(|s| format!("{}:{}", questions[s.question].label, s.answer.bit()))
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Index of the last-`k` view of a history, and the size of that view's alphabet.
pub fn window_view(layout: &HistoryLayout, k: usize, labeled: bool, history: usize) -> usize {
    let pairs = layout.pairs(history);
    pairs[layout.window - k..].iter().fold(0, |acc, s| {
        if labeled {
            acc * layout.pair_count() + s.index()
        } else {
            acc * 2 + s.answer.index()
        }
    })
}

pub fn window_view_size(layout: &HistoryLayout, k: usize, labeled: bool) -> usize {
    if labeled {
        layout.pair_count().pow(k as u32)
    } else {
        1 << k
    }
}

/// A stochastic assignment `p(m | h)` over a window's history alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelStrategy {
    layout: HistoryLayout,
    memory_size: usize,
    rows: Vec<Vec<f64>>,
}

impl KernelStrategy {
    pub fn new(layout: HistoryLayout, memory_size: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if memory_size == 0 {
            return Err(ObserverError::validation("kernel memory size must be >= 1"));
        }
        if rows.len() != layout.size() {
            return Err(ObserverError::validation(format!(
                "kernel has {} rows, history alphabet has {}",
                rows.len(),
                layout.size()
            )));
        }
        for (h, row) in rows.iter().enumerate() {
            if row.len() != memory_size || row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(ObserverError::validation(format!("kernel row {h} is malformed")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_TOLERANCE {
                return Err(ObserverError::validation(format!("kernel row {h} sums to {total}")));
            }
        }
        Ok(KernelStrategy {
            layout,
            memory_size,
            rows,
        })
    }

    /// Deterministic kernel from a history -> memory map.
    pub fn from_map(layout: HistoryLayout, memory_size: usize, map: &[usize]) -> Result<Self> {
        let rows = map
            .iter()
            .map(|&m| {
                let mut r = vec![0.0; memory_size];
                if m < memory_size {
                    r[m] = 1.0;
                }
                r
            })
            .collect();
        Self::new(layout, memory_size, rows)
    }

    pub fn layout(&self) -> HistoryLayout {
        self.layout
    }

    pub fn memory_size(&self) -> usize {
        self.memory_size
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Argmax per row; ties go to the lowest memory index.
    pub fn hardened(&self) -> Vec<usize> {
        self.rows
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

    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&p| p <= tol || p >= 1.0 - tol))
    }

    /// CSV: a `history` column followed by one column per memory symbol.
    pub fn write_csv<W: Write>(&self, questions: &[Question], writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header = vec!["history".to_string()];
        header.extend((0..self.memory_size).map(|m| format!("m{m}")));
        w.write_record(&header)?;
        for (h, row) in self.rows.iter().enumerate() {
            let mut rec = vec![self.layout.label(h, questions)];
            rec.extend(row.iter().map(|&p| fmt_sig(p)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| ObserverError::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, questions: &[Question], window: usize) -> Result<Self> {
        let layout = HistoryLayout::new(questions.len(), window)?;
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("history") || header.len() < 2 {
            return Err(ObserverError::validation("kernel csv must start with a history column"));
        }
        let memory_size = header.len() - 1;
        let mut rows = Vec::with_capacity(layout.size());
        for (h, rec) in r.records().enumerate() {
            let rec = rec?;
            if h >= layout.size() || rec.get(0) != Some(layout.label(h, questions).as_str()) {
                return Err(ObserverError::validation(format!(
                    "kernel csv row {} is not history {}",
                    h + 1,
                    if h < layout.size() {
                        layout.label(h, questions)
                    } else {
                        "<none>".into()
                    }
                )));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| ObserverError::validation(format!("bad probability {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        // fields were rounded to 9 significant digits
        for row in &mut rows {
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-7 {
                return Err(ObserverError::validation(format!("kernel csv row sums to {total}")));
            }
            row.iter_mut().for_each(|p| *p /= total);
        }
        Self::new(layout, memory_size, rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Record the last `k` interactions, with or without the question labels.
    Window {
        k: usize,
        labeled: bool,
    },
    Kernel(KernelStrategy),
    /// Constant memory.
    Nothing,
}

impl Strategy {
    pub fn memory_size(&self, questions: usize) -> usize {
        match self {
            Strategy::Window { k, labeled: true } => (2 * questions).pow(*k as u32),
            Strategy::Window { k, labeled: false } => 1 << k,
            Strategy::Kernel(ks) => ks.memory_size,
            Strategy::Nothing => 1,
        }
    }

    pub fn validate_for(&self, layout: &HistoryLayout) -> Result<()> {
        match self {
            Strategy::Window { k, .. } if *k == 0 || *k > layout.window => Err(ObserverError::validation(format!(
                "strategy.k = {k} must lie in 1..={}",
                layout.window
            ))),
            Strategy::Kernel(ks) if ks.layout != *layout => Err(ObserverError::validation(format!(
                "kernel rows are for {:?}, joint history is {:?}",
                ks.layout, layout
            ))),
            _ => Ok(()),
        }
    }

    /// `p(m | h)` for every history of `layout`.
    pub fn assignment(&self, layout: &HistoryLayout) -> Result<Vec<Vec<f64>>> {
        self.validate_for(layout)?;
        let m = self.memory_size(layout.questions);
        Ok(match self {
            Strategy::Window { k, labeled } => (0..layout.size())
                .map(|h| {
                    let mut r = vec![0.0; m];
                    r[window_view(layout, *k, *labeled, h)] = 1.0;
                    r
                })
                .collect(),
            Strategy::Kernel(ks) => ks.rows.clone(),
            Strategy::Nothing => vec![vec![1.0]; layout.size()],
        })
    }

    fn memory_labels(&self, layout: &HistoryLayout, questions: Option<&[String]>) -> Vec<String> {
        match self {
            Strategy::Window { k, labeled } => {
                let sub = HistoryLayout {
                    questions: layout.questions,
                    window: *k,
                };
                (0..self.memory_size(layout.questions))
                    .map(|m| {
                        if *labeled {
                            sub.pairs(m)
                                .iter()
                                .map(|s| {
                                    let q = questions
                                        .map(|l| l[s.question].clone())
                                        .unwrap_or_else(|| s.question.to_string());
                                    format!("{q}:{}", s.answer.bit())
                                })
                                .collect::<Vec<_>>()
                                .join("/")
                        } else {
                            (0..*k)
                                .rev()
                                .map(|b| ((m >> b) & 1).to_string())
                                .collect::<Vec<_>>()
                                .join("/")
                        }
                    })
                    .collect()
            }
            _ => (0..self.memory_size(layout.questions))
                .map(|m| format!("m{m}"))
                .collect(),
        }
    }
}

/// Joint over `(M, history, Q[t+1], A[t+1])` with `P(m,h,x') = p(m|h) P(h,x')`.
pub fn apply_strategy(strategy: &Strategy, joint: &JointDistribution) -> Result<JointDistribution> {
    let layout = HistoryLayout::of_joint(joint)?;
    let rows = strategy.assignment(&layout)?;
    let m = strategy.memory_size(layout.questions);
    let next = joint.len() / layout.size();
    let labels = strategy.memory_labels(&layout, Some(&joint.vars()[0].labels));
    let mut vars = vec![Variable::new(MEMORY, labels)];
    vars.extend(joint.vars().iter().cloned());
    let mut probs = vec![0.0; m * joint.len()];
    for (i, &p) in joint.probs().iter().enumerate() {
        let h = i / next;
        for (mem, &pm) in rows[h].iter().enumerate() {
            probs[mem * joint.len() + i] = pm * p;
        }
    }
    JointDistribution::with_mass_tolerance(vars, probs, 1e-10)
}

/// Distinct non-zero-probability configurations of the answer part of the
/// last `k` interactions: the number of memory states a `k`-answer record needs.
pub fn answer_record_states(joint: &JointDistribution, k: usize) -> Result<usize> {
    let layout = HistoryLayout::of_joint(joint)?;
    if k == 0 || k > layout.window {
        return Err(ObserverError::validation(format!(
            "k = {k} must lie in 1..={}",
            layout.window
        )));
    }
    let names = history_var_names(layout.window);
    let answers: Vec<&str> = names[2 * (layout.window - k)..]
        .iter()
        .skip(1)
        .step_by(2)
        .map(String::as_str)
        .collect();
    let marginal = joint.marginal(&answers)?;
    Ok(marginal.probs().iter().filter(|&&p| p > 1e-15).count())
}

/// Iterator over history -> memory maps in lexicographic order.
#[derive(Debug, Clone)]
pub struct DeterministicMaps {
    memory_size: usize,
    current: Option<Vec<usize>>,
    reduced: bool,
    count: u128,
}

impl DeterministicMaps {
    /// Number of maps this iterator yields.
    pub fn count_total(&self) -> u128 {
        self.count
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }
}

fn stirling_partition_count(h: usize, m: usize) -> u128 {
    // sum_{j <= m} S(h, j)
    let mut s = vec![vec![0u128; m + 1]; h + 1];
    s[0][0] = 1;
    for n in 1..=h {
        for j in 1..=m.min(n) {
            s[n][j] = s[n - 1][j - 1].saturating_add((j as u128).saturating_mul(s[n - 1][j]));
        }
    }
    s[h].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Every map from `history_size` symbols to `memory_size` symbols, once each.
///
/// With `reduced`, maps equal up to a relabeling of memory symbols are yielded
/// once (restricted growth strings).
pub fn enumerate_deterministic(
    history_size: usize,
    memory_size: usize,
    reduced: bool,
    cap: u128,
) -> Result<DeterministicMaps> {
    if history_size == 0 || memory_size == 0 {
        return Err(ObserverError::validation(
            "history and memory alphabets must be non-empty",
        ));
    }
    let count = if reduced {
        stirling_partition_count(history_size, memory_size)
    } else {
        (memory_size as u128)
            .checked_pow(history_size as u32)
            .unwrap_or(u128::MAX)
    };
    if count > cap {
        return Err(ObserverError::SizeCap {
            what: "deterministic strategy enumeration",
            required: count,
            cap,
            hint: "; use the soft optimizer instead",
        });
    }
    Ok(DeterministicMaps {
        memory_size,
        current: Some(vec![0; history_size]),
        reduced,
        count,
    })
}

impl Iterator for DeterministicMaps {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let m = self.memory_size;
        let mut advanced = false;
        for i in (0..next.len()).rev() {
            let limit = if self.reduced {
                (next[..i].iter().copied().max().map_or(0, |x| x + 1)).min(m - 1)
            } else {
                m - 1
            };
            if next[i] < limit {
                next[i] += 1;
                next[i + 1..].iter_mut().for_each(|x| *x = 0);
                advanced = true;
                break;
            }
        }
        self.current = advanced.then_some(next);
        Some(out)
    }
}

/// Whether two maps induce the same partition of the histories.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = std::collections::HashMap::new();
    let mut back = std::collections::HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Stable one-line description of a strategy.
pub fn strategy_summary(strategy: &Strategy) -> String {
    match strategy {
        Strategy::Nothing => "nothing (M=1)".to_string(),
        Strategy::Window { k, labeled: true } => {
            if *k == 1 {
                "window k=1 labeled (M=2K)".to_string()
            } else {
                format!("window k={k} labeled (M=(2K)^{k})")
            }
        }
        Strategy::Window { k, labeled: false } => format!("window k={k} unlabeled (M={})", 1usize << k),
        Strategy::Kernel(ks) => {
            let hard = ks.hardened();
            let mut s = format!("kernel M={}", ks.memory_size);
            let layout = ks.layout;
            let canonical = std::iter::once((0, false))
                .chain((1..=layout.window).map(|k| (k, false)))
                .chain((1..=layout.window).map(|k| (k, true)));
            for (k, labeled) in canonical {
                let map: Vec<usize> = if k == 0 {
                    vec![0; layout.size()]
                } else {
                    (0..layout.size())
                        .map(|h| window_view(&layout, k, labeled, h))
                        .collect()
                };
                if same_partition(&hard, &map) {
                    if k == 0 {
                        s.push_str(" ≍ nothing");
                    } else {
                        s.push_str(&format!(
                            " ≍ window k={k} {}",
                            if labeled { "labeled" } else { "unlabeled" }
                        ));
                    }
                    break;
                }
            }
            let ties: Vec<String> = ks
                .rows
                .iter()
                .enumerate()
                .filter_map(|(h, row)| {
                    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let tied: Vec<String> = row
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p == max)
                        .map(|(m, _)| format!("m{m}"))
                        .collect();
                    (tied.len() > 1).then(|| format!("h{h}:{{{}}}", tied.join(",")))
                })
                .collect();
            if !ties.is_empty() {
                s.push_str(&format!("; ties {}", ties.join(" ")));
            }
            s
        }
    }
}
