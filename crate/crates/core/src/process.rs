//! Exogenous question schedules over a finite, labeled question set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ObserverError, Result};

pub(crate) const PROB_TOLERANCE: f64 = 1e-12;

/// How the next question is chosen. Indices refer to the scenario's question list.
#[derive(Debug, Clone, PartialEq)]
pub enum QuestionProcess {
    Iid {
        weights: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
    Periodic {
        sequence: Vec<usize>,
    },
}

pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(ObserverError::validation(format!(
            "{what}: entries must be finite and >= 0"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(ObserverError::validation(format!(
            "{what}: sums to {total}, expected 1"
        )));
    }
    Ok(())
}

impl QuestionProcess {
    pub fn iid(weights: Vec<f64>) -> Result<Self> {
        check_distribution(&weights, "process.weights")?;
        Ok(QuestionProcess::Iid { weights })
    }

    pub fn uniform(k: usize) -> Self {
        QuestionProcess::Iid {
            weights: vec![1.0 / k as f64; k],
        }
    }

    pub fn markov(transition: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        check_distribution(&initial, "process.initial")?;
        if transition.len() != initial.len() {
            return Err(ObserverError::validation(
                "process.transition: must be square over the question set",
            ));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != initial.len() {
                return Err(ObserverError::validation(
                    "process.transition: must be square over the question set",
                ));
            }
            check_distribution(row, &format!("process.transition[{i}]"))?;
        }
        Ok(QuestionProcess::Markov { transition, initial })
    }

    /// The schedule that re-asks whatever was asked last.
    pub fn repeat_last(initial: Vec<f64>) -> Result<Self> {
        let k = initial.len();
        let transition = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::markov(transition, initial)
    }

    pub fn periodic(sequence: Vec<usize>) -> Result<Self> {
        if sequence.is_empty() {
            return Err(ObserverError::validation("process.sequence: must be non-empty"));
        }
        Ok(QuestionProcess::Periodic { sequence })
    }

    /// Number of questions the process ranges over, when it says.
    fn declared_size(&self) -> Option<usize> {
        match self {
            QuestionProcess::Iid { weights } => Some(weights.len()),
            QuestionProcess::Markov { initial, .. } => Some(initial.len()),
            QuestionProcess::Periodic { .. } => None,
        }
    }

    /// Ensures the process is defined over exactly `k` questions.
    pub fn validate_for(&self, k: usize) -> Result<()> {
        if let Some(n) = self.declared_size() {
            if n != k {
                return Err(ObserverError::validation(format!(
                    "process: defined over {n} questions, scenario has {k}"
                )));
            }
        }
        if let QuestionProcess::Periodic { sequence } = self {
            if let Some(&bad) = sequence.iter().find(|&&q| q >= k) {
                return Err(ObserverError::validation(format!(
                    "process.sequence: question index {bad} out of range"
                )));
            }
        }
        Ok(())
    }

    pub fn is_iid(&self) -> bool {
        matches!(self, QuestionProcess::Iid { .. })
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, QuestionProcess::Periodic { .. })
    }

    /// Law of the question asked at `time_index` (0-based), given the previous one.
    pub fn next_question_distribution(&self, k: usize, previous: Option<usize>, time_index: usize) -> Result<Vec<f64>> {
        self.validate_for(k)?;
        if let Some(p) = previous {
            if p >= k {
                return Err(ObserverError::validation(format!("unknown question index {p}")));
            }
        }
        Ok(match self {
            QuestionProcess::Iid { weights } => weights.clone(),
            QuestionProcess::Markov { transition, initial } => match previous {
                Some(p) => transition[p].clone(),
                None if time_index == 0 => initial.clone(),
                None => {
                    return Err(ObserverError::validation(
                        "markov process needs the previous question after step 0",
                    ))
                }
            },
            QuestionProcess::Periodic { sequence } => {
                let mut v = vec![0.0; k];
                v[sequence[time_index % sequence.len()]] = 1.0;
                v
            }
        })
    }

    /// Law of the very first question.
    pub fn first_distribution(&self, k: usize) -> Result<Vec<f64>> {
        self.next_question_distribution(k, None, 0)
    }

    /// Draws `length` question indices with a seeded ChaCha stream.
    pub fn sample_questions(&self, k: usize, length: usize, seed: u64) -> Result<Vec<usize>> {
        if length == 0 {
            return Err(ObserverError::validation("length must be >= 1"));
        }
        self.validate_for(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(length);
        let mut prev = None;
        for t in 0..length {
            let q = self.draw(k, prev, t, &mut rng);
            out.push(q);
            prev = Some(q);
        }
        Ok(out)
    }

    /// One draw without re-validating; callers hold a validated process.
    pub(crate) fn draw<R: Rng>(&self, k: usize, prev: Option<usize>, t: usize, rng: &mut R) -> usize {
        match self {
            QuestionProcess::Iid { weights } => pick(weights, rng),
            QuestionProcess::Markov { transition, initial } => match prev {
                Some(p) => pick(&transition[p], rng),
                None => pick(initial, rng),
            },
            QuestionProcess::Periodic { sequence } => {
                debug_assert!(sequence.iter().all(|&q| q < k));
                sequence[t % sequence.len()]
            }
        }
    }
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn pick<R: Rng>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in p.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_distribution_examples() {
        let iid = QuestionProcess::uniform(2);
        assert_eq!(iid.next_question_distribution(2, Some(1), 17).unwrap(), vec![0.5, 0.5]);
        let per = QuestionProcess::periodic(vec![0]).unwrap();
        assert_eq!(per.next_question_distribution(1, None, 5).unwrap(), vec![1.0]);
        let rep = QuestionProcess::repeat_last(vec![0.5, 0.5]).unwrap();
        assert_eq!(rep.next_question_distribution(2, Some(1), 3).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn validation_errors() {
        assert!(QuestionProcess::iid(vec![0.5, 0.4]).is_err());
        assert!(QuestionProcess::iid(vec![1.5, -0.5]).is_err());
        assert!(QuestionProcess::periodic(vec![]).is_err());
        assert!(QuestionProcess::markov(vec![vec![1.0, 0.0], vec![0.3, 0.6]], vec![0.5, 0.5]).is_err());
        let iid = QuestionProcess::uniform(2);
        assert!(iid.next_question_distribution(2, Some(2), 0).is_err());
        assert!(iid.next_question_distribution(3, None, 0).is_err());
        let rep = QuestionProcess::repeat_last(vec![0.5, 0.5]).unwrap();
        assert!(rep.next_question_distribution(2, None, 1).is_err());
        assert!(QuestionProcess::periodic(vec![0, 2]).unwrap().validate_for(2).is_err());
    }

    #[test]
    fn sampling_examples() {
        let per = QuestionProcess::periodic(vec![0, 1]).unwrap();
        assert_eq!(per.sample_questions(2, 4, 99).unwrap(), vec![0, 1, 0, 1]);
        let degenerate = QuestionProcess::iid(vec![1.0, 0.0]).unwrap();
        assert_eq!(degenerate.sample_questions(2, 3, 1).unwrap(), vec![0, 0, 0]);
        assert!(degenerate.sample_questions(2, 0, 1).is_err());
    }

    #[test]
    fn law_of_large_numbers() {
        let s = QuestionProcess::uniform(2).sample_questions(2, 100_000, 5).unwrap();
        let f = s.iter().filter(|&&q| q == 0).count() as f64 / s.len() as f64;
        assert!((f - 0.5).abs() < 0.01, "frequency {f}");
    }

    #[test]
    fn seeds_reproduce_and_decorrelate() {
        let p = QuestionProcess::uniform(2);
        let a = p.sample_questions(2, 100_000, 1).unwrap();
        assert_eq!(a, p.sample_questions(2, 100_000, 1).unwrap());
        let b = p.sample_questions(2, 100_000, 2).unwrap();
        let n = a.len() as f64;
        let x: Vec<f64> = a.iter().map(|&q| q as f64 - 0.5).collect();
        let y: Vec<f64> = b.iter().map(|&q| q as f64 - 0.5).collect();
        let cov: f64 = x.iter().zip(&y).map(|(u, v)| u * v).sum::<f64>() / n;
        let corr = cov / 0.25;
        assert!(corr.abs() < 0.05, "cross-correlation {corr}");
    }

    #[test]
    fn iid_and_markov_ignore_time_index() {
        let iid = QuestionProcess::iid(vec![0.2, 0.8]).unwrap();
        let mk = QuestionProcess::markov(vec![vec![0.9, 0.1], vec![0.3, 0.7]], vec![0.5, 0.5]).unwrap();
        for t in 1..6 {
            assert_eq!(iid.next_question_distribution(2, Some(0), t).unwrap(), vec![0.2, 0.8]);
            assert_eq!(mk.next_question_distribution(2, Some(1), t).unwrap(), vec![0.3, 0.7]);
        }
    }
}
