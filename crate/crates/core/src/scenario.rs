//! A questioned qubit: question set, schedule, starting state and lookback window.

use crate::bound::{evaluate, InfoReport};
use crate::chain::{
    build_unrolled_chain, initial_distribution, long_run_distribution, sample_trajectory, window_joint, Kernel,
    LongRun, Trajectory, DEFAULT_TABLE_CAP,
};
use crate::error::{ObserverError, Result};
use crate::joint::JointDistribution;
use crate::process::QuestionProcess;
use crate::qubit::{validate_questions, Axis, BlochVector, Question};
use crate::strategy::{apply_strategy, Strategy};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub questions: Vec<Question>,
    pub process: QuestionProcess,
    pub initial: BlochVector,
    pub window: usize,
    pub table_cap: usize,
}

fn labeled(axes: &[Axis]) -> Vec<Question> {
    axes.iter()
        .enumerate()
        .map(|(i, a)| Question::new(format!("Q{}", i + 1), *a).expect("static label"))
        .collect()
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        questions: Vec<Question>,
        process: QuestionProcess,
        initial: BlochVector,
        window: usize,
    ) -> Result<Self> {
        validate_questions(&questions)?;
        process.validate_for(questions.len())?;
        if window == 0 {
            return Err(ObserverError::validation("window must be >= 1"));
        }
        Ok(Scenario {
            name: name.into(),
            questions,
            process,
            initial,
            window,
            table_cap: DEFAULT_TABLE_CAP,
        })
    }

    /// One question along z, asked every time, maximally mixed start.
    pub fn single_question(window: usize) -> Self {
        Scenario::new(
            "case_a",
            labeled(&[Axis::z()]),
            QuestionProcess::uniform(1),
            BlochVector::mixed(),
            window,
        )
        .expect("valid scenario")
    }

    /// Two questions at axis angle `theta`, each asked with probability 1/2.
    pub fn angled_pair(theta: f64, window: usize) -> Self {
        Scenario::new(
            "angled_pair",
            labeled(&[Axis::z(), Axis::polar(theta)]),
            QuestionProcess::uniform(2),
            BlochVector::mixed(),
            window,
        )
        .expect("valid scenario")
    }

    /// Two orthogonal questions, each asked with probability 1/2.
    pub fn orthogonal_pair(window: usize) -> Self {
        let mut s = Self::angled_pair(std::f64::consts::FRAC_PI_2, window);
        s.questions = labeled(&[Axis::z(), Axis::x()]);
        s.name = "case_b".into();
        s
    }

    /// Two orthogonal questions where the last question is always asked again.
    pub fn repeated_pair(window: usize) -> Self {
        let mut s = Self::orthogonal_pair(window);
        s.process = QuestionProcess::repeat_last(vec![0.5, 0.5]).expect("valid");
        s.name = "case_b_bestcase".into();
        s
    }

    pub fn with_window(&self, window: usize) -> Result<Self> {
        let mut s = self.clone();
        if window == 0 {
            return Err(ObserverError::validation("window must be >= 1"));
        }
        s.window = window;
        Ok(s)
    }

    pub fn num_questions(&self) -> usize {
        self.questions.len()
    }

    pub fn kernel(&self) -> Result<Kernel> {
        build_unrolled_chain(&self.questions, &self.process)
    }

    pub fn initial_distribution(&self) -> Result<Vec<f64>> {
        initial_distribution(&self.questions, &self.process, &self.initial)
    }

    pub fn long_run(&self) -> Result<LongRun> {
        long_run_distribution(&self.kernel()?, &self.initial_distribution()?)
    }

    /// Exact long-run joint over the window and the next interaction.
    pub fn window_joint(&self) -> Result<JointDistribution> {
        let kernel = self.kernel()?;
        let lr = long_run_distribution(&kernel, &self.initial_distribution()?)?;
        window_joint(&kernel, &lr, &self.questions, self.window, self.table_cap)
    }

    /// Applies `strategy` to the window joint and evaluates the bound.
    pub fn analyze(&self, strategy: &Strategy, temperature_kelvin: Option<f64>) -> Result<InfoReport> {
        evaluate(&apply_strategy(strategy, &self.window_joint()?)?, temperature_kelvin)
    }

    pub fn sample(&self, length: usize, seed: u64) -> Result<Trajectory> {
        sample_trajectory(&self.questions, &self.process, &self.initial, length, seed)
    }
}
