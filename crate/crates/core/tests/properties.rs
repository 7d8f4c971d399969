use std::path::Path;

use predictive_observer::bound::{evaluate, markov_violation};
use predictive_observer::optimizer::{optimize_soft, sweep_beta, DESCENT_SLACK};
use predictive_observer::oracle::monte_carlo_check;
use predictive_observer::strategy::{apply_strategy, HistoryLayout};
use predictive_observer::workflow::Prepared;
use predictive_observer::{
    Axis, BlochVector, HistoryView, KernelStrategy, OptimizerSettings, PredictiveJoint, Question, QuestionProcess,
    Scenario, Strategy,
};
use proptest::prelude::*;

const BUNDLED: [&str; 5] = [
    "case_a",
    "case_b_labeled",
    "case_b_unlabeled",
    "case_b_bestcase",
    "angle_sweep",
];

fn bundled(name: &str) -> Prepared {
    Prepared::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("scenarios/{name}.json"))).unwrap()
}

fn scenario_from(theta: f64, phi: f64, weight: f64, w: usize) -> Scenario {
    let axis = Axis::new([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]).unwrap();
    let questions = vec![
        Question::new("Q1", Axis::z()).unwrap(),
        Question::new("Q2", axis).unwrap(),
    ];
    Scenario::new(
        "random",
        questions,
        QuestionProcess::iid(vec![weight, 1.0 - weight]).unwrap(),
        BlochVector::mixed(),
        w,
    )
    .unwrap()
}

fn kernel_rows(raw: &[f64], histories: usize, m: usize) -> Vec<Vec<f64>> {
    (0..histories)
        .map(|h| {
            let row = &raw[h * m..(h + 1) * m];
            let total: f64 = row.iter().sum();
            row.iter().map(|x| x / total).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memory_reads_only_the_past(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        weight in 0.05f64..0.95,
        m in 1usize..=4,
        raw in prop::collection::vec(0.01f64..1.0, 16 * 4),
    ) {
        let s = scenario_from(theta, phi, weight, 2);
        let layout = HistoryLayout::new(2, 2).unwrap();
        let rows = kernel_rows(&raw, layout.size(), m);
        let strategy = Strategy::Kernel(KernelStrategy::new(layout, m, rows).unwrap());
        let joint = apply_strategy(&strategy, &s.window_joint().unwrap()).unwrap();
        prop_assert!(markov_violation(&joint).unwrap().bits() <= 1e-10);
        let r = evaluate(&joint, Some(1.0)).unwrap();
        prop_assert!(r.i_pred.bits() <= r.i_mem.bits() + 1e-10);
        prop_assert!(r.nostalgia.bits() >= 0.0);
        prop_assert_eq!(r.bound_bits, r.nostalgia);
        prop_assert!(r.i_mem.bits() <= (m as f64).log2() + 1e-10);
    }

    #[test]
    fn window_reading_ignores_older_history(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        weight in 0.05f64..0.95,
        labeled in any::<bool>(),
    ) {
        let short = scenario_from(theta, phi, weight, 1);
        let long = short.with_window(3).unwrap();
        let strategy = Strategy::Window { k: 1, labeled };
        let a = short.analyze(&strategy, None).unwrap();
        let b = long.analyze(&strategy, None).unwrap();
        prop_assert!((a.i_mem.bits() - b.i_mem.bits()).abs() < 1e-10);
        prop_assert!((a.i_pred.bits() - b.i_pred.bits()).abs() < 1e-10);
    }

    #[test]
    fn soft_updates_descend(
        theta in 0.1f64..std::f64::consts::PI,
        weight in 0.1f64..0.9,
        beta in 1.0f64..20.0,
        m in 2usize..=4,
        seed in 0u64..1000,
    ) {
        let s = scenario_from(theta, 0.0, weight, 1);
        let pj = PredictiveJoint::from_window(&s.window_joint().unwrap(), HistoryView::Full).unwrap();
        let settings = OptimizerSettings { seed, restarts: 2, ..OptimizerSettings::new(m) };
        let p = optimize_soft(&pj, beta, &settings).unwrap();
        prop_assert!(p.max_objective_increase <= DESCENT_SLACK, "{}", p.max_objective_increase);
        prop_assert!(p.converged);
    }

    #[test]
    fn single_memory_state_knows_nothing(beta in 1.0f64..50.0, theta in 0.0f64..3.1) {
        let s = scenario_from(theta, 0.0, 0.5, 1);
        let pj = PredictiveJoint::from_window(&s.window_joint().unwrap(), HistoryView::Full).unwrap();
        let p = optimize_soft(&pj, beta, &OptimizerSettings::new(1)).unwrap();
        prop_assert_eq!(p.i_mem, 0.0);
        prop_assert_eq!(p.i_pred, 0.0);
    }
}

#[test]
fn beta_one_is_degenerate_on_every_bundled_scenario() {
    for name in BUNDLED {
        let p = bundled(name);
        let opt = p.config.optimizer.clone().unwrap();
        let pj = PredictiveJoint::from_window(&p.scenario.window_joint().unwrap(), opt.history).unwrap();
        let point = optimize_soft(&pj, 1.0, &opt.settings().unwrap()).unwrap();
        assert!(point.objective.abs() <= 1e-9, "{name}: {}", point.objective);
    }
}

#[test]
fn frontier_is_monotone_and_hardens_consistently() {
    for name in BUNDLED {
        let p = bundled(name);
        let opt = p.config.optimizer.clone().unwrap();
        let window = p.scenario.window_joint().unwrap();
        let pj = PredictiveJoint::from_window(&window, opt.history).unwrap();
        let points = sweep_beta(&pj, &opt.settings().unwrap()).unwrap();
        for pair in points.windows(2) {
            assert!(pair[1].beta > pair[0].beta);
            assert!(
                pair[1].i_pred >= pair[0].i_pred - 1e-6,
                "{name}: {} then {}",
                pair[0].i_pred,
                pair[1].i_pred
            );
        }
        for point in &points {
            assert!(point.max_objective_increase <= DESCENT_SLACK);
            let near_hard = point
                .assignment
                .iter()
                .zip(pj_support_mask(&pj))
                .all(|(row, live)| !live || row.iter().any(|&q| q >= 1.0 - 1e-8));
            if near_hard {
                let map = point.hardened_map();
                let (_, i_pred) = pj.information_of_map(&map, point.strategy.memory_size());
                assert!((i_pred - point.i_pred).abs() < 1e-6, "{name} beta={}", point.beta);
                let lifted = Strategy::Kernel(pj.lift_map(&map, point.strategy.memory_size()).unwrap());
                let exact = evaluate(&apply_strategy(&lifted, &window).unwrap(), None).unwrap();
                assert!((exact.i_pred.bits() - point.i_pred).abs() < 1e-6);
            }
        }
    }
}

fn pj_support_mask(pj: &PredictiveJoint) -> Vec<bool> {
    let support = pj.support();
    (0..pj.history_size()).map(|h| support.contains(&h)).collect()
}

#[test]
fn case_a_longer_records_add_no_prediction() {
    let s = Scenario::single_question(5);
    let mut last = -1.0;
    for k in 1..=5 {
        let r = s.analyze(&Strategy::Window { k, labeled: true }, None).unwrap();
        assert!((r.i_pred.bits() - 1.0).abs() < 1e-9);
        assert!((r.nostalgia.bits() - (r.i_mem.bits() - 1.0)).abs() < 1e-12);
        assert!(r.nostalgia.bits() >= last - 1e-12);
        last = r.nostalgia.bits();
    }
}

#[test]
fn nothing_is_free_everywhere() {
    for name in BUNDLED {
        let p = bundled(name);
        let r = p.scenario.analyze(&Strategy::Nothing, Some(300.0)).unwrap();
        assert_eq!(r.i_mem.bits(), 0.0);
        assert_eq!(r.i_pred.bits(), 0.0);
        assert_eq!(r.bound_joules, Some(0.0));
    }
}

#[test]
fn monte_carlo_error_shrinks_with_samples() {
    let s = Scenario::orthogonal_pair(2);
    let strategy = Strategy::Window { k: 2, labeled: true };
    let small = monte_carlo_check(&s, &strategy, 50_000, 3).unwrap();
    let large = monte_carlo_check(&s, &strategy, 200_000, 3).unwrap();
    let ratio = small.standard_errors.i_pred / large.standard_errors.i_pred;
    assert!((1.5..2.7).contains(&ratio), "ratio {ratio}");
    let exact = 0.5;
    assert!((large.estimate.i_pred.bits() - exact).abs() <= 4.0 * large.standard_errors.i_pred);
}

#[test]
fn monte_carlo_case_a_nostalgia_is_zero() {
    let s = Scenario::single_question(1);
    let r = monte_carlo_check(&s, &Strategy::Window { k: 1, labeled: true }, 100_000, 11).unwrap();
    assert!(r.estimate.nostalgia.bits() <= 3.0 * r.standard_errors.nostalgia + 1e-12);
}
