use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use predictive_observer::config::ScenarioConfig;

const BUNDLED: [&str; 5] = [
    "case_a",
    "case_b_labeled",
    "case_b_unlabeled",
    "case_b_bestcase",
    "angle_sweep",
];

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("scenarios/{name}.json"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("scenarios/fixtures/{name}"))
}

fn observer(config: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_observer"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_reports_bundled_values() {
    let dir = tempfile::tempdir().unwrap();
    let expected = [
        ("case_a", "bound_bits", 0.0, 0.0),
        ("case_b_labeled", "i_pred", 0.5, 1e-9),
        ("case_b_unlabeled", "i_pred", 0.188722, 1e-6),
    ];
    for (name, key, value, tol) in expected {
        let out = dir.path().join(name);
        let o = observer(&scenario(name), &out, &["analyze"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let report = json(&out.join("report.json"));
        assert!((report[key].as_f64().unwrap() - value).abs() <= tol, "{name}: {report}");
        let keys: Vec<&String> = report.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            [
                "bound_bits",
                "bound_joules",
                "i_mem",
                "i_pred",
                "memory_capacity_bits",
                "nostalgia"
            ]
        );
        for csv in ["window_joint.csv", "memory_joint.csv"] {
            let text = fs::read_to_string(out.join(csv)).unwrap();
            assert!(!text.contains('\r'));
            assert!(text.lines().next().unwrap().ends_with(",probability"));
        }
    }
}

#[test]
fn every_bundled_scenario_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for name in BUNDLED {
        let out = dir.path().join(name);
        let o = observer(&scenario(name), &out, &["verify", "--samples", "200000"]);
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(o.status.code(), Some(0), "{name}: {stdout}");
        for line in stdout.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            for key in ["check", "scenario", "deviation", "tolerance", "pass"] {
                assert!(v.get(key).is_some(), "{line}");
            }
        }
        assert_eq!(fs::read_to_string(out.join("verify.jsonl")).unwrap(), stdout);
    }
}

#[test]
fn corrupted_reference_joint_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let bad = fixture("case_b_corrupted_joint.csv");
    let o = observer(
        &scenario("case_b_labeled"),
        dir.path(),
        &[
            "verify",
            "--samples",
            "10000",
            "--reference-joint",
            bad.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let line = stdout.lines().find(|l| l.contains("reference_joint")).unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["pass"], false);
    assert!((v["deviation"].as_f64().unwrap() - 0.0625).abs() < 1e-12);

    let good = fixture("case_b_window_joint.csv");
    let o = observer(
        &scenario("case_b_labeled"),
        dir.path(),
        &[
            "verify",
            "--samples",
            "10000",
            "--reference-joint",
            good.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        for args in [
            &["analyze"][..],
            &["optimize", "--seed", "5"],
            &["sample", "--length", "500", "--seed", "9"],
        ] {
            let o = observer(&scenario("case_b_labeled"), out, args);
            assert_eq!(
                o.status.code(),
                Some(0),
                "{args:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 14);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn sample_case_a_has_a_constant_answer() {
    let dir = tempfile::tempdir().unwrap();
    let o = observer(
        &scenario("case_a"),
        dir.path(),
        &["sample", "--length", "5", "--seed", "7"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,question,answer"));
    let answers: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(answers.len(), 5);
    assert!(answers.iter().all(|a| *a == answers[0]));
}

#[test]
fn case_b_repeat_rate() {
    let dir = tempfile::tempdir().unwrap();
    let o = observer(
        &scenario("case_b_labeled"),
        dir.path(),
        &["sample", "--length", "1000000", "--seed", "1"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let answers: Vec<char> = text.lines().skip(1).map(|l| l.chars().last().unwrap()).collect();
    let same = answers.windows(2).filter(|w| w[0] == w[1]).count();
    let rate = same as f64 / (answers.len() - 1) as f64;
    assert!((rate - 0.75).abs() < 0.002, "{rate}");
}

#[test]
fn optimize_writes_frontier_and_degeneracy() {
    let dir = tempfile::tempdir().unwrap();
    let o = observer(&scenario("case_a"), dir.path(), &["optimize"]);
    assert_eq!(o.status.code(), Some(0));
    let frontier = fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
    let mut lines = frontier.lines();
    assert_eq!(
        lines.next(),
        Some("beta,i_mem_bits,i_pred_bits,nostalgia_bits,objective,converged,iterations")
    );
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[2], "1");
    let degeneracy = json(&dir.path().join("degeneracy.json"));
    assert!(degeneracy["observer_like"].as_u64().unwrap() >= 1);
    assert!(degeneracy["non_observer_like"].as_u64().unwrap() >= 1);
    assert!(dir.path().join("strategy_beta_0.csv").exists());
}

#[test]
fn non_convergence_exits_2_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut config: serde_json::Value = json(&scenario("angle_sweep"));
    config["optimizer"]["max_iterations"] = 1.into();
    config["optimizer"]["tolerance"] = 1e-300.into();
    let path = dir.path().join("tight.json");
    fs::write(&path, config.to_string()).unwrap();
    let o = observer(&path, &dir.path().join("out"), &["optimize"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("out/frontier.csv").exists());
    assert!(fs::read_to_string(dir.path().join("out/frontier.csv"))
        .unwrap()
        .contains("false"));
}

#[test]
fn invalid_configs_exit_1_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#""window": 2"#, r#""window": 2, "colour": "blue""#, "colour"),
        (r#"[1, 0, 0]"#, r#"[1, 1, 0]"#, "questions[1].axis"),
        (
            r#""weights": [0.5, 0.5]"#,
            r#""weights": [0.5, 0.7]"#,
            "process.weights",
        ),
        (
            r#""memory_size": 4"#,
            r#""memory_size": 4, "beta_min": 0.5"#,
            "optimizer",
        ),
    ];
    let base = fs::read_to_string(scenario("case_b_labeled")).unwrap();
    for (from, to, field) in cases {
        assert!(base.contains(from));
        let path = dir.path().join("bad.json");
        fs::write(&path, base.replace(from, to)).unwrap();
        let o = observer(&path, dir.path(), &["analyze"]);
        assert_eq!(o.status.code(), Some(1));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(field), "{field}: {err}");
    }
}

#[test]
fn bundled_configs_round_trip() {
    for name in BUNDLED {
        let c = ScenarioConfig::load(&scenario(name)).unwrap();
        let once = c.to_json().unwrap();
        let again = ScenarioConfig::from_json(&once).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_json().unwrap(), once);
    }
}
