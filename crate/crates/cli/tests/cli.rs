use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entroprod_cli::parse_series_csv;
use entroprod_core::papermodels::{closed_form_x, PaperModelParams};
use entroprod_core::production::gap_formula;
use entroprod_core::states::spectrum_entropy;
use entroprod_core::EntropyValue;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(name)
}

fn entroprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entroprod"))
        .args(args)
        .output()
        .unwrap()
}

fn run_to(scenario: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = data(config);
    let mut args = vec![
        scenario,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    entroprod(&args)
}

fn stderr_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).trim_end().to_string()
}

#[test]
fn paper_scenario_matches_oracles_and_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("paper.csv");
    let o = run_to("paper", "data/paper.toml", &out, &[]);
    assert!(o.status.success(), "{}", stderr_line(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let s = parse_series_csv(&text).unwrap();
    assert_eq!(s.len(), 200);

    let p = PaperModelParams::new(0.7, 1.0, 1.0, 1.0, 1.0).unwrap();
    for i in 0..s.len() {
        let x = closed_form_x(&p, s.times[i]);
        let e = spectrum_entropy(&[x.a, 1.0 - x.a]) - spectrum_entropy(&x.block_eigenvalues());
        assert!((s.ent[i] - e).abs() < 1e-8, "E at t = {}", s.times[i]);
        if let EntropyValue::Finite(sigma) = s.sigma[i] {
            let gap = gap_formula(&p, s.times[i]).unwrap();
            assert!((sigma - s.sigma_e[i].abs() - gap).abs() < 1e-4);
        }
    }

    let golden =
        parse_series_csv(&std::fs::read_to_string(data("golden/paper.csv")).unwrap()).unwrap();
    assert_eq!(golden.len(), s.len());
    let cols = |s: &entroprod_core::ProductionSeries, i: usize| {
        [
            s.times[i],
            s.entropy[i],
            s.ent[i],
            s.sigma[i].value(),
            s.sigma_e[i],
            s.concurrence[i],
            s.negativity[i],
        ]
    };
    for i in 0..s.len() {
        for (a, b) in cols(&s, i).iter().zip(cols(&golden, i)) {
            assert!(
                a == &b || (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                "row {i}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (scenario, config, name) in [
        ("paper", "data/paper.toml", "a.csv"),
        ("collision", "data/collision.toml", "c.json"),
    ] {
        let first = dir.path().join(name);
        let second = dir.path().join(format!("again-{name}"));
        assert!(run_to(scenario, config, &first, &[]).status.success());
        assert!(run_to(scenario, config, &second, &[]).status.success());
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }
}

#[test]
fn missing_config_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let o = entroprod(&[
        "paper",
        "--config",
        "/nonexistent/run.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_line(&o).lines().count(), 1);
    assert!(!out.exists());
}

#[test]
fn empty_scan_reports_zero_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.json");
    let o = run_to("scan", "data/scan.toml", &out, &[]);
    assert!(o.status.success(), "{}", stderr_line(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["samples_run"], 0);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert_eq!(report["config"]["seed"], 42);
}

#[test]
fn small_scan_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let two = dir.path().join("two.json");
    assert!(
        run_to("scan", "data/scan.toml", &one, &["--set", "scan.samples=4"])
            .status
            .success()
    );
    assert!(run_to(
        "scan",
        "data/scan.toml",
        &two,
        &["--set", "scan.samples=4", "--threads", "2"]
    )
    .status
    .success());
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&two).unwrap());
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("short.csv");
    let o = run_to(
        "paper",
        "data/paper.toml",
        &out,
        &["--set", "grid.points=11", "--set", "paper.gamma=0.5"],
    );
    assert!(o.status.success(), "{}", stderr_line(&o));
    let s = parse_series_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s.len(), 11);
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // scenario block does not match the requested scenario
    assert_eq!(
        run_to("scan", "data/paper.toml", &out, &[]).status.code(),
        Some(1)
    );
    // two scenario blocks
    assert_eq!(
        run_to(
            "paper",
            "data/paper.toml",
            &out,
            &["--set", "ree.state.kind=bell"]
        )
        .status
        .code(),
        Some(1)
    );
    // out-of-range parameter
    assert_eq!(
        run_to(
            "paper",
            "data/paper.toml",
            &out,
            &["--set", "paper.a0sq=1.5"]
        )
        .status
        .code(),
        Some(1)
    );
    // unknown key
    assert_eq!(
        run_to(
            "paper",
            "data/paper.toml",
            &out,
            &["--set", "paper.bogus=1"]
        )
        .status
        .code(),
        Some(1)
    );
    // unknown scenario
    assert_eq!(
        entroprod(&["bogus", "--config", "x"]).status.code(),
        Some(1)
    );
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("occupied");
    std::fs::create_dir(&target).unwrap();
    std::fs::write(target.join("keep"), "x").unwrap();
    let o = run_to("ree", "data/ree.toml", &target, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr_line(&o));
    assert_eq!(stderr_line(&o).lines().count(), 1);
}

#[test]
fn ree_of_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ree.json");
    assert!(run_to("ree", "data/ree.toml", &out, &[]).status.success());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((r["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
    assert_eq!(r["route"], "ClosedForm");
    assert!((r["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn collision_report_has_every_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    assert!(run_to("collision", "data/collision.toml", &out, &[])
        .status
        .success());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let records = r["audit"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 7);
    let last = &records[6];
    let i = last["mutual_info"].as_f64().unwrap();
    assert!((i - 2.0 * last["s_ab"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn simulate_detects_sudden_death() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let o = run_to("simulate", "data/simulate.toml", &out, &[]);
    assert!(o.status.success(), "{}", stderr_line(&o));
    let s = parse_series_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s.len(), 31);
    assert_eq!(*s.concurrence.last().unwrap(), 0.0);
    assert!(s.concurrence[0] > 0.8);
}

#[test]
fn stdout_when_no_output_path() {
    let cfg = data("data/ree.toml");
    let o = entroprod(&["ree", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"schema\": 1"));
}
