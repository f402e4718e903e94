use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use foldlab_cli::{ExperimentConfig, Summary};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_foldlab"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, config: &Path, out: &Path) -> (i32, String, String) {
    let o = bin()
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--jobs", "2"])
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn summary(out: &Path, cmd: &str) -> Summary {
    let text = fs::read_to_string(out.join(format!("{cmd}_summary.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn shipped_configs_round_trip() {
    let mut n = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap();
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        assert_eq!(cfg.to_json(), again.to_json());
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn defaults_fill_in() {
    let cfg = ExperimentConfig::from_json(r#"{"model": {"kind": "friction"}}"#).unwrap();
    let p = cfg.model.friction_params().unwrap();
    assert_eq!((p.mu_s, p.mu_m, p.rho, p.c_fric), (1.0, 0.5, 4.0, 0.85));
    assert_eq!(cfg.regfn.name(), "smooth_sqrt");
    assert_eq!(cfg.sections().delta, 0.04);
    assert_eq!(cfg.tolerances.integ, 1e-12);
}

#[test]
fn rejects_bad_configs() {
    let bad = [
        r#"{"model": {"kind": "normal_form"}, "bogus": 1}"#,
        r#"{"model": {"kind": "friction", "mu": 1.0}}"#,
        r#"{"model": {"kind": "pendulum"}}"#,
        r#"{"model": {"kind": "normal_form"}, "tolerances": {"integ": 1e-3}}"#,
        r#"{"model": {"kind": "normal_form"}, "tolerances": {"integ": 1e-16}}"#,
        r#"{"model": {"kind": "normal_form"}, "eps_list": [-1e-3]}"#,
        r#"{"model": {"kind": "normal_form"}, "eps_list": [0.9]}"#,
        r#"{"model": {"kind": "friction", "mu_s": 0.4}}"#,
        r#"{"model": {"kind": "normal_form"}, "regfn": "tanh"}"#,
        r#"{"model": {"kind": "normal_form"}, "alpha_window": [0.3, 0.1]}"#,
        r#"{"model": {"kind": "normal_form"}, "chini": {"k_list": [4]}}"#,
        r#"{"model": {"kind": "normal_form"}, "regions": {"chi": 2.5, "extra": 0}}"#,
        r#"{"model": {"kind": "normal_form"}, "sections": {"delta": 0.6, "xi": 0.5, "i_l": [-0.3, -0.1], "i_r": [0.1, 0.3]}}"#,
        r#"{"eps_list": [1e-3]}"#,
    ];
    for text in bad {
        assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
    }
}

#[test]
fn unknown_key_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "normal_form"}, "bogus": 1}"#,
    );
    let (code, _, err) = run("charts", &cfg, &dir.path().join("out"));
    assert_eq!(code, 1);
    assert!(err.contains("bogus"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run("charts", &dir.path().join("nope.json"), dir.path());
    assert_eq!(code, 1);
}

#[test]
fn friction_only_command_on_normal_form_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "normal_form"}, "eps_list": [1e-3]}"#,
    );
    let (code, _, err) = run("branch", &cfg, &dir.path().join("out"));
    assert_eq!(code, 1, "{err}");
}

#[test]
fn numeric_failure_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "friction"}, "eps_list": [1e-3], "fold_search": {"alpha_seed": 1.5}}"#,
    );
    let (code, _, err) = run("branch", &cfg, &dir.path().join("out"));
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("no return"), "{err}");
}

#[test]
fn failed_invariant_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // a zero round-trip tolerance cannot be met
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"kind": "normal_form"}, "charts": {"n": 50, "tol": 0.0}}"#,
    );
    let out = dir.path().join("out");
    let (code, stdout, _) = run("charts", &cfg, &out);
    assert_eq!(code, 3, "{stdout}");
    let s = summary(&out, "charts");
    assert!(!s.pass);
    assert!(s.checks.iter().any(|c| c.name == "round_trips" && !c.pass));
}

#[test]
fn simulate_normal_form_parabola() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) = run(
        "simulate",
        &configs_dir().join("simulate_normal_form.json"),
        &out,
    );
    assert_eq!(code, 0, "{stdout}{err}");
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    let mut n = 0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        // Z+ = (1, 2x) from (-0.2, 0.04): x = t - 0.2, y = x^2
        assert!((v[1] - (v[0] - 0.2)).abs() < 1e-10, "{l}");
        assert!((v[2] - v[1] * v[1]).abs() < 1e-8, "{l}");
        n += 1;
    }
    assert_eq!(n, 201);
    let s = summary(&out, "simulate");
    assert!(s.pass && s.checks.iter().any(|c| c.name == "parabola" && c.pass));
    assert!(out.join("simulate_timings.log").exists());
}

#[test]
fn simulate_friction_settles_near_sliding() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, _, err) = run(
        "simulate",
        &configs_dir().join("simulate_friction.json"),
        &out,
    );
    assert_eq!(code, 0, "{err}");
    let s = summary(&out, "simulate");
    let eps = s.results["eps"].as_f64().unwrap();
    let tail = s.results["tail_y_min"].as_f64().unwrap();
    assert!(tail >= 0.0 && tail <= 10.0 * eps, "tail y_min {tail}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [
        ("charts", "charts.json"),
        ("simulate", "simulate_friction.json"),
        ("qmap", "qmap.json"),
    ] {
        let a = dir.path().join(format!("{cmd}_a"));
        let b = dir.path().join(format!("{cmd}_b"));
        let cfg = configs_dir().join(cfg);
        assert_eq!(run(cmd, &cfg, &a).0, 0);
        assert_eq!(run(cmd, &cfg, &b).0, 0);
        let s = summary(&a, cmd);
        let mut files = s.files.clone();
        files.push(format!("{cmd}_summary.json"));
        for f in files {
            let x = fs::read(a.join(&f)).unwrap();
            let y = fs::read(b.join(&f)).unwrap();
            assert!(x == y, "{cmd}: {f} differs between runs");
        }
    }
}

#[test]
fn jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("qmap.json");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = bin()
        .args(["qmap", "--jobs", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&a)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin()
        .args(["qmap", "--jobs", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read(a.join("qmap.csv")).unwrap(),
        fs::read(b.join("qmap.csv")).unwrap()
    );
}

#[test]
fn chini_and_charts_pass() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [("chini", "chini.json"), ("charts", "charts.json")] {
        let out = dir.path().join(cmd);
        let (code, stdout, err) = run(cmd, &configs_dir().join(cfg), &out);
        assert_eq!(code, 0, "{stdout}{err}");
        assert!(summary(&out, cmd).pass);
    }
    let csv = fs::read_to_string(dir.path().join("chini/chini.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 * 200);
}

#[test]
fn regions_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, stdout, err) = run("regions", &configs_dir().join("regions.json"), &out);
    assert_eq!(code, 0, "{stdout}{err}");
    let s = summary(&out, "regions");
    assert!(s
        .checks
        .iter()
        .any(|c| c.name == "left_contraction" && c.pass));
    assert!(s
        .checks
        .iter()
        .any(|c| c.name == "right_unit_slope" && c.pass));
}
