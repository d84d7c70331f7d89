use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn ecp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecp")).args(args).current_dir(dir).output().expect("run ecp")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn curve_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecp(&["curve", "--order", "1", "--beta", "10", "--r0", "0.5:5:10", "--out", "w1.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("w1.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r0,omega_T,omega_L,W,opt_mode");
    assert_eq!(lines.len(), 11);
    let r0: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(r0.first(), Some(&0.5));
    assert_eq!(r0.last(), Some(&5.0));
    assert!(r0.windows(2).all(|w| w[0] < w[1]));

    let manifest = read_json(&dir.path().join("w1.csv.manifest.json"));
    assert_eq!(manifest["command"], "curve");
    assert_eq!(manifest["engine_version"], ecp_core::VERSION);
    assert_eq!(manifest["config"]["order"], 1);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let points = manifest["points"].as_array().unwrap();
    assert_eq!(points.len(), 10);
    for (p, r) in points.iter().zip(&r0) {
        assert_eq!(p["status"], "ok");
        assert_eq!(p["r0"].as_f64().unwrap(), *r);
    }
}

#[test]
fn high_temperature_curve_is_classical() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecp(&["curve", "--order", "1", "--beta", "0.01", "--r0", "0.5:5:10", "--out", "hot.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("hot.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let (r0, w): (f64, f64) = (cells[0].parse().unwrap(), cells[3].parse().unwrap());
        assert!((w * r0 + 1.0).abs() < 5e-3, "{line}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = ecp(
            &["curve", "--order", "2", "--beta", "10", "--r0", "0.5:1.5:3", "--format", "json", "--out", name],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let doc: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), 3);
    assert_eq!(doc["order"], 2);
}

#[test]
fn zero_temperature_is_proxied_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = ecp(&["curve", "--order", "1", "--beta", "zero", "--r0", "0:1:2", "--out", "z.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let manifest = read_json(&dir.path().join("z.csv.manifest.json"));
    assert_eq!(manifest["config"]["beta"], "zero");
    assert_eq!(manifest["config"]["beta_effective"], 1000.0);
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "order = 1\nbeta = 10\nr0 = 0:1:2\nout = from_file.csv\nprecision = 4\n",
    )
    .unwrap();
    let out = ecp(&["curve", "--config", "run.cfg", "--out", "from_flag.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("from_file.csv").exists());
    let csv = std::fs::read_to_string(dir.path().join("from_flag.csv")).unwrap();
    let w = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap();
    assert_eq!(w, "-1.053");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["curve", "--order", "1", "--beta", "10", "--r0", "0:5:0", "--out", "x.csv"],
        &["curve", "--order", "3", "--beta", "10", "--r0", "0:5:2", "--out", "x.csv"],
        &["curve", "--order", "1", "--beta", "-1", "--r0", "0:5:2", "--out", "x.csv"],
        &["curve", "--order", "1", "--beta", "10", "--r0", "0:5:2"],
        &["curve", "--config", "missing.cfg"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(ecp(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn ground_state_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ecp(&["ground-state", "--out", "gs.json"], dir.path()).status.code(), Some(0));
    let doc = read_json(&dir.path().join("gs.json"));
    assert_eq!(doc["gamma_exact"], 0.5);
    let states = doc["states"].as_array().unwrap();
    assert_eq!(states.len(), 3);
    let gamma = |i: usize| states[i]["gamma"].as_f64().unwrap();
    assert!((gamma(0) - 4.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-9);
    assert!((gamma(2) - 0.490).abs() < 1e-3);
    for (i, s) in states.iter().enumerate() {
        assert_eq!(s["N"], i + 1);
        assert_eq!(s["energy"].as_f64().unwrap(), -gamma(i));
    }
    assert!(dir.path().join("gs.json.manifest.json").exists());
}

#[test]
fn constants_table() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ecp(&["constants", "--out", "c.json", "--precision", "12"], dir.path()).status.code(), Some(0));
    let doc = read_json(&dir.path().join("c.json"));
    let c = doc["c"].as_f64().unwrap();
    assert!((c - 0.0318).abs() < 5e-4);
    assert!((doc["c_prime"].as_f64().unwrap() - 0.7254).abs() < 1e-3);
    assert!((doc["rs_second_order"].as_f64().unwrap() + 0.1557819).abs() < 1e-4);
    assert_eq!(doc["resum_5_16"], 0.3125);
    assert_eq!(doc["resum_21_32"], 0.65625);
    assert_eq!(doc["truncation"]["c"]["max_terms"], 2000);
    assert_eq!(read_json(&dir.path().join("c.json.manifest.json"))["config"]["precision"], 12);
}

#[test]
fn selfcheck_passes_and_fails_on_tiny_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let checks = ecp_core::selfcheck::registry().len();

    let ok = ecp(&["selfcheck"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let report = String::from_utf8(ok.stdout).unwrap();
    assert!(report.lines().filter(|l| l.starts_with("PASS")).count() == checks);

    let bad = ecp(&["selfcheck", "--tolerance", "1e-20"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let report = String::from_utf8(bad.stdout).unwrap();
    assert!(report.lines().count() > checks);
    assert!(report.lines().any(|l| l.starts_with("FAIL") && l.contains("residual")));
}
