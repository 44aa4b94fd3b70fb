use std::path::Path;
use std::process::{Command, Output};

use gkp_crosstalk::{dv_baseline_fidelity, f_ideal};

fn gkpx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkpx")).args(args).output().expect("spawn gkpx")
}

fn stdout_of(args: &[&str]) -> String {
    let out = gkpx(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn etas_golden() {
    assert_eq!(stdout_of(&["etas"]), "eta_num,eta_den,q,p,n\n1,5,1,1,5\n");
    assert_eq!(
        stdout_of(&["etas", "--q-max", "3", "--p-max", "3"]),
        "eta_num,eta_den,q,p,n\n1,13,1,3,13\n1,9,1,2,9\n1,5,1,1,5\n3,11,3,2,11\n3,7,3,1,7\n"
    );
}

#[test]
fn etas_never_empty() {
    for (d1, d2) in [("1", "1"), ("2", "3"), ("5", "7"), ("6", "6")] {
        let out = stdout_of(&["etas", "--d1", d1, "--d2", d2]);
        assert!(out.lines().count() >= 2, "{d1} {d2}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(gkpx(&["etas", "--d1", "0"]).status.code(), Some(3));
    assert_eq!(gkpx(&["decode-demo", "--eta", "1/3"]).status.code(), Some(3));
    assert_eq!(gkpx(&["decode-demo", "--eta", "0.37"]).status.code(), Some(3));
    assert_eq!(gkpx(&["landscape", "--sigma-grid", "0.5:0.1:0.1"]).status.code(), Some(3));
    assert_eq!(gkpx(&["nonsense"]).status.code(), Some(3));
    assert_eq!(gkpx(&["etas", "--out", "/nonexistent/dir/x.csv"]).status.code(), Some(2));
    assert_eq!(gkpx(&["etas", "--config", "/nonexistent/c.json"]).status.code(), Some(2));
    assert_eq!(gkpx(&["--help"]).status.code(), Some(0));
    let out = gkpx(&["decode-demo", "--eta", "1/3"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("gcd"), "{err}");
}

#[test]
fn decode_demo_report() {
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&["decode-demo"])).unwrap();
    assert_eq!(
        v["params"],
        serde_json::json!({"alpha1": 1, "alpha2": 1, "n": 5, "p": 1, "q": 1, "r1": 4, "r2": 2})
    );
    let trials = v["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 4);
    for t in trials {
        assert_eq!(t["consistent"], true);
        assert_eq!(t["mu1_in"], t["mu1_out"]);
        assert_eq!(t["mu2_in"], t["mu2_out"]);
        // the sampled point lies on the code support: x = 5·mu1 + 4j, y = 5·mu2 + 2j (mod 10)
        let (mu1, mu2, j) = (t["mu1_in"].as_i64().unwrap(), t["mu2_in"].as_i64().unwrap(), t["j"].as_i64().unwrap());
        assert_eq!(t["x"].as_i64().unwrap(), (5 * mu1 + 4 * j) % 10);
        assert_eq!(t["y"].as_i64().unwrap(), (5 * mu2 + 2 * j) % 10);
    }
    let text = stdout_of(&["decode-demo", "--d1", "3", "--d2", "2", "--eta", "1/7"]);
    assert!(!text.lines().any(|l| l.ends_with(' ')));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["trials"].as_array().unwrap().len(), 6);
}

#[test]
fn decode_demo_csv_and_seed_dependence() {
    let csv = stdout_of(&["decode-demo", "--format", "csv"]);
    assert!(csv.starts_with("mu1_in,mu2_in,x,y,j,mu1_out,mu2_out,consistent\n"));
    assert_eq!(csv.lines().count(), 5);
    let a = stdout_of(&["decode-demo", "--seed", "1"]);
    assert_eq!(a, stdout_of(&["decode-demo", "--seed", "1"]));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"d1": 2, "d2": 2, "q_max": 3, "p_max": 3, "format": "json"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&["etas", "--config", c])).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert_eq!(v[0], serde_json::json!({"eta_den": 13, "eta_num": 1, "n": 13, "p": 3, "q": 1}));
    let csv = stdout_of(&["etas", "--config", c, "--p-max", "1", "--format", "csv"]);
    assert_eq!(csv, "eta_num,eta_den,q,p,n\n1,5,1,1,5\n3,7,3,1,7\n");
}

#[test]
fn output_file_and_sidecar_record_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("land.csv");
    let args = ["landscape", "--L", "7.5", "--sigma-grid", "0.3", "--out", out.to_str().unwrap()];
    assert!(gkpx(&args).status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("eta,sigma,bound\n"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(gkp_crosstalk_cli::meta_path(Path::new(&out))).unwrap()).unwrap();
    assert_eq!(meta["command"], "landscape");
    assert_eq!(meta["config"]["L"], 7.5);
    assert_eq!(meta["config"]["seed"], 42);
}

#[test]
fn landscape_bright_band_sits_on_rational_points() {
    let csv = stdout_of(&["landscape", "--q-max", "3", "--p-max", "3", "--sigma-grid", "0.1,0.3,0.5"]);
    let points = [1.0 / 13.0, 1.0 / 9.0, 0.2, 3.0 / 11.0, 3.0 / 7.0];
    let step = 0.005;
    let data = rows(&csv);
    assert_eq!(data.len(), 197 * 3);
    for sigma in [0.1, 0.3, 0.5] {
        let line: Vec<&Vec<f64>> = data.iter().filter(|r| r[1] == sigma).collect();
        assert!(line.iter().all(|r| (0.0..=1.0).contains(&r[2])));
        let best = line.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
        assert!(points.iter().any(|p| (best[0] - p).abs() <= step), "argmax at {}", best[0]);
        // local maxima of the bound only occur next to rational points
        for w in line.windows(3) {
            if w[1][2] > w[0][2] && w[1][2] > w[2][2] {
                assert!(points.iter().any(|p| (w[1][0] - p).abs() <= step), "peak at {}", w[1][0]);
            }
        }
    }
}

#[test]
fn tradeoff_matches_library_and_is_mostly_consistent() {
    let csv = stdout_of(&["tradeoff", "--sigma-grid", "0.25:0.45:0.05", "--d-max", "5", "--shots", "100000"]);
    assert!(csv.starts_with("d,eta,n,sigma,f_ideal,mc_estimate,mc_stderr\n"));
    let data = rows(&csv);
    assert_eq!(data.len(), 4 * 5);
    let mut consistent = 0;
    for r in &data {
        let d = r[0] as u64;
        assert_eq!(r[2], (1 + d * d) as f64);
        assert!((r[1] - 1.0 / (1 + d * d) as f64).abs() < 1e-12);
        assert!((r[4] - f_ideal(r[3], d, d)).abs() < 1e-12);
        if (r[5] - r[4]).abs() <= 3.0 * r[6] {
            consistent += 1;
        }
    }
    assert!(consistent * 100 >= data.len() * 95, "{consistent}/{}", data.len());
}

#[test]
fn dv_baseline_rows() {
    let csv = stdout_of(&["dv-baseline", "--eta-grid", "0:1:0.05"]);
    let data = rows(&csv);
    assert_eq!(data.len(), 21 * 3);
    assert_eq!(&data[0], &vec![0.0, 0.0, 1.0]);
    for r in &data {
        let mirror = data.iter().find(|m| (m[0] - (1.0 - r[0])).abs() < 1e-12 && m[1] == r[1]).unwrap();
        assert!((r[2] - mirror[2]).abs() < 1e-12);
        assert!((r[2] - dv_baseline_fidelity(r[0], r[1]).unwrap()).abs() < 1e-11);
    }
    for p in [0.0, 0.05, 0.1] {
        let min = data.iter().filter(|r| r[1] == p).min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
        assert_eq!(min[0], 0.5);
    }
}

#[test]
fn state_dump() {
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&["state", "--mu1", "1"])).unwrap();
    assert_eq!(v["dims"], serde_json::json!([10, 10]));
    let nonzero = v["amps"].as_array().unwrap().iter().filter(|a| a[0].as_f64().unwrap() != 0.0).count();
    assert_eq!(nonzero, 5);
    let epr: serde_json::Value = serde_json::from_str(&stdout_of(&["state", "--epr"])).unwrap();
    assert_eq!(epr["dims"], serde_json::json!([2, 10, 2, 10]));
}

#[test]
fn thread_count_does_not_change_tradeoff() {
    let args = ["tradeoff", "--sigma-grid", "0.3,0.5", "--d-max", "4", "--shots", "20000"];
    let one = stdout_of(&[&args[..], &["--threads", "1"]].concat());
    let many = stdout_of(&[&args[..], &["--threads", "6"]].concat());
    assert_eq!(one, many);
}
