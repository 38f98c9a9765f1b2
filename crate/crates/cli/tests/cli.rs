use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn weakmeter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakmeter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to_file(cmd: &str, scenario: &Path, extra: &[&str]) -> (Output, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut args = vec![
        cmd,
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let output = weakmeter(&args);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (output, text)
}

fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .unwrap()
        .iter()
        .map(String::from)
        .collect::<Vec<_>>();
    let rows = rdr
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .map(|c| match c {
                    "true" => 1.0,
                    "false" => 0.0,
                    "" => f64::NAN,
                    c => c.parse().unwrap(),
                })
                .collect()
        })
        .collect();
    (headers, rows)
}

fn column(headers: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = headers
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn standard_report() {
    let (out, text) = run_to_file("report", &scenario("standard.toml"), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["fisher_ideal"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["aav_validity"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(v["aav_warning"], false);
    assert!(out.stderr.is_empty());
}

#[test]
fn aav_warning_threshold_is_configurable() {
    let (out, text) = run_to_file(
        "report",
        &scenario("standard.toml"),
        &["--warn-aav", "0.05"],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["aav_warning"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn pixelation_efficiency_curve() {
    let (out, text) = run_to_file("efficiency", &scenario("pixel_r1.5.toml"), &[]);
    assert!(out.status.success());
    let (headers, rows) = read_csv(&text);
    assert_eq!(headers, ["shift", "eta"]);
    assert_eq!(rows.len(), 151);
    let shift = column(&headers, &rows, "shift");
    assert_eq!(shift[0], 0.0);
    assert!(*shift.last().unwrap() < 1.5);
    let min = column(&headers, &rows, "eta")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!(min >= 0.84, "min eta {min}");
}

#[test]
fn jitter_sweep_matches_closed_form() {
    let (out, text) = run_to_file("sweep", &scenario("jitter_position.toml"), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (headers, rows) = read_csv(&text);
    assert_eq!(headers[0], "noise.zeta");
    assert_eq!(rows.len(), 50);
    let zeta = column(&headers, &rows, "noise.zeta");
    let eta = column(&headers, &rows, "eta");
    assert_eq!((zeta[0], zeta[49]), (0.01, 2.0));
    for w in eta.windows(2) {
        assert!(w[1] < w[0]);
    }
    for (z, e) in zeta.iter().zip(&eta) {
        assert!((e - 1.0 / (1.0 + z * z)).abs() < 1e-9, "zeta {z}: {e}");
    }
}

#[test]
fn csv_and_json_agree() {
    let s = scenario("jitter_momentum.toml");
    let (_, csv_text) = run_to_file("report", &s, &["--format", "csv"]);
    let (_, json_text) = run_to_file("report", &s, &["--format", "json"]);
    let (headers, rows) = read_csv(&csv_text);
    assert_eq!(rows.len(), 1);
    let json: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&json_text).unwrap();
    assert_eq!(
        json.keys().cloned().collect::<Vec<_>>().len(),
        headers.len()
    );
    for (h, v) in headers.iter().zip(&rows[0]) {
        let j = &json[h];
        match j {
            serde_json::Value::Bool(b) => assert_eq!(*v, if *b { 1.0 } else { 0.0 }),
            serde_json::Value::Null => assert!(v.is_nan()),
            j => assert_eq!(j.as_f64().unwrap(), *v, "{h}"),
        }
    }
}

#[test]
fn tabular_json_is_an_array_of_rows() {
    let (out, text) = run_to_file(
        "efficiency",
        &scenario("saturation_weak.toml"),
        &["--format", "json"],
    );
    assert!(out.status.success());
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0].len(), 2);
    assert!(text.find("\"p_arrival\"").unwrap() < text.find("\"eta\"").unwrap());
    assert_eq!(rows[100]["eta"], 0.0);
    assert_eq!(rows[50]["eta"], 1.0);
}

#[test]
fn reruns_are_byte_identical() {
    for (cmd, name) in [
        ("report", "saturation_weak.toml"),
        ("wigner", "jitter_momentum.toml"),
        ("efficiency", "pixel_r0.5.toml"),
        ("sweep", "jitter_position.toml"),
    ] {
        let (_, a) = run_to_file(cmd, &scenario(name), &[]);
        let (_, b) = run_to_file(cmd, &scenario(name), &["--threads", "2"]);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd} {name}");
        assert!(!a.contains('\r'));
    }
}

#[test]
fn montecarlo_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mc.toml");
    let text = std::fs::read_to_string(scenario("montecarlo_weak.toml"))
        .unwrap()
        .replace("n_emitted = 100000", "n_emitted = 2000")
        .replace("replicates = 1000", "replicates = 100");
    std::fs::write(&path, text).unwrap();
    let (out, a) = run_to_file("montecarlo", &path, &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, b) = run_to_file("montecarlo", &path, &[]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["replicates"], 100);
    assert_eq!(v["seed"], 20240611);
}

#[test]
fn wigner_grid_shape() {
    let (out, text) = run_to_file("wigner", &scenario("standard.toml"), &[]);
    assert!(out.status.success());
    let (headers, rows) = read_csv(&text);
    assert_eq!(headers, ["x", "k", "W"]);
    assert_eq!(rows.len(), 81 * 81);
    let peak = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!(
        (peak[0] - 0.1).abs() < 1e-12 && peak[1].abs() < 1e-12,
        "{peak:?}"
    );
    assert!((peak[2] - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let code = |args: &[&str]| weakmeter(args).status.code().unwrap();

    assert_eq!(
        code(&[
            "report",
            "--scenario",
            scenario("standard.toml").to_str().unwrap()
        ]),
        0
    );
    assert_eq!(code(&["report"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["report", "--format", "xml"]), 1);
    assert_eq!(
        code(&["report", "--scenario", "/nonexistent/scenario.toml"]),
        2
    );

    let syntax = write("syntax.toml", "[meter]\nsigma = \n");
    let out = weakmeter(&["report", "--scenario", syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let base = std::fs::read_to_string(scenario("saturation_weak.toml")).unwrap();
    let orthogonal = write(
        "orth.toml",
        &base.replace("post = [[2, 0], [-1, 0]]", "post = [[1, 0], [-1, 0]]"),
    );
    let out = weakmeter(&["report", "--scenario", orthogonal.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("|<f|i>| = 0") && err.contains("g = 0.1"),
        "{err}"
    );

    let saturated = write(
        "sat.toml",
        &format!(
            "{}\n[mc]\nn_emitted = 100\nreplicates = 100\nseed = 1\n",
            base.replace("p_sat = 0.5", "p_sat = 0.05")
        ),
    );
    let out = weakmeter(&["montecarlo", "--scenario", saturated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("0.05") && err.contains("n_emitted = 100"),
        "{err}"
    );

    let no_sweep = scenario("standard.toml");
    assert_eq!(
        code(&["sweep", "--scenario", no_sweep.to_str().unwrap()]),
        1
    );
    assert_eq!(
        code(&["efficiency", "--scenario", no_sweep.to_str().unwrap()]),
        1
    );
}
