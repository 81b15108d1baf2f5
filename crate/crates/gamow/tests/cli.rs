use gamow::cli::*;
use std::path::Path;

fn gamow(args: &[&str]) -> i32 {
    std::env::set_var("GAMOW_LOG", "quiet");
    main_with_args(std::iter::once("gamow").chain(args.iter().copied()))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn col(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn poles_csv_round_trips_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(gamow(&["poles", "--count", "12", "-o", a.to_str().unwrap()]), EXIT_OK);
    assert_eq!(gamow(&["poles", "--count", "12", "-o", b.to_str().unwrap()]), EXIT_OK);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (head, rows) = read_csv(&a);
    assert_eq!(head, ["n", "re_p", "im_p", "re_norm", "im_norm", "residual"]);
    assert_eq!(rows.len(), 24);
    // numbers parse back to exactly what the library computes
    let table = gamow::barrier::find_resonances(&gamow::barrier::BarrierParams::cfg0(), 12).unwrap();
    for row in &rows {
        let n: i32 = row[0].parse().unwrap();
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        assert_eq!(num_complex::Complex64::new(re, im), table.get(n).p);
    }
}

#[test]
fn json_output_has_columns_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    assert_eq!(gamow(&["transmission", "--format", "json", "-o", out.to_str().unwrap()]), EXIT_OK);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(cols, ["k", "re_t", "im_t", "abs_t2", "abs_r2"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for r in rows {
        let flux = r[3].as_f64().unwrap() + r[4].as_f64().unwrap();
        assert!((flux - 1.0).abs() < 1e-12);
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("deep/psi.csv");
    std::fs::write(&cfg, r#"{"grid": {"x": [0.5, 2.0], "t": [0.2]}, "series": {"pairs": 100}}"#).unwrap();
    let code = gamow(&["--config", cfg.to_str().unwrap(), "evolve", "-o", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (head, rows) = read_csv(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][col(&head, "region")], "III");
    let abs2: f64 = rows[0][col(&head, "abs2")].parse().unwrap();
    let (re, im): (f64, f64) =
        (rows[0][col(&head, "re_psi")].parse().unwrap(), rows[0][col(&head, "im_psi")].parse().unwrap());
    assert!((abs2 - (re * re + im * im)).abs() <= 1e-15);
}

#[test]
fn plot_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"grid": {"x": [2.5, -0.5, 0.5], "t": [0.1, 0.3]}}"#).unwrap();
    let plots = dir.path().join("plots");
    let out = dir.path().join("main.csv");
    let code = gamow(&[
        "--config", cfg.to_str().unwrap(), "evolve", "--pairs", "200", "--plot-data", plots.to_str().unwrap(),
        "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    for name in ["evolve_t00.csv", "evolve_t01.csv"] {
        let (head, rows) = read_csv(&plots.join(name));
        assert_eq!(head, ["x", "abs2", "re_psi", "im_psi"]);
        let xs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
        assert_eq!(xs, [-0.5, 0.5, 2.5]);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = out.to_str().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let unknown = write("unknown.json", r#"{"series": {"pairz": 3}}"#);
    assert_eq!(gamow(&["--config", unknown.to_str().unwrap(), "poles", "-o", o]), EXIT_CONFIG);
    let negative = write("neg.json", r#"{"params": {"m": 0.5, "V": -1, "L": 1}}"#);
    assert_eq!(gamow(&["--config", negative.to_str().unwrap(), "poles", "-o", o]), EXIT_CONFIG);
    let missing = dir.path().join("nope.json");
    assert_eq!(gamow(&["--config", missing.to_str().unwrap(), "poles", "-o", o]), EXIT_IO);
    assert_eq!(gamow(&["no-such-command"]), EXIT_CONFIG);
    assert_eq!(gamow(&["limits", "--large-time=-1", "-o", o]), EXIT_CONFIG);
    assert_eq!(gamow(&["limits", "--large-time=0", "-o", o]), EXIT_CONFIG);
    // a steep rotated tail sweeps a resonance: numerical failure
    let steep = write("steep.json", r#"{"contour": {"tail": {"shape": "rotated", "angle": -1.0}}, "grid": {"x": [0.5], "t": [0.2]}}"#);
    assert_eq!(gamow(&["--config", steep.to_str().unwrap(), "oracle", "-o", o]), EXIT_NUMERICAL);
    // unwritable output
    let blocker = write("file", "");
    let inside = blocker.join("out.csv");
    assert_eq!(gamow(&["poles", "-o", inside.to_str().unwrap()]), EXIT_IO);
}

#[test]
fn config_errors_name_the_field() {
    match RunConfig::from_json(r#"{"grid": {"t": [0.1, -2]}}"#) {
        Err(gamow::error::GamowError::Config { field, .. }) => assert_eq!(field, "grid.t[1]"),
        other => panic!("{other:?}"),
    }
    match RunConfig::from_json(r#"{"series": {"pairs": "many"}}"#) {
        Err(gamow::error::GamowError::Config { field, .. }) => assert_eq!(field, "series.pairs"),
        other => panic!("{other:?}"),
    }
    for (text, field) in [
        (r#"{"params": {"m": 1, "V": 2, "L": 1, "W": 0}}"#, "params"),
        (r#"{"contour": {"tail": {"shape": "rotated", "angel": -0.1}}}"#, "contour.tail"),
        (r#"{"series": {"form": {"kind": "subtracted", "ordre": 3}}}"#, "series.form"),
    ] {
        match RunConfig::from_json(text) {
            Err(gamow::error::GamowError::Config { field: f, .. }) => assert!(f.starts_with(field), "{f}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn validate_passes_on_the_default_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    assert_eq!(gamow(&["validate", "-o", out.to_str().unwrap()]), EXIT_OK);
    let (head, rows) = read_csv(&out);
    assert_eq!(head[0], "status");
    assert!(rows.len() >= 12);
    assert!(rows.iter().all(|r| r[0] == "PASS"));
}
