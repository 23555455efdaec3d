use std::process::{Command, Output};

use approx::assert_relative_eq;

fn pmy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses CSV text into the header and rows of fields.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().map(|l| l.split(',').map(String::from).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

fn value_at(rows: &[Vec<String>], x_col: usize, x: f64, col: usize) -> f64 {
    let row = rows
        .iter()
        .find(|r| (r[x_col].parse::<f64>().unwrap() - x).abs() < 1e-12)
        .unwrap_or_else(|| panic!("no row at x = {x}"));
    row[col].parse().unwrap()
}

#[test]
fn envelope_sweep_traces_huber() {
    let o = pmy(&[
        "envelope",
        "--function",
        "onenorm:center=[0]",
        "--p",
        "2",
        "--eps",
        "1",
        "--range",
        "-3:3:601",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, ["x", "f", "f_eps", "grad"]);
    assert_eq!(rows.len(), 601);
    assert_relative_eq!(value_at(&rows, 0, 0.5, 2), 0.125, max_relative = 1e-12);
    assert_relative_eq!(value_at(&rows, 0, 2.0, 2), 1.5, max_relative = 1e-12);
    assert_relative_eq!(value_at(&rows, 0, -2.0, 3), -1.0, max_relative = 1e-12);
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let o = pmy(&["envelope", "--function", "quadratic:weights=[1]", "--range", "0:1:3"]);
    let (_, rows) = table(&stdout(&o));
    assert_eq!(rows[1][0], "5.0000000000000000e-1");
}

#[test]
fn zero_envelope_vanishes() {
    let o = pmy(&["envelope", "--function", "zero", "--range", "-2:2:9"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = table(&stdout(&o));
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn malformed_spec_is_a_usage_error() {
    let o = pmy(&["envelope", "--function", "onenorm:centre=[0]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("centre"));
    assert!(o.stdout.is_empty());
}

#[test]
fn invalid_parameters_are_usage_errors() {
    for args in [
        vec!["envelope", "--function", "zero", "--p", "1"],
        vec!["envelope", "--function", "zero", "--eps", "0"],
        vec!["envelope", "--function", "zero", "--range", "1:0:5"],
        vec!["envelope", "--function", "zero", "--range", "nonsense"],
        vec!["prox", "--function", "zero", "--dim", "2", "--x", "[1 2 3]"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
    ] {
        assert_eq!(pmy(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn prox_reports_point_and_method() {
    let o = pmy(&[
        "prox",
        "--function",
        "onenorm:center=[4.5],offset=0.5",
        "--x",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["prox"][0], 3.0);
    assert_eq!(row["f_eps"], 2.5);
    assert_eq!(row["method"], "closed-form");
}

#[test]
fn prox_in_two_dimensions() {
    let o = pmy(&[
        "prox",
        "--function",
        "box:lo=[-1 -1],hi=[1 1]",
        "--dim",
        "2",
        "--x",
        "[2 -3]",
        "--p",
        "3",
    ]);
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header[..4], ["x_1", "x_2", "prox_1", "prox_2"]);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), -1.0);
}

#[test]
fn figure_data() {
    let o = pmy(&["figure"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(
        header,
        [
            "kind",
            "index",
            "x",
            "f",
            "f_eps",
            "parabola_1",
            "parabola_2",
            "parabola_3",
            "parabola_4"
        ]
    );
    let curve: Vec<Vec<String>> = rows.iter().filter(|r| r[0] == "curve").cloned().collect();
    assert_eq!(value_at(&curve, 2, 3.5, 4), 1.0);
    assert_eq!(value_at(&curve, 2, 4.5, 4), 0.5);
    assert_eq!(value_at(&curve, 2, 5.5, 4), 1.0);
    // The first parabola has its vertex at (x_1, f(x_1)) = (1, 4).
    assert_eq!(value_at(&curve, 2, 1.0, 5), 4.0);
    let iterates: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "iterate")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(iterates, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    // Minimum of the envelope over the curve sits at 4.5.
    let min = curve
        .iter()
        .map(|r| r[4].parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(min, 0.5);
}

#[test]
fn verify_writes_report_file() {
    let dir = std::env::temp_dir().join(format!("pmy-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = pmy(&[
        "verify",
        "--suite",
        "theorem6",
        "--p",
        "1.5",
        "--dim",
        "2",
        "--seed",
        "7",
        "--samples",
        "2000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().all(|n| {
        ["conjugate_shift", "strong_pstar", "gradient_holder", "nonconvexity"]
            .iter()
            .any(|p| n.starts_with(p))
    }));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zero_tolerance_fails_verification() {
    let o = pmy(&["verify", "--suite", "duality", "--tol", "0", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn inapplicable_checks_exit_zero() {
    let o = pmy(&[
        "verify",
        "--suite",
        "strong_p_monotonicity_jp",
        "--p",
        "1.5",
        "--samples",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reports"][0]["status"], "inapplicable");
}

#[test]
fn verify_csv_summary() {
    let o = pmy(&["verify", "--suite", "huber_envelope,proximal_point", "--format", "csv"]);
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, ["check", "status", "passed", "tolerance", "seed"]);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[1] == "pass"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["verify", "--suite", "envelope", "--seed", "5", "--samples", "1000"];
    assert_eq!(pmy(&args).stdout, pmy(&args).stdout);
    let args = [
        "envelope",
        "--function",
        "normpower:q=1.5,center=[0.3]",
        "--p",
        "1.5",
        "--numerical",
    ];
    assert_eq!(pmy(&args).stdout, pmy(&args).stdout);
}
