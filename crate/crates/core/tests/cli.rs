use std::path::PathBuf;
use std::process::{Command, Output};

use gconvex::connection::{construct_no_critical, zero_target, Connection};
use gconvex::polycore::parse_expression;
use serde_json::Value;

fn gconvex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gconvex")).args(args).output().expect("binary runs")
}

/// Exit code and the single JSON document on stdout.
fn run_ok(args: &[&str]) -> Value {
    let out = gconvex(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut docs = serde_json::Deserializer::from_str(&text).into_iter::<Value>();
    let doc = docs.next().expect("one document").expect("valid JSON");
    assert!(docs.next().is_none(), "more than one document on stdout");
    assert_eq!(doc["schema_version"], 1);
    doc
}

fn run_err(args: &[&str], code: i32, kind: &str) {
    let out = gconvex(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    assert_eq!(err["error"]["code"], code);
    assert_eq!(err["error"]["kind"], kind);
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gconvex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn classify_reports_verdicts() {
    let doc = run_ok(&["classify", "x1^3+x2"]);
    assert_eq!(doc["command"], "classify");
    assert_eq!(doc["result"]["verdict"]["outcome"], "GConvex");
    assert_eq!(doc["result"]["verdict"]["certificate"]["kind"], "NoCriticalPoint");
    let doc = run_ok(&["classify", "x^3"]);
    assert_eq!(doc["result"]["verdict"]["outcome"], "NotGConvex");
}

#[test]
fn pretty_output_is_the_same_document() {
    let mut a = run_ok(&["classify", "3*x^4"]);
    let mut b = run_ok(&["--pretty", "classify", "3*x^4"]);
    a["timing_ms"] = Value::Null;
    b["timing_ms"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn density_is_deterministic_given_seed() {
    let args = ["--seed", "9", "--trials", "2000", "density", "univariate", "-d", "5"];
    let (a, b) = (run_ok(&args), run_ok(&args));
    assert_eq!(a["result"], b["result"]);
    let other = run_ok(&["--seed", "10", "--trials", "2000", "density", "univariate", "-d", "5"]);
    assert_ne!(a["result"], other["result"]);
}

#[test]
fn density_sweep_writes_csv() {
    let csv = std::env::temp_dir().join(format!("gconvex-cli-{}-sweep.csv", std::process::id()));
    let doc = run_ok(&[
        "--trials", "500", "density", "univariate", "--sweep", "d=3,7", "--csv", csv.to_str().unwrap(),
    ]);
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.iter().map(|r| r["d"].as_u64().unwrap()).collect::<Vec<_>>(), [3, 7]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
    std::fs::remove_file(csv).ok();
}

#[test]
fn connect_output_feeds_holonomy_and_geodesic() {
    let doc = run_ok(&["connect", "x^3+x"]);
    let conn_json = doc["result"]["connection"].to_string();
    assert!(doc["result"]["hessian_check"]["verified"].as_bool().unwrap());

    // Lossless: the file parses back to the connection the library builds.
    let f = parse_expression("x^3+x", &["x"]).unwrap();
    let direct = construct_no_critical(&f, &zero_target(1)).unwrap();
    let parsed = Connection::from_json(&conn_json).unwrap();
    assert_eq!(parsed, direct);

    let path = scratch("cubic.json", &conn_json);
    let hol = run_ok(&["holonomy", path.to_str().unwrap(), "--point", "1/2"]);
    assert_eq!(hol["result"]["lc_report"]["verdict"]["kind"], "MetricExistsAllSignatures");
    let geo = run_ok(&["geodesic", "x^3+x", "--connection", path.to_str().unwrap(), "--x0", "0.5", "--v0", "-1"]);
    assert_eq!(geo["result"]["convexity"]["convex"], true);
    let inline = run_ok(&["holonomy", "--inline", &conn_json, "--point", "0"]);
    assert_eq!(inline["result"]["lc_report"]["verdict"], hol["result"]["lc_report"]["verdict"]);
}

#[test]
fn whole_connect_report_is_accepted_as_a_connection_file() {
    let doc = run_ok(&["connect", "x^3+x", "--pretty"]);
    let path = scratch("report.json", &serde_json::to_string_pretty(&doc).unwrap());
    let hol = run_ok(&["holonomy", path.to_str().unwrap(), "--point", "1"]);
    assert_eq!(hol["result"]["lc_report"]["verdict"]["kind"], "MetricExistsAllSignatures");
    let geo = run_ok(&["geodesic", "x^3+x", "--connection", path.to_str().unwrap(), "--x0", "0", "--v0", "1"]);
    assert_eq!(geo["result"]["convexity"]["convex"], true);
}

#[test]
fn flat_quadratic_round_trip() {
    let doc = run_ok(&["connect", "x^2 - y^2 + y + 3*z", "--vars", "x,y,z"]);
    let conn_json = doc["result"]["connection"].to_string();
    let path = scratch("flat.json", &conn_json);
    let hol = run_ok(&["holonomy", path.to_str().unwrap(), "--point", "1,-2,0.25"]);
    assert_eq!(hol["result"]["lc_report"]["verdict"]["kind"], "MetricExistsAllSignatures");
    let geo = run_ok(&[
        "geodesic", "x^2 - y^2 + y + 3*z", "--vars", "x,y,z", "--connection", path.to_str().unwrap(),
        "--x0", "0.1,-0.3,0.2", "--v0", "1,1,-1", "--full-path",
    ]);
    assert_eq!(geo["result"]["convexity"]["convex"], true);
}

#[test]
fn worked_example_file_has_no_metric() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/curved_connection.json");
    let doc = run_ok(&["holonomy", file, "--point", "1,0"]);
    assert_eq!(doc["result"]["lc_report"]["verdict"]["kind"], "NoMetric");
}

#[test]
fn exit_codes() {
    run_err(&["classify", "x^"], 2, "parse");
    run_err(&["density", "nonsense"], 2, "usage");
    run_err(&["connect", "x^2*y^2"], 4, "no_constructor");
    let pole = scratch("pole.json", r#"{"n":1,"symbols":[{"k":1,"i":1,"j":1,"expr":"1/x1"}]}"#);
    run_err(&["holonomy", pole.to_str().unwrap(), "--point", "0"], 5, "pole");
    // Under Γ = 1/x the square x^2 is affine in t, so x(0) = 1, x'(0) = -2
    // reaches the pole at t = 1/4.
    let blowup = scratch("blowup.json", r#"{"n":1,"symbols":[{"k":1,"i":1,"j":1,"expr":"1/x1"}]}"#);
    run_err(
        &["geodesic", "x", "--connection", blowup.to_str().unwrap(), "--x0", "1", "--v0", "-2"],
        5,
        "pole",
    );
}
