use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const SCHEMA: &str = include_str!("../schema/output.schema.json");

fn odeinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odeinv")).args(args).env_remove("ODEINV_BUDGET").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ode_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    writeln!(f, "{text}").unwrap();
    f
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = odeinv(&full);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{args:?} output violates the schema: {msgs:?}\n{v:#}");
    }
    (v, out.status.code().unwrap())
}

#[test]
fn count_matches_the_formula_and_rejects_low_orders() {
    assert_eq!(stdout(&odeinv(&["count", "--n", "3", "--p", "0"])).trim(), "0");
    let out = odeinv(&["count", "--n", "5", "--p", "2", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "7");
    let low = odeinv(&["count", "--n", "2", "--p", "0"]);
    assert_eq!(low.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&low.stderr).contains("at least 3"));
}

#[test]
fn verify_catalogue_slices() {
    let (v, code) = json(&["verify", "--form", "w", "--n", "5", "--p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 7);
    let (v, code) = json(&["verify", "--form", "s", "--n", "3", "--p", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"][0]["id"], "psi[standard;3;4.1]");
    assert_eq!(v["records"][0]["status"], "verified");
}

#[test]
fn verify_reports_a_residual_for_a_non_invariant() {
    let out = odeinv(&["verify", "--form", "n", "--n", "3", "--p", "3", "--expr", "a0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("residual: -3*a0*f' - a1*f'' - f^(4)"));
    let (v, _) = json(&["verify", "--form", "n", "--n", "3", "--p", "3", "--expr", "a0"]);
    assert_eq!(v["records"][0]["status"], "fails");
}

#[test]
fn fails_as_printed_only_fails_under_strict() {
    let args = ["verify", "--form", "normal", "--n", "4", "--p", "2"];
    assert_eq!(odeinv(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    let out = odeinv(&strict);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("psi[normal;4;2.1]            fails-as-printed"));
}

#[test]
fn parse_errors_exit_with_two() {
    let out = odeinv(&["verify", "--form", "w", "--n", "4", "--p", "2", "--expr", "a0 +"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(odeinv(&["verify", "--form", "w", "--n", "9", "--p", "2"]).status.code(), Some(2));
    assert_eq!(odeinv(&["count", "--n", "4", "--p", "1", "--bogus"]).status.code(), Some(2));
    let bad = ode_file("n=3 form=standard a2=\"a2 +\"");
    assert_eq!(odeinv(&["transform", bad.path().to_str().unwrap(), "--to", "normal"]).status.code(), Some(2));
}

#[test]
fn standard_third_order_reduces_to_normal_form() {
    let f = ode_file("n=3 form=standard a2=\"a2\" a1=\"a1\" a0=\"a0\"");
    let (v, code) = json(&["transform", f.path().to_str().unwrap(), "--to", "normal"]);
    assert_eq!(code, 0);
    let coeff = |k: &str| odeinv_core::parse(v["ode"]["coeffs"][k].as_str().unwrap()).unwrap();
    assert!(coeff("a0").equals(&odeinv_core::parse("(27*a0 - 9*a1*a2 + 2*a2^3 - 9*a2'')/27").unwrap()));
    assert!(coeff("a1").equals(&odeinv_core::parse("(27*a1 - 9*a2^2 - 27*a2')/27").unwrap()));
    assert!(coeff("a2").is_zero());
    assert_eq!(v["ode"]["form"], "normal");
}

#[test]
fn identity_group_element_leaves_coefficients_untouched() {
    let input = "n=4 form=w a3=\"0\" a2=\"0\" a1=\"x^2 + 1\" a0=\"3*x - a0\"";
    let f = ode_file(input);
    let out = odeinv(&["transform", f.path().to_str().unwrap(), "--w-group", "0,1,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), input);
}

#[test]
fn singular_group_element_is_a_mathematical_failure() {
    let f = ode_file("n=4 form=w a1=\"x\" a0=\"1\"");
    let out = odeinv(&["transform", f.path().to_str().unwrap(), "--w-group", "0,0,0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("B must be non-zero"));
    let wrong_form = ode_file("n=4 form=standard a1=\"x\"");
    assert_eq!(odeinv(&["transform", wrong_form.path().to_str().unwrap(), "--w-group", "0,1,0,1"]).status.code(), Some(2));
}

#[test]
fn budget_comes_from_the_environment() {
    let f = ode_file("n=4 form=w a1=\"a1\" a0=\"a0\"");
    let path = f.path().to_str().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_odeinv"))
        .args(["transform", path, "--w-group", "1,2,3,4"])
        .env("ODEINV_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert_eq!(odeinv(&["transform", path, "--w-group", "1,2,3,4"]).status.code(), Some(0));
}

#[test]
fn derive_reproduces_the_standard_generator() {
    let (v, code) = json(&["derive", "--form", "standard", "--n", "3"]);
    assert_eq!(code, 0);
    let g = &v["generator"];
    assert_eq!(g["x"], "f");
    let a1 = odeinv_core::parse(g["a1"].as_str().unwrap()).unwrap();
    assert!(a1.equals(&odeinv_core::parse("-2*a1*f' - 2*a2*g' + a2*f'' - 3*g'' + f'''").unwrap()));
}

#[test]
fn brioschi_instance_reduces_to_second_order() {
    let f = ode_file("n=3 form=normal a1=\"a1\" a0=\"a1'/2\"");
    let out = odeinv(&["reduce", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("substitution: y = ybar^2"), "{text}");
    assert!(text.contains("ybar'' + (1/4*a1)*ybar = 0"), "{text}");
    let generic = ode_file("n=3 form=normal a1=\"a1\" a0=\"a0\"");
    let (v, code) = json(&["reduce", generic.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["outcome"], "not-applicable");
}

#[test]
fn suite_is_deterministic_and_agrees_across_formats() {
    let args = ["suite", "--form", "w", "--n", "4", "--trials", "20", "--seed", "3"];
    let a = odeinv(&args);
    let b = odeinv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("4 invariants x 20 trials, 80 pass, 0 fail"), "{text}");
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], 80);
    let verdicts: Vec<&str> =
        text.lines().filter(|l| l.starts_with("trial ")).map(|l| l.rsplit("verdict=").next().unwrap()).collect();
    let json_verdicts: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, json_verdicts);
}

#[test]
fn text_and_json_verdicts_agree_for_verify() {
    let args = ["verify", "--form", "normal", "--n", "3", "--p", "4"];
    let text = stdout(&odeinv(&args));
    let (v, _) = json(&args);
    for r in v["records"].as_array().unwrap() {
        let line = text.lines().find(|l| l.starts_with(r["id"].as_str().unwrap())).unwrap();
        assert!(line.contains(r["status"].as_str().unwrap()), "{line}");
    }
}
