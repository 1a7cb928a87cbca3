//! End-to-end contract tests for the `sextic` binary: exit codes for every
//! class of outcome, output schemas, reference values, and byte-identical
//! determinism.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

const FIXTURE: &str = r#"{"a":[[4,0],[5,0],[6,0]],"h1":[-7,0],"h2":[6,0]}"#;

fn fixture_doc(extra: &str) -> String {
    if extra.is_empty() {
        format!(r#"{{"curve":{FIXTURE}}}"#)
    } else {
        format!(r#"{{"curve":{FIXTURE},{extra}}}"#)
    }
}

fn detour_doc(extra: &str) -> String {
    let path = r#""path":{"space":"h","segments":[
        {"kind":"line","from":[[-7,0],[6,0]],"to":[[-6.5402514692,0],[6,0]]},
        {"kind":"arc","center":[[-6.2402514692,0],[6,0]],"radius":0.3,
         "theta0":3.141592653589793,"theta1":0,"component":0},
        {"kind":"line","from":[[-5.9402514692,0],[6,0]],"to":[[-6,0],[6,0]]}]}"#;
    format!(r#"{{"curve":{FIXTURE},{path}{extra}}}"#)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sextic"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout should be JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn verify_fixture_exits_zero_with_all_criteria_passed() {
    let out = run(&["verify"]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    assert_eq!(doc["passed"], serde_json::Value::Bool(true));
    let criteria = doc["criteria"].as_array().expect("criteria array");
    assert_eq!(criteria.len(), 10);
    for c in criteria {
        assert_eq!(c["passed"], serde_json::Value::Bool(true), "criterion {c}");
    }
    assert!(doc["rank_ratio"].as_f64().expect("rank ratio") > 0.0);
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let a = run(&["verify", "--seed", "3"]);
    let b = run(&["verify", "--seed", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let doc = fixture_doc("");
    let c = run(&["gm-check", "--input", &doc]);
    let d = run(&["gm-check", "--input", &doc]);
    assert_eq!(code(&c), 0);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn periods_of_first_branch_pair_match_reference() {
    let doc = fixture_doc(r#""cycle":{"kind":"branch_pair","pair":[1,2]}"#);
    let out = run(&["periods", "--input", &doc]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let j = v["J"].as_array().expect("J");
    assert_eq!(j.len(), 5);
    // Reference values computed with 60-digit arithmetic by two
    // independent quadrature routes.
    let reference = [
        0.3469811511935332,
        -0.04481734492121208,
        0.5441185242623761,
        -0.9021849946225820,
        2.7003051626407993,
    ];
    for (pair, expect) in j.iter().zip(reference) {
        let re = pair[0].as_f64().unwrap();
        let im = pair[1].as_f64().unwrap();
        assert!(re.abs() < 1e-12, "real part should vanish: {re}");
        assert!((im - expect).abs() < 1e-12, "imag {im} vs {expect}");
    }
    assert!(v["err"].as_f64().unwrap() < 1e-10);
}

#[test]
fn periods_of_big_loop_match_residue_values() {
    let doc = fixture_doc(r#""cycle":{"kind":"big_loop","radius":15,"sheet":1}"#);
    let out = run(&["periods", "--input", &doc]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let j = v["J"].as_array().expect("J");
    let two_pi = std::f64::consts::TAU;
    // J3 = 2πi and J4 = πi·(sum of branch points) = 15πi.
    assert!((j[2][1].as_f64().unwrap() - two_pi).abs() < 1e-10);
    assert!((j[3][1].as_f64().unwrap() - 7.5 * two_pi).abs() < 1e-10);
    for row in &[&j[0], &j[1], &j[2], &j[3]] {
        assert!(row[0].as_f64().unwrap().abs() < 1e-10);
    }
}

#[test]
fn gm_check_emits_a_six_row_csv() {
    let out = run(&["gm-check", "--input", &fixture_doc("")]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).expect("utf-8");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,residual,delta");
    assert_eq!(lines.len(), 7);
    for (i, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3);
        assert_eq!(cols[0], (i + 1).to_string());
        let residual: f64 = cols[1].parse().expect("residual parses");
        assert!(residual < 1e-8, "row {i}: residual {residual}");
    }
}

#[test]
fn pf_check_reports_small_residuals_on_the_fixture() {
    let out = run(&["pf-check", "--input", &fixture_doc("")]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert!(v["route_equivalence_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["fd_residuals"]["h1"].as_f64().unwrap() < 1e-8);
    assert!(v["fd_residuals"]["h2"].as_f64().unwrap() < 1e-8);
    assert!(v["curvature_residual"].as_f64().unwrap() < 1e-8);
    let ids = v["identity_residuals"].as_array().unwrap();
    assert_eq!(ids.len(), 4);
    for r in ids {
        assert!(r.as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn pf_transport_runs_the_detour_and_emits_json_then_csv() {
    let doc = detour_doc(r#","cycle":{"kind":"branch_pair","pair":[2,3]}"#);
    let out = run(&["pf-transport", "--input", &doc]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["J_end"].as_array().unwrap().len(), 5);
    assert!(v["steps"].as_i64().unwrap() > 10);
    assert!(v["max_local_error"].as_f64().unwrap() < 1e-9);

    let csv = run(&["pf-transport", "--input", &doc, "--output", "csv"]);
    assert_eq!(code(&csv), 0);
    let text = String::from_utf8(csv.stdout).expect("utf-8");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "t,J1_re,J1_im,J2_re,J2_im,J3_re,J3_im,J4_re,J4_im,J5_re,J5_im"
    );
    assert!(lines.len() > 10);
    let first: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    let last: f64 = lines[lines.len() - 1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, 0.0);
    assert_eq!(last, 1.0);
}

#[test]
fn pf_transport_through_the_discriminant_exits_three_with_the_parameter() {
    let doc = fixture_doc(
        r#""path":{"space":"h","segments":[{"kind":"line","from":[[-7,0],[6,0]],"to":[[-6,0],[6,0]]}]}"#,
    );
    let out = run(&["pf-transport", "--input", &doc]);
    assert_eq!(code(&out), 3);
    let v = json_of(&out);
    assert_eq!(v["error"]["kind"], "path_unsafe");
    assert_eq!(v["error"]["exit"], 3);
    // The offending moduli point: h1 at the cubic's double-root value.
    let h1 = v["error"]["parameter"][0][0].as_f64().expect("parameter h1");
    let critical = -3.0 * 3f64.powf(2.0 / 3.0);
    assert!((h1 - critical).abs() < 1e-3, "h1 {h1} vs critical {critical}");
}

#[test]
fn monodromy_of_a_contractible_loop_is_the_identity() {
    let doc = fixture_doc(
        r#""loop":{"space":"h","closed":true,"segments":[{"kind":"circle","center":[[-7,0],[6,0]],"radius":0.2,"turns":1}]}"#,
    );
    let out = run(&["monodromy", "--input", &doc]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let m = v["M"].as_array().unwrap();
    for (i, row) in m.iter().enumerate() {
        for (j, entry) in row.as_array().unwrap().iter().enumerate() {
            let re = entry[0].as_f64().unwrap();
            let im = entry[1].as_f64().unwrap();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!(
                (re - expect).abs() + im.abs() < 1e-7,
                "M[{i}][{j}] = {re} + {im}i"
            );
        }
    }
    assert!((v["det"][0].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert!(v["liouville_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn actions_on_the_real_oval_are_real() {
    let doc = fixture_doc(r#""cycles":[{"kind":"branch_pair","pair":[2,3]}]"#);
    let out = run(&["actions", "--input", &doc]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let actions = v["actions"].as_array().unwrap();
    assert_eq!(actions.len(), 1);
    assert!((actions[0][0].as_f64().unwrap() - 0.042849057892).abs() < 1e-9);
    assert!(v["residuals"]["route_agreement"].as_f64().unwrap() < 1e-10);
    assert!(v["residuals"]["imag"].as_f64().unwrap() < 1e-10);
}

#[test]
fn legendre_at_one_half_matches_the_agm() {
    let out = run(&["legendre", "--k", "0.5"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert!((v["K"][0].as_f64().unwrap() - 1.6857503548125963).abs() < 1e-12);
    assert!(v["K"][1].as_f64().unwrap().abs() < 1e-14);
    assert!(v["residuals"]["agm_k"].as_f64().unwrap() < 1e-11);
    assert!(v["residuals"]["agm_ebar"].as_f64().unwrap() < 1e-11);
}

#[test]
fn input_from_stdin_works() {
    let doc = fixture_doc(r#""cycle":{"kind":"branch_pair","pair":[1,2]}"#);
    let mut child = Command::new(env!("CARGO_BIN_EXE_sextic"))
        .args(["periods", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(doc.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    json_of(&out);
}

#[test]
fn malformed_and_invalid_inputs_exit_two() {
    // Truncated JSON.
    let out = run(&["periods", "--input", r#"{"curve":{"#]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_of(&out)["error"]["kind"], "invalid_input");

    // Tolerance outside the admissible range.
    let doc = fixture_doc(r#""cycle":{"kind":"branch_pair","pair":[1,2]}"#);
    let out = run(&["periods", "--input", &doc, "--tol", "0.5"]);
    assert_eq!(code(&out), 2);

    // Missing --input.
    let out = run(&["pf-check"]);
    assert_eq!(code(&out), 2);

    // Unknown subcommand (rejected by the argument parser).
    let out = run(&["nonsense"]);
    assert_eq!(code(&out), 2);

    // Curve without the cycle the command needs.
    let out = run(&["periods", "--input", &fixture_doc("")]);
    assert_eq!(code(&out), 2);

    // Empty cycles array.
    let out = run(&["actions", "--input", &fixture_doc(r#""cycles":[]"#)]);
    assert_eq!(code(&out), 2);

    // CSV requested from a command with no tabular form.
    let out = run(&["pf-check", "--input", &fixture_doc(""), "--output", "csv"]);
    assert_eq!(code(&out), 2);

    // Path that does not start at the curve's moduli point.
    let doc = fixture_doc(
        r#""path":{"space":"h","segments":[{"kind":"line","from":[[-8,0],[6,0]],"to":[[-7.5,0],[6,0]]}]}"#,
    );
    let out = run(&["pf-transport", "--input", &doc]);
    assert_eq!(code(&out), 2);
}

#[test]
fn degenerate_curve_exits_three() {
    let out = run(&[
        "periods",
        "--input",
        r#"{"curve":{"a":[[4,0],[4,0],[6,0]],"h1":[-7,0],"h2":[6,0]},"cycle":{"kind":"branch_pair","pair":[1,2]}}"#,
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(json_of(&out)["error"]["kind"], "degenerate_curve");
}

#[test]
fn nonconvergent_quadrature_exits_four() {
    // k this close to 1 is admissible but the trapezoid refinement hits its
    // node cap before reaching tolerance.
    let out = run(&["legendre", "--k", "0.999999999"]);
    assert_eq!(code(&out), 4);
    assert_eq!(
        json_of(&out)["error"]["kind"],
        "quadrature_non_convergence"
    );
}

#[test]
fn failed_verification_exits_five() {
    // Scaling the fixture by 10 keeps every computation healthy but pushes
    // the absolute root-identity residual far above its fixed bound, so the
    // report must say "failed" and the exit code must follow.
    let out = run(&[
        "verify",
        "--input",
        r#"{"a":[[40,0],[50,0],[60,0]],"h1":[-700,0],"h2":[600,0]}"#,
    ]);
    assert_eq!(code(&out), 5);
    let v = json_of(&out);
    assert_eq!(v["passed"], serde_json::Value::Bool(false));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .any(|c| c["name"] == "identity_max" && c["passed"] == serde_json::Value::Bool(false)));
}
