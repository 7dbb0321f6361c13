//! End-to-end CLI checks: exit codes, text output, JSON shape.

use std::process::{Command, Output};

fn canyons(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canyons"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn analyze_cusp_family_text() {
    let out = canyons(&["analyze", "x^3 - 3*t^2*x*y^10 + y^12", "--param", "t=1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("multiplicity k = 3"));
    assert!(text.contains("(12, (-4)*y^15)"), "{text}");
    assert!(text.contains("(12, (4)*y^15)"), "{text}");
}

#[test]
fn analyze_empty_sigma() {
    let out = canyons(&["analyze", "x^2 + y^2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Σ_f empty; Inv² = {}"));
}

#[test]
fn analyze_two_parameter_json() {
    let out = canyons(&[
        "analyze",
        "x^3 + b*x^2*y^3 + y^9 + c*x*y^7",
        "--param",
        "b=1",
        "--param",
        "c=1",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let js: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let lines = js["analysis"]["inv2"]["lines"].as_array().unwrap();
    assert_eq!(lines.len(), 1);
    let a0s: Vec<&str> = lines[0]["leading"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["a0"].as_str().unwrap())
        .collect();
    assert!(a0s.contains(&"31/27") && a0s.contains(&"1"), "{a0s:?}");
    let nus: Vec<&str> = lines[0]["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["nu"].as_str().unwrap())
        .collect();
    assert!(nus.contains(&"-18/31") && nus.contains(&"18/31"), "{nus:?}");
}

#[test]
fn compare_exit_codes() {
    // Not equivalent: exit 1 with the constraint pair.
    let out = canyons(&[
        "compare",
        "x^3 - 3*t^2*x*y^10 + y^12",
        "x^3 - 3*t^2*x*y^10 + y^12",
        "--param",
        "t=1",
        "--param2",
        "t=2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("NotEquivalent"));
    assert!(text.contains("c^12 = 1"), "{text}");
    // Self-comparison: exit 0.
    let out = canyons(&[
        "compare",
        "x^2 - y^3",
        "x^2 - y^3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("ConsistentWithEquivalence"));
}

#[test]
fn invalid_input_exit_codes() {
    // Syntax error.
    let out = canyons(&["analyze", "x^3 + $"]);
    assert_eq!(out.status.code(), Some(2));
    // Unbound parameter.
    let out = canyons(&["analyze", "x^3 + t*y^4"]);
    assert_eq!(out.status.code(), Some(2));
    // Not mini-regular.
    let out = canyons(&["analyze", "y^2 + x^3"]);
    assert_eq!(out.status.code(), Some(2));
    // Multiple root.
    let out = canyons(&["analyze", "x^2 - 2*x*y + y^2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn arcs_lists_conjugates() {
    let out = canyons(&["arcs", "x^2 - y^3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("y^(3/2)"));
    assert!(text.lines().count() >= 2, "both conjugates listed: {text}");
    let out = canyons(&["arcs", "3*x^2 - 3*y^10"]);
    let text = stdout(&out);
    assert!(text.contains("(1)*y^5") && text.contains("(-1)*y^5"), "{text}");
}

#[test]
fn shear_flag_moves_the_line() {
    let out = canyons(&[
        "analyze",
        "x^3 - 3*t^2*x*y^10 + y^12",
        "--param",
        "t=1",
        "--shear",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("x = -1*y"), "{}", stdout(&out));
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = canyons(&["analyze", "x^3 + x^2*y^3 + y^9 + x*y^7", "--json", "--threads", "1"]);
    let b = canyons(&["analyze", "x^3 + x^2*y^3 + y^9 + x*y^7", "--json", "--threads", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn selftest_passes() {
    let out = canyons(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"), "{text}");
    // The gradient-degree comparison is reported side by side.
    assert!(text.contains("11/2"), "{text}");
}
