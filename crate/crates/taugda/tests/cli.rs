use std::process::{Command, Output};

use serde_json::Value;

fn taugda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taugda")).args(args).output().expect("spawn taugda")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn tau_star_json_for_a_point() {
    let out = taugda(&["tau-star", "--game", "quad_stack", "--v", "4", "--point", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["tau_star"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(v["guard_root"].as_f64().is_some());
}

#[test]
fn tau_star_over_all_stackelberg_points() {
    let out = taugda(&["tau-star", "--game", "torus"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    assert!((v["tau_star"].as_f64().unwrap() - 1.3529).abs() < 1e-3);
}

#[test]
fn refusal_exit_codes() {
    let out = taugda(&["tau-star", "--game", "quad_spurious", "--point", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "precondition");
    assert_eq!(err["exit_code"], 3);

    assert_eq!(taugda(&["tau-zero", "--game", "quad_stack", "--point", "0,0,0,0"]).status.code(), Some(3));
    assert_eq!(taugda(&["simulate", "--game", "quad_stack", "--x0", "1,2"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(taugda(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(taugda(&["classify", "--game", "missing"]).status.code(), Some(2));
    assert_eq!(taugda(&["sweep", "--game", "quad_stack", "--tau-grid", "1:2"]).status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_4() {
    let out = taugda(&["tau-star", "--game", "torus", "--out", "/nonexistent-dir/x/out.json"]);
    assert_eq!(out.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "io");
}

#[test]
fn divergence_is_recorded_not_raised() {
    let v = json(&taugda(&[
        "simulate", "--game", "quad_stack", "--x0", "1,1,1,1", "--gamma1", "5", "--tau", "5", "--steps", "100", "--format", "json",
    ]));
    assert_eq!(v["diverged"], true);
    assert_eq!(v["converged"], false);
}

#[test]
fn classify_and_csv_schema() {
    let out = taugda(&["classify", "--game", "poly_spurious", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=taugda.classify.v1"));
    assert!(lines.next().unwrap().starts_with("x,kind,"));
    assert_eq!(text.matches(",DNE,").count(), 2);
    assert_eq!(text.matches(",Spurious,").count(), 1);
}

#[test]
fn simulate_writes_csv_file_atomically() {
    let dir = std::env::temp_dir().join(format!("taugda-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.csv");
    let out = taugda(&[
        "simulate", "--game", "quad_stack", "--tau", "5", "--gamma1", "5e-4", "--x0", "5,4,3,2", "--stride", "1000",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# schema=taugda.trajectory.v1\nstep,x_0,x_1,x_2,x_3,grad_norm,distance\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!(last[6] < 1e-6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_round_trips_through_library_types() {
    let out = taugda(&["tau-zero", "--game", "quad_spurious", "--v", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let c: taugda::cli::TauZeroOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!((c.certificate.tau_zero - 6.25).abs() < 1e-9);
    assert!(c.certificate.verified_margin.iter().all(|m| *m > 0.0));

    let out = taugda(&["rate", "--game", "quad_stack", "--tau", "5", "--r0", "1"]);
    let r: taugda::cli::RateOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r.report.delta.is_infinite());
    assert!(r.report.iteration_bound.is_some());
}

#[test]
fn gan_reports_closed_form_agreement() {
    let out = taugda(&["gan", "--game", "dirac_gan", "--mu", "0.5", "--tau-grid", "0.1:10:7:log"]);
    assert_eq!(out.status.code(), Some(0));
    let g: taugda::cli::GanOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.kind, "DSE_only");
    assert!(g.realizable.passes);
    assert!(g.rows.iter().all(|r| r.stable && r.max_abs_diff.unwrap() < 1e-10));
    let out = taugda(&["gan", "--game", "quad_stack"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn roa_and_field_outputs() {
    let out = taugda(&["roa", "--game", "torus", "--tau", "5", "--gamma1", "0.04", "--grid=-pi:pi:4", "--steps", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema=taugda.roa.v1\n"));
    assert_eq!(text.lines().count(), 2 + 16);
    assert!(!text.lines().skip(2).any(|l| l.split(',').nth(3) == Some("-1")));

    let out = taugda(&["field", "--game", "poly_landscape", "--tau", "2", "--grid=-12:12:5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 25);
}

#[test]
fn sweep_csv_has_one_row_per_tau() {
    let out = taugda(&["sweep", "--game", "quad_stack", "--point", "0,0,0,0", "--tau-grid", "0.5:20:40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2 + 40);
}
