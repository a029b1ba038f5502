use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critheight"))
        .args(args)
        .env("CRITHEIGHT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn height_of_pcf_point_is_zero() {
    let o = run(&["height", "--map", r#"{"d":2,"c":["2"]}"#, "--point", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"].as_f64(), Some(0.0));
}

#[test]
fn quadratic_height_runs() {
    let o = run(&["height", "--map", r#"{"lambda0":"1","w":"1"}"#, "--point", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn green_at_a_prime() {
    let o = run(&["green", "--map", r#"{"d":2,"c":["1/3"]}"#, "--point", "1/9", "--place", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"place\""));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["height", "--map", "{not json", "--point", "1"][..],
        &["height", "--map", r#"{"d":3,"c":["1"]}"#, "--point", "1"],
        &["verify", "per1", "--degrees", "9"],
        &["census", "--height-cap", "-1"],
        &["no-such-command"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_reports_are_reproducible() {
    let args = ["--samples", "12", "verify", "quad"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let last = text.lines().last().unwrap();
    let summary: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(summary["summary"]["rows"], 12);
    assert_eq!(summary["summary"]["failed"], 0);
}

#[test]
fn census_csv_header() {
    let o = run(&["census", "--den-cap", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(
        "lambda0,w,lambda_inf,h_lambda_inf,finite_orbit_critical_point,tail_len,cycle_len,truncated_flag"
    ));
}

#[test]
fn ff_check_nonconstant() {
    let o = run(&["ff-check", "--map", r#"{"c":[{"num":[0,1]},{"num":[1],"den":[0,1]}]}"#]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("escapers"));
}
