use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const PIGOU: &str = r#"{"nodes": ["s", "t"],
 "edges": [{"id": "e1", "from": "s", "to": "t", "cost": {"type": "affine", "a": 0, "b": 1}},
           {"id": "e2", "from": "s", "to": "t", "cost": {"type": "affine", "a": 1, "b": 0}}],
 "commodities": [{"source": "s", "target": "t", "mass": 1}]}"#;

fn ucong(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucong")).args(args).env_remove("UC_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn solve_wcc_pigou() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "pigou.json", PIGOU);
    let out = ucong(&["solve", &spec, "--model", "wcc", "--r", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!((v["social_cost"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!((v["ratio_to_optimum"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["converged"], true);
}

#[test]
fn solve_wcr_pigou() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "pigou.json", PIGOU);
    let out = ucong(&["solve", &spec, "--model", "wcr", "--r", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!((v["loads"]["e2"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    assert!((v["social_cost"].as_f64().unwrap() - 0.84).abs() < 1e-9);
}

#[test]
fn poa_reports_four_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "pigou.json", PIGOU);
    let out = ucong(&["poa", &spec, "--model", "base", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["ratio"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6);
}

#[test]
fn malformed_json_is_an_input_error_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", "{\"nodes\": [\"s\",");
    let out = ucong(&["solve", &spec]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("byte offset"), "{}", stderr(&out));
}

#[test]
fn invalid_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", &PIGOU.replace(r#""to": "t", "cost": {"type": "affine", "a": 1"#, r#""to": "u", "cost": {"type": "affine", "a": 1"#));
    let out = ucong(&["solve", &spec]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("e2"), "{}", stderr(&out));
}

#[test]
fn wcr_rejects_heterogeneous_r() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "pigou.json", PIGOU);
    let out = ucong(&["solve", &spec, "--model", "wcr", "--rvec", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_grid() {
    let out = ucong(&["sweep", "--r-min", "1", "--r-max", "8", "--steps", "141"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,wcc_upper,wcc_pigou,wcr_pigou,empirical_cpoa"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 141);
    let two = rows.iter().find(|r| r[0] == "2").unwrap();
    assert_eq!(two[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(two[2].parse::<f64>().unwrap(), 1.0);
    assert_eq!(two[4], "");
}

#[test]
fn sampled_sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let base = ["sweep", "--r-min", "1", "--r-max", "3", "--steps", "5", "--sample", "--games", "5", "--seed", "7"];
    for (p, jobs) in [(&a, "1"), (&b, "1"), (&c, "3")] {
        let mut args = base.to_vec();
        args.extend(["--jobs", jobs, "--out", p.to_str().unwrap()]);
        assert_eq!(ucong(&args).status.code(), Some(0));
    }
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    assert_eq!(a, fs::read(c).unwrap());
}

#[test]
fn uc_seed_sets_the_default_seed() {
    let run = |seed: Option<&str>, flag: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ucong"));
        cmd.args(["sweep", "--r-min", "1", "--r-max", "1.5", "--steps", "2", "--sample", "--games", "3"]).args(flag);
        match seed {
            Some(s) => cmd.env("UC_SEED", s),
            None => cmd.env_remove("UC_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("11"), &[]), run(None, &["--seed", "11"]));
    assert_ne!(run(Some("11"), &[]), run(None, &[]));
    assert_eq!(run(Some("11"), &["--seed", "7"]), run(None, &[]));
}

#[test]
fn sweep_input_errors() {
    assert_eq!(ucong(&["sweep", "--r-min", "2", "--r-max", "2"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing").join("out.csv");
    let out = ucong(&["sweep", "--steps", "3", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cycle_demo_revisits_start() {
    let out = ucong(&["cycle-demo", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["start"], "(y,x,x)");
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    assert_eq!(steps[0]["type"], 1);
    assert_eq!(steps[5]["state"], "(y,x,x)");
}

#[test]
fn poisson_table_csv() {
    let out = ucong(&["poisson-table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,r,x1,t_over_r,x2,t_times_r");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("6,2.18"));
}

#[test]
fn check_only_cycle() {
    let out = ucong(&["check", "--only", "cycle"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("PASS  7 cycle"));
}

#[test]
fn corrupted_poisson_golden_fails_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let golden = write(dir.path(), "golden.csv", "t,r\n1,5.0\n2,3.6464040\n3,2.9403558\n4,2.5714977\n5,2.3411563\n6,2.1819154\n");
    let out = ucong(&["check", "--only", "poisson", "--poisson-golden", &golden]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL 11 poisson"));
    assert!(stderr(&out).contains("poisson"));
}

#[test]
fn unknown_check_is_an_input_error() {
    assert_eq!(ucong(&["check", "--only", "nope"]).status.code(), Some(1));
}
