use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfgrowth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&a)).unwrap()
}

#[test]
fn expand_fifty() {
    let v = json(&["expand", "--alpha", "0,50,1"]);
    assert_eq!(v["a0"], "7");
    assert_eq!(v["per"], serde_json::json!([14]));
    assert!(v["pre"].as_array().unwrap().is_empty());
}

#[test]
fn negative_alpha_argument() {
    let v = json(&["period", "--alpha", "-1,5,2"]);
    assert_eq!(v["period_len"], 1);
}

#[test]
fn pell_thirteen() {
    let v = json(&["pell", "--d", "13"]);
    assert_eq!(v["eps_norm"], -1);
    assert_eq!(v["neg_pell"], serde_json::json!(["18", "5"]));
}

#[test]
fn korder_closed_form_and_oracle() {
    for flag in [None, Some("--oracle")] {
        let mut a = vec!["korder", "--delta", "1,0,9,1", "--p", "3", "--n", "5"];
        a.extend(flag);
        assert_eq!(json(&a)["k"], 27);
    }
}

#[test]
fn korder_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    stdout(&["korder", "--delta", "1,0,4,1", "--p", "2", "--n", "4", "--csv", path.to_str().unwrap()]);
    let csv = std::fs::read_to_string(path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,n,k,k_over_pn_num,k_over_pn_den"));
    assert_eq!(lines.last(), Some("2,4,4,1,4"));
}

#[test]
fn sphere_and_degenerate_tables() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.csv");
    stdout(&["sphere", "--h", "6", "--csv", s.to_str().unwrap()]);
    let text = std::fs::read_to_string(&s).unwrap();
    assert!(text.starts_with("h,a,b,e\n"));
    assert_eq!(text.lines().count(), 13);
    let d = dir.path().join("d.csv");
    stdout(&["degenerate", "--d", "2", "--count", "2", "--csv", d.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&d).unwrap(), "j,n_j,k_j,period_len\n1,1,1,1\n2,5,7,1\n");
}

#[test]
fn crosscheck_agrees() {
    let v = json(&["crosscheck", "--q", "5,6,1/4"]);
    for row in v.as_array().unwrap() {
        assert_eq!(row["equal"], true, "{row}");
    }
    assert_eq!(v[0]["k_pred"], 3);
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("demo.cfg");
    std::fs::write(&cfg, "alpha = 0,2,1\nk = 2\nn_max = 6\npatterns = 1;2\n").unwrap();
    let mut outs = Vec::new();
    for (i, mode) in ["--sequential", "--json"].iter().enumerate() {
        let p = dir.path().join(format!("f{i}.csv"));
        stdout(&["sweep-freq", "--config", cfg.to_str().unwrap(), "--csv", p.to_str().unwrap(), mode]);
        outs.push(std::fs::read_to_string(p).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert!(outs[0].starts_with("n,h,period_len,truncated,freq_1,nu_1,err_1,freq_2,nu_2,err_2\n"));
    assert_eq!(outs[0].lines().count(), 8);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["expand", "--alpha", "0,4,1"]).status.code(), Some(2));
    assert_eq!(run(&["cylinder", "--word", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "--alpha", "0,31,1", "--max-steps", "2"]).status.code(), Some(3));
    assert_eq!(run(&["korder", "--delta", "1,1,0,1", "--p", "2", "--n", "3", "--budget", "1"]).status.code(), Some(3));
    assert_eq!(run(&["degenerate", "--d", "3"]).status.code(), Some(2));
}
