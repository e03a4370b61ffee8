use std::process::{Command, Output};

fn szego(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const EPS: &[&str] = &[
    "--scheme", "eps", "--tau1", "0.3,1", "--tau2", "0.1,1.2", "--alpha1", "0.2", "--beta1", "0.35", "--alpha2", "0.1",
    "--beta2", "0.6",
];

fn with(base: &[&'static str], extra: &[&'static str]) -> Vec<&'static str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn sphere_eval_matches_the_oracle_column() {
    let o = szego(&[
        "eval", "--scheme", "rho-sphere", "--tau", "0.1,0.5", "--alpha1", "0.2", "--beta1", "0.3", "--points",
        "1:0.1,0.5,1:-0.2,2.0;1:0.3,1.0,1:0.0,4.0", "--oracle",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x_which,x_re,x_im,y_which,y_re,y_im,s_re,s_im,oracle_re,oracle_im,abs_diff");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let diff: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff < 1e-9, "{row}");
    }
}

#[test]
fn eval_is_deterministic_and_json_merges_pairs() {
    let args = with(&["eval"], &with(EPS, &["--eps", "0.001,0", "--points", "1:0.1,0.5,2:0.2,0.3", "--format", "json"]));
    let a = szego(&args);
    let b = szego(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["schema"], "szego-eval/1");
    let row = &doc["rows"][0];
    assert_eq!(row["y_which"], 2);
    assert_eq!(row["s"].as_array().unwrap().len(), 2);
}

#[test]
fn det_reports_agree() {
    let o = szego(&with(&["det"], &with(EPS, &["--eps", "0.001,0"])));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let values: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(values.len(), 3);
    for v in &values[1..] {
        assert!((v.0 - values[0].0).abs() < 1e-12 && (v.1 - values[0].1).abs() < 1e-12);
    }
}

#[test]
fn schema_lists_every_table() {
    let o = szego(&["--schema"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for s in ["szego-eval/1", "szego-det/1", "szego-scan/1"] {
        assert!(text.contains(s), "{s}");
    }
}

#[test]
fn verify_reports_pass_and_fail() {
    let pass = szego(&["verify", "skew"]);
    assert_eq!(pass.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(doc["pass"], true);

    let fail = szego(&["verify", "integral-eq", "--order", "1", "--quad", "8"]);
    assert_eq!(fail.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(doc["pass"], false);
}

#[test]
fn bad_input_exits_with_two() {
    let cases: Vec<Vec<&str>> = vec![
        with(&["eval"], &with(EPS, &["--eps", "5,0", "--points", "1:0.1,0.5,2:0.2,0.3"])),
        with(&["eval"], &with(EPS, &["--eps", "0.001,0", "--points", "1:0.1"])),
        vec!["eval", "--scheme", "rho-sphere", "--tau", "0.1,0.5", "--theta1=2,0", "--alpha1", "0.2", "--points", "1:0.1,0.5,1:0.2,1"],
        vec!["verify", "bogus"],
    ];
    for args in cases {
        let o = szego(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn scan_over_epsilon_reports_a_slope() {
    let o = szego(&with(
        &["scan"],
        &with(EPS, &["--eps", "0.001,0.4", "--points", "1:0.1,0.5,1:0.4,0.6", "--axis", "epsilon", "--values", "1e-4,1e-3,1e-2"]),
    ));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("value,pair,s_re,s_im,delta,rate,slope"));
    assert_eq!(text.lines().count(), 4);
}
