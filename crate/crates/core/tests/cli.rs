use std::process::{Command, Output};

fn ffpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffpl"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_streams_jsonl() {
    let o = ffpl(&[
        "enumerate",
        "--q",
        "2",
        "--D",
        "2",
        "--d",
        "1",
        "--exp",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|v| v["covol_exp"] == 1 && v["q"] == 2));
    let o = ffpl(&[
        "enumerate",
        "--q",
        "3",
        "--D",
        "2",
        "--d",
        "1",
        "--exp",
        "1",
        "--shard",
        "0/2",
        "--format",
        "count",
    ]);
    let a: u64 = stdout(&o).trim().parse().unwrap();
    let o = ffpl(&[
        "enumerate",
        "--q",
        "3",
        "--D",
        "2",
        "--d",
        "1",
        "--exp",
        "1",
        "--shard",
        "1/2",
        "--format",
        "count",
    ]);
    let b: u64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(a + b, 24);
}

#[test]
fn exit_codes() {
    let budget = ffpl(&[
        "enumerate",
        "--q",
        "2",
        "--D",
        "3",
        "--d",
        "1",
        "--exp",
        "4",
        "--budget",
        "100",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    let bad = ffpl(&[
        "enumerate",
        "--q",
        "6",
        "--D",
        "2",
        "--d",
        "1",
        "--exp",
        "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = ffpl(&["shape", "--matrix", "q=2; [[[0,1"]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = ffpl(&["nonsense"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(ffpl(&["--help"]).status.code(), Some(0));
}

#[test]
fn constants_are_fractions() {
    let o = ffpl(&["constants", "--q", "2", "--D", "3", "--d", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["c_I"], "4/189");
    assert_eq!(v["c1"], "4/7");
    let o = ffpl(&[
        "constants",
        "--q",
        "2",
        "--D",
        "2",
        "--d",
        "1",
        "--ideal",
        "[0,1]",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["index_gamma_I"], "3");
}

#[test]
fn lu_orth_shape() {
    let o = ffpl(&["lu", "--matrix", "q=2; [[[0,1],[1]],[[1],[]]]", "--d", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["level"], 1);
    assert_eq!(v["reassembles"], true);
    assert_eq!(
        v["u_minus"][1][0],
        serde_json::json!({"num": [1], "den": [0, 1]})
    );
    let o = ffpl(&["orth", "--matrix", "q=2; [[[0,1]],[[1]],[[1,1]]]"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(
        (v["d"].as_u64(), v["covol_exp"].as_i64()),
        (Some(2), Some(1))
    );
    let o = ffpl(&["shape", "--matrix", "q=2; [[[0,0,1]],[[1]],[[1]]]"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["shape"], "[0]");
    let o = ffpl(&["lu", "--matrix", "q=2; [[[0,1]],[[1]]]"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let stem_a = dir.path().join("a");
    let stem_b = dir.path().join("b");
    for stem in [&stem_a, &stem_b] {
        let o = ffpl(&[
            "experiment",
            "triple",
            "--q",
            "2",
            "--D",
            "3",
            "--d",
            "1",
            "--imax",
            "2",
            "--shards",
            "2",
            "--out",
            stem.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for ext in ["csv", "json"] {
        let a = std::fs::read(stem_a.with_extension(ext)).unwrap();
        let b = std::fs::read(stem_b.with_extension(ext)).unwrap();
        assert_eq!(a, b);
    }
    let csv = std::fs::read_to_string(stem_a.with_extension("csv")).unwrap();
    assert!(csv.starts_with("i,key,count,predicted_mass,empirical_mass,tv\n"));
}

#[test]
fn refused_report_is_header_only() {
    let o = ffpl(&[
        "experiment",
        "counting",
        "--q",
        "2",
        "--D",
        "3",
        "--d",
        "1",
        "--budget",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "i,key,count,predicted_mass,empirical_mass,tv\n");
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# counting at q=2\nq = 2\nD = 2\nd = 1\nimax = 2\nformat = csv\n",
    )
    .unwrap();
    let o = ffpl(&["experiment", "counting", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("2,total,24,3/2,3/2,"));
    // flags on the command line win
    let o = ffpl(&[
        "experiment",
        "counting",
        "--config",
        cfg.to_str().unwrap(),
        "--imax",
        "1",
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);
}
