use std::fs;
use std::process::{Command, Output};

fn dynlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(o: &Output) -> Vec<String> {
    stdout(o).lines().skip(2).map(str::to_string).collect()
}

#[test]
fn run_single_opinion() {
    let o = dynlab(&["run", "--n", "1000", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(
        lines.next(),
        Some("trial,seed,rounds,winner,winner_valid,epochs,peak_invalid_fraction")
    );
    assert_eq!(lines.next(), Some("0,0,0,1,true,1:0,0"));
    assert_eq!(lines.next(), None);
}

#[test]
fn run_is_deterministic() {
    let args = [
        "run", "--n", "10000", "--k", "2", "--trials", "5", "--seed", "7",
    ];
    let (a, b) = (dynlab(&args), dynlab(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&a).len(), 5);
    let other = dynlab(&[
        "run", "--n", "10000", "--k", "2", "--trials", "5", "--seed", "8",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn exit_codes_are_distinct() {
    assert_eq!(
        dynlab(&["run", "--n", "10", "--k", "20"]).status.code(),
        Some(2)
    );
    assert_eq!(dynlab(&["run", "--k", "2"]).status.code(), Some(2));
    assert_eq!(
        dynlab(&["run", "--n", "10", "--k", "2", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynlab(&[
            "run",
            "--n",
            "100000",
            "--k",
            "10",
            "--max-rounds",
            "3",
            "--strict"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        dynlab(&["run", "--n", "100000", "--k", "10", "--max-rounds", "3"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        dynlab(&["verify", "--property", "p9"]).status.code(),
        Some(2)
    );
    let failing = [
        "verify",
        "--property",
        "p3",
        "--n",
        "80000",
        "--k",
        "80",
        "--delta",
        "0.01",
        "--trials",
        "100",
    ];
    assert_eq!(dynlab(&failing).status.code(), Some(4));
}

#[test]
fn nonconverged_rows_leave_fields_empty() {
    let o = dynlab(&["run", "--n", "100000", "--k", "10", "--max-rounds", "3"]);
    assert_eq!(data_rows(&o), vec!["0,0,,,false,1:3,0".to_string()]);
}

#[test]
fn adversary_run_reports_invalid_mass() {
    let o = dynlab(&[
        "run",
        "--n",
        "20000",
        "--k",
        "2",
        "--adversary",
        "invalid",
        "--epsilon",
        "1",
        "--trials",
        "3",
        "--seed",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for row in data_rows(&o) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[4], "true");
        assert!(f[6].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn json_format() {
    let o = dynlab(&[
        "run", "--n", "500", "--k", "2", "--trials", "2", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["trials"].as_array().unwrap().len(), 2);
    assert_eq!(
        dynlab(&["run", "--n", "500", "--k", "2", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults\nn = 2000\nk = 3\ntrials = 2\nseed = 5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = dynlab(&["--config", cfg, "run"]);
    let from_flags = dynlab(&[
        "run", "--n", "2000", "--k", "3", "--trials", "2", "--seed", "5",
    ]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);
    // flags win over the file
    let overridden = dynlab(&["run", "--config", cfg, "--seed", "6"]);
    let direct = dynlab(&[
        "run", "--n", "2000", "--k", "3", "--trials", "2", "--seed", "6",
    ]);
    assert_eq!(overridden.stdout, direct.stdout);

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "n = 10\ncolour = blue\n").unwrap();
    let o = dynlab(&["run", "--config", bad.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn sweep_and_replay() {
    let o = dynlab(&[
        "sweep",
        "--n-list",
        "1000,2000,4000,8000",
        "--k-list",
        "2",
        "--trials",
        "8",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text
        .starts_with("# schema=1\nn,k,trials,converged,median_rounds,mean_rounds,stddev_rounds\n"));
    assert!(text.contains("# fit predictor=k*ln(n)\n"));
    for key in ["slope,", "intercept,", "r_squared,"] {
        assert!(text.lines().any(|l| l.starts_with(key)));
    }
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("sweep.csv");
    fs::write(&saved, &o.stdout).unwrap();
    let replay = dynlab(&["sweep", "--replay", saved.to_str().unwrap()]);
    assert_eq!(replay.stdout, o.stdout);
}

#[test]
fn degenerate_sweeps_are_usage_errors() {
    assert_eq!(
        dynlab(&["sweep", "--n-list", "1000", "--k-list", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dynlab(&["sweep", "--n-list", "1000,2000", "--k-list", "2"])
            .status
            .code(),
        Some(2)
    );
    // four points, one predictor value
    assert_eq!(
        dynlab(&["sweep", "--n-list", "1000,1000,1000,1000", "--k-list", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_quick_mode_is_flagged() {
    let o = dynlab(&["verify", "--property", "all", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["quick"], true);
    assert_eq!(v["passed"], true);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert!(reports
        .iter()
        .all(|r| r["quick"] == true && r["checks"].as_array().is_some_and(|c| !c.is_empty())));
    assert!(v.get("wall_clock_seconds").is_none());
    let timed = dynlab(&["verify", "--property", "p2", "--quick", "--timing"]);
    let t: serde_json::Value = serde_json::from_str(&stdout(&timed)).unwrap();
    assert!(t["wall_clock_seconds"].as_f64().is_some());
}

#[test]
fn verify_p5_rejects_zero_gap() {
    assert_eq!(
        dynlab(&["verify", "--property", "p5", "--gap", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn trace_rows() {
    let o = dynlab(&[
        "trace",
        "--n",
        "300",
        "--k",
        "3",
        "--initial",
        "counts:0,300,0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = dynlab(&[
        "trace", "--n", "20000", "--k", "2", "--track", "1,2", "--seed", "4", "--delta", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(rows.len() > 2);
    for key in [
        "counts",
        "sigma2",
        "p_max",
        "classes",
        "kappa",
        "epoch",
        "phase",
        "end_of_time",
        "tracked",
        "corruption",
    ] {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
    let t = rows[1]["tracked"].as_array().unwrap();
    assert_eq!(t[0]["clear"], t[1]["clear"]);
    assert_ne!(t[0]["light_charge"], t[1]["light_charge"]);

    let weak = dynlab(&[
        "trace",
        "--n",
        "1000",
        "--k",
        "3",
        "--initial",
        "counts:50,900,50",
        "--track",
        "1",
    ]);
    assert_eq!(weak.status.code(), Some(2));
}
