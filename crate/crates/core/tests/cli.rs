use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn cocaco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocaco"))
        .args(args)
        .env_remove("COCACO_CONFIG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn decide_worked_example_matches_hand_values() {
    let o = cocaco(&["decide", "--config", &config("decide_worked.toml")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "location,T_LtoE_s,T_LtoC_s,hit\nCloud,2.5001,0.7501,0\n"
    );
}

#[test]
fn decide_with_cached_result_stays_at_edge() {
    let o = cocaco(&["decide", "--config", &config("decide_hit.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "location,T_LtoE_s,T_LtoC_s,hit\nEdge,0.5001,0.7501,1\n"
    );
}

#[test]
fn missing_config_is_io_error() {
    let o = cocaco(&["decide", "--config", "/nonexistent/nope.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_field_is_validation_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(configs().join("decide_worked.toml")).unwrap();
    let broken = text.replace("noise_power_w = 1.0", "");
    let path = dir.path().join("broken.toml");
    fs::write(&path, broken).unwrap();
    let o = cocaco(&["decide", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("noise_power_w"), "{}", stderr(&o));
}

#[test]
fn decide_without_task_is_validation_error() {
    let o = cocaco(&["decide", "--config", &config("run_single.toml")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_single_task_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = cocaco(&[
        "run",
        "--config",
        &config("run_single.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let rows: Vec<_> = data_rows(&csv)
        .into_iter()
        .filter(|r| r[0].parse::<u64>().is_ok())
        .collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "Cloud");
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = cocaco(&[
            "run",
            "--config",
            &config("mixed_event.toml"),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

fn mean_from_csv(csv: &str) -> f64 {
    let line = csv.lines().find(|l| l.starts_with("mean_delay_s")).unwrap();
    line.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn event_and_analytic_single_user_agree() {
    let a = cocaco(&["run", "--config", &config("run_single.toml")]);
    let e = cocaco(&["run", "--config", &config("run_single_event.toml")]);
    let (ma, me) = (mean_from_csv(&stdout(&a)), mean_from_csv(&stdout(&e)));
    assert!((ma - me).abs() / ma < 1e-9);
}

#[test]
fn unwritable_output_is_exit_4() {
    let o = cocaco(&[
        "run",
        "--config",
        &config("run_single.toml"),
        "--out",
        "/nonexistent-dir/x/run.csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn trace_cache_writes_sibling_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = cocaco(&[
        "run",
        "--config",
        &config("mixed_event.toml"),
        "--out",
        out.to_str().unwrap(),
        "--trace-cache",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let trace = fs::read_to_string(dir.path().join("run.trace.csv")).unwrap();
    assert!(trace.starts_with("tick,best_score,hit,matched_id\n"));
    assert_eq!(trace.lines().count(), 1 + 15);
    for row in data_rows(&trace) {
        let hit = row[2] == "1";
        assert_eq!(hit, !row[3].is_empty());
    }
}

#[test]
fn sweeps_have_expected_lengths_and_dominance() {
    for (exp, cfg, n) in [("fig3", "fig3.toml", 10), ("fig4", "fig4.toml", 7)] {
        let o = cocaco(&["sweep", "--experiment", exp, "--config", &config(cfg)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let csv = stdout(&o);
        assert!(csv.starts_with("x,cocaco_mean_s,traditional_mean_s\n"));
        let rows = data_rows(&csv);
        assert_eq!(rows.len(), n);
        for r in rows {
            let (c, t): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
            assert!(c <= t, "{exp}: {r:?}");
        }
    }
}

#[test]
fn sweep_plot_data_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let o = cocaco(&[
        "sweep",
        "--experiment",
        "fig4",
        "--config",
        &config("fig4.toml"),
        "--out",
        out.to_str().unwrap(),
        "--plot-data",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dat = fs::read_to_string(dir.path().join("fig4.dat")).unwrap();
    let mut lines = dat.lines();
    assert_eq!(
        lines.next(),
        Some("# n_users cocaco_mean_s traditional_mean_s")
    );
    let xs: Vec<&str> = lines
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(xs, ["5", "10", "15", "20", "25", "30", "35"]);
}

#[test]
fn unknown_experiment_is_exit_3() {
    let o = cocaco(&[
        "sweep",
        "--experiment",
        "fig9",
        "--config",
        &config("fig3.toml"),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("fig9"));
}

#[test]
fn relative_config_resolved_from_env_dir() {
    let o = Command::new(env!("CARGO_BIN_EXE_cocaco"))
        .args(["decide", "--config", "decide_worked.toml"])
        .env("COCACO_CONFIG_DIR", configs())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn shipped_configs_round_trip() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = cocaco::config::load(&path).unwrap();
        let again = cocaco::config::ConfigFile::parse(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg, "{}", path.display());
    }
}
