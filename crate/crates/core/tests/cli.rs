//! End-to-end runs of the `pccsched` binary.

use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pccsched")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_with_config_file_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(
        &cfg,
        "# small sweep\nn_devices = 10\nn_channels = 3\nslots = 200\nagent = greedy\n\
         systems = reactive, proactive\nlambdas = 0.3, 1.0\nseeds = 1, 2\neval_episodes = 2\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let o = bin(&["run", "--config", cfg.to_str().unwrap(), "--set", "queue_cap=20", "--quiet", "--out", out_dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let cells = fs::read_to_string(out_dir.join("cells.csv")).unwrap();
    let mut lines = cells.lines();
    assert_eq!(lines.next(), Some("system,lambda,seed,episode,throughput,prevented_unsafe,eb_blocks,aix,violations"));
    assert_eq!(lines.count(), 2 * 2 * 2 * 2);

    // The plotting side keys on this exact vocabulary.
    let agg = fs::read_to_string(out_dir.join("aggregate.csv")).unwrap();
    let mut lines = agg.lines();
    assert_eq!(lines.next(), Some("system,lambda,metric,mean,std,n"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 5);
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!(["reactive", "proactive"].contains(&r[0]));
        assert!(["throughput", "prevented_unsafe", "eb_blocks", "aix", "violations"].contains(&r[2]), "{r:?}");
        assert!(r[3].parse::<f64>().is_ok() && r[4].parse::<f64>().is_ok());
        assert_eq!(r[5], "4");
        if r[2] == "violations" {
            assert_eq!(r[3], "0");
        }
    }
}

#[test]
fn unknown_flag_fails_fast() {
    let o = bin(&["run", "--no-such-flag"]);
    assert!(!o.status.success());
    assert!(!stderr(&o).trim().is_empty());
}

#[test]
fn malformed_config_is_rejected_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "slots = 100\nbeta_mim = 3\n").unwrap();
    let out_dir = dir.path().join("out");
    let o = bin(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.contains("beta_mim") && err.contains('2'), "{err}");
    assert!(!out_dir.exists());

    let o = bin(&["run", "--set", "beta_min=9", "--out", out_dir.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!out_dir.exists());
}

#[test]
fn episode_trace_has_one_json_line_per_slot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let o = bin(&["episode", "--system", "proactive", "--lambda", "0.7", "--seed", "11", "--trace", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1000);
    assert_eq!(lines[0]["slot"], 0);
    assert_eq!(lines[999]["slot"], 999);
}

#[test]
fn gradcheck_subcommand_passes() {
    let o = bin(&["gradcheck"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
