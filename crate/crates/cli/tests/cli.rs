mod common;

use std::fs;

use common::{run, s, write_dataset};
use dendritic_cli::metrics::{read_csv, SCHEMA_LINE};
use dendritic_core::Checkpoint;

#[test]
fn help_succeeds_and_bad_usage_fails() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["train", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["train", "--set", "network.alpha=-3", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[network]\nbogus = 1\n").unwrap();
    assert_eq!(run(&["train", "--config", s(&cfg)]).status.code(), Some(1));
}

#[test]
fn missing_data_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nothing");
    let out = run(&["train", "--data-dir", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_checkpoint_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let bad = dir.path().join("bad.sdw");
    fs::write(&bad, b"not a checkpoint").unwrap();
    assert_eq!(run(&["inspect", s(&bad)]).status.code(), Some(3));
    let out = dir.path().join("out");
    assert_eq!(
        run(&["eval", "--checkpoint", s(&bad), "--data-dir", s(&data), "--out", s(&out)]).status.code(),
        Some(3)
    );
    let wrong_shape = dir.path().join("shape.sdw");
    Checkpoint::zeros(10, 10).save(&wrong_shape).unwrap();
    assert_eq!(
        run(&["eval", "--checkpoint", s(&wrong_shape), "--data-dir", s(&data), "--out", s(&out)]).status.code(),
        Some(3)
    );
}

#[test]
fn single_sample_run_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let out = dir.path().join("run");
    let o = run(&["train", "--train-count", "1", "--test-count", "2", "--data-dir", s(&data), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("train_samples.csv")).unwrap();
    assert_eq!(text.lines().next(), Some(SCHEMA_LINE));
    let (header, rows) = read_csv(&out.join("train_samples.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(header.len(), rows[0].len());
    assert!(header.iter().any(|h| h == "count_9"));
    let (_, eval_rows) = read_csv(&out.join("eval_samples.csv")).unwrap();
    assert_eq!(eval_rows.len(), 2);
    for f in ["final.sdw", "initial.sdw", "config.toml", "train_epochs.csv", "confusion.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn identical_seeds_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let train = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = run(&["train", "--seed", seed, "--no-eval", "--data-dir", s(&data), "--out", s(&out)]);
        assert!(o.status.success());
        out
    };
    let (a, b, c) = (train("a", "5"), train("b", "5"), train("c", "6"));
    for f in ["train_samples.csv", "train_epochs.csv", "final.sdw", "initial.sdw"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("final.sdw")).unwrap(), fs::read(c.join("final.sdw")).unwrap());
}

#[test]
fn silent_teacher_leaves_weights_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let out = dir.path().join("run");
    let o = run(&[
        "train",
        "--no-eval",
        "--data-dir",
        s(&data),
        "--out",
        s(&out),
        "--set",
        "encoding.teach_rate_pos=0",
        "--set",
        "encoding.teach_rate_neg=0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(out.join("initial.sdw")).unwrap(), fs::read(out.join("final.sdw")).unwrap());
}

#[test]
fn eval_leaves_checkpoint_and_results_stable() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let train_out = dir.path().join("train");
    assert!(run(&["train", "--no-eval", "--data-dir", s(&data), "--out", s(&train_out)]).status.success());
    let ckpt = train_out.join("final.sdw");
    let before = fs::read(&ckpt).unwrap();
    let eval = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&["eval", "--checkpoint", s(&ckpt), "--data-dir", s(&data), "--out", s(&out)]);
        assert!(o.status.success());
        fs::read(out.join("eval_samples.csv")).unwrap()
    };
    assert_eq!(eval("e1"), eval("e2"));
    assert_eq!(fs::read(&ckpt).unwrap(), before);
}

#[test]
fn inspect_reports_shape_and_writes_maps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.sdw");
    Checkpoint::zeros(784, 10).save(&path).unwrap();
    let map = dir.path().join("map.csv");
    let o = run(&["inspect", s(&path), "--map", s(&map)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("784 inputs x 10 outputs"));
    let (header, rows) = read_csv(&map).unwrap();
    assert_eq!(header.len(), 30);
    assert_eq!(rows.len(), 280);
}

#[test]
fn demo_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["demo-fig3", "--out", s(dir.path())]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&dir.path().join("fig3_trace.csv")).unwrap();
    assert_eq!(header, ["t", "i_sensory", "i_teach", "w_exc_level", "w_inh_level"]);
    assert_eq!(rows.len(), 600);
}
