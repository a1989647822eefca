use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const HQF: &str = env!("CARGO_BIN_EXE_hqf");

fn hqf(dir: &Path, args: &[&str]) -> Output {
    Command::new(HQF)
        .args(args)
        .current_dir(dir)
        .env_remove("HQF_OUTPUT_ROOT")
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// A small synthetic corpus and a config sized to train in well under a
/// second per fold.
fn fixture(subjects: usize, variants: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = hqf(
        dir.path(),
        &[
            "synth",
            "--out",
            "data",
            "--subjects",
            &subjects.to_string(),
            "--duration",
            "160",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    write_config(dir.path(), "exp.toml", variants, 1);
    dir
}

fn write_config(dir: &Path, name: &str, variants: &str, epochs: usize) {
    std::fs::write(
        dir.join(name),
        format!(
            "manifest = \"data/manifest.csv\"\n\
             variants = [{variants}]\n\
             [model]\nwindow = 30\nhorizons = [5, 10, 20]\nhidden_size = 6\nn_qubits = 2\n\
             depth = 1\nepochs = {epochs}\nbatch_size = 32\nstride = 5\n"
        ),
    )
    .unwrap();
}

fn out_dir(dir: &Path) -> PathBuf {
    dir.join("runs/exp")
}

fn checkpoints(dir: &Path) -> usize {
    fn walk(p: &Path, n: &mut usize) {
        for e in std::fs::read_dir(p).into_iter().flatten().flatten() {
            let path = e.path();
            if path.is_dir() {
                walk(&path, n);
            } else if path.file_name().is_some_and(|f| f == "model.ckpt") {
                *n += 1;
            }
        }
    }
    let mut n = 0;
    walk(&out_dir(dir), &mut n);
    n
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(str::to_string)
        .collect()
}

#[test]
fn ingest_reports_every_subject() {
    let dir = tempfile::tempdir().unwrap();
    let o = hqf(
        dir.path(),
        &[
            "synth",
            "--out",
            "data",
            "--subjects",
            "53",
            "--duration",
            "320",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = hqf(
        dir.path(),
        &[
            "ingest",
            "--manifest",
            "data/manifest.csv",
            "--output",
            "report.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["subjects"].as_array().unwrap().len(), 53);
    assert!(report["errors"].as_array().unwrap().is_empty());
    assert_eq!(report["subjects"][0]["duration_s"], 320);
}

#[test]
fn ingest_names_a_missing_file() {
    let dir = fixture(2, "\"hybrid\"");
    std::fs::write(
        dir.path().join("data/bad.csv"),
        "subject_id,path\n01,subject_01.csv\n99,nowhere.csv\n",
    )
    .unwrap();
    let o = hqf(dir.path(), &["ingest", "--manifest", "data/bad.csv"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("nowhere.csv"), "{}", stderr(&o));
}

#[test]
fn ingest_rejects_an_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "subject_id,path\n").unwrap();
    let o = hqf(dir.path(), &["ingest", "--manifest", "m.csv"]);
    assert_ne!(code(&o), 0);
    assert!(stderr(&o).contains("no subjects"));
}

#[test]
fn train_writes_one_checkpoint_then_skips() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\", \"lstm\"");
    let o = hqf(
        dir.path(),
        &[
            "train",
            "--config",
            "exp.toml",
            "--folds",
            "1",
            "--variant",
            "hybrid",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(checkpoints(dir.path()), 1);
    assert!(out_dir(dir.path())
        .join("hybrid/fold_1/model.ckpt")
        .is_file());
    assert!(out_dir(dir.path()).join("hybrid/fold_1/loss.csv").is_file());
    let before = std::fs::read(out_dir(dir.path()).join("hybrid/fold_1/model.ckpt")).unwrap();

    let o = hqf(
        dir.path(),
        &[
            "train",
            "--config",
            "exp.toml",
            "--folds",
            "1",
            "--variant",
            "hybrid",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("skipped"), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(out_dir(dir.path()).join("hybrid/fold_1/model.ckpt")).unwrap(),
        before
    );
}

#[test]
fn train_covers_the_cartesian_product() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\", \"lstm\"");
    let o = hqf(
        dir.path(),
        &[
            "train",
            "--config",
            "exp.toml",
            "--folds",
            "1-3",
            "--variant",
            "hybrid,gru_only,lstm",
            "--jobs",
            "2",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(checkpoints(dir.path()), 9);
}

#[test]
fn training_is_deterministic_across_job_counts() {
    let a = fixture(3, "\"hybrid\"");
    let b = fixture(3, "\"hybrid\"");
    assert_eq!(
        code(&hqf(
            a.path(),
            &["train", "--config", "exp.toml", "--jobs", "1"]
        )),
        0
    );
    assert_eq!(
        code(&hqf(
            b.path(),
            &["train", "--config", "exp.toml", "--jobs", "3"]
        )),
        0
    );
    for k in 1..=3 {
        let rel = format!("hybrid/fold_{k}/model.ckpt");
        assert_eq!(
            std::fs::read(out_dir(a.path()).join(&rel)).unwrap(),
            std::fs::read(out_dir(b.path()).join(&rel)).unwrap()
        );
    }
}

#[test]
fn single_variant_wins_everything() {
    let dir = fixture(3, "\"hybrid\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    let o = hqf(dir.path(), &["evaluate", "--config", "exp.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        data_rows(&out_dir(dir.path()).join("reports/avg_wins.csv")),
        vec!["hybrid,100"]
    );
}

#[test]
fn evaluate_is_byte_stable_and_sized() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    let reports = out_dir(dir.path()).join("reports");
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    let first: Vec<Vec<u8>> = [
        "metrics.csv",
        "metrics_per_subject.csv",
        "summary.csv",
        "avg_wins.csv",
    ]
    .iter()
    .map(|f| std::fs::read(reports.join(f)).unwrap())
    .collect();
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    for (i, f) in [
        "metrics.csv",
        "metrics_per_subject.csv",
        "summary.csv",
        "avg_wins.csv",
    ]
    .iter()
    .enumerate()
    {
        assert_eq!(
            std::fs::read(reports.join(f)).unwrap(),
            first[i],
            "{f} changed"
        );
    }

    let metrics = std::fs::read_to_string(reports.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("# config_hash="));
    assert_eq!(data_rows(&reports.join("metrics.csv")).len(), 2 * 4 * 3);
    let wins: f64 = data_rows(&reports.join("avg_wins.csv"))
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((wins - 100.0).abs() < 1e-9);
}

#[test]
fn evaluate_lists_missing_checkpoints() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\"");
    hqf(
        dir.path(),
        &[
            "train",
            "--config",
            "exp.toml",
            "--folds",
            "1",
            "--variant",
            "hybrid",
        ],
    );
    let o = hqf(dir.path(), &["evaluate", "--config", "exp.toml"]);
    assert_eq!(code(&o), 5);
    let err = stderr(&o);
    assert!(
        err.contains("gru_only/fold_1") && err.contains("hybrid/fold_3"),
        "{err}"
    );
}

#[test]
fn checkpoints_from_another_config_are_refused() {
    let dir = fixture(2, "\"hybrid\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    write_config(dir.path(), "exp.toml", "\"hybrid\"", 2);
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        5
    );
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        2
    );
}

#[test]
fn ablation_series_match_clean_evaluation_at_level_zero() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(
            dir.path(),
            &["ablate", "--config", "exp.toml", "--kind", "noise"]
        )),
        0
    );
    assert_eq!(
        code(&hqf(
            dir.path(),
            &["ablate", "--config", "exp.toml", "--kind", "missing"]
        )),
        0
    );
    let reports = out_dir(dir.path()).join("reports");

    let noise = data_rows(&reports.join("robustness_noise.csv"));
    assert_eq!(noise.len(), 3 * 2 * 2);
    let missing = data_rows(&reports.join("robustness_missing.csv"));
    let levels: std::collections::BTreeSet<&str> = missing
        .iter()
        .map(|r| r.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(
        levels.into_iter().collect::<Vec<_>>(),
        vec!["0", "0.1", "0.3"]
    );

    // summary rows: model,view,metric,n,mean,std; robustness rows:
    // model,kind,level,metric,n,mean,std.
    let summary = data_rows(&reports.join("summary.csv"));
    for model in ["hybrid", "gru_only"] {
        for metric in ["mae", "rmse"] {
            let clean = summary
                .iter()
                .find(|r| r.starts_with(&format!("{model},macro,{metric},")))
                .unwrap();
            let clean: Vec<&str> = clean.split(',').collect();
            for rows in [&noise, &missing] {
                let zero = rows
                    .iter()
                    .find(|r| r.starts_with(model) && r.contains(&format!(",0,macro_{metric},")))
                    .unwrap();
                let zero: Vec<&str> = zero.split(',').collect();
                assert_eq!(&zero[4..], &clean[3..], "{model} {metric}");
            }
        }
    }
}

#[test]
fn ranking_needs_two_models() {
    let dir = fixture(2, "\"hybrid\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    assert_eq!(code(&hqf(dir.path(), &["rank", "--config", "exp.toml"])), 2);
}

#[test]
fn identical_models_rank_at_three_quarters() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    let reports = out_dir(dir.path()).join("reports");

    // Give gru_only exactly hybrid's errors.
    let path = reports.join("metrics_per_subject.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().take(2).map(str::to_string).collect();
    for row in text.lines().skip(2).filter(|r| r.starts_with("hybrid,")) {
        lines.push(row.to_string());
        lines.push(row.replacen("hybrid", "gru_only", 1));
    }
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = hqf(dir.path(), &["rank", "--config", "exp.toml"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = data_rows(&reports.join("ranking.csv"));
    assert_eq!(rows.len(), 2 * (4 + 3));
    for r in rows {
        assert!(r.ends_with(",0.75"), "{r}");
    }
}

#[test]
fn ranking_scores_stay_in_unit_interval() {
    let dir = fixture(3, "\"hybrid\", \"gru_only\", \"lstm\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    assert_eq!(code(&hqf(dir.path(), &["rank", "--config", "exp.toml"])), 0);
    for r in data_rows(&out_dir(dir.path()).join("reports/ranking.csv")) {
        let s: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!((1.0 / 3.0 - 1e-12..=1.0).contains(&s), "{r}");
    }
}

#[test]
fn rank_refuses_tables_from_another_config() {
    let dir = fixture(2, "\"hybrid\", \"gru_only\"");
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "exp.toml"])),
        0
    );
    assert_eq!(
        code(&hqf(dir.path(), &["evaluate", "--config", "exp.toml"])),
        0
    );
    write_config(dir.path(), "exp.toml", "\"hybrid\", \"gru_only\"", 3);
    assert_eq!(code(&hqf(dir.path(), &["rank", "--config", "exp.toml"])), 5);
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = fixture(2, "\"hybrid\"");
    let root = dir.path().join("elsewhere");
    let o = Command::new(HQF)
        .args(["train", "--config", "exp.toml"])
        .current_dir(dir.path())
        .env("HQF_OUTPUT_ROOT", &root)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(root.join("exp/hybrid/fold_1/model.ckpt").is_file());
}

#[test]
fn configuration_errors_exit_with_code_two() {
    let dir = fixture(2, "\"hybrid\"");
    std::fs::write(
        dir.path().join("bad.toml"),
        "manifest = \"data/manifest.csv\"\nvariants = []\n",
    )
    .unwrap();
    assert_eq!(
        code(&hqf(dir.path(), &["train", "--config", "bad.toml"])),
        2
    );
    assert_eq!(
        code(&hqf(
            dir.path(),
            &["train", "--config", "exp.toml", "--folds", "7"]
        )),
        2
    );
    assert_eq!(
        code(&hqf(
            dir.path(),
            &["train", "--config", "exp.toml", "--variant", "lstm"]
        )),
        2
    );
}

#[test]
fn a_diverging_fold_fails_the_run_but_not_the_others() {
    let dir = fixture(2, "\"hybrid\", \"gru_only\"");
    let mut text = std::fs::read_to_string(dir.path().join("exp.toml")).unwrap();
    text.push_str("[models.gru_only]\nlearning_rate = 1e300\nepochs = 3\n");
    std::fs::write(dir.path().join("exp.toml"), text).unwrap();
    let o = hqf(dir.path(), &["train", "--config", "exp.toml"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(out_dir(dir.path())
        .join("hybrid/fold_2/model.ckpt")
        .is_file());
    assert!(!out_dir(dir.path())
        .join("gru_only/fold_1/model.ckpt")
        .exists());
}
