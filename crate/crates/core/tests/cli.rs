//! End-to-end checks of the `abc` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use abcreg::io::read_table;

const GAUSSIAN_RUN: &str = r#"
model.name = "gaussian"
model.params = [0.3]
model.n = 100
kernel.family = "gaussian"
kernel.bandwidth = "fixed"
kernel.epsilon = 0.3
sampler.N = 5000
sampler.mode = "bernoulli"
regression.enabled = true
"#;

const SMALL_STUDY: &str = r#"
model.n = 100
study.n_values = [100]
study.c_values = [1.0, 2.0]
study.datasets = 3
study.replicates = 2
study.pool_size = 2000
study.targets = ["RE_sigma:0.2", "RE_mu:0.05"]
study.q_grid = [0.5, 0.2, 0.05, 0.01]
gold.proposals = 20000
gold.accept_proportion = 0.005
gold.pilot = 1000
gold.refine_rounds = 1
"#;

fn abc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run_with(dir: &Path, config: &str, sub: &str, out: &str, extra: &[&str]) -> Output {
    let cfg = write_config(dir, config);
    let out = dir.join(out);
    let mut args = vec![
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    abc(&args)
}

fn column(cols: &[String], name: &str) -> usize {
    cols.iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn summary_value(dir: &Path, quantity: &str, method: &str) -> f64 {
    let (_, rows) = read_table(&dir.join("summary.csv")).unwrap();
    rows.iter()
        .find(|r| r[0] == quantity && r[1] == method)
        .unwrap_or_else(|| panic!("{quantity}/{method} missing"))[3]
        .parse()
        .unwrap()
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files_under(&path));
        } else {
            out.push(path);
        }
    }
    out
}

fn assert_headers(dir: &Path) {
    let files = files_under(dir);
    assert!(!files.is_empty());
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        assert!(
            text.starts_with("# abcreg "),
            "{} lacks a header",
            f.display()
        );
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with(dir.path(), "model.colour = 1\n", "run", "o", &[]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run_with(dir.path(), "kernel.family = \"cosine\"\n", "run", "o", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = abc(&["run", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_acceptances_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GAUSSIAN_RUN
        .replace(
            "kernel.family = \"gaussian\"",
            "kernel.family = \"uniform\"",
        )
        .replace("kernel.epsilon = 0.3", "kernel.epsilon = 1e-12");
    let out = run_with(dir.path(), &cfg, "run", "o", &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn run_is_byte_identical_across_reruns_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    for (out, threads) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let o = run_with(
            dir.path(),
            GAUSSIAN_RUN,
            "run",
            out,
            &["--seed", "7", "--threads", threads],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["draws.csv", "summary.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        assert_eq!(
            a,
            fs::read(dir.path().join("b").join(file)).unwrap(),
            "{file}"
        );
        assert_eq!(
            a,
            fs::read(dir.path().join("c").join(file)).unwrap(),
            "{file}"
        );
    }
    let o = run_with(dir.path(), GAUSSIAN_RUN, "run", "d", &["--seed", "8"]);
    assert!(o.status.success());
    assert_ne!(
        fs::read(dir.path().join("a/draws.csv")).unwrap(),
        fs::read(dir.path().join("d/draws.csv")).unwrap()
    );
}

#[test]
fn summary_agrees_with_draws() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(dir.path(), GAUSSIAN_RUN, "run", "o", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("o");
    let (cols, rows) = read_table(&out.join("draws.csv")).unwrap();
    assert_eq!(rows.len(), 5000);
    let (acc, theta, star) = (
        column(&cols, "accepted"),
        column(&cols, "theta_1"),
        column(&cols, "theta_star_1"),
    );
    let accepted: Vec<&Vec<String>> = rows.iter().filter(|r| r[acc] == "1").collect();
    let mean = |k: usize| {
        accepted
            .iter()
            .map(|r| r[k].parse::<f64>().unwrap())
            .sum::<f64>()
            / accepted.len() as f64
    };
    assert!((mean(theta) - summary_value(&out, "mean", "raw")).abs() < 1e-12);
    assert!((mean(star) - summary_value(&out, "mean", "adjusted")).abs() < 1e-12);
    assert_eq!(
        summary_value(&out, "n_accepted", "") as usize,
        accepted.len()
    );
    assert!(rows
        .iter()
        .filter(|r| r[acc] == "0")
        .all(|r| r[star] == "NA"));
    assert_headers(&out);
}

#[test]
fn adjusted_columns_only_with_regression() {
    let dir = tempfile::tempdir().unwrap();
    let off = GAUSSIAN_RUN.replace("regression.enabled = true", "regression.enabled = false");
    let o = run_with(dir.path(), &off, "run", "off", &[]);
    assert!(o.status.success());
    let (cols, _) = read_table(&dir.path().join("off/draws.csv")).unwrap();
    assert!(!cols.iter().any(|c| c.starts_with("theta_star")));
    let (_, rows) = read_table(&dir.path().join("off/summary.csv")).unwrap();
    assert!(!rows.iter().any(|r| r[1] == "adjusted"));

    let o = run_with(dir.path(), GAUSSIAN_RUN, "run", "on", &[]);
    assert!(o.status.success());
    let (cols, _) = read_table(&dir.path().join("on/draws.csv")).unwrap();
    assert!(cols.iter().any(|c| c == "theta_star_1"));
}

#[test]
fn simulate_writes_headed_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(
        dir.path(),
        "model.n = 50\nstudy.datasets = 4\n",
        "simulate",
        "o",
        &["--seed", "3"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("o");
    let (_, manifest) = read_table(&out.join("manifest.csv")).unwrap();
    assert_eq!(manifest.len(), 4);
    for row in &manifest {
        let data = abcreg::io::read_dataset(&out.join(&row[1])).unwrap();
        assert_eq!(data.len(), 50);
        let (_, _, seed) = abcreg::io::read_header(&out.join(&row[1])).unwrap();
        assert_eq!(seed, 3);
    }
    assert_headers(&out);
}

fn type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[test]
fn study_resumes_and_report_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let o = run_with(dir.path(), SMALL_STUDY, "study", "o", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = t.elapsed();
    let out = dir.path().join("o");
    let study = fs::read(out.join("study.csv")).unwrap();

    let t = Instant::now();
    let o = run_with(dir.path(), SMALL_STUDY, "study", "o", &[]);
    assert!(o.status.success());
    assert!(t.elapsed() < first, "rerun did not reuse finished cells");
    assert_eq!(study, fs::read(out.join("study.csv")).unwrap());

    let o = run_with(dir.path(), SMALL_STUDY, "report", "o", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (scols, srows) = read_table(&out.join("study.csv")).unwrap();
    assert_eq!(srows.len(), 2 * 3 * 2 * 2);
    let (rcols, rrows) = read_table(&out.join("report.csv")).unwrap();
    assert_eq!(
        rcols,
        [
            "n",
            "c",
            "method",
            "target_metric",
            "target_value",
            "statistic",
            "value"
        ]
    );
    let [c, method, metric, tv, q] =
        ["c", "method", "target_metric", "target_value", "required_q"].map(|k| column(&scols, k));
    for r in &rrows {
        let mut qs: Vec<f64> = srows
            .iter()
            .filter(|s| {
                s[c].parse::<f64>().unwrap() == r[1].parse::<f64>().unwrap()
                    && s[method] == r[2]
                    && s[metric] == r[3]
                    && s[tv].parse::<f64>().unwrap() == r[4].parse::<f64>().unwrap()
            })
            .map(|s| {
                if s[q] == "NA" {
                    0.0
                } else {
                    s[q].parse().unwrap()
                }
            })
            .collect();
        assert_eq!(qs.len(), 3);
        qs.sort_by(f64::total_cmp);
        let achieved = srows
            .iter()
            .filter(|s| s[c] == r[1] && s[method] == r[2] && s[metric] == r[3] && s[q] != "NA")
            .filter(|s| s[tv].parse::<f64>().unwrap() == r[4].parse::<f64>().unwrap())
            .count() as f64
            / 3.0;
        let expected = match r[5].as_str() {
            "median" => type7(&qs, 0.5),
            "lower" => type7(&qs, 0.025),
            "upper" => type7(&qs, 0.975),
            "achieved" => achieved,
            other => panic!("unknown statistic {other}"),
        };
        let got: f64 = r[6].parse().unwrap();
        assert!((got - expected).abs() < 1e-12, "{r:?}: expected {expected}");
    }
    assert_headers(&out);
}

#[test]
fn verify_passes_and_tightened_verify_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = abc(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let (_, rows) = read_table(&out.join("verify.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[4] == "true"));

    let o = abc(&["verify", "--out", out.to_str().unwrap(), "--tighten", "100"]);
    assert_eq!(o.status.code(), Some(4));
    assert_headers(&out);
}

#[test]
fn oversized_seed_is_rejected() {
    let o = abc(&["run", "--seed", "18446744073709551615"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        abcreg::config::RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 4);
}
