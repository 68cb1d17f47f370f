use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kvnlab(dir: &Path, cmd: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_kvnlab"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn empty_config_prints_usage_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvnlab(dir.path(), "algebra-check", "", &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage:"), "{stderr}");
}

#[test]
fn missing_config_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kvnlab")).arg("nsm").arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage:"));
}

#[test]
fn malformed_config_names_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvnlab(dir.path(), "two-slit", "[two-slit]\nx_a = 0.5\ndelta =\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = kvnlab(dir.path(), "two-slit", "[two-slit]\nxa = 0.5\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xa"));
}

#[test]
fn algebra_check_n1_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvnlab(dir.path(), "algebra-check", "[algebra-check]\nn = 1\n", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("overall PASS (1/1)"), "{summary}");
    let rows = csv_rows(&dir.path().join("out/algebra-check.csv"));
    assert!(!rows.is_empty());
    for row in rows {
        let residual: f64 = row.last().unwrap().parse().unwrap();
        assert!(residual < 1e-12);
    }
}

#[test]
fn two_slit_quantum_has_six_minima() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvnlab(dir.path(), "two-slit", "[two-slit]\nmode = \"quantum\"\nx_a = 0.5\nexpect_minima = 6\n", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let profile: Vec<f64> = csv_rows(&dir.path().join("out/two-slit.csv")).iter().map(|r| r[1].parse().unwrap()).collect();
    let peak = profile.iter().cloned().fold(0.0, f64::max);
    let minima = (1..profile.len() - 1)
        .filter(|&i| profile[i] < profile[i - 1] && profile[i] < profile[i + 1] && profile[i] < (1.0 - 1e-6) * peak)
        .count();
    assert_eq!(minima, 6);
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = kvnlab(dir.path(), "two-slit", "[two-slit]\nx_a = 0.5\nexpect_minima = 7\n", &[]);
    assert_eq!(out.status.code(), Some(1));
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("FAIL") && summary.contains("overall FAIL"), "{summary}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[brackets-check]\nn = 1\npairs = 2\nhamiltonians = 2\n";
    let first = kvnlab(dir.path(), "brackets-check", cfg, &["--seed", "7"]);
    assert_eq!(first.status.code(), Some(0));
    let a = fs::read(dir.path().join("out/brackets-check.csv")).unwrap();
    let second = kvnlab(dir.path(), "brackets-check", cfg, &["--seed", "7"]);
    assert_eq!(second.status.code(), Some(0));
    let b = fs::read(dir.path().join("out/brackets-check.csv")).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("# kvnlab 0.1.0 brackets-check\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[two-slit]\nmode = \"classical\"\nx_a = 1.0\npoints = 801\n";
    let run = |threads: &str| {
        let cfg_path = dir.path().join("config.toml");
        fs::write(&cfg_path, cfg).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_kvnlab"))
            .args(["two-slit", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(dir.path().join(threads))
            .env("KVNLAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        fs::read(dir.path().join(threads).join("two-slit.csv")).unwrap()
    };
    assert_eq!(run("1"), run("3"));
}
