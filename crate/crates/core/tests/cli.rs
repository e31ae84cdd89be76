use std::path::Path;
use std::process::{Command, Output};

use ergolab::cli::{parse_config, run, Command as Experiment};
use ergolab::output::Table;

fn ergolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn derndinger_demo_prints_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "demo.cfg", "windows = 1e4\n");
    let out_csv = dir.path().join("demo.csv");
    let out = ergolab(&["derndinger-demo", "--config", &cfg, "--out", out_csv.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("S: mean-ergodic (supported)"), "{stdout}");
    assert!(stdout.contains("−S: NOT mean-ergodic (refuted by continuity jump)"));
    let residual: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("untwisted sup-residual: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 0.02);
    let gap: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("twisted gap |A f1(+x100) - A f1(-x1)|: "))
        .and_then(|rest| rest.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(gap >= 1.9);
}

#[test]
fn repeated_windows_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "command = avg\nwindows = 100, 100\n");
    let out = ergolab(&["avg", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("windows must be strictly increasing"));
}

#[test]
fn unknown_catalog_ids_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("system = pendulum\n", "pendulum"),
        ("alpha_typo = 0.3\n", "alpha_typo"),
        ("system = skew\ngroup = Z2\ncocycle = identity\nobservable = irrep:nope:0:0\n", "nope"),
    ] {
        let cfg = write(dir.path(), "bad.cfg", text);
        let out = ergolab(&["avg", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{text}");
    }
    let cfg = write(dir.path(), "ok.cfg", "windows = 10\n");
    assert_eq!(ergolab(&["plot", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(ergolab(&["avg", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
}

#[test]
fn csv_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "command = ww-scan\nsystem = rotation\nobservable = exp-1\ntheta_lo = 0.1\ntheta_hi = 0.4\ntheta_steps = 16\nwindows = 1e3\nsamples = 3\n";
    let cfg_path = write(dir.path(), "scan.cfg", text);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = ergolab(&["ww-scan", "--config", &cfg_path, "--out", p.to_str().unwrap(), "--seed", "3"]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).contains("below bound"));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let in_memory = run(Experiment::WwScan, &parse_config(text).unwrap(), Some(3)).unwrap().table;
    let reread = Table::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(reread, in_memory);
}

#[test]
fn csv_goes_to_stdout_without_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "avg.cfg",
        "system = derndinger\nobservable = coord-1\ntheta = 0.5\nwindows = 10\npoints = +x3\n",
    );
    let out = ergolab(&["avg", "--config", &cfg, "--threads", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "system_id,observable,theta_0,n,sample_id,re_0,im_0,sup_norm");
    assert!(lines.next().unwrap().contains("5.9999999999999998e-1"));
}

#[test]
fn every_command_runs() {
    let cases = [
        (Experiment::Avg, "system = rotation\nalpha = 0.3\nobservable = exp-1, one\nwindows = 100, 1000\n"),
        (Experiment::CocycleCheck, "system = anzai\ntrials = 200\n"),
        (
            Experiment::SkewErgodicity,
            "system = skew\ngroup = S3\ncocycle = constant\ncocycle_values = 1\nobservable = one, exp-1\nwindows = 500\nsamples = 4\n",
        ),
        (Experiment::UniqueErgodicity, "system = anzai\nobservable = exp-1*fiber-1\nwindows = 1e3, 1e4\nsamples = 5\n"),
    ];
    for (cmd, text) in cases {
        let out = run(cmd, &parse_config(text).unwrap(), Some(1)).unwrap();
        assert!(!out.table.rows.is_empty(), "{cmd}");
        assert!(!out.summary.is_empty());
    }
}
