use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn avgfw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avgfw"))
        .current_dir(dir)
        .env_remove("AVGFW_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_cfg(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const SCALAR_FW: &str =
    "[problem]\nkind = scalar1d\n[solver]\nvariant = fw\nx0 = 0.5\nmax_iters = 50\n";

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn scalar_demo_trace() {
    let tmp = TempDir::new().unwrap();
    write_cfg(tmp.path(), "s.cfg", SCALAR_FW);
    let out = avgfw(
        tmp.path(),
        &["solve", "--config", "s.cfg", "--out", "o", "--quiet"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(tmp.path().join("o/trace_fw.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "k,f,gap,disc_err,gamma,beta,atom_id");
    let first: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[2].parse::<f64>().unwrap(), 1.5);
    assert_eq!(rows.len(), 51);
    assert!(csv.contains("# lipschitz_estimate="));
    assert!(csv.contains("# f_ref="));
    assert!(csv.contains("# config.solver.variant=fw"));
}

#[test]
fn missing_config_is_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = avgfw(tmp.path(), &["solve", "--config", "absent.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let out = avgfw(tmp.path(), &["solve"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_is_exit_2() {
    let tmp = TempDir::new().unwrap();
    write_cfg(
        tmp.path(),
        "bad.cfg",
        "[problem]\nkind = scalar1d\n[solver]\np = 3\n",
    );
    let out = avgfw(tmp.path(), &["solve", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must lie"));
}

#[test]
fn runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    write_cfg(
        tmp.path(),
        "cs.cfg",
        "[problem]\nkind = cs\nn_features = 60\nm_measurements = 20\n[solver]\nmax_iters = 200\n",
    );
    for out_dir in ["a", "b"] {
        let out = avgfw(
            tmp.path(),
            &[
                "solve", "--config", "cs.cfg", "--out", out_dir, "--seed", "4",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(tmp.path().join("a/trace_avgfw.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("b/trace_avgfw.csv")).unwrap();
    assert_eq!(a, b);
    let out = avgfw(
        tmp.path(),
        &["solve", "--config", "cs.cfg", "--out", "c", "--seed", "5"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(
        std::fs::read(tmp.path().join("c/trace_avgfw.csv")).unwrap(),
        a
    );
}

#[test]
fn compare_honours_emit_plots() {
    let tmp = TempDir::new().unwrap();
    let base = "[problem]\nkind = cs\nn_features = 60\nm_measurements = 20\nalpha_scale = 0.5\n\
                [solver]\nmax_iters = 300\nreference_iters = 2000\n";
    write_cfg(tmp.path(), "off.cfg", base);
    write_cfg(
        tmp.path(),
        "on.cfg",
        &format!("{base}[output]\nemit_plots = true\n"),
    );
    for (cfg, dir) in [("off.cfg", "off"), ("on.cfg", "on")] {
        let out = avgfw(
            tmp.path(),
            &["compare", "--config", cfg, "--out", dir, "--quiet"],
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let svgs = |dir: &str| {
        std::fs::read_dir(tmp.path().join(dir))
            .unwrap()
            .filter(|e| {
                e.as_ref()
                    .unwrap()
                    .path()
                    .extension()
                    .is_some_and(|x| x == "svg")
            })
            .count()
    };
    assert_eq!(svgs("off"), 0);
    assert_eq!(svgs("on"), 3);
    let summary = std::fs::read_to_string(tmp.path().join("off/summary.txt")).unwrap();
    for key in [
        "c=3",
        "p=1",
        "alpha=",
        "slope_gap_fw=",
        "slope_gap_avgfw=",
        "delta=",
        "k_bar_avgfw=",
    ] {
        assert!(summary.contains(key), "missing {key}");
    }
    assert!(tmp.path().join("off/trace_fw.csv").is_file());
    assert!(tmp.path().join("off/trace_avgfw.csv").is_file());

    let out = avgfw(
        tmp.path(),
        &[
            "diag",
            "--input",
            "off/trace_fw.csv",
            "--out",
            "d",
            "--quiet",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let diag = std::fs::read_to_string(tmp.path().join("d/diag.txt")).unwrap();
    assert!(diag.contains("slope_gap="));
}

#[test]
fn oversized_flow_step_is_exit_3() {
    let tmp = TempDir::new().unwrap();
    write_cfg(
        tmp.path(),
        "f.cfg",
        "[problem]\nkind = scalar1d\n[flow]\ndt = 0.5\nt_end = 5\n",
    );
    let out = avgfw(tmp.path(), &["flow", "--config", "f.cfg", "--out", "o"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt <= 0.01"));
}

#[test]
fn flow_and_forced_signal_outputs() {
    let tmp = TempDir::new().unwrap();
    write_cfg(
        tmp.path(),
        "f.cfg",
        "[problem]\nkind = scalar1d\n[solver]\nc = 2\nx0 = 1\n[flow]\nt_end = 5\n",
    );
    let out = avgfw(
        tmp.path(),
        &["flow", "--config", "f.cfg", "--out", "o", "--quiet"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("o/flow_fwflow.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "t,f,gap,disc_err,h");
    assert_eq!(rows.len(), 1 + 6);

    write_cfg(
        tmp.path(),
        "g.cfg",
        "[problem]\nkind = scalar1d\n[solver]\nc = 3\n[flow]\nforced_signal = 1\nt_end = 6\n",
    );
    let out = avgfw(
        tmp.path(),
        &["flow", "--config", "g.cfg", "--out", "o", "--quiet"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("o/flow_forced.csv")).unwrap();
    let v: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("# s_bar_final="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 26.0 / 27.0).abs() <= 1e-3);
}

#[test]
fn gen_data_then_solve_from_file() {
    let tmp = TempDir::new().unwrap();
    let out = avgfw(
        tmp.path(),
        &[
            "gen-data",
            "--samples",
            "60",
            "--features",
            "30",
            "--density",
            "0.2",
            "--separator-nnz",
            "5",
            "--out",
            "data",
            "--seed",
            "2",
            "--quiet",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    write_cfg(
        tmp.path(),
        "l.cfg",
        "[problem]\nkind = svmlight\npath = data/synthetic.svm\nalpha = 5\nval_frac = 0.75\n\
         [solver]\nmax_iters = 100\n",
    );
    let out = avgfw(
        tmp.path(),
        &["solve", "--config", "l.cfg", "--out", "o", "--quiet"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("o/trace_avgfw.csv")).unwrap();
    assert!(csv.contains("# n_train=45"));
}

#[test]
fn out_dir_from_environment() {
    let tmp = TempDir::new().unwrap();
    write_cfg(tmp.path(), "s.cfg", SCALAR_FW);
    let out = Command::new(env!("CARGO_BIN_EXE_avgfw"))
        .current_dir(tmp.path())
        .env("AVGFW_OUT", "from_env")
        .args(["solve", "--config", "s.cfg", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from_env/trace_fw.csv").is_file());
}
