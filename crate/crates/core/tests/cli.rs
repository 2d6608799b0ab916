//! End-to-end runs of the command-line driver.

use std::fs;
use std::path::Path;

use vanka_mg::cli::{run, EXIT_OK, EXIT_USAGE};

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(name);
    let mut full = vec!["vanka-mg"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(full);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn without_timestamp(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# timestamp") && !l.starts_with("# output"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--h", "1/32", "--lambda-re", "-5", "--lambda-im", "40", "--seed", "9"];
    let (c1, a) = run_to(dir.path(), "a.csv", &args);
    let (c2, b) = run_to(dir.path(), "b.csv", &args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    assert!(a.contains("# manifest-hash: "));
    let rows = data_rows(&a);
    assert!(rows.len() > 5);
    assert_eq!(rows[0][2], "1.000000000000e0");
}

#[test]
fn loose_tolerance_takes_no_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "s.csv", &["solve", "--h", "1/16", "--tol", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(data_rows(&csv).len(), 1);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve"],
        vec!["solve", "--h", "1/60"],
        vec!["solve", "--h", "0.3"],
        vec!["paradiag", "--h", "1/8"],
        vec!["sweep", "--example", "nope", "--h", "1/16"],
        vec!["solve", "--h", "1/16", "--omega", "0"],
        vec!["lfa-table", "--samples", "7"],
    ] {
        let (code, _) = run_to(dir.path(), "x.csv", &args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
    }
    assert_eq!(run(["vanka-mg", "--help"]), EXIT_OK);
}

#[test]
fn lfa_table_reports_both_smoothers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "t.csv", &["lfa-table", "--h", "1/64", "--samples", "16", "--nu-max", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(csv.contains("smoother,omega_opt,mu_opt,rho_1,rho_2"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "jacobi");
    let rho1: f64 = rows[1][3].parse().unwrap();
    assert!((rho1 - 0.28).abs() < 0.01, "{rho1}");
}

#[test]
fn sweep_rows_come_in_shift_order() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "w.csv", &["sweep", "--example", "helmholtz", "--h", "1/16"]);
    assert_eq!(code, EXIT_OK);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 16);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (k / 2 + 1).to_string());
        assert_eq!(row[3], if k % 2 == 0 { "vanka" } else { "jacobi" });
        assert_eq!(row[6], "true");
    }
}

#[test]
fn paradiag_reports_dense_comparison_for_small_problems() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "p.csv", &["paradiag", "--scheme", "backward-heat", "--h", "1/8", "--tau", "1/4"]);
    assert_eq!(code, EXIT_OK);
    let line = csv.lines().find(|l| l.starts_with("# relative_difference_vs_dense_solve")).unwrap();
    let v: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(v < 1e-8);
}
