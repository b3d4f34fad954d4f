use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vandermonde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_pair(dir: &Path) -> String {
    let path = dir.join("pair.txt");
    std::fs::write(&path, "# d=1 n=200\n0.1\n0.102\n0.6\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn analyze_prints_one_row_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_pair(dir.path());
    let text = stdout(&run(&["analyze", &file, "--oracle"]));
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(header.len(), row.len());
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("lambda"), "2");
    let rel: f64 = col("oracle_rel_diff").parse().unwrap();
    assert!(rel < 1e-8);
}

#[test]
fn bound_selects_by_name_and_explains() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_pair(dir.path());
    let text = stdout(&run(&["bound", &file, "--which", "theorem41", "--explain"]));
    assert!(text.lines().nth(1).unwrap().starts_with("theorem41,"));
    assert!(text.contains("# theorem41:"));

    let bad = run(&["bound", &file, "--which", "nope"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("available"));
}

#[test]
fn certify_reports_residuals_and_dumps_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_pair(dir.path());
    let poly = dir.path().join("f.csv");
    let text = stdout(&run(&[
        "certify",
        &file,
        "--beta",
        "2",
        "--vector",
        "min-singular",
        "--residuals",
        "--dump-poly",
        poly.to_str().unwrap(),
    ]));
    assert!(text.starts_with("beta,Q,P,eps_norm"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        1 + 3
    );
    assert!(std::fs::read_to_string(&poly).unwrap().lines().count() > 1);

    let vec_file = dir.path().join("v.txt");
    std::fs::write(&vec_file, "1 0\n0 1\n0,0\n").unwrap();
    let arg = format!("file:{}", vec_file.display());
    stdout(&run(&["certify", &file, "--vector", &arg]));

    let odd = run(&["certify", &file, "--beta", "3"]);
    assert!(!odd.status.success());
}

#[test]
fn experiment_writes_csv_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let text = stdout(&run(&[
        "experiment",
        "cluster1d",
        "--N",
        "256",
        "--L",
        "2",
        "--trials",
        "6",
        "--seed",
        "7",
        "--out",
        out,
    ]));
    assert!(text.contains("0 bound violations"));
    let csv = std::fs::read_to_string(dir.path().join("cluster1d.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with("seed=7"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
    assert!(dir.path().join("cluster1d.gp").exists());

    assert!(!run(&["experiment", "nope"]).status.success());
}

#[test]
fn malformed_node_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "0.1 0.2\n").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("header"));
}
