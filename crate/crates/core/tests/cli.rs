//! Runs the `xkahler` binary on small configurations.

use std::path::Path;
use std::process::{Command, Output};

fn xkahler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xkahler"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn classify_biquard_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.toml",
        "n = 2\n[coefficients]\nc0 = 0.0\nc1 = 0.0\nc3 = -2.0\nc4 = 1.0\n",
    );
    let o = xkahler(dir.path(), &["classify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "SmoothCn case 2 (Biquard family), window (0,1)"
    );
    assert!(out.contains("real_roots = 0^1 1^2"));
}

#[test]
fn boundary_eguchi_hanson() {
    let dir = tempfile::tempdir().unwrap();
    let o = xkahler(dir.path(), &["boundary", "--family", "EguchiHanson"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "Origin: divisor θ=2 glue k=2; Infinity: complete; Space: NegBundle(2)"
    );
}

#[test]
fn solve_euclidean_linear_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "[coefficients]\nc0 = 0.0\nc1 = 0.0\nc3 = 0.0\nc4 = 0.0\n[anchor]\ns = 1.0\ng = 1.0\n[grid]\ns_min = 1.0\ns_max = 4.0\nsamples = 4\n",
    );
    let o = xkahler(dir.path(), &["solve", "--config", &cfg, "--out", "t.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "s,g,dg,u_prime");
    let g: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(g.len(), 4);
    for (got, want) in g.iter().zip([1.0, 2.0, 3.0, 4.0]) {
        approx::assert_relative_eq!(*got, want, max_relative = 1e-14);
    }
}

#[test]
fn curvature_columns_and_catalog_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = xkahler(dir.path(), &["catalog", "--family", "Biquard", "--out", "c.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(
        table.lines().next().unwrap(),
        "s,g,dg,u_prime,R,xi,A_curv,B_curv,C_curv"
    );
    assert!(table.lines().skip(1).all(|l| l.split(',').count() == 9));
    let out = stdout(&o);
    assert!(out.starts_with("SmoothCn case 2 (Biquard family), window (0,1)"));
    assert!(out.contains("Origin: smooth point; Infinity: complete; Space: Cn"), "{out}");
}

#[test]
fn dump_config_round_trips_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.toml",
        "[family]\nname = \"LeBrunNeg\"\n[grid]\ns_min = 0.01\ns_max = 100.0\nsamples = 7\nspacing = \"log\"\n",
    );
    let d1 = stdout(&xkahler(
        dir.path(),
        &["curvature", "--config", &cfg, "--param", "k=3", "--dump-config"],
    ));
    let cfg2 = write(dir.path(), "g.toml", &d1);
    let d2 = stdout(&xkahler(dir.path(), &["curvature", "--config", &cfg2, "--dump-config"]));
    assert_eq!(d1, d2);
    let a = xkahler(dir.path(), &["curvature", "--config", &cfg, "--param", "k=3"]);
    let b = xkahler(dir.path(), &["curvature", "--config", &cfg2]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "n = 1\n");
    assert_eq!(xkahler(dir.path(), &["classify", "--config", &bad]).status.code(), Some(1));
    assert_eq!(xkahler(dir.path(), &["classify"]).status.code(), Some(1));
    assert_eq!(xkahler(dir.path(), &["--help"]).status.code(), Some(0));
    let no_window = write(
        dir.path(),
        "nw.toml",
        "[coefficients]\nc0 = 0.8\nc1 = 0.0\nc3 = 0.0\nc4 = 0.97\n",
    );
    let o = xkahler(dir.path(), &["classify", "--config", &no_window]);
    assert_eq!(o.status.code(), Some(2));
    let strict = write(
        dir.path(),
        "st.toml",
        "[family]\nname = \"Biquard\"\n[tolerances]\nsolve_tol = 1e-300\n[grid]\ns_min = 10.0\ns_max = 20.0\nsamples = 3\n",
    );
    let o = xkahler(dir.path(), &["solve", "--config", &strict]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numeric failure in solve"));
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "[sweep]\nsamples = 2000\nseed = 7\n");
    let a = xkahler(dir.path(), &["sweep", "--config", &cfg]);
    let b = xkahler(dir.path(), &["sweep", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.contains("samples = 2000"));
    assert!(out.contains("failures = 0"));
}
