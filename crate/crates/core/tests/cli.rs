use std::fs;
use std::path::Path;
use std::process::Command;

fn nhsum(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nhsum")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let out = dir.join(format!("{name}_out"));
    let path = dir.join(format!("{name}.cfg"));
    fs::write(&path, format!("{body}\noutput.dir = {}\n", out.display())).unwrap();
    path.to_string_lossy().into_owned()
}

const LATTICE: &str = "family = shifted_integers\ncount = 40\ndelta = 0.3\ngrid.X = 40\ngrid.h = 0.02";

#[test]
fn diagnose_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d", &format!("subcommand = diagnose\n{LATTICE}\ndiag.X = 8"));
    let out = nhsum(&["run", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("d_out/report.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("condition,window_X,value,trend_ratio"));
    let conditions: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(conditions, ["a2", "a2", "carleson", "intG_pos", "intG_neg"]);
}

#[test]
fn converge_projection_errors_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c",
        &format!("{LATTICE}\nscheme = projection\nschedule = 5,10,20,35"),
    );
    let out = nhsum(&["converge", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("c_out/errors.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["n", "scheme", "l2_error", "sup_error_K", "tail_bound"]
    );
    let rows: Vec<(f64, String, f64, f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.windows(2).all(|w| w[1].2 < w[0].2), "{rows:?}");
}

#[test]
fn missing_config_exits_2() {
    let out = nhsum(&["run", "/definitely/not/here.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn bad_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b", "subcommand = diagnose\nfamliy = shifted_integers");
    assert_eq!(nhsum(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn infeasible_contours_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "i",
        &format!("{LATTICE}\ncontours.l_min = 2\ncontours.l_max = 3\ncontours.count = 4"),
    );
    let out = nhsum(&["contours", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let body = "family = clustered_pairs\ncount = 20\ndelta = 1\neps = 0.5\nscheme = naive,projection,universal\n\
                schedule = 4,8,16\ngrid.X = 30\ngrid.h = 0.02\nseed = 11\nprobe.trials = 2\nprobe.atoms = 10\n\
                probe.iterations = 8\ncontours.count = 2";
    let a = write_config(dir.path(), "a", body);
    let b = write_config(dir.path(), "b", body);
    for sub in ["compare-norms", "converge", "weights", "contours"] {
        assert!(nhsum(&[sub, &a]).status.success(), "{sub}");
        assert!(nhsum(&[sub, &b]).status.success(), "{sub}");
    }
    for file in ["norms.csv", "errors.csv", "weights.csv", "contours.csv"] {
        let x = fs::read(dir.path().join("a_out").join(file)).unwrap();
        let y = fs::read(dir.path().join("b_out").join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs");
    }
}

#[test]
fn factorize_check_is_accurate_on_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f",
        "family = shifted_integers\ncount = 40\ndelta = 0.3\ngrid.X = 200\ngrid.h = 0.01",
    );
    assert!(nhsum(&["factorize-check", &cfg]).status.success());
    let mut rdr = csv::Reader::from_path(dir.path().join("f_out/factorization.csv")).unwrap();
    let worst = rdr
        .deserialize::<(f64, f64, f64, f64)>()
        .map(|r| r.unwrap().3)
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}
