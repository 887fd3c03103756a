use std::path::Path;
use std::process::{Command, Output};

fn onebit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_measure_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (phi, x, y, est) = (
        dir.path().join("phi.txt"),
        dir.path().join("x.txt"),
        dir.path().join("y.txt"),
        dir.path().join("est.txt"),
    );
    let cmds: [&[&str]; 4] = [
        &[
            "gen-matrix",
            "--rows",
            "400",
            "--cols",
            "100",
            "--seed",
            "1",
            "--out",
            p(&phi),
        ],
        &[
            "gen-signal",
            "--dim",
            "100",
            "--sparsity",
            "3",
            "--seed",
            "2",
            "--out",
            p(&x),
        ],
        &[
            "measure",
            "--matrix",
            p(&phi),
            "--signal",
            p(&x),
            "--out",
            p(&y),
        ],
        &[
            "reconstruct",
            "--measurements",
            p(&y),
            "--matrix",
            p(&phi),
            "--sparsity",
            "3",
            "--max-iter",
            "300",
            "--out",
            p(&est),
        ],
    ];
    for args in cmds {
        let o = onebit(args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let parse = |path: &Path| -> Vec<f64> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.trim().parse().unwrap())
            .collect()
    };
    let (a, b) = (parse(&x), parse(&est));
    assert_eq!(a.len(), 100);
    let cos: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
    assert!(cos > 0.95, "cosine {cos}");
}

#[test]
fn generators_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = onebit(&[
            "gen-matrix",
            "--rows",
            "5",
            "--cols",
            "4",
            "--seed",
            "9",
            "--out",
            p(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bounds_prints_one_json_line() {
    let o = onebit(&["bounds", "--name", "qpoints", "--params", "n=10,m=20,k=2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("34200"), "{text}");

    let o = onebit(&["bounds", "--name", "eopt", "--params", "k=1,m=1"]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("0.134470710684997"));
}

#[test]
fn parameter_errors_exit_one() {
    assert_eq!(onebit(&["bounds", "--name", "nope"]).status.code(), Some(1));
    assert_eq!(
        onebit(&["bounds", "--name", "eopt", "--params", "k=1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        onebit(&["bounds", "--name", "eopt", "--params", "k"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        onebit(&["gen-matrix", "--rows", "x"]).status.code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = onebit(&[
        "gen-signal",
        "--dim",
        "3",
        "--sparsity",
        "5",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = dir.path().join("y");
    let o = onebit(&[
        "measure",
        "--matrix",
        p(&missing),
        "--signal",
        p(&missing),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let bad_out = dir.path().join("no/such/dir/m.txt");
    let o = onebit(&[
        "gen-matrix",
        "--rows",
        "2",
        "--cols",
        "2",
        "--seed",
        "1",
        "--out",
        p(&bad_out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn experiment_writes_identical_csv_twice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"experiment":"error_decay","N":100,"K":3,"m_over_n_grid":[0.5,1.0],"trials":2,"base_seed":4}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = onebit(&["experiment", "--config", p(&cfg), "--out", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("experiment,variant,M,N,K"));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());
}

#[test]
fn malformed_config_is_a_parameter_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment":"error_decay","bogus":1}"#).unwrap();
    let out = dir.path().join("r.csv");
    let o = onebit(&["experiment", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
