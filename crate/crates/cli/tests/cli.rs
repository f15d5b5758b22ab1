use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
output_dir = "out"

[medium]
lambda = 3.88
mu = 2.56
omega = "0.7pi"

[wave]
kind = "s"
theta = "5pi/8"

[obstacle]
center = [0.1, 0.0]
alpha = [0.5, 0.05]
beta = [0.03]

[solver]
n = 32
n_bar = 16
n_data = 32

[noise]
delta = 0.01
seed = 5

[inversion]
order = 1
mode = "compressional"
epsilon = 0.012
max_iters = 30
initial = { center = [0.0, 0.0], radius = 0.45 }
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastiscat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), config).unwrap();
    dir
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = setup(CONFIG);
    for name in ["a.txt", "b.txt"] {
        let o = run(dir.path(), &["forward", "-c", "c.toml", "-o", name, "--noise", "0"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 32);

    for name in ["n1.txt", "n2.txt"] {
        let o = run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phased", "-o", name]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(dir.path().join("n1.txt")).unwrap(), fs::read(dir.path().join("n2.txt")).unwrap());
    assert!(fs::read_to_string(dir.path().join("n1.txt")).unwrap().contains("# seed = 5"));
}

#[test]
fn forward_writes_phaseless_file() {
    let dir = setup(CONFIG);
    let o = run(dir.path(), &["forward", "-c", "c.toml", "-o", "p.txt", "--phaseless", "q.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(dir.path().join("q.txt")).unwrap().contains("# kind = phaseless"));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = setup(&CONFIG.replace("mu = 2.56", "mu = 2.56\nmuu = 1.0"));
    let o = run(dir.path(), &["forward", "-c", "c.toml", "-o", "a.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("muu"), "{}", stderr(&o));

    let dir = setup(&CONFIG.replace("mu = 2.56", "mu = -2.56"));
    let o = run(dir.path(), &["forward", "-c", "c.toml", "-o", "a.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu"), "{}", stderr(&o));
}

#[test]
fn phaseless_without_ball_is_refused() {
    let dir = setup(CONFIG);
    let o = run(dir.path(), &["forward", "-c", "c.toml", "-o", "p.txt", "--phaseless", "q.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(dir.path(), &["invert-phaseless", "-c", "c.toml", "-d", "q.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("translated"), "{}", stderr(&o));
    let o = run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phaseless", "-o", "r.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn header_mismatch_is_rejected() {
    let dir = setup(CONFIG);
    let o = run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phased", "-o", "d.txt"]);
    assert!(o.status.success());
    let o = run(dir.path(), &["invert-phased", "-c", "c.toml", "-d", "d.txt", "--n-bar", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("header mismatch"), "{}", stderr(&o));
}

#[test]
fn resume_from_final_curve_stops_immediately() {
    let dir = setup(CONFIG);
    let o = run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phased", "-o", "d.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(dir.path(), &["invert-phased", "-c", "c.toml", "-d", "d.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.lines().count() > 2);
    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    for label in ["exact,", "initial,", "reconstructed,"] {
        assert_eq!(curves.lines().filter(|l| l.starts_with(label)).count(), 256);
    }

    let o = run(
        dir.path(),
        &["invert-phased", "-c", "c.toml", "-d", "d.txt", "--initial", "out/final_curve.toml", "--output-dir", "again"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("again/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn nonconvergence_exits_3_with_partial_trace() {
    let dir = setup(CONFIG);
    let o = run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phased", "-o", "d.txt"]);
    assert!(o.status.success());
    let o = run(dir.path(), &["invert-phased", "-c", "c.toml", "-d", "d.txt", "--max-iters", "2", "--epsilon", "1e-9"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let trace = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 4);
}

#[test]
fn trace_is_reproducible() {
    let dir = setup(CONFIG);
    run(dir.path(), &["make-data", "-c", "c.toml", "--kind", "phased", "-o", "d.txt"]);
    for out in ["o1", "o2"] {
        let o = run(dir.path(), &["invert-phased", "-c", "c.toml", "-d", "d.txt", "--output-dir", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(
        fs::read(dir.path().join("o1/trace.csv")).unwrap(),
        fs::read(dir.path().join("o2/trace.csv")).unwrap()
    );
}

#[test]
fn validate_reports_and_catches_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate"]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("PASS disk oracle, P incidence"));
    let o = run(dir.path(), &["validate", "--corrupt-quadrature"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL quadrature identities"));
}
