use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coapprox"));
    c.env("COAPPROX_THREADS", "2");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn schema_dump_parses_back() {
    let out = run(&["schema"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let p = write(dir.path(), "schema.toml", &text);
    let out = run(&["decompose", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn box_report_has_header_and_columns() {
    let cfg = configs().join("box.toml");
    let out = run(&["decompose", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("coapprox-report v1"));
    assert_eq!(lines.next(), Some("x,d,margin,h,R,seed"));
    assert_eq!(lines.count(), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hausdorff estimate: 0"));
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("l1_pairs.toml");
    let mut reports = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "3")] {
        let out_path = dir.path().join(name);
        let out = bin()
            .env("COAPPROX_THREADS", threads)
            .args(["sweep", "--config", cfg.to_str().unwrap(), "--n", "20000", "--out", out_path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("report written to"));
        reports.push(std::fs::read(out_path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let other = run(&["sweep", "--config", cfg.to_str().unwrap(), "--n", "20000", "--seed", "6"]);
    assert_ne!(other.stdout, reports[0]);
}

#[test]
fn malformed_config_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.toml", "operation = \"gauge\"\n\n[space]\nnorm = \"inf\"\ndimenson = 3\n");
    let out = run(&["gauge", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dimenson"), "{err}");
    assert!(err.contains("line 5"), "{err}");
    assert_eq!(err.matches("configuration error").count(), 1, "{err}");
}

#[test]
fn missing_config_file_exits_2() {
    let out = run(&["gauge", "--config", "/nonexistent/coapprox.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_dominated_functional_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "nd.toml",
        "[space]\nnorm = \"inf\"\ndimension = 3\n\n[family]\nfunctionals = [[1.0, 1.0, 1.0]]\nlevels = [0.0]\n\n[query]\npoints = [[1.0, 1.0, 1.0]]\n",
    );
    let out = run(&["project", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn iteration_limit_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(configs().join("onecoor.toml")).unwrap();
    let p = write(dir.path(), "slow.toml", &format!("{base}\n[tolerances]\nmax_iter = 2\niteration = 1e-14\n"));
    let out = run(&["project", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn project_lands_in_every_halfspace() {
    let cfg = configs().join("onecoor.toml");
    let out = run(&["project", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    for line in csv.lines().skip(2) {
        let d: Vec<f64> = line.split(',').nth(1).unwrap().split(' ').map(|v| v.parse().unwrap()).collect();
        assert!(d[0] <= 1e-6, "{line}");
        assert!(0.5 * d[0] + 0.25 * (d[1] + d[2]) <= 1e-6, "{line}");
    }
}

#[test]
fn n_overrides_the_number_of_halfspaces() {
    let cfg = configs().join("disc.toml");
    let out = run(&["decompose", "--config", cfg.to_str().unwrap(), "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2 + 8);
}

#[test]
fn nonconvex_sweep_passes() {
    let cfg = configs().join("nonconvex.toml");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let ratio: f64 = csv.lines().nth(2).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(ratio <= 1.0 + 1e-9);
}
