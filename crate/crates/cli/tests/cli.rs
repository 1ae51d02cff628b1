use std::path::Path;
use std::process::{Command, Output};

use steklov::eigensolver::Spectrum;
use steklov::io::read_json;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .env_remove("STEKLOV_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn manifest(path: &Path) -> serde_json::Value {
    let mut name = path.file_name().unwrap().to_os_string();
    name.push(".manifest.json");
    let text = std::fs::read_to_string(path.with_file_name(name)).expect("manifest written");
    serde_json::from_str(&text).unwrap()
}

#[test]
fn spectrum_writes_json_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disk.json");
    let o = run(&["spectrum", "--shape", "disk", "--mu", "7.1", "--N", "256", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s: Spectrum = read_json(&out).unwrap();
    assert!((s.eigenvalues[1] + 14.2232).abs() < 5e-4);
    assert_eq!(s.n, 256);
    // round trip through the serialized form
    let again: Spectrum = serde_json::from_str(&steklov::io::to_json(&s).unwrap()).unwrap();
    assert_eq!(again, s);
    let m = manifest(&out);
    assert_eq!(m["command"], "spectrum");
    assert_eq!(m["solver"]["N"], 256);
    assert_eq!(m["parameters"]["mu"], 7.1);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn bio_at_exceptional_wavenumber_fails_numerically() {
    let mu = steklov::special_fn::bessel_zero(0, 1).to_string();
    let o = run(&["spectrum", "--shape", "disk", "--mu", &mu, "--N", "128", "--tol", "1e-10", "--method", "bio"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("solve_biomod"), "{}", stderr(&o));
    let ok = run(&["spectrum", "--shape", "disk", "--mu", &mu, "--N", "128", "--tol", "1e-10"]);
    assert_eq!(code(&ok), 0);
    let s: Spectrum = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(s.rank_deficiency, 1);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"-inf\""));
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(code(&run(&["spectrum", "--shape", "disk"])), 2);
    assert_eq!(code(&run(&["spectrum", "--shape", "blob", "--mu", "1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--shape", "disk", "--radius", "-1", "--mu", "1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--shape", "disk", "--mu", "1", "--tol", "1e-3"])), 2);
    assert_eq!(code(&run(&["functional", "--F", "--k", "0", "--mu", "1", "--shape", "disk"])), 2);
    assert_eq!(code(&run(&["annulus", "--mu", "1", "--eps", "1.5"])), 2);
    assert_eq!(code(&run(&["optimize", "--mu", "1", "--n-modes", "3"])), 2);
    assert_eq!(code(&run(&["nonsense"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(["spectrum", "--shape", "disk", "--mu", "1", "--N", "32"])
        .env("STEKLOV_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn shape_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("shape.json");
    std::fs::write(&cfg, r#"{"fourier": {"a0": 1.0, "a": [0.05], "b": [0.0]}}"#).unwrap();
    let o = run(&["spectrum", "--shape-config", cfg.to_str().unwrap(), "--mu", "1", "--N", "64"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    std::fs::write(&cfg, r#"{"fourier": {"a0": 1.0, "a": [0.5], "b": [0.0]}}"#).unwrap();
    let o = run(&["spectrum", "--shape-config", cfg.to_str().unwrap(), "--mu", "1", "--N", "64"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn convergence_against_disk_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = run(&[
        "convergence", "--shape", "disk", "--mu", "2", "--N-list", "32,64,128", "--Q", "16", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    let mre: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(mre[0] > mre[1] && mre[1] > mre[2], "{mre:?}");
    assert_eq!(manifest(&out)["command"], "convergence");
    let too_many = run(&["convergence", "--shape", "disk", "--mu", "2", "--N-list", "32", "--Q", "500"]);
    assert_eq!(code(&too_many), 2);
    let no_oracle = run(&["convergence", "--shape", "kite", "--mu", "2", "--N-list", "32"]);
    assert_eq!(code(&no_oracle), 2);
}

#[test]
fn functional_of_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = run(&[
        "functional", "--F", "--k", "2", "--mu", "3.141592653589793", "--shape", "disk", "--N", "128", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!((v - 0.541834100559795).abs() < 1e-9, "{v}");
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(j["spec"]["k"], 2);
    assert_eq!(j["value"].as_f64().unwrap(), v);
}

#[test]
fn annulus_rows_dominate_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ann.csv");
    let o = run(&["annulus", "--k", "1", "--mu", "2", "--eps", "0.1:0.9:9", "--N", "128", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 9);
    let signs = csv_rows(&out.with_extension("sign.csv"));
    assert_eq!(signs.len(), 9);
    assert!(signs.iter().all(|r| r[1] == "1" || r[1] == "0"), "{signs:?}");
    let f1_disk = 2.0 * std::f64::consts::PI
        * steklov::oracle::disk_spectrum(&steklov::oracle::DiskSpectrumQuery::new(2.0 / std::f64::consts::PI.sqrt(), 1.0, 1)).unwrap()[0];
    for r in &rows {
        assert!(r[1].parse::<f64>().unwrap() >= f1_disk - 1e-8);
    }
}

#[test]
fn optimize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let hist = dir.path().join("h.csv");
    let common = [
        "optimize", "--objective", "F2", "--mu", "4.2", "--seed", "7", "--particles", "8", "--iterations", "20",
        "--n-modes", "2", "--search-N", "48", "--refine-N", "0",
    ];
    let mut args_a = common.to_vec();
    args_a.extend(["--out", a.to_str().unwrap(), "--history", hist.to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--out", b.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(code(&run(&args_a)), 0);
    assert_eq!(code(&run(&args_b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let r: steklov::optimize::OptimizeResult = read_json(&a).unwrap();
    assert_eq!(r.history.len(), 21);
    assert_eq!(csv_rows(&hist).len(), 21);
    assert_eq!(manifest(&hist)["command"], "optimize");
}

#[test]
fn sweep_and_oracle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("neg.csv");
    let o = run(&["sweep", "--shape", "disk", "--mu", "0.1,10", "--N", "128", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows[0][1], "1");
    let o = run(&["oracle", "--shape", "square", "--size", "3.141592653589793", "--mu", "5", "--count", "6"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "1,-inf");
    assert_eq!(lines[2], "2,-inf");
    let q = run(&["quasimode", "--shape", "square", "--mu", "1", "--k-max", "8", "--N", "200"]);
    assert_eq!(code(&q), 0, "{}", stderr(&q));
    assert_eq!(String::from_utf8_lossy(&q.stdout).lines().count(), 9);
}
