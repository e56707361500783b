use efmsig::efm::{signature_of_path, Origin, PiecewisePath};
use efmsig::expectation::expected_signature_stationary;
use efmsig::tensor::{read_coeff_csv, write_coeff_csv};
use efmsig::{Rates, Shape, TensorSeq};
use std::path::Path;
use std::process::{Command, Output};

fn efmsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efmsig")).args(args).env_remove("EFMSIG_THREADS").output().expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let o = efmsig(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn code(args: &[&str]) -> i32 {
    efmsig(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const PATH: &str = "t,x1\n0,0\n0.3,0.7\n0.45,-0.2\n1.1,0.35\n1.6,1.25\n";

#[test]
fn signature_csv_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.csv", PATH);
    let out = ok(&["sig", "--input", &input, "--lambda", "1,2", "--order", "4", "--time-augment"]);
    let path = PiecewisePath::read_csv(PATH.as_bytes(), true).unwrap();
    let r = Rates::new(vec![1.0, 2.0]).unwrap();
    let want = signature_of_path(&r, &path, 4, Origin::Start).unwrap().sig;
    let back: TensorSeq = read_coeff_csv(Shape::new(2, 4).unwrap(), out.as_slice()).unwrap();
    for (a, b) in want.coeffs().iter().zip(back.coeffs()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    let mut again = Vec::new();
    write_coeff_csv(&back, &mut again).unwrap();
    assert_eq!(again, out);
}

#[test]
fn expected_matches_library() {
    let out = ok(&["expected", "--lambda", "1,0.5", "--dim", "1", "--order", "4", "--stationary"]);
    let e = expected_signature_stationary(&Rates::new(vec![1.0, 0.5]).unwrap(), 1, 4).unwrap();
    let mut want = Vec::new();
    write_coeff_csv(&e.value, &mut want).unwrap();
    assert_eq!(out, want);
    assert_eq!(code(&["expected", "--lambda", "1,0.5", "--dim", "1", "--order", "4"]), 2);
}

#[test]
fn charfunc_gaussian_case() {
    let dir = tempfile::tempdir().unwrap();
    let ell = write(dir.path(), "ell.csv", "word,value\n1,1.2+0j\n");
    let out = ok(&["charfunc", "--ell", &ell, "--lambda", "1,0.7", "--order", "4", "--T", "3", "--dt", "1e-3"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let want = (-1.2f64.powi(2) * (1.0 - (-2.0 * 0.7 * 3.0f64).exp()) / (4.0 * 0.7)).exp();
    assert!((v["phi_re"].as_f64().unwrap() - want).abs() < 1e-6);
    assert!(v["phi_im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn seed_determinism_across_runs_and_threads() {
    let sim = |seed: &str| ok(&["simulate", "ou", "--seed", seed, "--mu", "2", "--dt", "0.01", "--t1", "3", "--stationary-start"]);
    assert_eq!(sim("7"), sim("7"));
    assert_ne!(sim("7"), sim("8"));
    let lab = |threads: &str| {
        ok(&["lab", "moments", "--seed", "3", "--lambda", "1,0.5", "--order", "3", "--paths", "64", "--horizon", "2", "--threads", threads, "--quiet"])
    };
    assert_eq!(lab("1"), lab("2"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.csv", PATH);
    assert_eq!(code(&["sig", "--input", &input, "--lambda", "1", "--order", "2", "--bogus"]), 2);
    assert_eq!(code(&["sig", "--input", &input, "--lambda", "1,-2", "--order", "2", "--time-augment"]), 2);
    assert_eq!(code(&["sig", "--input", &input, "--lambda", "1,2", "--order", "2"]), 2);
    assert_eq!(code(&["sig", "--input", "/nonexistent/path.csv", "--lambda", "1", "--order", "2"]), 1);
    assert_eq!(code(&["simulate", "langevin", "--mu", "10", "--p", "5", "--dt", "0.5", "--t1", "50"]), 3);
    let big = write(dir.path(), "big.csv", "word,value\n1-1,1e9\n");
    let o = efmsig(&["charfunc", "--ell", &big, "--lambda", "1,1", "--order", "4", "--T", "1", "--dt", "1e-2"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(o.stderr.split(|&b| b == b'\n').find(|l| l.starts_with(b"{")).unwrap()).unwrap();
    assert_eq!(err["error"], "numerical_blow_up");
    let o = efmsig(&["regress", "--order", "2", "--omega-grid", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_directory_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.csv", PATH);
    let out = dir.path().join("run");
    let o = efmsig(&["--out", out.to_str().unwrap(), "sig", "--input", &input, "--lambda", "0.5", "--order", "3"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "sig");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["flags"]["command"]["Sig"]["order"], 3);
    let side: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("sig.json")).unwrap()).unwrap();
    assert_eq!(side["t_final"], 1.6);
    assert!(out.join("sig.csv").exists());

    let run = dir.path().join("sim");
    let args = ["--out", run.to_str().unwrap(), "simulate", "langevin", "--seed", "4", "--mu", "10", "--dt", "0.001", "--t1", "0.5"];
    assert!(efmsig(&args).status.success());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 4);
    // replaying the recorded argv reproduces the outputs bitwise
    let first = std::fs::read(run.join("path.csv")).unwrap();
    let argv: Vec<String> = m["argv"].as_array().unwrap()[1..].iter().map(|a| a.as_str().unwrap().to_string()).collect();
    std::fs::remove_file(run.join("path.csv")).unwrap();
    let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert!(efmsig(&refs).status.success());
    assert_eq!(std::fs::read(run.join("path.csv")).unwrap(), first);
    assert!(run.join("driver.csv").exists());
}

#[test]
fn predict_letter_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "w.csv", PATH);
    let ell = write(dir.path(), "ell.csv", "word,value\n1,1\n");
    let out = ok(&["predict", "--input", &input, "--ell", &ell, "--lambda", "1,2", "--order", "2", "--horizon", "0.5"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let var = v["variance"].as_f64().unwrap();
    assert!((var - (1.0 - (-2.0f64).exp()) / 4.0).abs() < 1e-12, "{var}");
    assert_eq!(code(&["predict", "--input", &input, "--ell", &ell, "--lambda", "1,2", "--order", "1", "--horizon", "0.5"]), 2);
}
