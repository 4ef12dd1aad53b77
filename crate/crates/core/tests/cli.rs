use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bartnik(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bartnik"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bartnik-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn sample() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_perturbation.json").to_string()
}

#[test]
fn symbols_verify_passes_and_emits_certificates() {
    let dir = scratch("symbols");
    let out = bartnik(&dir, &["symbols", "verify", "--emit-certificates"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir, "symbols_report.json");
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() >= 8);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    for key in ["tool_version", "config"] {
        assert!(r.get(key).is_some());
    }
    for c in checks {
        for key in ["name", "paper_ref", "status", "max_error", "tolerance"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    let cert = std::fs::read_to_string(dir.join("certificate.txt")).unwrap();
    assert!(cert.contains('N'));
}

#[test]
fn corrupted_golden_file_fails_with_entry_diff() {
    let dir = scratch("golden");
    let golden = dir.join("golden");
    assert_eq!(
        bartnik(
            &dir,
            &["symbols", "regenerate-golden", "--dir", golden.to_str().unwrap()]
        )
        .status
        .code(),
        Some(0)
    );
    let path = golden.join("btilde.txt");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace("[1][7] = -xi2", "[1][7] = xi2");
    std::fs::write(&path, text).unwrap();
    let out = bartnik(&dir, &["symbols", "verify", "--golden-dir", golden.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("golden btilde"), "{err}");
    assert!(err.contains("entry [1][7]"), "{err}");
}

#[test]
fn regenerated_golden_files_match_embedded_ones() {
    let dir = scratch("regen");
    let golden = dir.join("golden");
    bartnik(
        &dir,
        &["symbols", "regenerate-golden", "--dir", golden.to_str().unwrap()],
    );
    let out = bartnik(
        &dir,
        &["-q", "symbols", "verify", "--golden-dir", golden.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn adn_check_passes() {
    let dir = scratch("adn");
    let out = bartnik(&dir, &["--seed", "9", "adn", "check", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&dir, "adn_report.json")["config"]["seed"], 9);
}

#[test]
fn geometry_fixtures_and_usage_errors() {
    let dir = scratch("geometry");
    let out = bartnik(&dir, &["geometry", "verify", "--fixture", "kerr:1,0.5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("convergence.csv").exists());
    assert_eq!(
        bartnik(&dir, &["geometry", "verify", "--fixture", "minkowski"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        bartnik(&dir, &["geometry", "verify", "--fixture", "de-sitter"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bartnik(&dir, &["geometry", "verify", "--fixture", "kerr:1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bartnik(&dir, &["geometry", "verify"]).status.code(), Some(2));
}

#[test]
fn kernel_report_records_dimension_and_fails_honestly() {
    let dir = scratch("kernel");
    let out = bartnik(&dir, &["flatbvp", "kernel", "--lmax", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir, "flatbvp_kernel_report.json");
    assert_eq!(r["results"][0]["kernel_dim"], 10);
    assert_eq!(r["results"][0]["bottom_singular_values"].as_array().unwrap().len(), 10);
    assert_eq!(
        bartnik(&dir, &["flatbvp", "kernel", "--lmax", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn harmonic_vectors_pass() {
    let dir = scratch("vectors");
    assert_eq!(
        bartnik(&dir, &["flatbvp", "harmonic-vectors", "--lmax", "4"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn zero_data_solve_gives_zero_coefficients() {
    let dir = scratch("zero");
    let input = dir.join("zero.json");
    std::fs::write(&input, r#"{"lmax": 0}"#).unwrap();
    let out = bartnik(
        &dir,
        &["flatbvp", "solve", "--input", input.to_str().unwrap(), "--lmax", "2"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let sol = report(&dir, "solution.json");
    for (_, v) in sol["components"].as_object().unwrap() {
        assert!(v.as_array().unwrap().iter().all(|c| c.as_f64() == Some(0.0)));
    }
}

#[test]
fn invalid_inputs_are_usage_errors() {
    let dir = scratch("invalid");
    let input = dir.join("bad.json");
    std::fs::write(&input, r#"{"lmax": 0, "k_prime": [1, 2]}"#).unwrap();
    let code = |args: &[&str]| bartnik(&dir, args).status.code();
    assert_eq!(code(&["flatbvp", "solve", "--input", input.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["flatbvp", "solve", "--input", "/nonexistent.json"]), Some(2));
    assert_eq!(
        code(&["flatbvp", "solve", "--input", &sample(), "--lmax", "3"]),
        Some(2)
    );
}

#[test]
fn sample_solve_meets_residuals_and_is_deterministic() {
    let dir = scratch("sample");
    let args = ["flatbvp", "solve", "--input", &sample(), "--lmax", "6", "--csv"];
    let out = bartnik(&dir, &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir, "flatbvp_solve_report.json");
    assert!(r["results"]["boundary_residual"].as_f64().unwrap() < 1e-8);
    let csv = std::fs::read_to_string(dir.join("profiles.csv")).unwrap();
    assert!(csv.starts_with("r,component,value\n"));
    assert_eq!(csv.lines().count(), 1 + 10 * 11);
    let first = std::fs::read(dir.join("flatbvp_solve_report.json")).unwrap();
    bartnik(&dir, &args);
    assert_eq!(first, std::fs::read(dir.join("flatbvp_solve_report.json")).unwrap());
}
