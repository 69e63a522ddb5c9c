//! End-to-end tests of the jsum binary: output shapes, formats, exit codes,
//! cache behaviour and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jsum"))
}

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn temp_cache() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "jsum-cli-test-{}-{}",
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], cache: &PathBuf) -> Output {
    bin()
        .args(args)
        .arg("--cache")
        .arg(cache)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not json ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn field_summary_and_cache_file() {
    let cache = temp_cache();
    let out = run(&["field", "--p", "19", "--r", "1"], &cache);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["q"], 19);
    assert_eq!(doc["gamma"], serde_json::json!([2]));
    assert_eq!(doc["w"], 1);
    let path = doc["cache_path"].as_str().unwrap();
    assert!(std::fs::metadata(path).is_ok());
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn field_extension_summary() {
    let cache = temp_cache();
    let out = run(&["field", "--p", "7", "--r", "3"], &cache);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["q"], 343);
    assert_eq!(doc["modulus"], serde_json::json!([1, 0, 1, 1]));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn composite_p_is_a_precondition_error() {
    let cache = temp_cache();
    let out = run(&["field", "--p", "4", "--r", "1"], &cache);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"], "precondition");
    assert!(doc["detail"].as_str().unwrap().contains("not prime"));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn jacobi_known_values() {
    let cache = temp_cache();
    // J(0, j) = -1 for j != 0
    let out = run(
        &["jacobi", "--p", "19", "--e", "18", "--i", "0", "--j", "5"],
        &cache,
    );
    let doc = stdout_json(&out);
    assert_eq!(
        doc["value"]["coeffs"],
        serde_json::json!(["-1", "0", "0", "0", "0", "0"])
    );
    // J(m, n) = -1 for m + n = 0
    let out = run(
        &["jacobi", "--p", "19", "--e", "18", "--i", "1", "--j", "17"],
        &cache,
    );
    assert_eq!(
        stdout_json(&out)["value"]["coeffs"],
        serde_json::json!(["-1", "0", "0", "0", "0", "0"])
    );
    // hand-derived nontrivial value; --threads must not change anything
    let out = run(
        &[
            "jacobi", "--p", "19", "--e", "18", "--i", "1", "--j", "1", "--threads", "2",
        ],
        &cache,
    );
    assert_eq!(
        stdout_json(&out)["value"]["coeffs"],
        serde_json::json!(["2", "1", "0", "-4", "1", "-2"])
    );
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn jacobi_order_must_divide() {
    let cache = temp_cache();
    let out = run(
        &["jacobi", "--p", "19", "--e", "4", "--i", "1", "--j", "1"],
        &cache,
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "precondition");
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn dickson_values_and_matrix() {
    let cache = temp_cache();
    let out = run(
        &["dickson", "--p", "19", "--e", "18", "--i", "0", "--j", "0"],
        &cache,
    );
    assert_eq!(stdout_json(&out)["value"], 0); // k - 1 with k = 1
    let out = run(
        &["dickson", "--p", "19", "--e", "18", "--i", "4", "--j", "0"],
        &cache,
    );
    assert_eq!(stdout_json(&out)["value"], 1); // k

    let out = run(&["dickson", "--p", "37", "--e", "9", "--matrix"], &cache);
    let doc = stdout_json(&out);
    let rows = doc["bvals"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for j in 0..9 {
        let col: u64 = rows.iter().map(|row| row[j].as_u64().unwrap()).sum();
        assert_eq!(col, 35, "column {j} sums to q - 2");
    }
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn dickson_requires_matrix_or_indices() {
    let cache = temp_cache();
    let out = run(&["dickson", "--p", "19", "--e", "18"], &cache);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"], "usage");
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn coeff_families() {
    let cache = temp_cache();
    // d-family at q = 37 must equal the reduction-route coefficients
    let out = run(
        &["coeffs", "--p", "37", "--l", "3", "--n", "1", "--family", "d"],
        &cache,
    );
    let d = stdout_json(&out);
    assert_eq!(d["e"], 18);
    assert_eq!(d["coeffs"].as_array().unwrap().len(), 6);

    // b-family reconstructs J_9(1,1) at q = 19
    let out = run(
        &["coeffs", "--p", "19", "--l", "3", "--n", "1", "--family", "b"],
        &cache,
    );
    let b = stdout_json(&out);
    assert_eq!(
        b["coeffs"],
        serde_json::json!(["2", "1", "4", "0", "-1", "2"])
    );
    let jac = run(
        &["jacobi", "--p", "19", "--e", "9", "--i", "1", "--j", "1"],
        &cache,
    );
    assert_eq!(stdout_json(&jac)["value"]["coeffs"], b["coeffs"]);

    // c-family: all residues vanish for n divisible by l
    let out = run(
        &["coeffs", "--p", "19", "--l", "3", "--n", "3", "--family", "c"],
        &cache,
    );
    let c = stdout_json(&out);
    assert_eq!(c["valid"], true);
    assert_eq!(c["residues"], serde_json::json!(["0"]));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn verify_exit_codes() {
    let cache = temp_cache();
    let out = run(&["verify", "--l", "3", "--p", "19", "--r", "1"], &cache);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["failures"], 0);
    assert_eq!(doc["params"]["seed"], 0x4a53);

    let out = run(&["verify", "--l", "3", "--p", "11", "--r", "1"], &cache);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"], "precondition");
    assert!(doc["detail"].as_str().unwrap().contains("mod 2l^2"));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn verify_suite_selection_and_seed() {
    let cache = temp_cache();
    let out = run(
        &[
            "verify", "--l", "3", "--p", "19", "--suite", "props", "--suite", "coeffs", "--seed",
            "0x10",
        ],
        &cache,
    );
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["params"]["seed"], 16);
    assert_eq!(doc["params"]["suites"], serde_json::json!(["props", "coeffs"]));
    for check in doc["checks"].as_array().unwrap() {
        let cat = check["category"].as_str().unwrap();
        let status = check["status"].as_str().unwrap();
        if cat == "prop" || cat == "coeff" {
            assert_eq!(status, "pass");
        } else {
            assert_eq!(status, "skipped");
        }
    }
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let cache = temp_cache();
    let args = ["verify", "--l", "3", "--p", "19", "--seed", "7"];
    let a = run(&args, &cache);
    let b = run(&args, &cache);
    assert_eq!(a.stdout, b.stdout);

    let args = ["jacobi", "--p", "19", "--e", "18", "--i", "2", "--j", "3"];
    let a = run(&args, &cache);
    let b = run(&args, &cache);
    assert_eq!(a.stdout, b.stdout);
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn jsum_cache_env_is_honoured() {
    let dir = temp_cache();
    let out = bin()
        .args(["field", "--p", "19"])
        .env("JSUM_CACHE", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("jsix-p19-r1.tab").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corrupted_cache_is_exit_code_3() {
    let cache = temp_cache();
    // build a valid cache file, then flip a byte in the table body
    let out = run(&["field", "--p", "19", "--r", "1"], &cache);
    assert!(out.status.success());
    let path = cache.join("jsix-p19-r1.tab");
    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    std::fs::write(&path, &bytes).unwrap();

    let out = run(&["field", "--p", "19", "--r", "1"], &cache);
    assert_eq!(out.status.code(), Some(3));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"], "cache");
    assert!(doc["detail"].as_str().unwrap().contains("crc32"));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn usage_errors_are_machine_readable() {
    let out = bin().args(["jacobi", "--p", "19"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["error"], "usage");
}

#[test]
fn csv_and_pretty_formats() {
    let cache = temp_cache();
    let out = run(
        &[
            "dickson", "--p", "37", "--e", "9", "--matrix", "--format", "csv",
        ],
        &cache,
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim().lines().count(), 9);
    assert!(text.lines().next().unwrap().split(',').count() == 9);

    let out = run(
        &[
            "verify", "--l", "3", "--p", "19", "--suite", "congruences", "--format", "pretty",
        ],
        &cache,
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[pass]"));
    assert!(text.contains("all checks passed"));

    let out = run(
        &[
            "jacobi", "--p", "19", "--e", "18", "--i", "1", "--j", "1", "--format", "pretty",
        ],
        &cache,
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2 + z - 4*z^3 + z^4 - 2*z^5"));
    let _ = std::fs::remove_dir_all(&cache);
}
