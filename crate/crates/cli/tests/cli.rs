use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const C_MATRIX: &str = "0,0,1,-1\n0,-1,1,0\n1,1,-2,0\n-1,0,0,1\n";

fn mesostab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesostab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

/// Determinant by cofactor expansion, independent of the library.
fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    (0..m.len())
        .map(|c| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &x)| x).collect())
                .collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

#[test]
fn indefinite_matrix_is_rejected_with_checkable_witnesses() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.csv", C_MATRIX);
    let out = mesostab(&["--format", "json", "analyze-matrix", arg(&input)]);
    assert_eq!(out.status.code(), Some(1));
    let report = &json(&out)["report"];
    assert_eq!(report["verdict"], "fails necessary condition");
    assert_eq!(report["definiteness"], "indefinite");

    let rows: Vec<Vec<f64>> = C_MATRIX
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let subset: Vec<usize> = report["minor_witness"]["subset"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as usize - 1)
        .collect();
    let sub: Vec<Vec<f64>> = subset.iter().map(|&i| subset.iter().map(|&j| rows[i][j]).collect()).collect();
    let det = cofactor_det(&sub);
    assert!(det < 0.0);
    assert_eq!(det, report["minor_witness"]["value"].as_f64().unwrap());

    let v: Vec<f64> = report["vector_witness"]["vector"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let q: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| v[i] * rows[i][j] * v[j]).sum();
    assert!(q < 0.0);

    let cut = &report["structure"]["negative_cut"];
    let side: Vec<u64> = cut["side"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    let crossing = cut["crossing"].as_array().unwrap();
    assert!(!crossing.is_empty());
    for e in crossing {
        assert!(e["weight"].as_f64().unwrap() < 0.0);
        let (u, w) = (e["u"].as_u64().unwrap(), e["v"].as_u64().unwrap());
        assert_ne!(side.contains(&u), side.contains(&w));
    }
}

#[test]
fn two_oscillator_lock_passes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k.txt", "N 2\nomega: 0.5 -0.5\n1 2 1\n");
    let out = mesostab(&["--format", "json", "kuramoto", arg(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let report = &json(&out)["report"];
    assert_eq!(report["verdict"], "passes necessary condition");
    let tree = report["structure"]["positive_spanning_tree"].as_array().unwrap();
    assert_eq!(tree.len(), 1);
    assert!((tree[0]["weight"].as_f64().unwrap() - 0.75f64.sqrt()).abs() < 1e-9);
    let phases = report["kuramoto"]["phases"].as_array().unwrap();
    assert!((phases[0].as_f64().unwrap() - 0.5f64.asin()).abs() < 1e-9);

    let text = mesostab(&["kuramoto", arg(&input)]);
    assert_eq!(text.status.code(), Some(0));
    let stdout = String::from_utf8(text.stdout).unwrap();
    assert!(stdout.contains("positive spanning tree: 1-2"), "{stdout}");
}

#[test]
fn identity_on_a_signed_triangle() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.txt", "n 3\n1 2 1\n2 3 1\n1 3 -1\n");
    let out = mesostab(&["verify-identity", "--v1", "1,2", arg(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let sweep = mesostab(&["--format", "json", "verify-identity", arg(&input)]);
    assert_eq!(sweep.status.code(), Some(0));
    assert_eq!(json(&sweep)["report"]["all_hold"], true);
    let bad = mesostab(&["verify-identity", "--v1", "4", arg(&input)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn json_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.csv", C_MATRIX);
    let a = mesostab(&["--format", "json", "analyze-matrix", arg(&input)]);
    let b = mesostab(&["--format", "json", "analyze-matrix", arg(&input)]);
    assert_eq!(a.stdout, b.stdout);
    let digest = json(&a)["input_digest"].as_str().unwrap().to_owned();
    assert!(digest.starts_with("sha256:") && digest.len() == 7 + 64);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.txt", "n 3\n# comment\n1 2 1\n2 3 oops\n");
    let out = mesostab(&["analyze-graph", arg(&input)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 4"), "{stderr}");
}

#[test]
fn guard_refusal_names_the_limit() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "id.csv", "2,1,0\n1,2,0\n0,0,1\n");
    let out = mesostab(&["--nmax", "2", "analyze-matrix", arg(&input)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("N_max = 2"), "{stderr}");
    assert_eq!(mesostab(&["--nmax", "3", "analyze-matrix", arg(&input)]).status.code(), Some(0));
}

#[test]
fn self_test_passes() {
    let out = mesostab(&["self-test"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
