use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pinvkit_core::io::{circulant_from_json, matrix_from_json, matrix_to_json};
use pinvkit_core::{pinv_oracle, Matrix, Tolerance, C64};
use serde_json::Value;

fn pinvkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinvkit"))
        .args(args)
        .env_remove("PINVKIT_TOL_RESIDUAL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("report on stderr is JSON")
}

fn real_gen(o: &Output) -> Vec<f64> {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = circulant_from_json(&stdout(o)).unwrap();
    c.gen()
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-12);
            z.re
        })
        .collect()
}

fn close(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn read_matrix(path: &Path) -> Matrix {
    matrix_from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_sum_circulant() {
    let o = pinvkit(&["circ", "--gen", "1,-1,0", "--method", "zero-sum", "--alpha", "1"]);
    close(&real_gen(&o), &[1.0 / 3.0, 0.0, -1.0 / 3.0]);
    assert_eq!(report_of(&o)["pass"], Value::Bool(true));
}

#[test]
fn two_term_alternating_null() {
    let o = pinvkit(&["circ", "--gen", "1,1,0,0", "--method", "two-term"]);
    close(&real_gen(&o), &[6.0 / 16.0, -2.0 / 16.0, -2.0 / 16.0, 6.0 / 16.0]);
    assert_eq!(report_of(&o)["details"]["path"], "AlternatingNull");
}

#[test]
fn two_term_from_parameters_matches_generator_form() {
    let a = pinvkit(&["circ", "--method", "two-term", "--alpha", "2", "--beta", "-1", "--k", "2", "--n", "5"]);
    let b = pinvkit(&["circ", "--gen", "0,2,-1,0,0", "--method", "two-term"]);
    close(&real_gen(&a), &real_gen(&b));
}

#[test]
fn spectral_identity() {
    let o = pinvkit(&["circ", "--gen", "1,0,0", "--method", "spectral"]);
    close(&real_gen(&o), &[1.0, 0.0, 0.0]);
}

#[test]
fn block_pattern_passes_self_check() {
    let o = pinvkit(&["circ", "--method", "block", "--alpha", "1", "--beta", "2", "--k", "2", "--q", "3", "--materialize"]);
    assert_eq!(o.status.code(), Some(0));
    let x = matrix_from_json(&stdout(&o)).unwrap();
    assert_eq!(x.shape(), (9, 9));
}

#[test]
fn svd_on_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", &matrix_to_json(&Matrix::diag_real(&[2.0, 0.0])));
    let out = dir.path().join("x.json");
    let o = pinvkit(&["pinv", "--input", &input, "--method", "svd", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["rank"], 1);
    assert!(read_matrix(&out).distance(&Matrix::diag_real(&[0.5, 0.0])) < 1e-15);
}

#[test]
fn csv_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.csv", "# diag\n4,0\n0,0\n");
    let o = pinvkit(&["pinv", "--input", &input, "--method", "normal"]);
    assert_eq!(o.status.code(), Some(0));
    let x = matrix_from_json(&stdout(&o)).unwrap();
    assert!(x.distance(&Matrix::diag_real(&[0.25, 0.0])) < 1e-15);
}

#[test]
fn rank_completion_matches_svd() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("g");
    let o = pinvkit(&[
        "gen", "random-matrix", "--rows", "6", "--cols", "6", "--rank", "3", "--seed", "7", "--output", d.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let a = d.join("A.json");
    let x1 = dir.path().join("x1.json");
    let x2 = dir.path().join("x2.json");
    for (method, out) in [("rank-completion", &x1), ("svd", &x2)] {
        let o = pinvkit(&["pinv", "--input", a.to_str().unwrap(), "--method", method, "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{method}");
    }
    let (x1, x2) = (read_matrix(&x1), read_matrix(&x2));
    assert!(x1.distance(&x2) <= 1e-9 * x2.frobenius_norm().max(1.0));
}

#[test]
fn pair_completion() {
    let dir = tempfile::tempdir().unwrap();
    let a = Matrix::from_real_rows(&[vec![2.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]);
    let b = Matrix::from_real_rows(&[vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 1.0]]);
    let ap = write(dir.path(), "a.json", &matrix_to_json(&a));
    let bp = write(dir.path(), "b.json", &matrix_to_json(&b));
    let o = pinvkit(&["pinv", "--input", &ap, "--method", "pair", "--aux", &bp]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let x = matrix_from_json(&stdout(&o)).unwrap();
    assert!(x.distance(&pinv_oracle(&a, &Tolerance::default()).unwrap()) < 1e-12);
    let missing = pinvkit(&["pinv", "--input", &ap, "--method", "pair"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn path_tree_gives_half_distance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "t.csv", "i,j,w\n1,2,1\n2,3,-1\n");
    let o = pinvkit(&["tree", "--input", &input]);
    assert_eq!(o.status.code(), Some(0));
    let x = matrix_from_json(&stdout(&o)).unwrap();
    let half = Matrix::from_real_rows(&[vec![0.0, 0.5, 0.0], vec![0.5, 0.0, -0.5], vec![0.0, -0.5, 0.0]]);
    assert!(x.distance(&half) < 1e-14);
    let r = report_of(&o);
    assert_eq!(r["rank"], 2);
    assert!(r["details"]["u_hat"].is_array());
}

#[test]
fn non_zero_sum_tree_is_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "t.csv", "1,2,1\n2,3,2\n");
    assert_eq!(pinvkit(&["tree", "--input", &input]).status.code(), Some(3));
}

#[test]
fn wheel_even_order_rejected() {
    assert_eq!(pinvkit(&["wheel", "--n", "4"]).status.code(), Some(3));
}

#[test]
fn wheel_five() {
    let o = pinvkit(&["wheel", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let x = matrix_from_json(&stdout(&o)).unwrap();
    assert!((x.get(0, 0) - C64::new(-1.0, 0.0)).norm() < 1e-14);
    for j in 1..5 {
        assert!((x.get(0, j) - C64::new(0.25, 0.0)).norm() < 1e-14);
    }
    let core = [-4.0, 0.0, 4.0, 0.0];
    for i in 0..4 {
        for j in 0..4 {
            let want = core[(j + 4 - i) % 4] / 16.0;
            assert!((x.get(i + 1, j + 1).re - want).abs() < 1e-14, "({i},{j})");
        }
    }
    let r = report_of(&o);
    assert_eq!(r["details"]["properties"]["holds"], Value::Bool(true));
    let checks = r["details"]["z_identities"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["holds"] == Value::Bool(true)));
}

#[test]
fn verify_identity_and_a_wrong_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let i = write(dir.path(), "i.json", &matrix_to_json(&Matrix::identity(3)));
    let two = write(dir.path(), "two.json", &matrix_to_json(&Matrix::identity(3).scale_real(2.0)));
    let ok = pinvkit(&["verify", "--input", &i, "--aux", &i]);
    assert_eq!(ok.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&ok.stdout).unwrap();
    let entries = r["residuals"]["entries"].as_array().unwrap();
    assert!(entries.len() >= 4 && entries.iter().all(|e| e["pass"] == Value::Bool(true)));
    assert_eq!(pinvkit(&["verify", "--input", &i, "--aux", &two]).status.code(), Some(2));
}

#[test]
fn sum_family_generation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("fam");
    let o = pinvkit(&[
        "gen", "sum-family", "--k", "3", "--rows", "6", "--cols", "5", "--seed", "42", "--output", d.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["details"]["certificate"]["holds"], Value::Bool(true));
    assert_eq!(r["outputs"].as_array().unwrap().len(), 3);
    for k in 1..=3 {
        assert_eq!(read_matrix(&d.join(format!("A{k}.json"))).shape(), (6, 5));
    }
}

#[test]
fn generated_tree_round_trips_through_tree_command() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("t");
    let o = pinvkit(&["gen", "zero-sum-tree", "--n", "9", "--seed", "3", "--output", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = pinvkit(&["tree", "--input", d.join("tree.csv").to_str().unwrap(), "--alpha", "-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for tag in ["a", "b"] {
        let d = dir.path().join(tag);
        let o = pinvkit(&["gen", "rank-additive-pair", "--n", "6", "--seed", "11", "--output", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let out = dir.path().join(format!("{tag}.json"));
        let o = pinvkit(&["pinv", "--input", d.join("A1.json").to_str().unwrap(), "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        runs.push((fs::read(d.join("A1.json")).unwrap(), fs::read(d.join("A2.json")).unwrap(), fs::read(out).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"rows\": 2}");
    assert_eq!(pinvkit(&["pinv", "--input", &bad]).status.code(), Some(1));
    assert_eq!(pinvkit(&["pinv", "--input", "/does/not/exist"]).status.code(), Some(1));
    assert_eq!(pinvkit(&["circ", "--gen", "1,x"]).status.code(), Some(1));
    assert_eq!(pinvkit(&["frobnicate"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_pinvkit"))
        .args(["circ", "--gen", "1,0"])
        .env("PINVKIT_TOL_RESIDUAL", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tight_tolerance_reports_residual_failure() {
    let o = pinvkit(&["circ", "--gen", "1,2,3,4,5,6,7", "--tol-residual", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report_of(&o)["pass"], Value::Bool(false));
}
