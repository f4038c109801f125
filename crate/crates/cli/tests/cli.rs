use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const ELLIPSOID: &str = "ellipsoid(1,1.3,1.7)";
const PERTURBED_TUBE: &str = "tube(n=1,k=1,r=0.5)+perturb(a=0.01,w=3,seed=42)";

fn dnormal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnormal")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn homology_of_named_complexes() {
    let o = dnormal(&["homology", "torus(2)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("B = 4"), "{}", stdout(&o));

    let o = dnormal(&["homology", "torus(2)", "--quotient", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("B = 28"), "{text}");
    assert!(text.contains("PASS"), "{text}");

    let o = dnormal(&["homology", "projective(2)", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["betti"]["total"], 3);
    assert_eq!(v["torsion"]["q"], serde_json::json!([0, 1, 0]));
}

#[test]
fn homology_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("badfile.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&dnormal(&["homology", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&dnormal(&["homology", "missing.json"])), 2);
    assert_eq!(code(&dnormal(&["homology", "sphere(1)", "--quotient", "0"])), 2);
}

#[test]
fn homology_reads_complex_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s1.json");
    let complex = dnormal_core::homology::sphere(1).unwrap();
    std::fs::write(&file, complex.to_json()).unwrap();
    let o = dnormal(&["homology", file.to_str().unwrap(), "--quotient", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("B = 8"), "{}", stdout(&o));
}

#[test]
fn bounds_from_numbers_and_from_shape() {
    let o = dnormal(&["bounds", "--betti", "4", "--dim", "2", "--front-core", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"][0]["theorem"], "3.1");
    assert_eq!(v["bounds"][0]["count"], 10);
    let total = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["theorem"] == "4.4" && e["quantity"] == "diameters")
        .unwrap();
    assert_eq!(total["count"], 12);
    assert!(!total["warnings"].as_array().unwrap().is_empty());

    let o = dnormal(&["bounds", "--shape", ELLIPSOID]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"][0]["count"], 3);
}

#[test]
fn solve_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = dnormal(&["solve", "--shape", ELLIPSOID, "--out", &out, "--format", "json,csv", "--set", "seed_count=2000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("solve.json"));
    assert_eq!(v["diameters"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["seed_count"], 2000);
    let csv = std::fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!("# ellipsoid\nshape = {ELLIPSOID}\nseed_count = 1500\nrng_seed = 9\nout = {}\n", out_arg(&dir.path().join("from_file"))),
    )
    .unwrap();
    let o = dnormal(&["solve", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let v = read_json(&dir.path().join("from_file/solve.json"));
    assert_eq!(v["config"]["seed_count"], 1500);
    assert_eq!(v["config"]["rng_seed"], 4);
}

#[test]
fn invalid_configurations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(code(&dnormal(&["solve", "--shape", ELLIPSOID, "--out", &out, "--set", "seed_count=0"])), 2);
    assert_eq!(code(&dnormal(&["solve", "--shape", "blob(1)", "--out", &out])), 2);
    assert_eq!(code(&dnormal(&["solve", "--out", &out])), 2);
    assert_eq!(code(&dnormal(&["solve", "--shape", ELLIPSOID, "--set", "colour=red"])), 2);
    let incompatible = dnormal(&[
        "verify",
        "--shape",
        ELLIPSOID,
        "--out",
        &out,
        "--set",
        "homology_source=torus(2)",
    ]);
    assert_eq!(code(&incompatible), 2);
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "shape = ellipsoid(1,2,3)\nshape = ellipsoid(1,2,4)\n").unwrap();
    assert_eq!(code(&dnormal(&["solve", "--config", cfg.to_str().unwrap()])), 2);
    assert!(!dir.path().join("solve.json").exists());
}

#[test]
fn solver_budget_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = dnormal(&[
        "solve",
        "--shape",
        ELLIPSOID,
        "--out",
        &out_arg(dir.path()),
        "--set",
        "seed_count=200",
        "--set",
        "newton_max_iter=1",
    ]);
    assert_eq!(code(&o), 3);
    let v = read_json(&dir.path().join("solve.json"));
    assert_eq!(v["diagnostics"]["divergence_warning"], true);
}

#[test]
fn verify_tube_is_satisfied_and_sharp() {
    let dir = tempfile::tempdir().unwrap();
    let o = dnormal(&["verify", "--shape", PERTURBED_TUBE, "--out", &out_arg(dir.path()), "--format", "json,md"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["verdict"], "SATISFIED");
    assert_eq!(v["observed"]["total"], 10);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    for c in v["checks"].as_array().unwrap() {
        let q = c["quantity"].as_str().unwrap();
        if c["theorem"] == "4.4" && q == "diameters" {
            assert_eq!(c["verdict"], "NOT-APPLICABLE");
        } else if c["observed"].is_u64() {
            assert_eq!(c["verdict"], "SATISFIED", "{c}");
            assert_eq!(c["sharp"], true, "{c}");
        }
    }
    let md = std::fs::read_to_string(dir.path().join("verify.md")).unwrap();
    assert!(md.contains("| id | quantity | bound | required | observed | verdict | sharp |"));
}

#[test]
fn truncated_result_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = dnormal(&["solve", "--shape", ELLIPSOID, "--out", &out, "--set", "seed_count=2000"]);
    assert_eq!(code(&o), 0);
    let mut v = read_json(&dir.path().join("solve.json"));
    v["diameters"].as_array_mut().unwrap().pop();
    let fixture = dir.path().join("truncated.json");
    std::fs::write(&fixture, serde_json::to_string(&v).unwrap()).unwrap();

    let verify_out = dir.path().join("verify");
    let o = dnormal(&[
        "verify",
        "--shape",
        ELLIPSOID,
        "--out",
        &out_arg(&verify_out),
        "--result",
        fixture.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let report = read_json(&verify_out.join("verify.json"));
    assert_eq!(report["verdict"], "VIOLATED");
    assert_eq!(report["observed"]["total"], 2);

    let other = dnormal(&["verify", "--shape", "ellipsoid(1,2,3)", "--out", &out, "--result", fixture.to_str().unwrap()]);
    assert_eq!(code(&other), 2);
}

#[test]
fn degenerate_shapes_are_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let o = dnormal(&["verify", "--shape", "sphere(n=2)", "--out", &out_arg(dir.path()), "--set", "seed_count=2000"]);
    assert_eq!(code(&o), 0);
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["verdict"], "NOT-APPLICABLE");
    assert_eq!(v["observed"]["bott_clusters"], 1);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = dnormal(&["report", "--shape", ELLIPSOID, "--out", &out_arg(&out), "--set", "seed_count=3000"]);
        assert_eq!(code(&o), 0);
        texts.push((
            std::fs::read(out.join("report.md")).unwrap(),
            std::fs::read(out.join("verify.json")).unwrap(),
        ));
    }
    assert_eq!(texts[0], texts[1]);
    let md = String::from_utf8(texts[0].0.clone()).unwrap();
    assert!(md.starts_with(&format!("# Double normals of `{ELLIPSOID}`")));
    assert!(md.contains("SATISFIED"));
}
