use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tightsurg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v["result"].clone()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn trefoil_two_surgery_is_tight() {
    let o = run(&["tight", "--knot", "torus:3,2", "--slope", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("TightNonzeroInvariant"));
    assert_eq!(json(&["tight", "--knot", "torus:3,2", "--slope", "2"])["verdict"], "TightNonzeroInvariant");
}

#[test]
fn witness_for_two_structures() {
    let r = json(&["witness", "--m", "2"]);
    assert_eq!(r["primes"], serde_json::json!([3, 5]));
    assert_eq!(r["alpha"], 6);
    let h = r["h1_order"].as_u64().unwrap();
    assert_eq!(h, 15);
    let entries = r["entries"].as_array().unwrap();
    let orders: Vec<u64> = entries.iter().map(|e| e["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, [3, 5]);
    // order of c * generator in Z/h is h / gcd(h, c)
    for e in entries {
        let c = e["c1_coefficient"].as_i64().unwrap().unsigned_abs();
        assert_eq!(h / gcd(h, c), e["order"].as_u64().unwrap());
    }
}

#[test]
fn lambda_has_no_diagonal_embedding() {
    let o = run(&["lattice-embed", "--gram", "lambda:2,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "no embedding (bound m=12)\n");
}

#[test]
fn chain_lattice_embeds_minimally() {
    // the -2 -2 -2 chain is D_3: e2-e3, e1-e2, e2+e3, and two coordinates
    // cannot hold three independent vectors
    let f = temp_file("0 -2\n1 -2\n2 -2\n0 1\n1 2\n");
    let spec = format!("plumbing:{}", f.path().display());
    let r = json(&["lattice-embed", "--gram", &spec]);
    assert_eq!(r["m"], 3);
    assert!(r["witness"].is_object());
}

#[test]
fn sublattice_into_given_target() {
    let target = temp_file("2 2\n-1 0\n0 -1\n");
    let g = temp_file("1 1\n-2\n");
    let o = run(&["lattice-embed", "--gram", g.path().to_str().unwrap(), "--into", target.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("embedding found"));
}

#[test]
fn homology_inputs() {
    let m = temp_file("2 2\n2 0\n0 3\n");
    let r = json(&["homology", "--matrix", m.path().to_str().unwrap()]);
    assert_eq!(r["invariant_factors"], serde_json::json!([6]));
    let d = temp_file("a unknot 2\nb unknot 2\na b 1\n");
    let r = json(&["homology", "--diagram", d.path().to_str().unwrap()]);
    // det [[2,1],[1,2]] = 3
    assert_eq!(r["invariant_factors"], serde_json::json!([3]));
    let r = json(&["homology", "--slope", "-7/3"]);
    assert_eq!(r["invariant_factors"], serde_json::json!([7]));
    let r = json(&["homology", "--slope", "0"]);
    assert_eq!(r["free_rank"], 1);
}

#[test]
fn fillable_prints_a_certificate_in_the_obstructed_range() {
    let r = json(&["fillable", "--n", "1", "--slope", "3"]);
    assert_eq!(r["verdict"]["verdict"], "NoFillable");
    for part in ["lspace", "plumbing", "sublattice", "diagonal"] {
        assert!(r["certificate"][part].is_object(), "{part}");
    }
    let r = json(&["fillable", "--n", "1", "--slope", "4"]);
    assert_eq!(r["verdict"]["verdict"], "SteinFillable");
    assert!(r["certificate"].is_null());
}

#[test]
fn plumbing_and_translate_and_lspace() {
    let r = json(&["plumbing", "--n", "1", "--slope", "7/2"]);
    assert_eq!(r["plumbing"]["determinant"].as_i64().unwrap().abs(), 7);
    assert_eq!(r["plumbing"]["definiteness"], "PositiveDefinite");

    let r = json(&["translate", "--knot", "torus:3,2", "--slope", "-5/2"]);
    assert_eq!(r["h1"]["invariant_factors"], serde_json::json!([5]));
    let r = json(&["translate", "--knot", "unknot", "--contact", "1/3"]);
    assert_eq!(r["translation"]["plus_ones"], 3);

    let o = run(&["lspace", "--knot", "torus:3,2", "--slope", "3/2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("-R1-> 3/2"));
    let o = run(&["lspace", "--knot", "torus:3,2", "--slope", "1/2"]);
    assert!(stdout(&o).starts_with("no derivation"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["witness", "--m", "3", "--json"][..],
        &["translate", "--knot", "torus:5,2", "--slope", "-11/3", "--seed", "9", "--json"],
        &["fillable", "--n", "2", "--slope", "5", "--json"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let o = run(&["tight", "--knot", "unknot", "--slope", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");

    assert_eq!(run(&["plumbing", "--n", "1", "--slope", "4"]).status.code(), Some(1));
    assert_eq!(run(&["homology", "--matrix", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["tight", "--knot", "torus:3,2"]).status.code(), Some(2));
    assert_eq!(run(&["tight", "--knot", "torus:3", "--slope", "2"]).status.code(), Some(2));
    assert_eq!(run(&["tight", "--knot", "torus:3,2", "--slope", "2/0"]).status.code(), Some(2));
}
