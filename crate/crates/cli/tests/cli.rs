//! End-to-end runs of the `subrank` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subrank")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cim_of_the_sl2_matrix() {
    let out = run(&["cim", data("sl2_matrix.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let w: Vec<i64> = stdout_json(&out)["decompositions"][0]["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().or_else(|| v.as_str().and_then(|s| s.parse().ok())).unwrap())
        .collect();
    assert_eq!(w, vec![-2, 2]);
}

#[test]
fn cim_of_identity_and_singular() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", &json!({"field": {"kind": "Q"}, "matrix": [["1", "0"], ["0", "1"]]}));
    let out = run(&["cim", &id]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["decompositions"][0]["weights"].as_array().unwrap().len(), 2);
    assert!(stdout_json(&out)["decompositions"][0]["weights"].as_array().unwrap().iter().all(|w| w == &json!(0) || w == &json!("0")));
    let sing = write(&dir, "sing.json", &json!({"field": {"kind": "Q"}, "matrix": [["1", "t"], ["1", "t"]]}));
    assert_eq!(code(&run(&["cim", &sing])), 3);
}

#[test]
fn sl2_witness_round_trip() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("w.json");
    let out = run(&[
        "witness",
        data("sl2_cubic_g.json").to_str().unwrap(),
        data("sl2_cubic_p.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let w: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(w["q"]["entries"], json!([{"idx": [1, 1], "value": "1"}]));
    assert_eq!(w["qTilde"]["entries"], json!([{"idx": [4, 1], "value": "1"}]));
    assert_eq!(w["sharedLimit"]["entries"], json!([]));
    assert_eq!(code(&run(&["verify", out_path.to_str().unwrap()])), 0);

    let mut bad = w.clone();
    bad["qTilde"]["entries"] = json!([{"idx": [3, 1], "value": "1"}]);
    let bad_path = write(&dir, "bad.json", &bad);
    let out = run(&["verify", &bad_path]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("clause"));
}

#[test]
fn certify_exit_codes() {
    for (n, rank) in [("9", 14), ("4", 1)] {
        let out = run(&["certify", "--n", n]);
        assert_eq!(code(&out), 0, "n = {n}");
        let c = stdout_json(&out);
        assert_eq!(c["verdict"], "Certified");
        assert_eq!(c["jacobianRank"], json!(rank));
    }
    let out = run(&["certify", "--n", "10", "--r", "4"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("fit condition"));
}

#[test]
fn certificate_verification() {
    let dir = TempDir::new().unwrap();
    let cert_path = dir.path().join("c.json");
    let out = run(&["certify", "--n", "9", "--seed", "3", "--out", cert_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let cert_arg = cert_path.to_str().unwrap();
    assert_eq!(code(&run(&["verify", cert_arg])), 0);
    // a different seed draws a different fresh prime
    assert_eq!(code(&run(&["verify", cert_arg, "--seed", "99"])), 0);

    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    cert["TTilde"]["entries"].as_array_mut().unwrap().push(json!({"idx": [1, 1, 1], "value": "5"}));
    let tampered = write(&dir, "t.json", &cert);
    let out = run(&["verify", &tampered]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("T|_P = S|_P"));
}

#[test]
fn bounds_table() {
    let out = run(&["bounds", "--n-max", "200", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,d3_lower,generic_subrank,dmz_lo,border_upper,excess_flag");
    assert_eq!(lines[9], "9,3,5,3,9,false");
    assert!(lines[200].starts_with("200,25,24,"));
    assert!(lines[200].ends_with(",true"));

    let out = run(&["bounds", "--n-min", "10", "--n-max", "9", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), lines[0]);
}

#[test]
fn generated_instances_produce_witnesses() {
    let dir = TempDir::new().unwrap();
    for (seed, dims) in [("1", "3,3"), ("2", "2,3,2"), ("3", "4,1")] {
        let inst = dir.path().join(format!("inst{seed}.json"));
        let out = run(&["gen", "--witness", "--dims", dims, "--seed", seed, "--out", inst.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let out = run(&["witness", inst.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "dims {dims}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&run(&["gen", "--dims", "3,3"])), 3);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["certify", "--n", "16", "--seed", "7"][..],
        &["gen", "--witness", "--dims", "3,2,2", "--seed", "7"],
        &["certify", "--n", "8", "--field", "fp", "--seed", "5"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
