use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use wignerkit::commutative::{composition_operator, PointMap};
use wignerkit::jordan::LinearMapTable;
use wignerkit::{make_algebra, Complex64, Element};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wignerkit")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_classify_holds() {
    let dir = TempDir::new().unwrap();
    for seed in ["0", "1", "7"] {
        let out = run(&["gen", "canonical", "--seed", seed]);
        assert_eq!(code(&out), 0);
        let map = write(&dir, "map.json", std::str::from_utf8(&out.stdout).unwrap());
        let report = run(&["classify", "--input", &map, "--samples", "40"]);
        assert_eq!(code(&report), 0, "{}", String::from_utf8_lossy(&report.stdout));
        assert_eq!(json(&report)["locally_solid"], "structurally_true");
    }
}

#[test]
fn classify_bloch_reports_tp_failure() {
    let out = run(&["classify", "--map", "dim2-bloch:alpha=0.25"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["bi_orthogonal"]["status"], "holds");
    assert_eq!(report["locally_tp_preserving"]["status"], "fails");
    let w = &report["locally_tp_preserving"]["witness"];
    let gap = (w["input_tp"].as_f64().unwrap() - w["output_tp"].as_f64().unwrap()).abs();
    assert!(gap >= 0.05);
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = run(&["gen", "canonical", "--seed", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let truncated = write(&dir, "t.json", &text[..text.len() / 2]);
    for cmd in ["classify", "reconstruct", "jordan-split", "banach-stone"] {
        let out = run(&[cmd, "--input", &truncated]);
        assert_eq!(code(&out), 2, "{cmd}");
        assert!(!out.stderr.is_empty());
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["reconstruct", "--input", path_str(&missing)])), 2);
    assert_eq!(code(&run(&["classify", "--map", "no-such-map"])), 2);
    assert_eq!(code(&run(&["classify", "--map", "dim2-bloch:alpha=0.9"])), 2);
    assert_eq!(code(&run(&["classify", "--map", "dim2-bloch", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["classify", "--map", "dim2-bloch", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["gen", "algebra", "--dims", "0,2"])), 2);
    assert_eq!(code(&run(&["gen", "canonical", "--source-dims", "3", "--target-dims", "2", "--assignment", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn reconstruct_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "gen", "canonical", "--source-dims", "2,3", "--target-dims", "3,4", "--assignment", "1,0", "--kinds",
        "antilinear,linear", "--seed", "5",
    ]);
    assert_eq!(code(&out), 0);
    let map = write(&dir, "map.json", std::str::from_utf8(&out.stdout).unwrap());
    let out = run(&["reconstruct", "--input", &map, "--samples", "50"]);
    assert_eq!(code(&out), 0);
    let body = json(&out);
    assert_eq!(body["finite_dim"], true);
    assert_eq!(body["verification"]["status"], "verified");
    assert_eq!(body["map"]["fibers"][0]["kind"], "antilinear");
    assert_eq!(body["map"]["fibers"][0]["target_block"], 1);
}

#[test]
fn reconstruct_bloch_fails() {
    let out = run(&["reconstruct", "--map", "dim2-bloch:alpha=0.25"]);
    assert_eq!(code(&out), 1);
    let body = json(&out);
    assert_eq!(body["failure"]["failure"], "fiber");
    assert_eq!(body["finite_dim"], true);
}

#[test]
fn jordan_split_examples() {
    let dir = TempDir::new().unwrap();
    let alg = make_algebra(&[2, 2]).unwrap();
    let table = LinearMapTable::from_fn(alg.clone(), alg.clone(), |a| {
        Element::new(alg.clone(), vec![a.blocks()[0].clone(), a.blocks()[1].transpose()])
    })
    .unwrap();
    let input = write(&dir, "t.json", &serde_json::to_string(&table).unwrap());
    let out = run(&["jordan-split", "--input", &input, "--samples", "20"]);
    assert_eq!(code(&out), 0);
    let body = json(&out);
    assert_eq!(body["F_blocks"], serde_json::json!([0]));
    assert_eq!(body["tags"][0]["tag"], "multiplicative");
    assert_eq!(body["tags"][1]["tag"], "anti_multiplicative");
    assert_eq!(body["verified"]["isometry"]["status"], "verified");

    let scaled = LinearMapTable::from_fn(alg.clone(), alg, |a| Ok(a.scale(Complex64::from(2.0)))).unwrap();
    let input = write(&dir, "s.json", &serde_json::to_string(&scaled).unwrap());
    let out = run(&["jordan-split", "--input", &input]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["verified"]["jordan"]["status"], "fails");

    let generated = run(&["gen", "jordan", "--dims", "3,1,3", "--seed", "4"]);
    let input = write(&dir, "g.json", std::str::from_utf8(&generated.stdout).unwrap());
    assert_eq!(code(&run(&["jordan-split", "--input", &input, "--samples", "10"])), 0);
}

#[test]
fn banach_stone_round_trip_and_failure() {
    let dir = TempDir::new().unwrap();
    let nu = write(&dir, "nu.json", r#"{"n":3,"s":2,"nu":[2,0]}"#);
    let out = run(&["banach-stone", "--input", &nu]);
    assert_eq!(code(&out), 0);
    let table = write(&dir, "table.json", std::str::from_utf8(&out.stdout).unwrap());
    let back = run(&["banach-stone", "--input", &table]);
    assert_eq!(code(&back), 0);
    assert_eq!(json(&back), serde_json::json!({"n": 3, "s": 2, "nu": [2, 0]}));

    let k = make_algebra(&[1, 1, 1]).unwrap();
    let average = LinearMapTable::from_fn(k.clone(), k.clone(), |f| {
        let mean = (0..3).map(|i| f.blocks()[i][(0, 0)]).sum::<Complex64>() / 3.0;
        Ok(k.identity().scale(mean))
    })
    .unwrap();
    let input = write(&dir, "avg.json", &serde_json::to_string(&average).unwrap());
    let out = run(&["banach-stone", "--input", &input]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["not_star_homomorphism"]["values"].is_array());

    let bad = write(&dir, "bad.json", r#"{"n":2,"s":1,"nu":[5]}"#);
    assert_eq!(code(&run(&["banach-stone", "--input", &bad])), 2);

    let generated = run(&["gen", "point-map", "--n", "4", "--s", "6", "--seed", "9"]);
    let nu: PointMap = serde_json::from_slice(&generated.stdout).unwrap();
    assert_eq!(nu.s(), 6);
    let table: LinearMapTable = {
        let input = write(&dir, "g.json", std::str::from_utf8(&generated.stdout).unwrap());
        serde_json::from_slice(&run(&["banach-stone", "--input", &input]).stdout).unwrap()
    };
    assert_eq!(table, composition_operator(&nu));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for target in [&a, &b] {
        assert_eq!(code(&run(&["gen", "canonical", "--seed", "11", "--output", path_str(target)])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let map = path_str(&a);
    let first = run(&["classify", "--input", map, "--seed", "3", "--samples", "30"]);
    let second = run(&["classify", "--input", map, "--seed", "3", "--samples", "30", "--sequential"]);
    assert_eq!(first.stdout, second.stdout);
    let first = run(&["reconstruct", "--input", map, "--seed", "3"]);
    let second = run(&["reconstruct", "--input", map, "--seed", "3"]);
    assert_eq!(first.stdout, second.stdout);
    for what in [&["gen", "jordan", "--seed", "8"][..], &["gen", "algebra", "--seed", "8"][..]] {
        assert_eq!(run(what).stdout, run(what).stdout);
    }
}
