use serde_json::{json, Value};

use super::selftest::selftest;
use super::*;

fn run(v: Value) -> Report {
    run_problem(&v, Overrides::default()).unwrap()
}

fn schema_pointers(v: Value) -> Vec<String> {
    run_problem(&v, Overrides::default()).unwrap_err().into_iter().map(|e| e.pointer).collect()
}

fn odd_line() -> Value {
    json!({"kind": "connection", "name": "odd line", "chart": {"n": 0, "m": 1}, "gamma": {"1,1,1": "xi1"}})
}

#[test]
fn odd_line_report() {
    let r = run(odd_line());
    let res = &r.json["results"];
    assert_eq!(res["holonomy"]["dim"], json!({"p": 1, "q": 0}));
    assert_eq!(res["holonomy"]["equals_gl"], json!(true));
    assert_eq!(res["flat"], json!(false));
    assert_eq!(res["curvature"]["witness"], json!({"B": 1, "a": 1, "b": 1, "A": 1, "value": "2"}));
    assert_eq!(res["bianchi"]["first"], json!(false));
    assert_eq!(res["parallel_sections"], json!([]));
    assert_eq!(res["decomposability"]["status"], json!("weakly_irreducible"));
    assert!(r.ok());
    assert_eq!(r.json["status"]["certified"], json!(true));
}

#[test]
fn zero_connection_report() {
    let r = run(json!({"kind": "connection", "chart": {"n": 1, "m": 1}, "gamma": {}, "options": {"transport_steps": 20}}));
    let res = &r.json["results"];
    assert_eq!(res["holonomy"]["dim"], json!({"p": 0, "q": 0}));
    assert_eq!(res["flat"], json!(true));
    assert_eq!(res["parallel_sections"].as_array().unwrap().len(), 2);
    assert!(res["parallel_sections"].as_array().unwrap().iter().all(|s| s["status"] == "exact"));
    assert_eq!(res["transport"]["within_tolerance"], json!(true));
    assert_eq!(res["torsion"]["zero"], json!(true));
}

#[test]
fn bundle_connection_has_no_tangent_data() {
    let r = run(json!({"kind": "connection", "chart": {"n": 1, "m": 0}, "rank": {"p": 1, "q": 1}, "gamma": {"1,2,2": "x1"}}));
    assert!(r.json["results"]["torsion"].is_null());
    assert!(r.json["results"]["ricci"].is_null());
    assert_eq!(r.json["results"]["flat"], json!(true));
}

#[test]
fn gl11_algebra_report() {
    let r = run(json!({"kind": "algebra", "algebra": {"classical": "gl", "p": 1, "q": 1}}));
    let res = &r.json["results"];
    assert_eq!(res["algebra"], json!("gl(1|1)"));
    assert_eq!(res["is_berger"], json!(true));
    assert_eq!(res["dims"]["H22_derived"], json!({"p": 0, "q": 0}));
    assert_eq!(res["exactness_ok"], json!(true));
    assert!(r.ok());
}

#[test]
fn reports_are_byte_identical() {
    let a = run(odd_line()).to_pretty();
    let b = run(odd_line()).to_pretty();
    assert_eq!(a, b);
    let text = serde_json::to_string(&odd_line()).unwrap();
    assert_eq!(run_problem_str(&text, Overrides::default()).unwrap().to_pretty(), a);
}

#[test]
fn expectations_decide_ok() {
    let mut p = odd_line();
    p["expect"] = json!({"/results/flat": true, "/results/holonomy/dim/p": 1});
    let r = run(p);
    assert!(!r.ok());
    let a = r.json["assertions"].as_array().unwrap();
    assert_eq!(a.len(), 2);
    assert_eq!(a.iter().filter(|x| x["pass"] == true).count(), 1);
}

#[test]
fn schema_errors_carry_pointers() {
    assert_eq!(schema_pointers(json!({"kind": "connection", "chart": {"n": 0, "m": 1}, "gama": {}})), vec!["/gama"]);
    assert_eq!(schema_pointers(json!({"kind": "conection"})), vec!["/kind"]);
    assert_eq!(schema_pointers(json!({"kind": "connection", "chart": {"n": "two", "m": 1}})), vec!["/chart/n"]);
    assert_eq!(schema_pointers(json!({"kind": "connection", "gamma": {}})), vec!["/chart"]);
    assert_eq!(
        schema_pointers(json!({"kind": "connection", "chart": {"n": 0, "m": 1}, "gamma": {"1,9,1": "1"}})),
        vec!["/gamma/1,9,1"]
    );
    assert_eq!(
        schema_pointers(json!({"kind": "connection", "chart": {"n": 0, "m": 1}, "gamma": {"1,1,1": "1"}})),
        vec!["/gamma/1,1,1"]
    );
    assert_eq!(
        schema_pointers(json!({"kind": "connection", "chart": {"n": 1, "m": 0}, "gamma": {}, "options": {"point": ["1", "2"]}})),
        vec!["/options/point"]
    );
    assert_eq!(
        schema_pointers(json!({"kind": "connection", "chart": {"n": 1, "m": 0}, "gamma": {}, "options": {"candidates": [{"name": "c", "form": [["1", "0"]]}]}})),
        vec!["/options/candidates/0/form/0"]
    );
    assert_eq!(schema_pointers(json!({"kind": "algebra", "algebra": {"classical": "gl", "p": 1, "q": 1}, "g": {}})), vec!["/g"]);
    assert_eq!(schema_pointers(json!({"kind": "prolongation", "algebra": {"classical": "gl", "p": 1, "q": 0}})), vec!["/order"]);
    assert_eq!(schema_pointers(json!({"kind": "algebra", "algebra": {"classical": "pe", "p": 1, "q": 2}})), vec!["/algebra"]);
    assert_eq!(
        schema_pointers(json!({"kind": "algebra", "algebra": {"dim": {"p": 2, "q": 0}, "generators": [[["0", "1"], ["0", "0"]], [["0", "0"], ["1", "0"]]]}})),
        vec!["/algebra/generators"]
    );
    assert_eq!(
        schema_pointers(json!({"kind": "algebra", "algebra": {"classical": "gl", "p": 1, "q": 0}, "expect": {"results": 1}})),
        vec!["/expect/results"]
    );
    let e = run_problem_str("{", Overrides::default()).unwrap_err();
    assert!(matches!(e, ProblemError::Json(_)));
}

#[test]
fn generator_algebras_close_on_request() {
    let r = run(json!({"kind": "algebra", "algebra": {
        "dim": {"p": 2, "q": 0},
        "generators": [[["0", "1"], ["0", "0"]], [["0", "0"], ["1", "0"]]],
        "closure": true
    }}));
    assert_eq!(r.json["results"]["algebra_dim"], json!({"p": 3, "q": 0}));
    assert_eq!(r.json["results"]["algebra"], json!("custom(2|0)"));
}

#[test]
fn metric_pipeline_runs_through() {
    let p = json!({
        "kind": "metric",
        "chart": {"n": 2, "m": 0},
        "g": {"1,1": "x1*x2^2 + 3*x2", "1,2": "1", "2,1": "1"},
        "options": {"cap_order": 6}
    });
    let r = run(p);
    let res = &r.json["results"];
    assert_eq!(res["metric"]["valid"], json!(true));
    assert_eq!(res["levi_civita"].as_object().map(|m| m.is_empty()), Some(false));
    assert_eq!(res["classification"], json!([{"structure": "metric", "contained": true}]));
    assert!(res["decomposability"]["status"].is_string());
    assert_eq!(res["holonomy"]["cap_order"], json!(6));
    let capped = run_problem(&r.json["input"], Overrides { cap_order: Some(0), transport_steps: None }).unwrap();
    assert_eq!(capped.json["status"]["capped"], json!(true));
    assert_eq!(capped.json["status"]["certified"], json!(false));
}

#[test]
fn invalid_metric_is_a_pipeline_error() {
    let r = run(json!({"kind": "metric", "chart": {"n": 2, "m": 0}, "g": {"1,1": "1"}}));
    assert!(!r.ok());
    assert_eq!(r.errors().len(), 1);
    assert_eq!(r.json["results"]["metric"]["nondegenerate"], json!(false));
}

#[test]
fn prolongation_and_pi_adjoint_kinds() {
    let r = run(json!({"kind": "prolongation", "algebra": {"classical": "cosp", "p": 2, "q": 2}, "order": 2}));
    assert_eq!(r.json["results"]["dims"], json!([{"p": 2, "q": 2}, {"p": 0, "q": 0}]));
    assert_eq!(r.json["results"]["oracle_agrees"], json!(true));
    let r = run(json!({"kind": "pi_adjoint", "algebra": {"classical": "sl", "p": 2, "q": 0}}));
    assert_eq!(r.json["results"]["holds"], json!(true));
    let r = run(json!({"kind": "pi_adjoint", "algebra": {"classical": "gl", "p": 1, "q": 1}}));
    assert!(!r.ok());
    assert!(r.errors()[0].contains("not simple"), "{:?}", r.errors());
}

#[test]
fn table_sizes() {
    assert_eq!(TableFamily::Osp.sizes(3), vec![(1, 0), (2, 0), (0, 2), (3, 0), (1, 2)]);
    assert_eq!(TableFamily::Q.sizes(5), vec![(1, 1), (2, 2)]);
    let t = table_rows(TableFamily::Gl, 2);
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[3]["algebra"], json!("gl(1|1)"));
    assert_eq!(rows[3]["is_berger"], json!(true));
    assert!("so".parse::<TableFamily>().is_err());
}

#[test]
fn selftest_passes_and_catches_the_sign_mutation() {
    let good = selftest(false);
    assert!(good.all_pass(), "{:#?}", good.cases.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    let bad = selftest(true);
    assert!(!bad.case("supercommutativity").unwrap().pass);
    // the flag is scoped to the mutated run
    assert!(selftest(false).case("supercommutativity").unwrap().pass);
}
