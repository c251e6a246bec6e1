use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdmult"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    validate(&v);
    v
}

fn validate(v: &Value) {
    static SCHEMA: OnceLock<jsonschema::Validator> = OnceLock::new();
    let validator = SCHEMA.get_or_init(|| {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_report.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        jsonschema::validator_for(&schema).expect("schema compiles")
    });
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "report violates schema: {errors:?}");
}

fn temp(name: &str, contents: &Value) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string(contents).unwrap()).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn norm_examples() {
    let out = run(&["norm", "m2", "--group", "cyclic:4", "--fn", "data/delta_e_c4.json"]);
    assert_eq!(code(&out), 0);
    assert!((report(&out)["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let out = run(&["norm", "b", "--group", "sym:3", "--fn", "data/ones_s3.json"]);
    assert_eq!(code(&out), 0);
    assert!((report(&out)["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let out = run(&["norm", "a", "--group", "sym3", "--fn", "data/ones_s3.json"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!((r["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(r["results"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn norm_on_free_ball_reports_only_a_lower_bound() {
    let sphere = temp(
        "sphere1.json",
        &json!({"group_ref": "freeball:2,2", "values": {"a": [1, 0], "A": [1, 0], "b": [1, 0], "B": [1, 0]}}),
    );
    let out = run(&["norm", "m2", "--group", "freeball:2,2", "--fn", sphere.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert!(r["results"]["report"]["upper"].is_null());
    let lower = r["results"]["report"]["lower"]["value"].as_f64().unwrap();
    assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&lower), "lower {lower}");
}

#[test]
fn norm_b_rejects_truncated_carriers() {
    let f = temp("window_fn.json", &json!({"values": {"0": [1, 0]}}));
    let out = run(&["norm", "b", "--group", "window:3", "--fn", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn group_table_files_are_validated() {
    let good = temp("z2_table.json", &json!({"order": 2, "table": [0, 1, 1, 0]}));
    let f = temp("z2_fn.json", &json!({"values": [[1, 0], [0, 0]]}));
    let out = run(&["norm", "m2", "--group", good.to_str().unwrap(), "--fn", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut table: Vec<usize> = (0..4).flat_map(|a| (0..4).map(move |b| (a + b) % 4)).collect();
    table[5] = 3;
    let bad = temp("z4_corrupt.json", &json!({"order": 4, "table": table}));
    let f = temp("z4_fn.json", &json!({"values": {"0": [1, 0]}}));
    let out = run(&["norm", "m2", "--group", bad.to_str().unwrap(), "--fn", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not a group") || stderr(&out).contains("invalid multiplication table"));
}

#[test]
fn function_for_another_group_is_rejected() {
    let out = run(&["norm", "m2", "--group", "cyclic:5", "--fn", "data/delta_e_c4.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cyclic:4"));
}

#[test]
fn solver_without_certificate_exits_3() {
    let f = temp(
        "s3_fn.json",
        &json!({"values": [[1, 0], [2, 0], [0, 1], [-1, 0], [0.5, 0.3], [0, 0]]}),
    );
    let out = run(&[
        "norm", "m2", "--group", "sym:3", "--fn", f.to_str().unwrap(), "--tol", "1e-12", "--max-iterations", "2",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no certificate"));
}

#[test]
fn tree_examples() {
    let out = run(&["tree", "-g", "2", "-R", "4", "-n", "2", "-d", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert!(r["results"]["verification"]["residual"].as_f64().unwrap() <= 1e-12);
    assert!(r["results"]["bound"].as_f64().unwrap() <= 3.0);

    let out = run(&["tree", "-g", "1", "-R", "6", "-n", "2", "-d", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(report(&out)["results"]["bound"].as_f64().unwrap() <= 3.0);

    let out = run(&["tree", "-g", "2", "-R", "2", "-n", "2", "-d", "2", "-r", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn couple_induce_on_subgroup_preset() {
    let out = run(&["couple", "--preset", "subgroup:sym3,alt3", "--action", "induce", "--samples", "50"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["checks"][0]["name"], "m2 of induced minus m2 of input");
    assert_eq!(r["checks"][0]["samples"], 50);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn trivial_coupling_reproduces_the_function() {
    let f = temp(
        "c4_fn.json",
        &json!({"group_ref": "cyclic:4", "values": [[1, 0], [0.5, -0.25], [0, 2], [-1, 0]]}),
    );
    let out = run(&[
        "couple", "--preset", "subgroup:cyclic4,cyclic4", "--action", "induce", "--fn", f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let hat = &report(&out)["results"]["phi_hat"]["values"];
    let expect = json!({"0": [1.0, 0.0], "1": [0.5, -0.25], "2": [0.0, 2.0], "3": [-1.0, 0.0]});
    assert_eq!(hat, &expect);
}

#[test]
fn shipped_coupling_koopman_defects() {
    let out = run(&["couple", "--file", "data/z2z3.json", "--action", "koopman"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let k = &report(&out)["results"]["koopman"];
    assert!(k["unitarity_defect"].as_f64().unwrap() <= 1e-12);
    assert!(k["intertwining_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn every_coupling_action_passes_on_presets() {
    for preset in ["subgroup:sym3,alt3", "subgroup:cyclic4,cyclic2", "subgroup:sym3,cyclic2"] {
        for action in ["induce", "dual", "witness", "koopman", "lattice"] {
            let out = run(&["couple", "--preset", preset, "--action", action, "--samples", "5"]);
            assert_eq!(code(&out), 0, "{preset} {action}: {}", stderr(&out));
            report(&out);
        }
    }
    let out = run(&["couple", "--file", "data/z2z3.json", "--action", "witness", "-d", "3", "--samples", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn lattice_needs_a_subgroup_preset() {
    let out = run(&["couple", "--file", "data/z2z3.json", "--action", "lattice"]);
    assert_eq!(code(&out), 2);
}

fn shipped_coupling() -> Value {
    serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/z2z3.json")).unwrap())
        .unwrap()
}

#[test]
fn invalid_couplings_exit_2_naming_the_axiom() {
    let mut commuting = shipped_coupling();
    commuting["lambda"] = json!("sym:3");
    commuting["lambda_action"] = json!([
        [0, 1, 2, 3, 4, 5],
        [1, 0, 2, 3, 4, 5],
        [0, 2, 1, 3, 4, 5],
        [2, 0, 1, 3, 4, 5],
        [1, 2, 0, 3, 4, 5],
        [2, 1, 0, 3, 4, 5]
    ]);
    let mut domain = shipped_coupling();
    domain["p"] = json!([0, 2]);
    let mut weights = shipped_coupling();
    weights["weights"] = json!([0.5, 0.5, 0.5, 0.5, 0.5, 1.0]);
    let mut action = shipped_coupling();
    action["gamma_action"] = json!([[0, 1, 2, 3, 4, 5], [3, 4, 5, 0, 1, 1]]);

    for (name, file, axiom) in [
        ("noncommuting.json", commuting, "actions do not commute"),
        ("bad_domain.json", domain, "not a fundamental domain"),
        ("bad_weights.json", weights, "does not preserve weights"),
        ("bad_action.json", action, "not a group action"),
    ] {
        let path = temp(name, &file);
        let out = run(&["couple", "--file", path.to_str().unwrap(), "--action", "induce"]);
        assert_eq!(code(&out), 2, "{name}");
        assert!(stderr(&out).contains(axiom), "{name}: {}", stderr(&out));
    }
}

#[test]
fn verify_all_is_byte_deterministic() {
    let args = ["verify-all", "--quick", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), code(&b));
    let r = report(&a);
    let all_passed = r["results"]["criteria"].as_array().unwrap().iter().all(|c| c["passed"] == true);
    assert_eq!(r["results"]["criteria"].as_array().unwrap().len(), 12);
    assert_eq!(code(&a) == 0, all_passed);
    assert!(r.get("wall_time_ms").is_none());
}

#[test]
fn verify_all_exit_code_follows_the_criteria() {
    let out = run(&["verify-all", "--quick", "--criteria", "3,10,11"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stderr(&out).lines().filter(|l| l.ends_with(": PASS")).count(), 3);
}

#[test]
fn injected_fault_fails_the_suite() {
    let out = run(&["verify-all", "--quick", "--inject-fault", "--criteria", "4"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["results"]["engine"], "max_entry_stub");
    assert_eq!(r["results"]["criteria"][0]["passed"], false);
}

#[test]
fn timing_is_opt_in() {
    let out = run(&["verify-all", "--quick", "--criteria", "10", "--timing"]);
    let r = report(&out);
    assert!(r["wall_time_ms"].is_u64());
    assert!(r["results"]["criteria"][0]["elapsed_ms"].is_u64());
}

#[test]
fn schema_rejects_malformed_reports() {
    let out = run(&["couple", "--file", "data/z2z3.json", "--action", "koopman", "--samples", "2"]);
    let good = report(&out);
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for mutate in [
        |v: &mut Value| drop(v.as_object_mut().unwrap().remove("inputs_digest")),
        |v: &mut Value| v["seed"] = json!(-1),
        |v: &mut Value| v["checks"][0]["passed"] = json!("yes"),
        |v: &mut Value| v["extra"] = json!(1),
    ] {
        let mut bad = good.clone();
        mutate(&mut bad);
        assert!(!validator.is_valid(&bad), "accepted {bad}");
    }
}
