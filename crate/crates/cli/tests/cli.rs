use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn rlcm(args: &[&str]) -> (Value, i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rlcm")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (value, out.status.code().unwrap_or(-1), text)
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn intersect_worked_values() {
    let z23 = config("z-2-3.toml");
    let (v, code, _) = rlcm(&["--config", &z23, "intersect", "--left", "1,2", "--right", "0,3"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"kind": "principal", "g": 3, "p": 6}));
    let (v, code, _) = rlcm(&["--config", &z23, "intersect", "--left", "0,2", "--right", "1,2"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"kind": "empty"}));
}

#[test]
fn mult_accepts_tuples_and_objects() {
    let z23 = config("z-2-3.toml");
    let (v, code, _) = rlcm(&["-c", &z23, "mult", "--monomials", &config("mult-example.json")]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"g": 3, "p": 3, "q": 2, "h": 1}));

    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "m.json",
        r#"[{"g": 0, "p": 1, "q": 2, "h": 0}, {"g": 3, "p": 3, "q": 1, "h": 0}, [1, 2, 1, 0]]"#,
    );
    let (v, code, _) = rlcm(&["-c", &z23, "mult", "--monomials", &file]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"g": 3, "p": 3, "q": 1, "h": 0}));

    let zero = write_temp(&dir, "z.json", r#"[[3, 3, 2, 1], [0, 2, 1, 0]]"#);
    let (v, _, _) = rlcm(&["-c", &z23, "mult", "--monomials", &zero]);
    assert_eq!(v, json!("0"));
}

#[test]
fn lcm_of_elements() {
    let z23 = config("z-2-3.toml");
    let (v, _, _) = rlcm(&["-c", &z23, "lcm", "--left", "4", "--right", "6"]);
    assert_eq!(v, json!({"kind": "meet", "lcm": 12, "left_complement": 3, "right_complement": 2}));
    let free = config("shift-free.toml");
    let (v, _, _) = rlcm(&["-c", &free, "lcm", "--left", "a", "--right", "ab"]);
    assert_eq!(v["lcm"], json!("ab"));
    let (v, _, _) = rlcm(&["-c", &free, "lcm", "--left", "a", "--right", "b"]);
    assert_eq!(v, json!({"kind": "disjoint"}));
}

#[test]
fn order_axiom_failure_is_a_configuration_error() {
    let (v, code, _) = rlcm(&["-c", &config("z-4-6.toml"), "verify"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("registration"));
    let report = &v["error"]["report"];
    assert_eq!(report["passed"], json!(false));
    let witness = report["failures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["check"] == json!("order"))
        .expect("order failure recorded");
    assert!(witness["witness"].is_object());
}

#[test]
fn malformed_configurations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_temp(&dir, "u.toml", "[system]\nkind = \"matrix\"\n");
    let (v, code, _) = rlcm(&["-c", &unknown, "verify"]);
    assert_eq!((code, v["error"]["kind"].clone()), (2, json!("config")));

    let missing = dir.path().join("absent.toml").display().to_string();
    let (v, code, _) = rlcm(&["-c", &missing, "verify"]);
    assert_eq!((code, v["error"]["kind"].clone()), (2, json!("io")));

    let (v, code, _) = rlcm(&["verify"]);
    assert_eq!((code, v["error"]["kind"].clone()), (2, json!("usage")));

    let (v, code, _) = rlcm(&["-c", &config("z-2-3.toml"), "lcm", "--left", "5", "--right", "2"]);
    assert_eq!((code, v["error"]["kind"].clone()), (2, json!("algebra")));
}

#[test]
fn trivial_group_over_free_monoid_verifies() {
    let (v, code, _) = rlcm(&["-c", &config("trivial-free.toml"), "verify"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["passed"], json!(true));
    assert_eq!(v["suite"], json!("verify"));
    for prefix in ["dynamics/", "li-relations/", "nica-covariance/", "generator-relations/"] {
        assert!(
            v["checks"].as_array().unwrap().iter().any(|c| c["check"].as_str().unwrap().starts_with(prefix)),
            "missing {prefix}"
        );
    }
}

#[test]
fn every_sample_config_verifies() {
    for name in ["z-2-3", "z-neg1-2-3", "gauss", "toeplitz-2", "shift-free", "trivial-free"] {
        let (v, code, _) = rlcm(&["-c", &config(&format!("{name}.toml")), "verify"]);
        assert_eq!(code, 0, "{name}: {v}");
    }
}

#[test]
fn reports_are_byte_identical_and_embed_the_seed() {
    let z23 = config("z-2-3.toml");
    let (a, code, text_a) = rlcm(&["-c", &z23, "report"]);
    let (_, _, text_b) = rlcm(&["-c", &z23, "report"]);
    assert_eq!(code, 0);
    assert_eq!(text_a, text_b);
    assert_eq!(a["spec"]["sample"]["seed"], json!(24301));
    assert_eq!(a["units"], json!("ℤ ⋊ {1}"));

    let (c, _, _) = rlcm(&["-c", &z23, "--seed", "7", "report"]);
    assert_eq!(c["spec"]["sample"]["seed"], json!(7));
}

#[test]
fn flags_override_sample_bounds() {
    let z23 = config("z-2-3.toml");
    let (v, code, _) = rlcm(&["-c", &z23, "rep-check", "--radius", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["spec"]["sample"]["p_ball"], json!(2));
    let (v, code, _) = rlcm(&["-c", &z23, "fock-check", "--samples", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["spec"]["sample"]["pairs"], json!(40));
}

#[test]
fn morphism_checks() {
    let (v, code, _) = rlcm(&["morphism-check", "--morphism", &config("inclusion.toml")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["image"]["injective_on_ball"], json!(true));
    assert_eq!(v["image"]["surjective_on_ball"], json!(false));

    let (v, code, _) = rlcm(&["morphism-check", "--morphism", &config("collapse.toml")]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["check"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"admissible/double-coset"));
    assert!(failed.contains(&"ideal-functoriality/intersection"));
    assert!(!failed.iter().any(|c| c.starts_with("morphism/")));
    assert!(v["image"]["collisions"].as_array().unwrap().contains(&json!([2, 4])));
}

#[test]
fn morphism_with_explicit_images() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "m.toml",
        r#"
[morphism.source]
kind = "shift"
base_group = { kind = "cyclic", order = 2 }
semigroup = { kind = "free-monoid", letters = 2 }

[morphism.target]
kind = "shift"
base_group = { kind = "cyclic", order = 2 }
semigroup = { kind = "free-abelian", rank = 1 }

[morphism.phi_g]
kind = "pushforward"

[morphism.phi_p]
kind = "images"
images = [[1], [1]]
"#,
    );
    let (v, code, _) = rlcm(&["morphism-check", "--morphism", &file]);
    assert_eq!(code, 1, "{v}");
    let passed = |name: &str| {
        v["checks"].as_array().unwrap().iter().find(|c| c["check"] == json!(name)).unwrap()["passed"].clone()
    };
    assert_eq!(passed("morphism/equivariance"), json!(true));
    assert_eq!(passed("admissible/lcm"), json!(false));
}

#[test]
fn ore_check_separates_groups_of_fractions() {
    let (v, code, _) = rlcm(&["-c", &config("z-2-3.toml"), "ore-check"]);
    assert_eq!(code, 0, "{v}");
    let (v, code, _) = rlcm(&["-c", &config("shift-free.toml"), "ore-check"]);
    assert_eq!(code, 1);
    assert_eq!(v["failures"][0]["check"], json!("common-left-multiple"));
}

#[test]
fn builtin_systems_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "b.toml", "[system]\nkind = \"builtin\"\nname = \"zi-i-1+i-2+i\"\n");
    let (v, code, _) = rlcm(&["-c", &file, "intersect", "--left", "0,1+i", "--right", "0,2+i"]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], json!("principal"));
    assert_eq!(v["g"], json!("0"));
}
