//! End-to-end tests that spawn the `digitop` binary and assert on its
//! stdout, stderr, and exit codes.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn digitop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digitop"))
        .args(args)
        .env_remove("DIGITOP_MAX_STATES")
        .output()
        .expect("the binary runs")
}

fn digitop_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digitop"))
        .args(args)
        .env(key, value)
        .output()
        .expect("the binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("the process exits normally")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_str(&stdout_text(out)).unwrap_or_else(|e| {
        panic!(
            "stdout is JSON ({e}); stderr was: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new()
        .suffix(".json")
        .tempfile()
        .expect("temp file");
    file.write_all(contents.as_bytes()).expect("write");
    file.flush().expect("flush");
    file
}

const RING8: &str = r#"{"adjacency": "4", "dim": 2,
  "points": [[0,0],[1,0],[2,0],[2,1],[2,2],[1,2],[0,2],[0,1]]}"#;

const BOX4: &str = r#"{"adjacency": "4", "dim": 2,
  "points": [[0,0],[1,0],[0,1],[1,1]]}"#;

#[test]
fn chi_reports_the_census_for_a_catalog_image() {
    let out = digitop(&["--format", "json", "chi", "MSS_18"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["alpha"], serde_json::json!([10, 20, 8]));
    assert_eq!(v["chi"], serde_json::json!(-2));
    assert_eq!(v["legacy_vef"], serde_json::json!(-2));
    assert_eq!(v["differs"], serde_json::json!(false));
}

#[test]
fn chi_json_output_is_byte_stable_across_runs() {
    let a = digitop(&["--format", "json", "chi", "MSC8s"]);
    let b = digitop(&["--format", "json", "chi", "MSC8s"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "repeated runs must emit identical bytes");
}

#[test]
fn chi_human_output_mirrors_the_json_fields() {
    let out = digitop(&["chi", "MSS_18"]);
    assert_eq!(code(&out), 0);
    let text = stdout_text(&out);
    assert!(text.contains("alpha: 10 20 8"), "got: {text}");
    assert!(text.contains("chi: -2"), "got: {text}");
    assert!(text.contains("legacy_vef: -2"), "got: {text}");
    assert!(text.contains("differs: false"), "got: {text}");
}

#[test]
fn chi_loads_an_image_from_a_file() {
    let file = write_temp(BOX4);
    let out = digitop(&["--format", "json", "chi", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["alpha"], serde_json::json!([4, 4]));
    assert_eq!(v["chi"], serde_json::json!(0));
}

#[test]
fn verify_accepts_the_catalog_contraction_table() {
    let out = digitop(&["--format", "json", "verify", "D_TABLE"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["valid"], serde_json::json!(true));
    assert_eq!(v["steps"], serde_json::json!(6));
    assert_eq!(v["width"], serde_json::json!(11));
    let certifies = v["certifies"].as_str().unwrap();
    assert!(certifies.contains("endpoint-fixed"), "got: {certifies}");
}

#[test]
fn verify_round_trips_through_a_dumped_file() {
    let dump = digitop(&["--format", "json", "catalog", "dump", "D_TABLE"]);
    assert_eq!(code(&dump), 0);
    let file = write_temp(&stdout_text(&dump));
    let out = digitop(&["--format", "json", "verify", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["valid"], serde_json::json!(true));
}

#[test]
fn verify_rejects_a_tampered_homotopy_file() {
    let dump = digitop(&["--format", "json", "catalog", "dump", "D_TABLE"]);
    assert_eq!(code(&dump), 0);
    let mut v: Value = serde_json::from_str(&stdout_text(&dump)).unwrap();
    v["rows"][1][2] = serde_json::json!([9, 9]);
    let file = write_temp(&v.to_string());
    let out = digitop(&["--format", "json", "verify", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1, "a corrupted table must not verify");
}

#[test]
fn contract_builds_a_certificate_and_saves_a_verifiable_file() {
    let dir = tempfile::tempdir().expect("temp dir");
    let saved = dir.path().join("equator.json");
    let out = digitop(&[
        "--format",
        "json",
        "contract",
        "MSS_18",
        "--loop",
        "equator",
        "--out",
        saved.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["verified"], serde_json::json!(true));
    assert_eq!(v["steps"], serde_json::json!(3));
    let check = digitop(&["--format", "json", "verify", saved.to_str().unwrap()]);
    assert_eq!(code(&check), 0, "the saved table must verify on reload");
    assert_eq!(stdout_json(&check)["valid"], serde_json::json!(true));
}

#[test]
fn explore_reaches_a_constant_for_the_seven_point_cycle() {
    let out = digitop(&[
        "--format", "json", "explore", "FIG48", "--loop", "7cycle", "--moves", "fixed", "--pad",
        "10",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("reached"));
    assert_eq!(v["note"], Value::Null, "a reached search carries no caveat");
    assert!(v["certificate"].is_object(), "got: {v}");
}

#[test]
fn explore_exhausts_loop_preserving_moves_on_the_punctured_rim() {
    let out = digitop(&[
        "--format",
        "json",
        "explore",
        "LOOPHOLE_X",
        "--loop",
        "rim",
        "--moves",
        "looppres",
    ]);
    assert_eq!(code(&out), 3);
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("exhausted"));
    assert_eq!(v["reachable"], serde_json::json!(8));
    let note = v["note"].as_str().unwrap();
    assert!(note.contains("bounded evidence"), "got: {note}");
}

#[test]
fn explore_reports_budget_exhaustion_under_a_tiny_state_cap() {
    let out = digitop_with_env(
        &[
            "--format", "json", "explore", "MSS_18", "--loop", "equator", "--moves", "fixed",
        ],
        "DIGITOP_MAX_STATES",
        "2",
    );
    assert_eq!(code(&out), 3);
    let v = stdout_json(&out);
    assert_eq!(v["status"], serde_json::json!("budget_exceeded"));
    let note = v["note"].as_str().unwrap();
    assert!(note.contains("bounded evidence"), "got: {note}");
}

#[test]
fn explore_rejects_a_malformed_state_cap_variable() {
    let out = digitop_with_env(
        &[
            "--format", "json", "explore", "MSS_18", "--loop", "equator", "--moves", "fixed",
        ],
        "DIGITOP_MAX_STATES",
        "plenty",
    );
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("DIGITOP_MAX_STATES"), "got: {err}");
}

#[test]
fn nohole_detects_the_hole_in_a_ring() {
    let file = write_temp(RING8);
    let out = digitop(&[
        "--format",
        "json",
        "nohole",
        file.path().to_str().unwrap(),
        "--cap",
        "8",
    ]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["has_hole"], serde_json::json!(true));
    assert!(v["witness"].is_array(), "a hole needs a witness subset");
}

#[test]
fn nohole_passes_a_filled_box() {
    let file = write_temp(BOX4);
    let out = digitop(&["--format", "json", "nohole", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["has_hole"], serde_json::json!(false));
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn iso_confirms_a_catalog_image_matches_itself() {
    let out = digitop(&["--format", "json", "iso", "MSS_18", "MSS_18"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["isomorphic"], serde_json::json!(true));
    assert_eq!(v["matching"].as_array().map(Vec::len), Some(10));
}

#[test]
fn iso_distinguishes_different_images() {
    let out = digitop(&["--format", "json", "iso", "MSS_18", "MSS_6"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["isomorphic"], serde_json::json!(false));
    assert_eq!(v["matching"], Value::Null);
}

#[test]
fn catalog_list_names_every_entry() {
    let out = digitop(&["--format", "json", "catalog", "list"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let ids: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|item| item["id"].as_str().unwrap())
        .collect();
    for id in [
        "MSS_18",
        "MSS_18p",
        "MSS_6",
        "MSC8s",
        "MSC8ps",
        "MSC4s",
        "X_cnp",
        "FIG48",
        "LOOPHOLE_X",
        "MSS6_SHARP",
        "MSS18_SHARP",
        "D_LOOP",
        "D_TABLE",
        "MSS18p_CONTRACTION",
    ] {
        assert!(ids.contains(&id), "missing catalog id {id}; got {ids:?}");
    }
}

#[test]
fn reproduce_single_check_passes_and_lists_details() {
    let out = digitop(&["--format", "json", "reproduce", "--only", "1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 1);
    assert_eq!(items[0]["index"], serde_json::json!(1));
    assert_eq!(items[0]["passed"], serde_json::json!(true));
    assert!(!items[0]["details"].as_array().unwrap().is_empty());
}

#[test]
fn reproduce_reports_the_component_count_discrepancy() {
    let out = digitop(&["--format", "json", "reproduce", "--only", "6"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    let items = v.as_array().unwrap();
    assert_eq!(items[0]["passed"], serde_json::json!(false));
    let details = items[0]["details"].as_array().unwrap();
    assert!(
        details.iter().any(|d| d.as_str().unwrap().contains("FAIL")),
        "a failing check must say which claim broke; got {details:?}"
    );
}

#[test]
fn reproduce_output_is_byte_stable_across_runs() {
    let a = digitop(&["--format", "json", "reproduce", "--only", "1"]);
    let b = digitop(&["--format", "json", "reproduce", "--only", "1"]);
    assert_eq!(a.stdout, b.stdout, "repeated runs must emit identical bytes");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let unknown = digitop(&["frobnicate"]);
    assert_eq!(code(&unknown), 2);

    let zero_threads = digitop(&["--threads", "0", "chi", "MSS_18"]);
    assert_eq!(code(&zero_threads), 2);

    let bad_index = digitop(&["reproduce", "--only", "11"]);
    assert_eq!(code(&bad_index), 2);
}

#[test]
fn missing_inputs_exit_with_code_one() {
    let no_such_image = digitop(&["chi", "NO_SUCH_IMAGE"]);
    assert_eq!(code(&no_such_image), 1);
    let err = String::from_utf8_lossy(&no_such_image.stderr);
    assert!(err.starts_with("error:"), "got: {err}");

    let no_such_loop = digitop(&["contract", "MSS_18", "--loop", "nope"]);
    assert_eq!(code(&no_such_loop), 1);
}
