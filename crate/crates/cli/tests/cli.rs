use std::path::Path;
use std::process::{Command, Output};

fn nlwe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlwe")).args(args).output().expect("run nlwe")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn construct(dir: &Path, family: &str) -> String {
    let path = dir.join(format!("{}.json", family.replace([':', ','], "_")));
    let p = path.to_str().unwrap().to_string();
    let o = nlwe(&["construct", family, "-o", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn construct_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), "type1:11");
    for check in ["orthogonality", "irredundancy"] {
        assert_eq!(code(&nlwe(&["certify", check, &f])), 0, "{check}");
    }
    let o = nlwe(&["--json", "certify", "oplm-dim", &f, "--party", "A"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn invalid_family_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = nlwe(&["construct", "type1:10", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn redundant_control_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("control.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"field":"cyclo-rational",
            "space":[{"label":"A","dim":2,"prime_factors":[2]},{"label":"B","dim":2,"prime_factors":[2]}],
            "states":[{"label":"a","kets":["|0>","|0>"]},{"label":"b","kets":["|1>","|1>"]}]}"#,
    )
    .unwrap();
    let o = nlwe(&["certify", "irredundancy", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn measure_writes_outcome_and_rejects_bad_ids() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), "type2-78");
    let out = dir.path().join("o1.json");
    let o = nlwe(&["measure", &f, "A:0-3;4-6/B:0-4;5-7", "1.1", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.exists());
    let o = nlwe(&["measure", &f, "B:0-4;5-7", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn classify_uses_file_family() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), "type1:11");
    let o = nlwe(&["classify", &f]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn classify_without_family_needs_measurement() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), "type1:11");
    let out = dir.path().join("o.json");
    assert_eq!(code(&nlwe(&["measure", &f, "B:0-4;5-10", "1", "-o", out.to_str().unwrap()])), 0);
    assert_eq!(code(&nlwe(&["classify", out.to_str().unwrap()])), 2);
}

#[test]
fn reproduce_example4_json() {
    let o = nlwe(&["--json", "reproduce", "example4"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(stdout(&o).contains("TypeII"), "{v}");
}

#[test]
fn render_text_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), "type1:11");
    let o = nlwe(&["render", &f]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).is_empty());
    let svg = dir.path().join("g.svg");
    assert_eq!(code(&nlwe(&["render", &f, "--format", "svg", "-o", svg.to_str().unwrap()])), 0);
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}
