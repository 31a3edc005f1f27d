use std::path::Path;
use std::process::{Command, Output};

fn l1cwc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1cwc"))
        .args(args)
        .env_remove("L1CWC_CATALOG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_reports_length_twelve_exception() {
    let o = l1cwc(&["bound", "--n", "12", "--q", "3", "--w", "4", "--d", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("Exact 16"), "{}", stdout(&o));
}

#[test]
fn bound_accepts_unbounded_alphabet() {
    let o = l1cwc(&["bound", "--n", "9", "--q", "inf", "--w", "3", "--d", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("code.txt");
    let o = l1cwc(&["construct", "--n", "13", "--q", "3", "--w", "4", "--d", "6", "--out", path_str(&file)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("# recipe:"));
    let v = l1cwc(&["verify", "--file", path_str(&file)]);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(stdout(&v).contains("valid         true"));
}

#[test]
fn corrupted_code_names_the_offending_pair() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("code.txt");
    assert!(l1cwc(&["construct", "--n", "7", "--q", "3", "--w", "3", "--d", "4", "--out", path_str(&file)])
        .status
        .success());
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let first = lines.iter().position(|l| l.starts_with("c ")).unwrap();
    // copy the second word over the third so two words coincide
    lines[first + 2] = lines[first + 1].clone();
    std::fs::write(&file, lines.join("\n") + "\n").unwrap();
    let v = l1cwc(&["verify", "--file", path_str(&file)]);
    assert_eq!(v.status.code(), Some(3));
    assert!(stdout(&v).contains("violating pair:"), "{}", stdout(&v));
}

#[test]
fn missing_recipe_exits_five() {
    let o = l1cwc(&["construct", "--n", "43", "--q", "3", "--w", "4", "--d", "6"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("41"));
}

#[test]
fn invalid_parameters_exit_two() {
    let o = l1cwc(&["bound", "--n", "5", "--q", "3", "--w", "0", "--d", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let o = l1cwc(&["verify", "--file", "/nonexistent/code.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = l1cwc(&["develop", "--file", "/nonexistent/base.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = l1cwc(&["construct", "--n", "7", "--q", "3", "--w", "3", "--d", "4", "--out", "/nonexistent/dir/out.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn odd_distance_is_rounded_up_with_a_notice() {
    let o = l1cwc(&["bound", "--n", "12", "--q", "3", "--w", "4", "--d", "5"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd distance 5"));
    assert!(stdout(&o).starts_with("Exact 16"));
}

#[test]
fn search_exhausted_budget_exits_four() {
    let o = l1cwc(&["search", "--n", "12", "--q", "3", "--w", "4", "--d", "6", "--budget", "1000nodes"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn search_small_case_is_optimal() {
    let o = l1cwc(&["--json", "search", "--n", "6", "--q", "3", "--w", "4", "--d", "6", "--prune", "census"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["proven_optimal"], true);
    assert_eq!(v["size"], 5);
}

#[test]
fn catalog_lists_tables_and_gdds() {
    let o = l1cwc(&["catalog", "--list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("gdd   6^7"));
    assert!(s.contains("tab-20"));
    let g = l1cwc(&["catalog", "--show", "9^4"]);
    assert!(g.status.success());
    let u = l1cwc(&["catalog", "--show", "no-such-entry"]);
    assert_eq!(u.status.code(), Some(2));
}

#[test]
fn develop_verifies_bundled_table() {
    let dir = tempfile::tempdir().unwrap();
    let show = l1cwc(&["catalog", "--show", "tab-29"]);
    assert!(show.status.success());
    let file = dir.path().join("tab-29.txt");
    std::fs::write(&file, stdout(&show)).unwrap();
    let o = l1cwc(&["develop", "--file", path_str(&file), "--verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn json_output_is_stable() {
    let args = ["--json", "bound", "--n", "12", "--q", "3", "--w", "4", "--d", "6"];
    let a = stdout(&l1cwc(&args));
    let b = stdout(&l1cwc(&args));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["known"]["kind"], "exact");
    assert_eq!(v["known"]["value"], "16");
    assert_eq!(v["status"], 0);
}

#[test]
fn construct_is_deterministic_for_a_seed() {
    let args = ["construct", "--n", "11", "--q", "3", "--w", "3", "--d", "4", "--seed", "7"];
    assert_eq!(stdout(&l1cwc(&args)), stdout(&l1cwc(&args)));
}
