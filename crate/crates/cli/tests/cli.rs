use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endoquant")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn graphs_lists_sorted_classes() {
    let cfg = fixture("flat.toml");
    let o = run(&["graphs", "--config", cfg.to_str().unwrap(), "--family", "n", "--max-degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], "0\t1\t1\t1\t[|]");
    assert!(rows.iter().all(|r| r.split('\t').count() == 5));
    let again = run(&["graphs", "--config", cfg.to_str().unwrap(), "--family", "n", "--max-degree", "2"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn routes_write_identical_products() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("bundle.toml");
    let mut files = Vec::new();
    for route in ["graph", "oracle"] {
        let out = dir.path().join(format!("{route}.toml"));
        let o = run(&["mul", "--config", cfg.to_str().unwrap(), "--route", route, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert!(!files[0].is_empty());
}

#[test]
fn flat_product_is_anti_wick() {
    let cfg = fixture("flat.toml");
    let o = run(&["mul", "--config", cfg.to_str().unwrap(), "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("nu = 1"));
    assert!(!text.contains("nu = 2") && !text.contains("nu = 3"));
    assert!(text.contains("exps = [1, 1]") && text.contains("exps = [0, 0]"));
}

#[test]
fn verify_passes_on_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = fixture("bundle.toml");
    let args = ["verify", "--config", cfg.to_str().unwrap(), "--order", "2", "--seed", "7", "--out", out.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = endoquant::report::Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.all_passed());
    assert!(report.records.iter().any(|r| r.name == "route_equivalence"));
    let first = std::fs::read(&out).unwrap();
    run(&args);
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn input_errors_exit_two() {
    let o = run(&["mul", "--config", fixture("degenerate.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("potential[-1]"));
    assert_eq!(run(&["mul", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", "--config", "x"]).status.code(), Some(2));
    let no_sections = fixture("line_bundle.toml");
    assert_eq!(run(&["mul", "--config", no_sections.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tensor_tables_cover_both_tensors() {
    let o = run(&["tensor", "--config", fixture("flat.toml").to_str().unwrap(), "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "C\tnu^1\t[1]\t[1]\t(0,0)\t(1)*1"));
    assert!(text.lines().any(|l| l.starts_with("E\t")));
}
