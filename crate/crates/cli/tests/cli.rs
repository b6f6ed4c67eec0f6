use std::path::Path;
use std::process::{Command, Output};

fn unital(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unital")).args(args).output().expect("binary runs")
}

fn machine(args: &[&str]) -> (i32, Vec<String>) {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let out = unital(&full);
    let lines = String::from_utf8(out.stdout).unwrap().lines().map(str::to_owned).collect();
    (out.status.code().unwrap(), lines)
}

fn value<'a>(lines: &'a [String], key: &str) -> Option<&'a str> {
    let prefix = format!("@{key} ");
    lines.iter().find_map(|l| l.strip_prefix(&prefix))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_catalog_entries() {
    for name in ["wu", "ou"] {
        let (code, lines) = machine(&["verify", name]);
        assert_eq!(code, 0, "{name}: {lines:?}");
        assert_eq!(value(&lines, "points"), Some("504"));
        assert_eq!(value(&lines, "blocks"), Some("3647"));
        assert_eq!(value(&lines, "short"), Some("567"));
        assert_eq!(value(&lines, "result"), Some("pass"));
    }
}

#[test]
fn machine_lines_all_start_with_at() {
    for args in [&["verify", "pu"][..], &["aut", "wu"], &["iso", "wu", "wu"]] {
        let (_, lines) = machine(args);
        assert!(!lines.is_empty());
        assert!(lines.iter().all(|l| l.starts_with('@')), "{lines:?}");
    }
}

#[test]
fn tampered_base_fails_q() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("wu.unital");
    assert_eq!(unital(&["export", "wu", path(&file)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    let tampered: String = text
        .lines()
        .map(|l| {
            if l.starts_with("D 1 :") {
                // replace the second element of the first base
                let mut parts: Vec<String> = l.split(" , ").map(str::to_owned).collect();
                parts[1] = "1 1 0 1".into();
                parts.join(" , ")
            } else {
                l.to_owned()
            }
        })
        .map(|l| l + "\n")
        .collect();
    std::fs::write(&file, tampered).unwrap();
    let out = unital(&["verify", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("(Q)"), "{text}");
}

#[test]
fn malformed_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.unital");
    std::fs::write(&file, "unital v1\nq 8\nmodulus 11\nS gen 2 4 4 6\nD 1 : 1 0 0 1 , 3 3 3\n").unwrap();
    let out = unital(&["verify", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
    assert_eq!(unital(&["verify", "no-such-entry"]).status.code(), Some(2));
}

#[test]
fn wrong_modulus_is_rejected() {
    assert_eq!(unital(&["--modulus", "13", "verify", "wu"]).status.code(), Some(2));
}

#[test]
fn stabilizer_summaries() {
    for (name, line) in [
        ("classical8", "stabilizer 54 (C9:C6), full 27216, index 1"),
        ("wu", "stabilizer 18 (C3:C6), full 9072, index 3"),
        ("ou", "stabilizer 27 (C9:C3), full 13608, index 2"),
        ("pu", "stabilizer 27 (C9:C3), full 13608, index 2"),
    ] {
        let out = unital(&["aut", name]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), line);
    }
}

#[test]
fn isomorphism_exit_codes() {
    assert_eq!(unital(&["iso", "wu", "wu"]).status.code(), Some(0));
    assert_eq!(unital(&["iso", "ou", "pu"]).status.code(), Some(1));
    assert_eq!(unital(&["iso", "classical8", "wu"]).status.code(), Some(1));
    assert_eq!(unital(&["iso", "wu", "wu", "--closed", "flat", "natural"]).status.code(), Some(1));
    assert_eq!(unital(&["iso", "wu", "--closed", "flat", "natural", "wu"]).status.code(), Some(1));
    assert_eq!(unital(&["iso", "ou", "ou", "--closed", "natural", "natural"]).status.code(), Some(0));
}

#[test]
fn onan_search() {
    let (code, lines) = machine(&["onan", "wu"]);
    assert_eq!(code, 0);
    assert_eq!(value(&lines, "found"), Some("true"));
    assert_eq!(unital(&["onan", "ou", "--expect-found"]).status.code(), Some(0));
    assert_eq!(unital(&["onan", "wu", "--count-through", "1,0,0,1", "--budget", "100"]).status.code(), Some(3));
}

#[test]
fn classical_has_no_onan() {
    assert_eq!(unital(&["onan", "classical8"]).status.code(), Some(0));
    assert_eq!(unital(&["onan", "classical8", "--expect-found"]).status.code(), Some(1));
}

#[test]
fn closure_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("wu-natural.unital");
    assert_eq!(unital(&["close", "wu", "natural", path(&file)]).status.code(), Some(0));
    let (code, lines) = machine(&["verify", path(&file)]);
    assert_eq!(code, 0, "{lines:?}");
    assert_eq!(value(&lines, "closure-points"), Some("513"));
    assert_eq!(value(&lines, "closure-blocks"), Some("3648"));
    assert_eq!(value(&lines, "design-lambda"), Some("pass"));
}

#[test]
fn export_is_the_embedded_catalog_file() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["classical8", "wu", "ou", "pu"] {
        let file = dir.path().join(format!("{name}.unital"));
        assert_eq!(unital(&["export", name, path(&file)]).status.code(), Some(0));
        let written = std::fs::read_to_string(&file).unwrap();
        let system = unital_core::catalog::parse(&written).unwrap();
        assert_eq!(unital_core::catalog::serialize(&system), written);
        let entry = unital_core::catalog::Entry::parse(name).unwrap();
        assert_eq!(system, unital_core::catalog::load(entry).unwrap());
        assert!(written.starts_with("unital v1\nq 8\nmodulus 11\n"));
    }
}

#[test]
fn symmetric_search_writes_four_systems() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sym.toml");
    std::fs::write(
        &config,
        "[[constraint]]\nmode = \"stabilize\"\ngenerators = [\"U\"]\n\n\
         [[constraint]]\nmode = \"permute\"\ngenerators = [\"L\"]\norbit_length = 3\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let (code, lines) = machine(&["search", path(&config), "--out", path(&out_dir)]);
    assert_eq!(code, 0);
    assert_eq!(value(&lines, "solutions"), Some("4"));
    assert_eq!(value(&lines, "complete"), Some("true"));
    for i in 1..=4 {
        let file = out_dir.join(format!("system-{i:03}.unital"));
        assert_eq!(unital(&["verify", path(&file)]).status.code(), Some(0));
    }
    assert!(std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap().contains("@solutions 4"));
}

#[test]
fn budgeted_unconstrained_search_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("open.toml");
    std::fs::write(&config, "node_limit = 1000\n").unwrap();
    let (code, lines) = machine(&["search", path(&config)]);
    assert_eq!(code, 3);
    assert_eq!(value(&lines, "complete"), Some("false"));
}

#[test]
fn bad_search_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[[constraint]]\nmode = \"sideways\"\ngenerators = []\n").unwrap();
    assert_eq!(unital(&["search", path(&config)]).status.code(), Some(2));
}
