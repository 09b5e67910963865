use std::path::PathBuf;
use std::process::{Command, Output};

fn tables() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../tables")
}

fn nslat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nslat")).arg("--tables").arg(tables()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn info_reports_invariants() {
    let o = nslat(&["info", "U + A1(2)"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("rank\t3"));
    assert!(s.contains("signature\t(1, 2)"));
    assert!(s.contains("glue\tZ/4"));
    let j: serde_json::Value = serde_json::from_slice(&nslat(&["info", "--json", "U + E8"]).stdout).unwrap();
    assert_eq!(j["rank"], 10);
    assert_eq!(j["det"], "-1");
}

#[test]
fn parse_canonicalizes() {
    let o = nslat(&["parse", "A1^2 + U"]);
    assert!(stdout(&o).starts_with("A1^2 + U\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(nslat(&["info", "U + Q"]).status.code(), Some(2));
    assert_eq!(nslat(&["test", "det-cube", "U + A1"]).status.code(), Some(2));
    let missing = Command::new(env!("CARGO_BIN_EXE_nslat"))
        .args(["--tables", "/nonexistent", "test", "overlattice", "U + A1"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));
    // no rank-2 table ships, so rank 3 has nothing to compare against
    assert_eq!(nslat(&["test", "sublattice", "U + A1(5)"]).status.code(), Some(3));
}

#[test]
fn randomized_tests_echo_seed() {
    let o = nslat(&["--seed", "11", "--trials", "20", "test", "sublattice", "U + A2(2)"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("seed 11\n"));
}

#[test]
fn covering_radius_zero() {
    let o = nslat(&["test", "covering-radius", "U + A2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("covering-radius: zero"));
}

#[test]
fn classify_rank3_writes_store() {
    let dir = std::env::temp_dir().join(format!("nslat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("r.tsv");
    let o = nslat(&["--out", out.to_str().unwrap(), "classify", "--rank", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.lines().all(|l| l.starts_with("3\t")));
    assert!(stdout(&o).contains("0 positive"));
    nslat(&["--out", out.to_str().unwrap(), "classify", "--rank", "3"]);
    assert_eq!(first, std::fs::read_to_string(&out).unwrap());
    std::fs::remove_dir_all(dir).unwrap();
}
