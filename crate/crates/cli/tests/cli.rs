use std::path::PathBuf;
use std::process::{Command, Output};

fn qdrepeater(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdrepeater"))
        .args(args)
        .output()
        .unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/scenarios")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["sweep", "--help"]] {
        assert_eq!(qdrepeater(args).status.code(), Some(0));
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["coeffs", "--delta", "1:0:0.1"],
        &["purify", "--mu", "1.5"],
        &["sweep"],
        &["chain", "/no/such/scenario.toml"],
    ] {
        let o = qdrepeater(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn parse_error_reports_line_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, "[[nodes]]\nname = \"A\"\ng = 1.2.3\n").unwrap();
    let o = qdrepeater(&["chain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3, column"), "{err}");
}

#[test]
fn unwritable_output_exits_two() {
    let o = qdrepeater(&["coeffs", "-o", "/no/such/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sweep.toml");
    std::fs::write(&path, "quantity = \"pcd\"\ng = \"0:3:0.5\"\nkappa_s = 0.2\n").unwrap();
    let o = qdrepeater(&["sweep", "-c", path.to_str().unwrap(), "--g", "1.2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("1.20000000000,0.200000000000,"));
}

#[test]
fn ideal_pair_report() {
    let o = qdrepeater(&["chain", &scenario("ideal_pair.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("fidelity 1.000000, probability 1.000000\n"));
}

#[test]
fn practical_pair_probability() {
    let o = qdrepeater(&["chain", &scenario("practical_pair.toml")]);
    let text = stdout(&o);
    assert!(text.contains("probability 0.770058"), "{text}");
    let o = qdrepeater(&["chain", &scenario("practical_pair.toml"), "--eta-in", "0.9"]);
    assert!(stdout(&o).contains(&format!("probability {:.6}", 0.81 * 0.770058223136336)));
}

#[test]
fn three_node_extension_is_perfect() {
    let o = qdrepeater(&["chain", &scenario("ideal_three_nodes.toml")]);
    let text = stdout(&o);
    assert!(text.contains("extend at B"));
    assert!(text.ends_with("fidelity 1.000000, probability 1.000000\n"), "{text}");
    let o = qdrepeater(&["chain", &scenario("ideal_three_nodes.toml"), "--format", "csv"]);
    let csv = stdout(&o);
    assert!(csv.starts_with("stage,probability,fidelity\n"));
    assert!(csv.ends_with("total,1.00000000000,1.00000000000\n"), "{csv}");
}

#[test]
fn purify_text_flags_three_rounds() {
    let o = qdrepeater(&["purify", "--mu", "0.7", "--rounds", "3", "--format", "text"]);
    let text = stdout(&o);
    assert!(text.contains("0.967365028203"));
    assert!(text.contains("mu0 = 0.700000000000: fidelity > 0.997 first reached after 3 rounds"));
}
