//! End-to-end runs of the `linkloss` binary.

use std::io::Write;
use std::path::Path;
use std::process::Command;

fn linkloss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linkloss"))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

/// The balanced diamond without its cross link: E1=0, E2=1, R1=R2=1.
const DIAMOND: &str = r#"{
    "nodes": 4,
    "elements": [
        {"kind": "R", "value": 1.0, "a": 1, "b": 3},
        {"kind": "R", "value": 1.0, "a": 2, "b": 0},
        {"kind": "V", "value": 0.0, "a": 3, "b": 2},
        {"kind": "V", "value": 1.0, "a": 0, "b": 1}
    ]
}"#;

const THREE_BUS: &str = r#"{
    "x12": 1.0, "x13": 1.0, "x23": 1.0,
    "alpha": 3.0, "beta1": 1.0, "beta2": 1.675,
    "Pc": 0.0,
    "Pmax": ["inf", "inf"],
    "Fmax": ["inf", "inf", "inf"]
}"#;

#[test]
fn solve_prints_a_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "diamond.json", DIAMOND);
    let output = linkloss().arg("solve").arg(&path).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("nodes: 4"));
    assert!(text.contains("total loss: 0.500000000 W"));
    assert!(text.contains("max relative KCL residual"));
}

#[test]
fn lcl_reports_the_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "diamond.json", DIAMOND);
    let output = linkloss()
        .args(["lcl"])
        .arg(&path)
        .args(["--add", "1", "2", "--resistor", "1e-6"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("loss before: 0.500000000 W"));
    assert!(text.contains("LCL (total): 1.99999"), "got:\n{text}");
}

#[test]
fn lcl_accepts_a_source_link() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "diamond.json", DIAMOND);
    let output = linkloss()
        .arg("lcl")
        .arg(&path)
        .args(["--add", "0", "3", "--source", "0.5"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("V 0.5 (0->3)"), "got:\n{text}");
}

#[test]
fn lcl_requires_exactly_one_link_kind() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "diamond.json", DIAMOND);
    let none = linkloss()
        .arg("lcl")
        .arg(&path)
        .args(["--add", "1", "2"])
        .output()
        .unwrap();
    assert_eq!(none.status.code(), Some(2));
    let both = linkloss()
        .arg("lcl")
        .arg(&path)
        .args(["--add", "1", "2", "--resistor", "1.0", "--source", "1.0"])
        .output()
        .unwrap();
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn sweep_csv_is_deterministic_and_well_formed() {
    let run = || {
        linkloss()
            .args([
                "sweep",
                "--e1",
                "0",
                "--e2",
                "1",
                "--r1",
                "1",
                "--r2",
                "1",
                "--grid",
                "1e-4:1e2:25",
            ])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "R3,i1,i2,i3,loss1,loss2,loss3,total_loss,lcl");
    assert_eq!(lines.len(), 1 + 25 + 1);
    assert!(lines.last().unwrap().starts_with("inf,"));
}

#[test]
fn sweep_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = linkloss()
        .args(["sweep", "--e1", "0", "--e2", "1", "--r1", "1", "--r2", "1"])
        .args(["--grid", "0.5:2.0:4", "--linear"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn opf_prints_the_worked_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "net.json", THREE_BUS);
    let output = linkloss().arg("opf").arg(&path).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("P1 = 1.50000000"));
    assert!(text.contains("P2 = 0.895522388"));
    assert!(text.contains("P13 = 1.29850746"));
    assert!(text.contains("[slack]"));
}

#[test]
fn opf_exits_nonzero_on_violated_limits() {
    let dir = tempfile::tempdir().unwrap();
    let tight = THREE_BUS.replace(
        r#""Fmax": ["inf", "inf", "inf"]"#,
        r#""Fmax": ["inf", 1.0, "inf"]"#,
    );
    let path = write_file(dir.path(), "net.json", &tight);
    let output = linkloss().arg("opf").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("violated"));
}

#[test]
fn sensitivity_shows_the_weak_line_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let weak = THREE_BUS.replace(r#""x13": 1.0"#, r#""x13": 1000000.0"#);
    let path = write_file(dir.path(), "net.json", &weak);
    let output = linkloss()
        .arg("sensitivity")
        .arg(&path)
        .args(["--beta1-grid", "0.5,1,2,4"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("max deviation from [[1,0],[0,0],[1,1]]"));
    assert!(text.contains("fit P23 = C/beta1 + c0"));
}

#[test]
fn transport_reports_the_classic_numbers() {
    let output = linkloss()
        .args([
            "transport",
            "--alpha",
            "10",
            "--beta",
            "50",
            "--travelers",
            "6",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("per-traveler cost: 83.0000000"));
    assert!(text.contains("per-traveler cost: 120.000000"));
    assert!(text.contains("would cost 60.0000000"));
}

#[test]
fn verify_passes_and_is_seed_stable() {
    let run = || {
        linkloss()
            .args(["verify", "--seed", "7", "--cases", "40"])
            .output()
            .unwrap()
    };
    let first = run();
    assert!(
        first.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    assert!(text.contains("LCL>=1 in 40/40 cases"), "got:\n{text}");
    assert!(text.contains("PASS"));
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let output = linkloss()
        .args(["solve", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn inconsistent_circuit_is_a_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(
        dir.path(),
        "short.json",
        r#"{"nodes": 2, "elements": [
            {"kind": "V", "value": 5.0, "a": 0, "b": 1},
            {"kind": "L", "value": 1.0, "a": 0, "b": 1}
        ]}"#,
    );
    let output = linkloss().arg("solve").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("inconsistent short"));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "bad.json", r#"{"nodes": 2, "oops": []}"#);
    let output = linkloss().arg("solve").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}
