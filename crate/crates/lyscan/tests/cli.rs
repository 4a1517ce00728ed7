//! End-to-end checks of the command-line surface: spec files in, reports
//! and images out, with the documented exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lyscan"))
}

fn write_spec(dir: &std::path::Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lyscan-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_prints_verdict_code_and_certificate() {
    let dir = temp_dir("classify");
    let spec = write_spec(&dir, "bshift.op", "kind = backward_shift\nweights = constant 1\n");
    let out = bin()
        .args(["classify", "--spec", spec.to_str().unwrap(), "--lambda", "1,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("C\n"), "got: {text}");
    assert!(text.contains("analytic_filter"));
    assert!(text.contains("eigenvalue disk"));
}

#[test]
fn scan_writes_text_and_image() {
    let dir = temp_dir("scan");
    let spec = write_spec(&dir, "fshift.op", "kind = forward_shift\nweights = constant 1\n");
    let scan_path = dir.join("out.scan");
    let image_path = dir.join("out.ppm");
    let out = bin()
        .args([
            "scan",
            "--spec",
            spec.to_str().unwrap(),
            "--resolution",
            "21",
            "--out",
            scan_path.to_str().unwrap(),
            "--image",
            image_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&scan_path).unwrap();
    assert!(text.starts_with("lyscan-scan v1\n"));
    assert_eq!(text.lines().filter(|l| l.chars().all(|c| "CNU".contains(c)) && !l.is_empty()).count(), 21);
    assert!(!text.contains('C') || !text.lines().skip(6).any(|l| l.contains('C')));
    let ppm = fs::read_to_string(&image_path).unwrap();
    assert!(ppm.starts_with("P3\n21 21\n255\n"));

    // Round-trip through the render subcommand.
    let image2 = dir.join("again.ppm");
    let out = bin()
        .args([
            "render",
            "--scan",
            scan_path.to_str().unwrap(),
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            image2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&image2).unwrap(), ppm);
}

#[test]
fn oracle_prints_membership() {
    let dir = temp_dir("oracle");
    let spec = write_spec(&dir, "kalisch.op", "kind = kalisch\n");
    for (lambda, want) in [("0,0", "true"), ("0.3,0", "false")] {
        let out = bin()
            .args(["oracle", "--spec", spec.to_str().unwrap(), "--lambda", lambda])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), want);
    }
}

#[test]
fn orbit_emits_rows() {
    let dir = temp_dir("orbit");
    let spec = write_spec(&dir, "diag.op", "kind = diagonal\nentries = constant 0.5\n");
    let out = bin()
        .args(["orbit", "--spec", spec.to_str().unwrap(), "--horizon", "64"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n\tnorm"));
    assert_eq!(lines.next(), Some("0\t1"));
    assert_eq!(lines.next(), Some("1\t0.5"));
}

#[test]
fn claims_passes_at_reference_translation() {
    let out = bin()
        .args(["claims", "--w", "0.5,0", "--horizon", "2000", "--trials", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"all_pass\": true"));
}

#[test]
fn parse_errors_exit_with_code_two() {
    let dir = temp_dir("badspec");
    let spec = write_spec(&dir, "bad.op", "kind = sideways\n");
    let out = bin()
        .args(["classify", "--spec", spec.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown operator kind"));

    let out = bin().args(["classify", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_stable_defaults() {
    let out = bin().args(["classify", "--help"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["[default: 2048]", "[default: 40]", "[default: 100]", "[default: 4096]", "[default: 7]"] {
        assert!(text.contains(needle), "missing `{needle}` in help:\n{text}");
    }
}

#[test]
fn metamorphic_subcommand_passes_for_shift() {
    let dir = temp_dir("meta");
    let spec = write_spec(&dir, "bshift.op", "kind = backward_shift\nweights = constant 1\n");
    let out = bin()
        .args([
            "metamorphic",
            "--spec",
            spec.to_str().unwrap(),
            "--lambda0",
            "0.5,0",
            "--resolution",
            "21",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("pass"));
}
