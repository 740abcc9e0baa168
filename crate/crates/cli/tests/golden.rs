//! Byte-for-byte comparison of stdout against files in tests/golden.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p jdm-cli --test golden`.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

const INSTANCES: [&str; 3] = ["jdm-a", "jdm-b", "jdm-c"];

fn dir(sub: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", sub].iter().collect()
}

fn compare(name: &str, args: &[&str], want_code: i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_jdm"))
        .args(args)
        .env_remove("JDM_EXACT_CAP")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(want_code), "{name}");
    let path = dir("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(dir("golden")).unwrap();
        fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let want = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        want == out.stdout,
        "{name} differs from golden:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn report_commands_match_golden_files() {
    for inst in INSTANCES {
        let file = dir("data").join(format!("{inst}.txt"));
        let file = file.to_str().unwrap();
        for cmd in ["check", "enumerate", "analyze", "verify"] {
            compare(&format!("{cmd}-{inst}.json"), &[cmd, file], 0);
        }
        compare(&format!("construct-{inst}.txt"), &["construct", file], 0);
        compare(&format!("verify-{inst}.txt"), &["--format", "text", "verify", file], 0);
    }
}

#[test]
fn sample_and_failure_outputs_match_golden_files() {
    let c = dir("data").join("jdm-c.txt");
    compare(
        "sample-jdm-c-seed7.json",
        &["sample", c.to_str().unwrap(), "--steps", "1000", "--seed", "7"],
        0,
    );
    let bad = dir("data").join("fractional.txt");
    compare("check-fractional.json", &["check", bad.to_str().unwrap()], 2);
}
