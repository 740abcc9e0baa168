use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.display().to_string()
}

fn jdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jdm"))
        .args(args)
        .env_remove("JDM_EXACT_CAP")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn check_reports_class_sizes_and_theta() {
    let out = jdm(&["check", &data("jdm-c.txt")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["command"], "check");
    assert_eq!(v["result"]["graphical"], true);
    assert_eq!(v["result"]["class_sizes"], serde_json::json!([4, 1]));
    assert_eq!(v["result"]["theta"][0][1], "1/2");
    assert_eq!(v["result"]["theta"][1][0], "2");
}

#[test]
fn literal_theta_halves_the_diagonal() {
    let out = jdm(&["check", "--theta", "literal", &data("jdm-a.txt")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["theta"][1][1], "1/2");
    assert_eq!(v["params"]["theta"], "literal");
}

#[test]
fn non_graphical_exits_two() {
    for name in ["loop.txt", "fractional.txt"] {
        let out = jdm(&["check", &data(name)]);
        assert_eq!(code(&out), 2, "{name}");
        assert_eq!(json(&out)["result"]["graphical"], false);
        let out = jdm(&["construct", &data(name)]);
        assert_eq!(code(&out), 2, "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("not graphical"));
    }
}

#[test]
fn usage_and_input_errors_exit_three() {
    assert_eq!(code(&jdm(&["check", &data("malformed.txt")])), 3);
    assert_eq!(code(&jdm(&["check", "/definitely/not/here.txt"])), 3);
    assert_eq!(code(&jdm(&["frobnicate"])), 3);
    assert_eq!(code(&jdm(&["sample", &data("jdm-a.txt")])), 3, "missing --steps");
    assert_eq!(code(&jdm(&["analyze", &data("jdm-a.txt"), "--tv", "9", "3"])), 3);
    assert_eq!(code(&jdm(&["--help"])), 0);
}

#[test]
fn construct_round_trips_through_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let out = jdm(&["construct", &data("jdm-c.txt"), "--out", g.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["balanced"], true);
    assert_eq!(v["result"]["edge_count"], 3);

    let bare = jdm(&["construct", &data("jdm-c.txt")]);
    assert_eq!(bare.stdout, fs::read(&g).unwrap());

    let listing = dir.path().join("all.txt");
    let out = jdm(&["enumerate", &data("jdm-c.txt"), "--out", listing.to_str().unwrap()]);
    assert_eq!(json(&out)["result"]["count"], 6);
    let constructed = String::from_utf8(bare.stdout).unwrap();
    assert!(fs::read_to_string(&listing).unwrap().contains(constructed.trim_end()));
}

#[test]
fn bfs_and_brute_force_listings_agree() {
    for name in ["jdm-a.txt", "jdm-c.txt", "k4.txt"] {
        let bfs = json(&jdm(&["enumerate", &data(name)]));
        let brute = json(&jdm(&["enumerate", "--brute-force", &data(name)]));
        assert_eq!(bfs["result"]["count"], brute["result"]["count"], "{name}");
        assert_eq!(bfs["result"]["listing_sha256"], brute["result"]["listing_sha256"], "{name}");
    }
}

#[test]
fn sampling_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &std::path::Path| {
        jdm(&[
            "sample", &data("jdm-c.txt"), "--steps", "5000", "--burnin", "100", "--thin", "50",
            "--seed", "11", "--out", dir.to_str().unwrap(),
        ])
    };
    let (ra, rb) = (run(a.path()), run(b.path()));
    assert_eq!(code(&ra), 0);
    assert_eq!(ra.stdout, rb.stdout);

    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 101, "100 samples plus the manifest");
    assert_eq!(names[0], "manifest.json");
    for name in &names {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let v = json(&ra);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["result"]["retained"], 100);
    assert_eq!(v["result"]["steps"], 5100);
    assert!(v.get("wall_clock_ms").is_none());

    let other = jdm(&["sample", &data("jdm-c.txt"), "--steps", "5000", "--thin", "50", "--seed", "12"]);
    assert_ne!(json(&other)["result"]["stream_sha256"], v["result"]["stream_sha256"]);
}

#[test]
fn sampling_from_a_given_start() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("start.txt");
    let built = json(&jdm(&["construct", &data("jdm-a.txt"), "--out", g.to_str().unwrap()]));
    let out = jdm(&["sample", &data("jdm-a.txt"), "--steps", "0", "--init", g.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&out)["result"]["final_state_sha256"],
        built["result"]["realization_sha256"]
    );

    // an unbalanced start is refused
    fs::write(&g, "v 0 0\nv 1 0\nv 2 1\nv 3 1\ne 0 1\ne 2 3\ne 1 3\n").unwrap();
    let out = jdm(&["sample", &data("jdm-a.txt"), "--steps", "10", "--init", g.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn analyze_jdm_a_values() {
    let v = json(&jdm(&["analyze", &data("jdm-a.txt")]));
    let r = &v["result"];
    assert_eq!(r["state_count"], 2);
    assert_eq!(r["phi"], "1/24");
    assert!((r["lambda2"].as_f64().unwrap() - 11.0 / 12.0).abs() < 1e-12);
    assert!((r["relaxation"].as_f64().unwrap() - 12.0).abs() < 1e-9);
    for key in ["cheeger_ok", "modified_cheeger_ok", "dominance_ok", "bound_ok"] {
        assert_eq!(r[key], true, "{key}");
    }
}

#[test]
fn analyze_writes_tv_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tv.csv");
    let out = jdm(&["analyze", &data("jdm-c.txt"), "--tv", "0", "20", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["tv"]["exact"], true);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "t,tv");
    assert_eq!(lines.len(), 22);
    let last: f64 = lines[21].split(',').nth(1).unwrap().parse().unwrap();
    let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((first - 5.0 / 6.0).abs() < 1e-12);
    assert!(last < first);
}

#[test]
fn exact_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_jdm"))
        .args(["analyze", &data("jdm-c.txt")])
        .env("JDM_EXACT_CAP", "3")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["params"]["exact_cap"], 3);
    assert_eq!(v["result"]["phi"], Value::Null);
    assert_eq!(v["result"]["cheeger_applicable"], false);
}

#[test]
fn verify_passes_on_sample_instances() {
    for name in ["jdm-a.txt", "jdm-c.txt", "k4.txt"] {
        let out = jdm(&["verify", &data(name)]);
        assert_eq!(code(&out), 0, "{name}");
        assert_eq!(json(&out)["result"]["all_hold"], true, "{name}");
    }
}

#[test]
fn matrix_cap_refusal_is_a_usage_error() {
    let out = jdm(&["verify", &data("jdm-c.txt"), "--matrix-cap", "2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("limited to 2"));
}

#[test]
fn text_format_and_timing() {
    let out = jdm(&["--format", "text", "--timing", "check", &data("k4.txt")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result.graphical: true\n"));
    assert!(text.contains("result.class_sizes: [4]\n"));
    assert!(text.lines().any(|l| l.starts_with("wall_clock_ms: ")));
}

#[test]
fn outputs_are_stable_across_runs() {
    for args in [
        vec!["check", "jdm-c.txt"],
        vec!["enumerate", "k4.txt"],
        vec!["analyze", "jdm-c.txt"],
        vec!["verify", "jdm-a.txt"],
    ] {
        let a: Vec<String> = args.iter().map(|s| if s.ends_with(".txt") { data(s) } else { s.to_string() }).collect();
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(jdm(&a).stdout, jdm(&a).stdout, "{args:?}");
    }
}
