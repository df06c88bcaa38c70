//! CLI contract tests: flag/config precedence, exit codes, artifact shapes.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lfpp")
}

#[test]
fn gamma_zero_crossing_samples_are_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args([
            "crossing",
            "--size",
            "8",
            "--gamma",
            "0",
            "--replicas",
            "10",
            "--seed",
            "7",
            "--out",
        ])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("crossing.csv")).unwrap();
    let values: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("replica"))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(values.len(), 10);
    assert!(values.iter().all(|v| *v == "8.0"), "{values:?}");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out_dir = tmp.path().join(run);
        let out = Command::new(bin())
            .args([
                "crossing",
                "--size",
                "8",
                "--gamma",
                "0.2",
                "--replicas",
                "20",
                "--seed",
                "5",
                "--out",
            ])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        bodies.push(std::fs::read(out_dir.join("crossing.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "seed = 1\nsize = 8\ngamma = 0.0\nreplicas = 4\n").unwrap();

    // Config alone: seed 1.
    let out_a = tmp.path().join("a");
    let st = Command::new(bin())
        .args(["crossing", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out_a)
        .output()
        .unwrap();
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let json_a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("crossing.json")).unwrap())
            .unwrap();
    assert_eq!(json_a["seed"], 1);

    // Flag overrides: effective seed 9.
    let out_b = tmp.path().join("b");
    let st = Command::new(bin())
        .args(["crossing", "--config"])
        .arg(&cfg)
        .args(["--seed", "9", "--out"])
        .arg(&out_b)
        .output()
        .unwrap();
    assert!(st.status.success());
    let json_b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_b.join("crossing.json")).unwrap())
            .unwrap();
    assert_eq!(json_b["seed"], 9);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "sizzle = 8\n").unwrap();
    let st = Command::new(bin())
        .args(["crossing", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("sizzle") || err.contains("unknown"), "{err}");
}

#[test]
fn exit_codes_are_exhaustive() {
    // 0: success.
    let tmp = tempfile::tempdir().unwrap();
    let ok = Command::new(bin())
        .args(["crossing", "--size", "4", "--replicas", "2", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    // 2: usage errors name the offending flag.
    let bad = Command::new(bin())
        .args(["crossing", "--gamma=-1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--gamma"));
    let bad = Command::new(bin())
        .args(["metric", "--size", "10", "--m", "4"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    // 1: runtime failure (unwritable output path).
    let fail = Command::new(bin())
        .args([
            "crossing",
            "--size",
            "4",
            "--replicas",
            "2",
            "--out",
            "/proc/lfpp-denied",
        ])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn render_emits_wellformed_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let st = Command::new(bin())
        .args([
            "render", "--size", "64", "--gamma", "0.3", "--seed", "42", "--out",
        ])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(st.status.success());
    let svg = std::fs::read_to_string(tmp.path().join("render.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(
        svg.matches("<polyline").count(),
        1,
        "exactly one geodesic polyline"
    );
    assert_eq!(
        svg.matches("<rect").count(),
        64 * 64,
        "one heatmap rect per vertex"
    );
}

#[test]
fn provenance_block_reproduces_the_body() {
    // Re-running from the parameters recorded in the JSON sidecar must
    // reproduce the CSV body bit-exactly.
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let st = Command::new(bin())
        .args([
            "rsw",
            "--scales",
            "8,16",
            "--gamma",
            "0.25",
            "--p",
            "0.3",
            "--replicas",
            "12",
            "--seed",
            "1234",
            "--out",
        ])
        .arg(&first)
        .output()
        .unwrap();
    assert!(st.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("rsw.json")).unwrap()).unwrap();
    let cfg = &doc["config"];
    let second = tmp.path().join("second");
    let st = Command::new(bin())
        .args([
            "rsw",
            "--scales",
            &cfg["scales"].as_str().unwrap().replace(';', ","),
            "--gamma",
            cfg["gamma"].as_str().unwrap(),
            "--p",
            cfg["p"].as_str().unwrap(),
            "--replicas",
            cfg["replicas"].as_str().unwrap(),
            "--seed",
            &doc["seed"].to_string(),
            "--out",
        ])
        .arg(&second)
        .output()
        .unwrap();
    assert!(st.status.success());
    assert_eq!(
        std::fs::read(first.join("rsw.csv")).unwrap(),
        std::fs::read(second.join("rsw.csv")).unwrap()
    );
}

#[test]
fn lfpp_threads_env_is_honored() {
    // Same body whether the worker count comes from the env var or a flag.
    let tmp = tempfile::tempdir().unwrap();
    let out_env = tmp.path().join("env");
    let st = Command::new(bin())
        .env("LFPP_THREADS", "2")
        .args([
            "crossing",
            "--size",
            "8",
            "--gamma",
            "0.1",
            "--replicas",
            "16",
            "--seed",
            "4",
            "--out",
        ])
        .arg(&out_env)
        .output()
        .unwrap();
    assert!(st.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_env.join("crossing.json")).unwrap())
            .unwrap();
    assert_eq!(json["threads"], 2);

    let out_flag = tmp.path().join("flag");
    let st = Command::new(bin())
        .env("LFPP_THREADS", "2")
        .args([
            "crossing",
            "--size",
            "8",
            "--gamma",
            "0.1",
            "--replicas",
            "16",
            "--seed",
            "4",
            "--threads",
            "1",
            "--out",
        ])
        .arg(&out_flag)
        .output()
        .unwrap();
    assert!(st.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_flag.join("crossing.json")).unwrap())
            .unwrap();
    assert_eq!(json["threads"], 1, "flag beats the env var");
    assert_eq!(
        std::fs::read(out_env.join("crossing.csv")).unwrap(),
        std::fs::read(out_flag.join("crossing.csv")).unwrap()
    );
}

#[test]
fn field_file_has_json_header_and_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let st = Command::new(bin())
        .args(["sample-field", "--size", "4", "--seed", "3", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(st.status.success());
    let body = std::fs::read_to_string(tmp.path().join("sample-field.csv")).unwrap();
    let mut lines = body.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["convention"], "cov=G");
    assert_eq!(header["format"], "lfpp/1");
    // 12 rows of 12 values for the 3x blow-up of a 4x4 box.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.split(',').count() == 12));
    // Ring rows are identically zero.
    assert!(rows[0].split(',').all(|v| v == "0.0"));
}
