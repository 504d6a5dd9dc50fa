use std::process::Command;

fn lab(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mercer-lab"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(lab(&["--help"]).0, Some(0));
    assert_eq!(lab(&["frobnicate"]).0, Some(1));
    assert_eq!(lab(&["verify", "--function", "nope"]).0, Some(1));
    assert_eq!(lab(&["verify", "--m", "3", "--M", "1"]).0, Some(1));
    // hypothesis not met without --force
    assert_eq!(lab(&["verify", "--function", "sin", "--trials", "5"]).0, Some(1));
    let (code, out) = lab(&[
        "verify",
        "--function",
        "exp",
        "--trials",
        "20",
        "--dim",
        "3",
        "--maps",
        "2",
    ]);
    assert_eq!(code, Some(0));
    assert!(out.contains("\"violations\": []"));
    let (code, _) = lab(&[
        "verify",
        "--function",
        "sin",
        "--force",
        "--m",
        "0.8",
        "--M",
        "1.5",
        "--trials",
        "20",
    ]);
    assert_eq!(code, Some(2));
}

#[test]
fn probe_csv() {
    let (code, out) = lab(&["probe", "--t", "1,2", "--p=-0.2,-1"]);
    assert_eq!(code, Some(0));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,p,g");
    assert_eq!(lines.len(), 5);
    assert!(lines[3].starts_with("2.0,-0.2,-0.00529"));
}

#[test]
fn sweep_and_search() {
    let (code, out) = lab(&[
        "sweep", "--phi", "log", "--psi", "id", "--m", "1", "--M", "3", "--trials", "30",
    ]);
    assert_eq!(code, Some(0), "{out}");
    let (code, out) = lab(&["search", "classic-nonconvex", "--function", "exp", "--budget", "5"]);
    assert_eq!(code, Some(0));
    assert!(out.contains("\"status\": \"exhausted\""));
    let (code, out) = lab(&["search", "th3-th4-order", "--budget", "2"]);
    assert_eq!(code, Some(0));
    assert!(out.contains("\"status\": \"found\""));
}

#[test]
fn evaluate_instance_file() {
    let dir = std::env::temp_dir().join(format!("mercer-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    std::fs::write(
        &path,
        r#"{"function": "sin", "m": 0.7853981633974483, "M": 1.5707963267948966,
            "maps": [{"kind": "trace", "w": 0.5}],
            "operators": [{"re": [[0.7853981633974483, 0.0], [0.0, 1.5707963267948966]]}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(lab(&["evaluate", "--instance", p]).0, Some(1));
    let (code, out) = lab(&["evaluate", "--instance", p, "--force"]);
    assert_eq!(code, Some(2));
    assert!(out.contains("\"chain\": \"classic\""));
    let (code, _) = lab(&["evaluate", "--instance", p, "--chain", "twice-diff"]);
    assert_eq!(code, Some(0));
    std::fs::remove_dir_all(dir).unwrap();
}
