use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gadgetforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("GADGETFORGE_PARAMDIR")
        .output()
        .expect("spawn gadgetforge")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn keygen(dir: &Path, prefix: &str, set: &str, seed: &str) -> Output {
    let scheme = &set[..5];
    run(&["keygen", "--scheme", scheme, "--paramset", set, "--out", prefix, "--seed", seed], dir)
}

#[test]
fn robin_701_public_key_file_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = keygen(dir.path(), "k", "robin-701", "0102");
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let pk = fs::read(dir.path().join("k.rpk")).unwrap();
    assert_eq!(pk.len(), 6 + 1227);
    assert_eq!(&pk[..4], b"RBPK");
    let out = run(&["keygen", "--scheme", "robin", "--paramset", "robin-701", "--out", "j", "--seed", "0102", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["public_key_bytes"], 1227);
    assert_eq!(fs::read(dir.path().join("j.rpk")).unwrap(), pk);
}

#[test]
fn seeded_keygen_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for prefix in ["a", "b"] {
        assert_eq!(code(&keygen(dir.path(), prefix, "eagle-512", "c0ffee")), 0);
    }
    for ext in ["epk", "esk"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b);
    }
    assert_eq!(code(&keygen(dir.path(), "c", "eagle-512", "c0ffef")), 0);
    assert_ne!(fs::read(dir.path().join("a.epk")).unwrap(), fs::read(dir.path().join("c.epk")).unwrap());
}

#[test]
fn configuration_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = keygen(dir.path(), "k", "robin-702", "01");
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("robin-702"));
    assert_eq!(code(&run(&["keygen", "--scheme", "robin", "--paramset", "eagle-512", "--out", "k"], dir.path())), 3);
    assert_eq!(code(&run(&["keygen", "--scheme", "falcon", "--paramset", "robin-701", "--out", "k"], dir.path())), 3);
    assert_eq!(code(&run(&["keygen", "--scheme", "robin", "--paramset", "robin-701", "--out", "k", "--seed", "xyz"], dir.path())), 3);
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 3);
}

#[test]
fn sign_verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&keygen(d, "k", "robin-701", "aa")), 0);
    fs::write(d.join("msg"), b"attack at dawn").unwrap();
    fs::write(d.join("other"), b"attack at dusk").unwrap();
    let out = run(&["sign", "--key", "k.rsk", "--in", "msg", "--out", "msg.rsig", "--seed", "01"], d);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(code(&run(&["verify", "--key", "k.rpk", "--in", "msg", "--sig", "msg.rsig"], d)), 0);
    assert_eq!(code(&run(&["verify", "--key", "k.rpk", "--in", "other", "--sig", "msg.rsig"], d)), 1);

    let sig = fs::read(d.join("msg.rsig")).unwrap();
    fs::write(d.join("short.rsig"), &sig[..sig.len() / 2]).unwrap();
    assert_eq!(code(&run(&["verify", "--key", "k.rpk", "--in", "msg", "--sig", "short.rsig"], d)), 2);
    fs::write(d.join("hdr.rsig"), &sig[..3]).unwrap();
    assert_eq!(code(&run(&["verify", "--key", "k.rpk", "--in", "msg", "--sig", "hdr.rsig"], d)), 2);
    // A public key where a signature is expected.
    assert_eq!(code(&run(&["verify", "--key", "k.rpk", "--in", "msg", "--sig", "k.rpk"], d)), 2);
}

#[test]
fn seeded_signing_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&keygen(d, "k", "eagle-512", "bb")), 0);
    fs::write(d.join("msg"), b"m").unwrap();
    for out in ["1.esig", "2.esig"] {
        assert_eq!(code(&run(&["sign", "--key", "k.esk", "--in", "msg", "--out", out, "--seed", "07"], d)), 0);
    }
    assert_eq!(fs::read(d.join("1.esig")).unwrap(), fs::read(d.join("2.esig")).unwrap());
    assert_eq!(code(&run(&["verify", "--key", "k.epk", "--in", "msg", "--sig", "1.esig"], d)), 0);
}

#[test]
fn cross_scheme_files_are_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&keygen(d, "r", "robin-701", "01")), 0);
    assert_eq!(code(&keygen(d, "e", "eagle-512", "01")), 0);
    fs::write(d.join("msg"), b"m").unwrap();
    assert_eq!(code(&run(&["sign", "--key", "e.esk", "--in", "msg", "--out", "m.esig", "--seed", "01"], d)), 0);
    assert_eq!(code(&run(&["verify", "--key", "r.rpk", "--in", "msg", "--sig", "m.esig"], d)), 2);
}

#[test]
fn paramdir_override_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("params.toml"),
        "[robin-tiny]\nid = 40\nscheme = \"robin\"\nn = 31\nmodulus = 16384\np = 2048\nq = 8\na = 3\nb = 3\nalpha = 1.8\nr = 10.22\ns = 449.8\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gadgetforge"))
        .args(["params", "--json"])
        .env("GADGETFORGE_PARAMDIR", d)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|p| p["name"] == "robin-tiny" && p["n"] == 31));

    fs::write(d.join("params.toml"), "[robin-701]\nbogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gadgetforge")).args(["params"]).env("GADGETFORGE_PARAMDIR", d).output().unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn stattest_report_is_versioned_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["stattest", "--scheme", "eagle", "--paramset", "eagle-512", "--trials", "300", "--seed", "05", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["trials"], 300);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["variance", "mean", "e_uniformity", "correlation", "restart_rate"]);
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(code(&out), if passed { 0 } else { 1 });
}

#[test]
fn bench_reports_throughput() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bench", "--scheme", "robin", "--paramset", "robin-701", "--trials", "5", "--seed", "01", "--json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["sign_ops_per_second"].as_f64().unwrap() > 0.0);
    assert_eq!(v["verified"], 5);
}
