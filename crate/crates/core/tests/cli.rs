use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stft-phase"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, seed: Option<u64>) -> Output {
    let mut cmd = bin();
    cmd.arg(sub).arg("--config").arg(config).arg("--out").arg(out);
    if let Some(s) = seed {
        cmd.arg("--seed").arg(s.to_string());
    }
    cmd.output().unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn check_hashes(out: &Path) -> usize {
    let m = manifest(out);
    let files = m["files"].as_array().unwrap();
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(f["sha256"].as_str().unwrap(), format!("{:x}", Sha256::digest(&bytes)));
    }
    files.len()
}

const SMALL_RETRIEVE: &str = r#"{
  "signal": { "kind": "mixture" },
  "scheme": { "kind": "frft_gauss", "a": 4, "n": 8 },
  "epsilon": 1e-3,
  "noise": { "kind": "multiplicative", "level": 0.01 },
  "grid": { "t": 8, "l": 128 }
}"#;

#[test]
fn retrieve_writes_hashed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SMALL_RETRIEVE);
    let out = dir.path().join("out");
    let o = run("retrieve", &cfg, &out, Some(3));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("manifest:"));
    assert!(check_hashes(&out) >= 5);
    let m = manifest(&out);
    assert_eq!(m["command"], "retrieve");
    assert_eq!(m["config"]["seed"], 3);
    assert_eq!(m["metadata"]["rng"], "ChaCha20");

    let pgm = fs::read(out.join("reconstruction_mask.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n128 128\n255\n"));
    assert_eq!(pgm.len(), b"P5\n128 128\n255\n".len() + 128 * 128);
    let csv = fs::read_to_string(out.join("reconstruction_signal.csv")).unwrap();
    assert!(csv.starts_with("index,t,re,im\r\n"));
    assert_eq!(csv.lines().count(), 129);
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SMALL_RETRIEVE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("retrieve", &cfg, &a, Some(9)).status.success());
    assert!(run("retrieve", &cfg, &b, Some(9)).status.success());
    let (ma, mb) = (manifest(&a), manifest(&b));
    assert_eq!(ma["files"], mb["files"]);
    for f in ma["files"].as_array().unwrap() {
        let name = f["path"].as_str().unwrap();
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }

    let c = dir.path().join("c");
    assert!(run("retrieve", &cfg, &c, Some(10)).status.success());
    assert_ne!(manifest(&c)["files"], ma["files"]);
}

#[test]
fn every_subcommand_runs_on_a_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
  "signal": { "kind": "chirp" },
  "scheme": { "kind": "hermite", "degrees": [1, 5, 10] },
  "epsilon": 0.1,
  "grid": { "t": 8, "l": 256 },
  "baseline": { "a": 1, "epsilons": [1e-3, 1e-6] },
  "study": { "count": 3, "min_degree": 0, "max_degree": 10, "trials": 3 },
  "bounds": { "trials": 4, "levels": [1e-2], "grid": { "t": 8, "l": 256 },
              "frft": { "kind": "frft_gauss", "a": 4, "n": 8 },
              "hermite": { "kind": "hermite", "degrees": [0, 4, 8] } }
}"#,
    );
    for sub in ["coverage", "retrieve", "baseline", "random-study", "verify-bounds"] {
        let out = dir.path().join(sub);
        let o = run(sub, &cfg, &out, Some(1));
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(check_hashes(&out) >= 1, "{sub}");
    }
    let study: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("random-study/study.json")).unwrap()).unwrap();
    assert_eq!(study["misfits"].as_array().unwrap().len(), 3);
    assert!(study["mean"].is_number() && study["p90"].is_number());
}

#[test]
fn coverage_reports_radii_for_frft_families() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{ "scheme": { "kind": "frft_gauss", "a": 10, "n": 40 }, "epsilon": 0.1, "grid": { "t": 8, "l": 128 } }"#,
    );
    let out = dir.path().join("out");
    assert!(run("coverage", &cfg, &out, None).status.success());
    let coverage: Value = serde_json::from_str(&fs::read_to_string(out.join("coverage.json")).unwrap()).unwrap();
    let report = &coverage["report"];
    let (r1, r2) = (report["r1"].as_f64().unwrap(), report["r2"].as_f64().unwrap());
    assert!(r1 > r2);
    assert!((r1 - report["covered_disc_radius_numeric"].as_f64().unwrap()).abs() < 1e-3 * r1);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for body in [
        "{ not json",
        r#"{ "epsilon": -1 }"#,
        r#"{ "unknown_field": 1 }"#,
        r#"{ "study": { "count": 6, "min_degree": 0, "max_degree": 0, "trials": 1 } }"#,
    ] {
        let cfg = write_config(dir.path(), "bad.json", body);
        let sub = if body.contains("study") { "random-study" } else { "retrieve" };
        let o = run(sub, &cfg, &out, None);
        assert_eq!(o.status.code(), Some(2), "{body}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn io_errors_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("retrieve", &dir.path().join("missing.json"), &dir.path().join("out"), None);
    assert_eq!(o.status.code(), Some(4));

    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SMALL_RETRIEVE);
    let o = run("retrieve", &cfg, &blocker.join("out"), None);
    assert_eq!(o.status.code(), Some(4));

    let cfg = write_config(dir.path(), "wav.json", r#"{ "signal": { "kind": "wav", "path": "nowhere.wav" } }"#);
    let o = run("retrieve", &cfg, &dir.path().join("out"), None);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn empty_region_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{ "signal": { "kind": "mixture" }, "scheme": { "kind": "frft_gauss", "a": 4, "n": 8 }, "epsilon": 100, "grid": { "t": 8, "l": 128 } }"#,
    );
    let o = run("retrieve", &cfg, &dir.path().join("out"), None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shipped_audio_config_round_trips_a_wav() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("retrieve", &root.join("configs/audio_hermite.json"), &out, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let wav = fs::read(out.join("reconstruction_signal.wav")).unwrap();
    assert_eq!(&wav[..4], b"RIFF");
    assert_eq!(&wav[8..12], b"WAVE");
}
