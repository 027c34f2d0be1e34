use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rmtgeo_cli::config::ConfigFile;
use rmtgeo_cli::output::{sha256_hex, RunManifest};

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rmtgeo-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rmtgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmtgeo")).args(args).output().unwrap()
}

fn manifest(path: &Path) -> RunManifest {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(rmtgeo(&["figure", "fig13"]).status.code(), Some(2));
    assert_eq!(rmtgeo(&["accept", "nonsense"]).status.code(), Some(2));
    assert_eq!(rmtgeo(&["--bogus"]).status.code(), Some(2));
    let dir = scratch("usage");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[run]\nsede = 3\n").unwrap();
    let out = rmtgeo(&["--config", cfg.to_str().unwrap(), "figure", "fig2"]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_sections_parse() {
    let cfg = ConfigFile::parse("[run]\nseed = 7\nthreads = 2\n\n[fig8]\nn = 64\nm = 10\n", "inline").unwrap();
    assert_eq!(cfg.run.seed, Some(7));
    assert_eq!(cfg.figure(8).n, Some(64));
    assert_eq!(cfg.figure(1).n, None);
    assert!(ConfigFile::parse("[fig99]\nn = 1\n", "inline").is_err());
}

#[test]
fn manifest_checksums_match_outputs_and_reruns_are_identical() {
    let a = scratch("m1");
    let b = scratch("m2");
    for (dir, threads) in [(&a, "1"), (&b, "2")] {
        let out = rmtgeo(&["--seed", "11", "--threads", threads, "--out-dir", dir.to_str().unwrap(), "figure", "fig2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ma = manifest(&a.join("fig2.manifest.json"));
    let mb = manifest(&b.join("fig2.manifest.json"));
    assert_eq!(ma.seed, 11);
    assert_eq!(ma.input_hash, mb.input_hash);
    assert!(!ma.outputs.is_empty());
    for (ra, rb) in ma.outputs.iter().zip(&mb.outputs) {
        let bytes = std::fs::read(a.join(&ra.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), ra.sha256);
        assert_eq!(ra.sha256, rb.sha256);
    }
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
}
