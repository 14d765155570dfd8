//! Compile tests/smoke.c against the generated header and the static
//! library. Skipped (with a note) when no C compiler is on PATH.
//!
//! `cargo test` only builds the rlib, so the static library is built here
//! with the same cargo and profile first.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in target/<profile>/deps; the library next to deps.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let target_dir = profile_dir.parent().unwrap();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "-q", "-p", "lgla-ffi", "--lib", "--target-dir"]).arg(target_dir);
    if profile_dir.ends_with("release") {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success(), "building the static library failed");
    let lib = profile_dir.join("liblgla_ffi.a");
    let out = profile_dir.join("lgla_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "cc failed"),
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    }
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}: {}", run.status, String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "c=-1-2i");
}
