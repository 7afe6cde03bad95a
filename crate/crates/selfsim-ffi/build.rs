//! Regenerates `include/selfsim.h` with cbindgen when the tool is installed,
//! and copies the header to `<target>/include/selfsim.h`.

use std::env;
use std::path::PathBuf;
use std::process::Command;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let target_dir = env::var("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|_| crate_dir.parent().unwrap().parent().unwrap().join("target"));
    let committed = crate_dir.join("include").join("selfsim.h");
    let header = target_dir.join("include").join("selfsim.h");
    if let Some(parent) = header.parent() {
        std::fs::create_dir_all(parent).ok();
    }

    let generated = Command::new("cbindgen")
        .arg("--config")
        .arg(crate_dir.join("cbindgen.toml"))
        .arg("--crate")
        .arg("selfsim-ffi")
        .arg("--output")
        .arg(&header)
        .arg(&crate_dir)
        .status();
    match generated {
        Ok(s) if s.success() => {}
        Ok(s) => {
            println!("cargo:warning=cbindgen exited with {s}; using the committed header");
            std::fs::copy(&committed, &header).expect("copy committed header");
        }
        // tool not installed
        Err(_) => {
            std::fs::copy(&committed, &header).expect("copy committed header");
        }
    }

    println!("cargo:rerun-if-changed=cbindgen.toml");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=include/selfsim.h");
}
