//! Runs the template extractor on the opcode semantics source and writes
//! the generated interpreter bodies, dispatch tables, and template library
//! into OUT_DIR. Also smoke-compiles a translation unit that instantiates
//! every template once, so a template that does not expand to valid C fails
//! the build.

use std::path::PathBuf;
use std::process::Command;

fn main() {
    println!("cargo:rerun-if-changed=semantics/opcodes.c");
    println!("cargo:rerun-if-env-changed=QJIT_TOOLCHAIN");
    println!("cargo:rerun-if-env-changed=QJIT_SKIP_BUILD_SMOKE");

    let manifest = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(std::env::var("OUT_DIR").unwrap());
    let source = std::fs::read_to_string(manifest.join("semantics/opcodes.c"))
        .expect("read semantics/opcodes.c");

    let artifacts = match qjit_extract::build_artifacts(&source) {
        Ok(a) => a,
        Err(e) => panic!("template extraction failed: {e}"),
    };

    let write = |name: &str, text: &str| {
        std::fs::write(out_dir.join(name), text).expect("write generated artifact");
    };
    write("op_bodies.rs", &artifacts.op_bodies_rs);
    write("switch_dispatch.rs", &artifacts.switch_dispatch_rs);
    write("threaded_handlers.rs", &artifacts.threaded_handlers_rs);
    write("templates_gen.rs", &artifacts.emitter_table_rs);
    write("opcodes.md", &artifacts.opcodes_md);

    if std::env::var("QJIT_SKIP_BUILD_SMOKE").as_deref() == Ok("1") {
        return;
    }
    let smoke_c = out_dir.join("template_smoke.c");
    let smoke_so = out_dir.join("template_smoke.so");
    std::fs::write(&smoke_c, &artifacts.smoke_c_source).expect("write smoke source");
    let toolchain = std::env::var("QJIT_TOOLCHAIN").unwrap_or_else(|_| "cc".to_string());
    let mut parts = toolchain.split_whitespace();
    let cc = parts.next().unwrap_or("cc");
    let status = Command::new(cc)
        .args(parts)
        .arg("-O1")
        .arg("-fPIC")
        .arg("-shared")
        .arg("-o")
        .arg(&smoke_so)
        .arg(&smoke_c)
        .status();
    match status {
        Ok(s) if s.success() => {}
        Ok(s) => panic!(
            "template smoke compilation failed with {s}; every opcode template must compile \
             (source at {})",
            smoke_c.display()
        ),
        Err(e) => panic!("could not invoke toolchain `{cc}` for template smoke compile: {e}"),
    }
}
