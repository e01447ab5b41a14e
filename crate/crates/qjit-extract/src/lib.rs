//! Build-time extraction of the JIT's opcode templates and both interpreter
//! backends' opcode bodies from a single opcode-semantics source file.
//!
//! The semantics source is a small interpreter written in a constrained C
//! subset: one dispatch `switch` over the opcode of the current operation,
//! one case block per opcode (fall-through groups allowed), jumps restricted
//! to local labels, the shared `jump_to_p2` label, and the named exit labels.
//! From the parsed AST this crate derives:
//!
//! * parametric C macro templates, one per opcode, consumed by the runtime
//!   code emitter (plus integer-specialized comparison variants);
//! * the Rust opcode bodies and dispatch/handler tables both interpreter
//!   backends are built from;
//! * the generated emitter table, opcode documentation, and a smoke-test
//!   translation unit instantiating every template.
//!
//! Every artifact records the sha256 of its source so mixed-provenance
//! builds fail fast.

use sha2::{Digest, Sha256};

pub mod ast;
pub mod codegen_c;
pub mod codegen_rust;
pub mod cprint;
pub mod error;
pub mod extract;
pub mod isa;
pub mod lexer;
pub mod parser;
pub mod transform;

pub use error::{ExtractError, Result};
pub use extract::{collect_case_blocks, extract_case_blocks, shell_info, CaseBlock, ShellInfo};
pub use parser::parse_semantics_source;
pub use transform::{specialize_comparison_templates, transform_block, Template};

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Everything generated from one semantics source.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub semantics_sha256: String,
    /// Rust module: transpiled opcode bodies.
    pub op_bodies_rs: String,
    /// Rust module: central-decode dispatch (switch backend).
    pub switch_dispatch_rs: String,
    /// Rust module: per-opcode handler table (threaded backend).
    pub threaded_handlers_rs: String,
    /// Rust module: emitter table + embedded prelude/template texts.
    pub emitter_table_rs: String,
    /// Per-group template files, generic set.
    pub template_files: Vec<(String, String)>,
    /// Per-group template files, integer-specialized comparison set.
    pub template_files_specialized: Vec<(String, String)>,
    pub opcodes_md: String,
    /// Translation unit instantiating every template once.
    pub smoke_c_source: String,
}

/// Runs the full pipeline on a semantics source.
pub fn build_artifacts(source: &str) -> Result<Artifacts> {
    let ast = parse_semantics_source(source)?;
    let shell = shell_info(&ast)?;
    let blocks = extract_case_blocks(&ast)?;

    let mut generic = Vec::new();
    for block in &blocks {
        for opcode in &block.opcodes {
            generic.push(transform_block(block, opcode, &shell)?);
        }
    }
    let specialized = specialize_comparison_templates(&generic, &shell);

    let sha = ast.sha256.clone();
    Ok(Artifacts {
        op_bodies_rs: codegen_rust::gen_op_bodies(&blocks, &shell, &sha)?,
        switch_dispatch_rs: codegen_rust::gen_switch_dispatch(&blocks, &sha),
        threaded_handlers_rs: codegen_rust::gen_threaded_handlers(&blocks, &sha),
        emitter_table_rs: codegen_c::emitter_table_source(&sha, &shell, &generic, &specialized),
        template_files: codegen_c::template_group_files(&generic, false),
        template_files_specialized: codegen_c::template_group_files(&specialized, true),
        opcodes_md: codegen_c::opcodes_md(&sha),
        smoke_c_source: codegen_c::smoke_source(&shell, &generic, &specialized),
        semantics_sha256: sha,
    })
}

/// Writes the template library to a directory: one `.inc` per opcode group,
/// the generated emitter table source, and the opcode documentation.
/// Returns the emitted file names.
pub fn emit_template_library(
    source: &str,
    out_dir: &std::path::Path,
    specialize: bool,
) -> Result<Vec<String>> {
    let artifacts = build_artifacts(source)?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut write = |name: &str, text: &str| -> Result<()> {
        std::fs::write(out_dir.join(name), text)?;
        written.push(name.to_string());
        Ok(())
    };
    for (name, text) in &artifacts.template_files {
        write(name, text)?;
    }
    if specialize {
        for (name, text) in &artifacts.template_files_specialized {
            write(name, text)?;
        }
    }
    write("emitter_table.gen", &artifacts.emitter_table_rs)?;
    write("opcodes.md", &artifacts.opcodes_md)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
