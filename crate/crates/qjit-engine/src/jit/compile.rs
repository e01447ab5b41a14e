//! External compilation of emitted region sources into loadable modules.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use super::{JitConfig, RegionSource};
use crate::error::JitError;

#[derive(Debug, Clone)]
pub struct CompiledModule {
    pub module_path: PathBuf,
    /// Wall time of the external toolchain invocation.
    pub compile_ns: u64,
    /// Present when the configuration keeps artifacts.
    pub source_path: Option<PathBuf>,
}

/// Writes the region source and invokes the external toolchain to produce
/// a dynamically loadable module. The source file is retained only when
/// `keep_artifacts` is set.
pub fn compile_region(source: &RegionSource, cfg: &JitConfig) -> Result<CompiledModule, JitError> {
    let dir = cfg.region_dir();
    std::fs::create_dir_all(&dir)?;
    let c_path = dir.join(format!("{}.c", source.file_stem));
    let so_path = dir.join(format!("{}.so", source.file_stem));
    std::fs::write(&c_path, &source.text)?;

    let mut parts = cfg.toolchain.iter();
    let cc = parts.next().map(String::as_str).unwrap_or("cc");
    let mut command = Command::new(cc);
    command
        .args(parts)
        .arg(format!("-O{}", cfg.opt_level))
        .arg("-fPIC")
        .arg("-shared")
        .arg("-o")
        .arg(&so_path)
        .arg(&c_path);

    let started = Instant::now();
    let output = command.output();
    let compile_ns = started.elapsed().as_nanos() as u64;

    let cleanup_source = |keep: bool| {
        if !keep {
            let _ = std::fs::remove_file(&c_path);
        }
    };

    match output {
        Err(e) => {
            cleanup_source(cfg.keep_artifacts);
            Err(JitError::ToolchainMissing(format!("{cc}: {e}")))
        }
        Ok(out) if !out.status.success() => {
            cleanup_source(cfg.keep_artifacts);
            Err(JitError::CompileFailed {
                diagnostics: String::from_utf8_lossy(&out.stderr).into_owned(),
            })
        }
        Ok(_) => {
            cleanup_source(cfg.keep_artifacts);
            Ok(CompiledModule {
                module_path: so_path,
                compile_ns,
                source_path: cfg.keep_artifacts.then_some(c_path),
            })
        }
    }
}
