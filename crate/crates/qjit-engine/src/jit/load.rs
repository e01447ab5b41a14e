//! Dynamic loading of compiled regions and entry installation.
//!
//! Loaded modules go into a process-wide registry and stay mapped for the
//! process lifetime; entries are function pointers into those mappings.

use std::ffi::{CStr, CString};
use std::os::raw::c_void;
use std::path::PathBuf;
use std::sync::Mutex;

use super::CompiledModule;
use crate::error::JitError;
use crate::ffi::RegionEntry;
use crate::op::Program;

struct LoadedModule {
    #[allow(dead_code)]
    handle: *mut c_void,
    #[allow(dead_code)]
    path: PathBuf,
}

// Raw dlopen handles are only stored, never dereferenced from Rust.
unsafe impl Send for LoadedModule {}

static REGISTRY: Mutex<Vec<LoadedModule>> = Mutex::new(Vec::new());

/// Number of region modules loaded so far in this process.
pub fn loaded_module_count() -> usize {
    REGISTRY.lock().map(|v| v.len()).unwrap_or(0)
}

fn dlerror_text() -> String {
    let msg = unsafe { libc::dlerror() };
    if msg.is_null() {
        "unknown dlopen error".to_string()
    } else {
        unsafe { CStr::from_ptr(msg) }.to_string_lossy().into_owned()
    }
}

/// Loads the module, resolves the region entry symbol, and records the
/// entry on the instruction at the loop head. Installing twice on the same
/// head is an error: regions are compiled at most once per op.
pub fn load_and_install(
    module: &CompiledModule,
    program: &Program,
    head_pc: usize,
    keep_artifacts: bool,
) -> Result<(), JitError> {
    let Some(op) = program.ops.get(head_pc) else {
        return Err(JitError::LoadFailed(format!("no instruction at {head_pc}")));
    };
    if op.compiled_entry.get().is_some() {
        return Err(JitError::AlreadyInstalled { head: head_pc });
    }

    let path_str = module.module_path.to_string_lossy().into_owned();
    let c_path = CString::new(path_str.clone())
        .map_err(|_| JitError::LoadFailed("path contains NUL".to_string()))?;
    let handle = unsafe { libc::dlopen(c_path.as_ptr(), libc::RTLD_NOW | libc::RTLD_LOCAL) };
    if handle.is_null() {
        return Err(JitError::LoadFailed(dlerror_text()));
    }
    let symbol = unsafe { libc::dlsym(handle, c"qjit_region_entry".as_ptr()) };
    if symbol.is_null() {
        let err = dlerror_text();
        unsafe { libc::dlclose(handle) };
        return Err(JitError::LoadFailed(err));
    }

    // SAFETY: the symbol was compiled from our emitted source with the
    // region entry signature.
    let entry: RegionEntry = unsafe { std::mem::transmute(symbol) };
    REGISTRY
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
        .push(LoadedModule { handle, path: module.module_path.clone() });
    op.compiled_entry.set(Some(entry));

    // The mapping survives unlinking; the file only needs to stay for
    // inspection.
    if !keep_artifacts {
        let _ = std::fs::remove_file(&module.module_path);
    }
    Ok(())
}
