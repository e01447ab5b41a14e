//! A self-contained bytecode query engine in the VDBE mold, with three
//! execution backends over one opcode-semantics source: a central-decode
//! ("switch") interpreter, a pre-resolved-dispatch ("threaded")
//! interpreter, and a template-based JIT that compiles hot scan loops to
//! shared objects with an external C compiler and calls them in place.
//!
//! The opcode semantics live in `semantics/opcodes.c`; at build time the
//! extractor derives both interpreters' opcode bodies and the JIT's
//! per-opcode templates from that single file.

pub mod backends;
pub mod error;
pub mod ffi;
mod gen;
pub mod jit;
pub mod op;
pub mod opcode;
pub mod oracle;
pub mod planner;
pub mod state;
pub mod storage;
pub mod value;

pub use backends::switch::run_switch;
pub use backends::threaded::run_threaded;
pub use backends::{Backend, CollectSink, CountSink, RowSink, RunConfig, RunStats, SinkAction};
pub use error::{ExecError, JitError, PlanError, StorageError, SyntaxError};
pub use jit::{run_jit, JitConfig, JitMode};
pub use op::{validate_program, Op, Program, ValidationReport};
pub use opcode::Opcode;
pub use planner::{count_loop_ops, gen_bench_query, parse_query, plan, QueryAst};
pub use state::{step, Cursor, StepOutcome, VmState, VmStatus};
pub use storage::{generate_table, import_csv, load_table, save_table, Database, Table, TableSchema};
pub use value::{compare_values, Value};

/// Provenance of the generated artifacts: the sha256 of the semantics
/// source recorded in each one, plus the generated documentation.
pub mod provenance {
    pub fn bodies_sha256() -> &'static str {
        crate::gen::bodies::SEMANTICS_SHA256
    }

    pub fn switch_backend_sha256() -> &'static str {
        crate::gen::switch::SEMANTICS_SHA256
    }

    pub fn threaded_backend_sha256() -> &'static str {
        crate::gen::threaded::SEMANTICS_SHA256
    }

    pub fn templates_sha256() -> &'static str {
        crate::gen::templates::SEMANTICS_SHA256
    }

    /// Generated opcode table (`opcodes.md`).
    pub fn opcodes_md() -> &'static str {
        crate::gen::templates::OPCODES_MD
    }

    /// Translation unit instantiating every template once.
    pub fn template_smoke_source() -> &'static str {
        crate::gen::templates::SMOKE_C_SOURCE
    }
}

/// Runs a program on the chosen backend with shared plumbing.
pub fn run_backend(
    backend: Backend,
    program: &Program,
    db: &Database,
    sink: &mut dyn RowSink,
    cfg: &RunConfig,
    jit_cfg: &JitConfig,
) -> Result<RunStats, ExecError> {
    match backend {
        Backend::Switch => run_switch(program, db, sink, cfg),
        Backend::Threaded => run_threaded(program, db, sink, cfg),
        Backend::Jit => {
            let mut jc = jit_cfg.clone();
            jc.mode = JitMode::Generic;
            run_jit(program, db, sink, cfg, &jc)
        }
        Backend::JitSpecialized => {
            let mut jc = jit_cfg.clone();
            jc.mode = JitMode::Specialized;
            run_jit(program, db, sink, cfg, &jc)
        }
    }
}
