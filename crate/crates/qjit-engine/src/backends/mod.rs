//! Execution backends over the shared opcode semantics: central-decode
//! interpretation ("switch"), pre-resolved per-instruction dispatch
//! ("threaded"), and the JIT in `crate::jit`.

pub mod switch;
pub mod threaded;

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinkAction {
    Continue,
    Abort,
}

/// Receives every produced row before execution resumes; returning
/// [`SinkAction::Abort`] ends the run without an error.
pub trait RowSink {
    fn on_row(&mut self, row: &[Value]) -> SinkAction;
}

impl<F: FnMut(&[Value]) -> SinkAction> RowSink for F {
    fn on_row(&mut self, row: &[Value]) -> SinkAction {
        self(row)
    }
}

/// Collects every row; the workhorse sink for tests.
#[derive(Debug, Default)]
pub struct CollectSink {
    pub rows: Vec<Vec<Value>>,
}

impl RowSink for CollectSink {
    fn on_row(&mut self, row: &[Value]) -> SinkAction {
        self.rows.push(row.to_vec());
        SinkAction::Continue
    }
}

/// Counts rows without materializing them.
#[derive(Debug, Default)]
pub struct CountSink {
    pub rows: u64,
}

impl RowSink for CountSink {
    fn on_row(&mut self, _row: &[Value]) -> SinkAction {
        self.rows += 1;
        SinkAction::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Switch,
    Threaded,
    Jit,
    JitSpecialized,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Switch => "switch",
            Backend::Threaded => "threaded",
            Backend::Jit => "jit",
            Backend::JitSpecialized => "jit-specialized",
        }
    }

    pub fn parse(name: &str) -> Option<Backend> {
        Some(match name {
            "switch" => Backend::Switch,
            "threaded" => Backend::Threaded,
            "jit" => Backend::Jit,
            "jit-specialized" => Backend::JitSpecialized,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunConfig {
    /// Retired-instruction counting perturbs timing; benchmark runs leave
    /// it off.
    pub count_instructions: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub rows_emitted: u64,
    pub instructions_retired: u64,
    pub wall_ns: u64,
    pub cpu_ns: u64,
    /// Wall time spent inside the external toolchain; zero for non-JIT
    /// backends.
    pub compile_ns: u64,
    pub compilations: u32,
}

/// Process CPU time; the experiments report it alongside wall time.
pub(crate) fn process_cpu_ns() -> u64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0;
    }
    (ts.tv_sec as u64) * 1_000_000_000 + ts.tv_nsec as u64
}

/// Copies registers `first..first+count` into the reusable row buffer.
pub(crate) fn fill_row(
    state: &crate::state::VmState,
    first: usize,
    count: usize,
    buf: &mut Vec<Value>,
) {
    buf.clear();
    for idx in first..first + count {
        buf.push(state.reg(idx));
    }
}
