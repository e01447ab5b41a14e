//! Runtime half of the JIT: hot-loop detection, region selection, source
//! emission from the extracted templates, external compilation, dynamic
//! loading, and region execution with the interpreter handshake.

pub mod compile;
pub mod emit;
pub mod load;
pub mod run;

use std::collections::HashMap;
use std::path::PathBuf;

use crate::op::Program;

pub use compile::{compile_region, CompiledModule};
pub use emit::{emit_region_source, EmitterTable, RegionSource};
pub use load::load_and_install;
pub use run::run_jit;

/// Threshold value meaning "never compile".
pub const THRESHOLD_INFINITE: u32 = u32::MAX;

pub const DEFAULT_THRESHOLD: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitMode {
    Generic,
    Specialized,
}

#[derive(Debug, Clone)]
pub struct JitConfig {
    /// A loop becomes hot when its backward-jump counter exceeds this.
    pub threshold: u32,
    /// Optimization token passed to the toolchain as `-O<token>`.
    pub opt_level: String,
    /// Compiler command-line prefix, first element is the binary.
    pub toolchain: Vec<String>,
    /// Directory for emitted sources and modules; defaults to a
    /// process-scoped directory under the system temp dir.
    pub temp_dir: Option<PathBuf>,
    /// Retain emitted .c/.so artifacts for inspection.
    pub keep_artifacts: bool,
    pub mode: JitMode,
}

impl Default for JitConfig {
    fn default() -> Self {
        JitConfig {
            threshold: DEFAULT_THRESHOLD,
            opt_level: "2".to_string(),
            toolchain: vec!["cc".to_string()],
            temp_dir: None,
            keep_artifacts: false,
            mode: JitMode::Generic,
        }
    }
}

impl JitConfig {
    /// Default configuration with `QJIT_TOOLCHAIN`, `QJIT_OPT`,
    /// `QJIT_THRESHOLD`, `QJIT_TMPDIR`, and `QJIT_KEEP_ARTIFACTS` applied.
    pub fn from_env() -> JitConfig {
        let mut cfg = JitConfig::default();
        if let Ok(tc) = std::env::var("QJIT_TOOLCHAIN") {
            let parts: Vec<String> = tc.split_whitespace().map(str::to_string).collect();
            if !parts.is_empty() {
                cfg.toolchain = parts;
            }
        }
        if let Ok(opt) = std::env::var("QJIT_OPT") {
            if !opt.is_empty() {
                cfg.opt_level = opt;
            }
        }
        if let Ok(thr) = std::env::var("QJIT_THRESHOLD") {
            cfg.threshold = parse_threshold(&thr).unwrap_or(cfg.threshold);
        }
        if let Ok(dir) = std::env::var("QJIT_TMPDIR") {
            if !dir.is_empty() {
                cfg.temp_dir = Some(PathBuf::from(dir));
            }
        }
        if std::env::var("QJIT_KEEP_ARTIFACTS").as_deref() == Ok("1") {
            cfg.keep_artifacts = true;
        }
        cfg
    }

    pub fn with_threshold(mut self, threshold: u32) -> JitConfig {
        self.threshold = threshold.max(1);
        self
    }

    pub(crate) fn region_dir(&self) -> PathBuf {
        match &self.temp_dir {
            Some(dir) => dir.clone(),
            None => std::env::temp_dir().join(format!("qjit-regions-{}", std::process::id())),
        }
    }
}

/// `"inf"`/`"infinity"` disables compilation; otherwise a number ≥ 1.
pub fn parse_threshold(text: &str) -> Option<u32> {
    match text.trim() {
        "inf" | "infinity" | "none" => Some(THRESHOLD_INFINITE),
        other => other.parse::<u32>().ok().map(|v| v.max(1)),
    }
}

/// A contiguous instruction span `[head_pc, tail_pc]` whose tail jumps
/// (possibly conditionally) back to its head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub head_pc: usize,
    pub tail_pc: usize,
}

/// Outcome of executing a compiled region, mirroring `RawOutcome`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionOutcome {
    Row { resume_pc: usize },
    Exit { pc: usize },
    Halt,
    Error { code: i32 },
    Deopt { pc: usize },
}

/// Hot-loop detection state. Counters live on the jump-target instruction
/// itself; the detector tracks the last observed tail per head.
#[derive(Debug)]
pub struct LoopDetector {
    pub threshold: u32,
    tails: HashMap<usize, usize>,
}

impl LoopDetector {
    pub fn new(threshold: u32) -> LoopDetector {
        LoopDetector { threshold: threshold.max(1), tails: HashMap::new() }
    }

    pub fn observed_tail(&self, head: usize) -> Option<usize> {
        self.tails.get(&head).copied()
    }
}

/// Feeds one taken jump to the detector. A backward jump increments the
/// hot counter of the instruction jumped to and records the jump source;
/// the region is returned exactly when the counter transitions from
/// threshold to threshold+1.
pub fn observe_jump(
    detector: &mut LoopDetector,
    program: &Program,
    from_pc: usize,
    to_pc: usize,
) -> Option<Region> {
    if to_pc >= from_pc {
        return None;
    }
    let op = program.ops.get(to_pc)?;
    let count = op.hot_count.get().saturating_add(1);
    op.hot_count.set(count);
    detector.tails.insert(to_pc, from_pc);
    if detector.threshold != THRESHOLD_INFINITE && count == detector.threshold + 1 {
        Some(Region { head_pc: to_pc, tail_pc: from_pc })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::Op;
    use crate::opcode::Opcode;

    fn goto_program(len: usize) -> Program {
        let mut ops: Vec<Op> = (0..len - 1).map(|_| Op::new(Opcode::Goto, 0, 0, 0)).collect();
        ops.push(Op::new(Opcode::Halt, 0, 0, 0));
        Program::new(ops, 1, 0)
    }

    #[test]
    fn first_backward_jump_counts_but_does_not_fire() {
        let program = goto_program(10);
        let mut det = LoopDetector::new(8);
        assert_eq!(observe_jump(&mut det, &program, 8, 3), None);
        assert_eq!(program.ops[3].hot_count.get(), 1);
        assert_eq!(det.observed_tail(3), Some(8));
    }

    #[test]
    fn forward_jump_is_not_counted() {
        let program = goto_program(10);
        let mut det = LoopDetector::new(8);
        assert_eq!(observe_jump(&mut det, &program, 3, 9), None);
        assert_eq!(program.ops[9].hot_count.get(), 0);
    }

    #[test]
    fn fires_exactly_once_on_threshold_transition() {
        let program = goto_program(10);
        let mut det = LoopDetector::new(8);
        for _ in 0..8 {
            assert_eq!(observe_jump(&mut det, &program, 8, 3), None);
        }
        assert_eq!(
            observe_jump(&mut det, &program, 8, 3),
            Some(Region { head_pc: 3, tail_pc: 8 })
        );
        assert_eq!(observe_jump(&mut det, &program, 8, 3), None);
    }

    #[test]
    fn infinite_threshold_never_fires() {
        let program = goto_program(10);
        let mut det = LoopDetector::new(THRESHOLD_INFINITE);
        for _ in 0..100_000 {
            assert_eq!(observe_jump(&mut det, &program, 5, 2), None);
        }
    }
}
