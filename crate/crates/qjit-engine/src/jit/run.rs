//! The JIT execution loop: switch-backend interpretation feeding every
//! taken jump to the loop detector, synchronous compile/install on
//! detection, and the per-row handshake with compiled regions.

use std::collections::HashSet;
use std::time::Instant;

use super::{compile_region, emit_region_source, load_and_install};
use super::{observe_jump, EmitterTable, JitConfig, LoopDetector, Region};
use crate::backends::{fill_row, process_cpu_ns, RowSink, RunConfig, RunStats, SinkAction};
use crate::error::{ExecError, JitError};
use crate::ffi::{self, QjitCtx, RawOutcome};
use crate::op::Program;
use crate::state::{step, StepOutcome, VmState, VmStatus};
use crate::storage::Database;
use crate::value::Value;

/// Runs a validated program with hot-loop compilation. Rows, their order,
/// and terminal status are identical to the switch backend for every
/// program and database; compilation failures fall back to interpretation
/// silently.
pub fn run_jit(
    program: &Program,
    db: &Database,
    sink: &mut dyn RowSink,
    cfg: &RunConfig,
    jit: &JitConfig,
) -> Result<RunStats, ExecError> {
    let wall = Instant::now();
    let cpu0 = process_cpu_ns();
    let mut stats = RunStats::default();
    let mut state = VmState::new(program);
    let mut detector = LoopDetector::new(jit.threshold);
    let emitter = EmitterTable::embedded();
    let mut failed_heads: HashSet<usize> = HashSet::new();
    let mut rowbuf: Vec<Value> = Vec::new();

    // Raw views for compiled regions. Register and cursor storage is sized
    // up front and never reallocates during the run, so these stay valid.
    let mut ctx = QjitCtx {
        regs: state.regs.as_mut_ptr(),
        cursors: state.cursors.as_mut_ptr(),
        ops: program.c_ops().as_ptr(),
        db: db as *const Database,
        cmp_fn: ffi::rt_cmp,
        column_fn: ffi::rt_column,
        open_fn: ffi::rt_open,
        row_first: 0,
        row_count: 0,
        n_regs: state.regs.len() as i32,
        n_cursors: state.cursors.len() as i32,
    };

    // After a deopt the faulting instruction must run interpreted before
    // any compiled entry is consulted again.
    let mut suppress_entry_once = false;

    loop {
        let pc = state.pc;
        if !suppress_entry_once {
            if let Some(entry) = program.ops.get(pc).and_then(|op| op.compiled_entry.get()) {
                // SAFETY: ctx pointers cover this state/program/db; no Rust
                // references into the register or cursor storage are live
                // while the region runs.
                let outcome: RawOutcome = unsafe { entry(&mut ctx) };
                match outcome.kind {
                    ffi::OUT_ROW => {
                        let resume = outcome.val as usize;
                        state.pc = resume;
                        state.row_first = ctx.row_first;
                        state.row_count = ctx.row_count;
                        stats.rows_emitted += 1;
                        fill_row(&state, ctx.row_first as usize, ctx.row_count as usize, &mut rowbuf);
                        if sink.on_row(&rowbuf) == SinkAction::Abort {
                            break;
                        }
                        continue;
                    }
                    ffi::OUT_EXIT => {
                        state.pc = outcome.val as usize;
                        continue;
                    }
                    ffi::OUT_HALT => {
                        state.status = VmStatus::Halted;
                        break;
                    }
                    ffi::OUT_DEOPT => {
                        state.pc = outcome.val as usize;
                        suppress_entry_once = true;
                        continue;
                    }
                    _ => {
                        state.status = VmStatus::Errored(outcome.val);
                        return Err(ExecError { code: outcome.val, pc });
                    }
                }
            }
        }
        suppress_entry_once = false;

        if cfg.count_instructions {
            stats.instructions_retired += 1;
        }
        let prev_pc = state.pc;
        match step(&mut state, db, program) {
            StepOutcome::Continue => {
                let new_pc = state.pc;
                if new_pc != prev_pc + 1 {
                    if let Some(region) = observe_jump(&mut detector, program, prev_pc, new_pc) {
                        if !failed_heads.contains(&region.head_pc) {
                            match compile_and_install(program, region, &emitter, jit, &mut stats) {
                                Ok(()) => {}
                                Err(_silent) => {
                                    failed_heads.insert(region.head_pc);
                                }
                            }
                        }
                    }
                }
            }
            StepOutcome::Row { first_reg, reg_count, .. } => {
                stats.rows_emitted += 1;
                fill_row(&state, first_reg, reg_count, &mut rowbuf);
                state.status = VmStatus::Running;
                if sink.on_row(&rowbuf) == SinkAction::Abort {
                    break;
                }
            }
            StepOutcome::Halted => break,
            StepOutcome::Error { code } => {
                return Err(ExecError { code, pc: state.pc });
            }
        }
    }

    stats.wall_ns = wall.elapsed().as_nanos() as u64;
    stats.cpu_ns = process_cpu_ns().saturating_sub(cpu0);
    Ok(stats)
}

fn compile_and_install(
    program: &Program,
    region: Region,
    emitter: &EmitterTable,
    jit: &JitConfig,
    stats: &mut RunStats,
) -> Result<(), JitError> {
    let source = emit_region_source(program, region, emitter, jit.mode)?;
    let module = compile_region(&source, jit)?;
    stats.compile_ns += module.compile_ns;
    load_and_install(&module, program, region.head_pc, jit.keep_artifacts)?;
    stats.compilations += 1;
    Ok(())
}
