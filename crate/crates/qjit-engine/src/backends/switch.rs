//! Central-decode interpreter: a loop around [`step`], which fetches the
//! instruction at the pc and selects its case body in one match.

use std::time::Instant;

use super::{fill_row, process_cpu_ns, RowSink, RunConfig, RunStats, SinkAction};
use crate::error::ExecError;
use crate::op::Program;
use crate::state::{step, StepOutcome, VmState, VmStatus};
use crate::storage::Database;
use crate::value::Value;

/// Runs a validated program to completion, delivering every yielded row to
/// the sink before execution resumes.
pub fn run_switch(
    program: &Program,
    db: &Database,
    sink: &mut dyn RowSink,
    cfg: &RunConfig,
) -> Result<RunStats, ExecError> {
    let wall = Instant::now();
    let cpu0 = process_cpu_ns();
    let mut stats = RunStats::default();
    let mut state = VmState::new(program);
    let mut rowbuf: Vec<Value> = Vec::new();

    loop {
        if cfg.count_instructions {
            stats.instructions_retired += 1;
        }
        match step(&mut state, db, program) {
            StepOutcome::Continue => {}
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
