//! Pre-resolved dispatch interpreter.
//!
//! Before execution every instruction is resolved once to a direct handler
//! reference. Each handler executes its opcode body and performs the
//! transfer to the next handler itself; the trampoline below only invokes
//! what the previous handler resolved, so there is no central decode and no
//! central bounds check.

use std::time::Instant;

use super::{fill_row, process_cpu_ns, RowSink, RunConfig, RunStats, SinkAction};
use crate::error::{ExecError, ERR_BAD_PC};
use crate::op::{Op, Program};
use crate::state::{Effect, ExecCtx, VmState, VmStatus};
use crate::storage::Database;
use crate::value::Value;

pub(crate) type Handler = fn(&mut ThreadedCtx<'_>) -> Transfer;

pub(crate) enum Transfer {
    /// Proceed directly to the handler the previous one resolved.
    Continue(Handler),
    Pause(Pause),
}

pub(crate) enum Pause {
    Row { first: usize, count: usize, resume: usize },
    Halted,
    Error(i32),
}

pub(crate) struct ThreadedCtx<'a> {
    pub st: &'a mut VmState,
    pub db: &'a Database,
    pub ops: &'a [Op],
    pub resolved: &'a [Handler],
    pub pc: usize,
    pub retired: u64,
    pub count_instructions: bool,
}

/// Shared tail of every generated handler: run the opcode body, apply its
/// effect, and resolve the next handler.
#[inline(always)]
pub(crate) fn apply<F>(tc: &mut ThreadedCtx<'_>, body: F) -> Transfer
where
    F: Fn(&mut ExecCtx<'_>, &Op) -> Effect,
{
    let pc = tc.pc;
    if tc.count_instructions {
        tc.retired += 1;
    }
    let ops = tc.ops;
    let op = &ops[pc];
    let effect = body(&mut ExecCtx { st: &mut *tc.st, db: tc.db }, op);
    if tc.st.trap != 0 {
        let code = tc.st.trap;
        tc.st.trap = 0;
        return Transfer::Pause(Pause::Error(code));
    }
    let target = match effect {
        Effect::Next => pc + 1,
        Effect::Jump(t) => t,
        Effect::Row => {
            tc.pc = pc + 1;
            return Transfer::Pause(Pause::Row {
                first: tc.st.row_first as usize,
                count: tc.st.row_count as usize,
                resume: pc + 1,
            });
        }
        Effect::Halt => return Transfer::Pause(Pause::Halted),
        Effect::Error(code) => return Transfer::Pause(Pause::Error(code)),
    };
    tc.pc = target;
    match tc.resolved.get(target) {
        Some(h) => Transfer::Continue(*h),
        None => Transfer::Pause(Pause::Error(ERR_BAD_PC)),
    }
}

/// Observable behavior is identical to the switch backend; only dispatch
/// differs.
pub fn run_threaded(
    program: &Program,
    db: &Database,
    sink: &mut dyn RowSink,
    cfg: &RunConfig,
) -> Result<RunStats, ExecError> {
    let wall = Instant::now();
    let cpu0 = process_cpu_ns();
    let mut stats = RunStats::default();

    // Per-instruction resolution, done once.
    let resolved: Vec<Handler> = program
        .ops
        .iter()
        .map(|op| crate::gen::threaded::HANDLER_TABLE[op.opcode.code() as usize])
        .collect();
    let Some(&first) = resolved.first() else {
        return Err(ExecError { code: ERR_BAD_PC, pc: 0 });
    };

    let mut state = VmState::new(program);
    let mut rowbuf: Vec<Value> = Vec::new();
    let mut tc = ThreadedCtx {
        st: &mut state,
        db,
        ops: &program.ops,
        resolved: &resolved,
        pc: 0,
        retired: 0,
        count_instructions: cfg.count_instructions,
    };

    let mut next = Transfer::Continue(first);
    loop {
        match next {
            Transfer::Continue(handler) => next = handler(&mut tc),
            Transfer::Pause(Pause::Row { first, count, resume }) => {
                stats.rows_emitted += 1;
                fill_row(tc.st, first, count, &mut rowbuf);
                tc.st.status = VmStatus::Running;
                if sink.on_row(&rowbuf) == SinkAction::Abort {
                    break;
                }
                match tc.resolved.get(resume) {
                    Some(h) => next = Transfer::Continue(*h),
                    None => next = Transfer::Pause(Pause::Error(ERR_BAD_PC)),
                }
            }
            Transfer::Pause(Pause::Halted) => {
                tc.st.status = VmStatus::Halted;
                break;
            }
            Transfer::Pause(Pause::Error(code)) => {
                tc.st.status = VmStatus::Errored(code);
                let pc = tc.pc;
                return Err(ExecError { code, pc });
            }
        }
    }

    stats.instructions_retired = tc.retired;
    stats.wall_ns = wall.elapsed().as_nanos() as u64;
    stats.cpu_ns = process_cpu_ns().saturating_sub(cpu0);
    Ok(stats)
}
