//! Execution state and single-step semantics.
//!
//! The opcode bodies themselves are generated from the semantics source at
//! build time (see `gen::bodies`); this module provides the state they run
//! against and the runtime primitives they call.

use crate::error::{ERR_BAD_CURSOR, ERR_BAD_PC, ERR_BAD_REGISTER, ERR_NO_TABLE, ERR_TYPE_MISMATCH};
use crate::op::Program;
use crate::storage::Database;
use crate::value::{Mem, Value};

/// An open cursor: an index into a table, no address semantics. Layout is
/// C-visible so compiled regions can advance cursors in place.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct Cursor {
    pub row_index: u64,
    pub n_rows: u64,
    pub at_end: u32,
    pub table_id: u32,
    pub valid: u32,
    pub(crate) pad: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VmStatus {
    Running,
    Yielded,
    Halted,
    Errored(i32),
}

/// Program counter, register file, open cursors, and completion status.
pub struct VmState {
    pub pc: usize,
    pub status: VmStatus,
    pub(crate) regs: Vec<Mem>,
    pub(crate) cursors: Vec<Cursor>,
    pub(crate) row_first: i32,
    pub(crate) row_count: i32,
    pub(crate) trap: i32,
}

impl VmState {
    /// Register file and cursor table are sized up front from the program,
    /// so their storage never moves during a run.
    pub fn new(program: &Program) -> VmState {
        VmState {
            pc: 0,
            status: VmStatus::Running,
            regs: vec![Mem::null(); program.reg_count],
            cursors: vec![Cursor::default(); program.cursor_count],
            row_first: 0,
            row_count: 0,
            trap: 0,
        }
    }

    /// Register contents as a caller-facing value (tests, row delivery).
    pub fn reg(&self, idx: usize) -> Value {
        self.regs.get(idx).map(|m| m.to_value()).unwrap_or(Value::Null)
    }

    /// Stores an integer in a register. Out-of-range indices are ignored.
    pub fn set_reg_int(&mut self, idx: usize, v: i64) {
        if let Some(m) = self.regs.get_mut(idx) {
            *m = Mem::from_int(v);
        }
    }

    pub fn cursor(&self, idx: usize) -> Option<&Cursor> {
        self.cursors.get(idx)
    }
}

/// Outcome of executing exactly one instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continue,
    Row { first_reg: usize, reg_count: usize, resume_pc: usize },
    Halted,
    Error { code: i32 },
}

/// Control effect of one opcode body; the dispatch shells translate it
/// into pc updates and outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Effect {
    Next,
    Jump(usize),
    Row,
    Halt,
    Error(i32),
}

pub(crate) struct ExecCtx<'a> {
    pub st: &'a mut VmState,
    pub db: &'a Database,
}

/// Executes one instruction: applies its effect, updates the pc, and
/// reports the control transfer. After a `Row` outcome the pc already
/// equals the resume position.
pub fn step(state: &mut VmState, db: &Database, program: &Program) -> StepOutcome {
    let pc = state.pc;
    let Some(op) = program.ops.get(pc) else {
        state.status = VmStatus::Errored(ERR_BAD_PC);
        return StepOutcome::Error { code: ERR_BAD_PC };
    };
    let effect = crate::gen::switch::dispatch_op(&mut ExecCtx { st: state, db }, op);
    if state.trap != 0 {
        let code = state.trap;
        state.trap = 0;
        state.status = VmStatus::Errored(code);
        return StepOutcome::Error { code };
    }
    match effect {
        Effect::Next => {
            state.pc = pc + 1;
            StepOutcome::Continue
        }
        Effect::Jump(target) => {
            state.pc = target;
            StepOutcome::Continue
        }
        Effect::Row => {
            state.pc = pc + 1;
            state.status = VmStatus::Yielded;
            StepOutcome::Row {
                first_reg: state.row_first as usize,
                reg_count: state.row_count as usize,
                resume_pc: pc + 1,
            }
        }
        Effect::Halt => {
            state.status = VmStatus::Halted;
            StepOutcome::Halted
        }
        Effect::Error(code) => {
            state.status = VmStatus::Errored(code);
            StepOutcome::Error { code }
        }
    }
}

/// Binds a cursor to a table. Positioning is left to Rewind.
pub(crate) fn open_cursor(db: &Database, cursor: &mut Cursor, table: i32) -> i32 {
    let Some(t) = (table >= 0).then(|| db.table(table as usize)).flatten() else {
        return ERR_NO_TABLE;
    };
    cursor.table_id = table as u32;
    cursor.n_rows = t.n_rows() as u64;
    cursor.row_index = 0;
    cursor.at_end = 0;
    cursor.valid = 1;
    0
}

/// Reads one column of the cursor's current row into a register cell.
pub(crate) fn read_column(db: &Database, cursor: &Cursor, col: i32, out: &mut Mem) -> i32 {
    if cursor.valid == 0 || cursor.at_end != 0 {
        return ERR_BAD_CURSOR;
    }
    let Some(table) = db.table(cursor.table_id as usize) else {
        return ERR_NO_TABLE;
    };
    if col < 0 || col as usize >= table.arity() {
        return ERR_TYPE_MISMATCH;
    }
    match table.mem_at(cursor.row_index as usize, col as usize) {
        Some(m) => {
            *out = m;
            0
        }
        None => ERR_BAD_CURSOR,
    }
}

/// Runtime primitives the generated opcode bodies call. Register and
/// cursor arguments are indices; a bad index sets the trap instead of
/// panicking, so unvalidated programs surface `BadRegister`.
pub(crate) mod rt {
    use super::*;

    #[inline(always)]
    pub(crate) fn set_int(cx: &mut ExecCtx<'_>, dst: usize, v: i64) {
        match cx.st.regs.get_mut(dst) {
            Some(m) => *m = Mem::from_int(v),
            None => cx.st.trap = ERR_BAD_REGISTER,
        }
    }

    #[inline(always)]
    pub(crate) fn copy(cx: &mut ExecCtx<'_>, dst: usize, src: usize) {
        if dst == src && src < cx.st.regs.len() {
            return;
        }
        let regs = &mut cx.st.regs;
        if dst < regs.len() && src < regs.len() {
            regs[dst] = regs[src];
        } else {
            cx.st.trap = ERR_BAD_REGISTER;
        }
    }

    #[inline(always)]
    pub(crate) fn cmp(cx: &mut ExecCtx<'_>, a: usize, b: usize) -> i32 {
        let regs = &cx.st.regs;
        match (regs.get(a), regs.get(b)) {
            (Some(x), Some(y)) => crate::value::cmp_mem(x, y),
            _ => {
                cx.st.trap = ERR_BAD_REGISTER;
                0
            }
        }
    }

    #[inline(always)]
    pub(crate) fn rewind(cx: &mut ExecCtx<'_>, cur: usize) {
        match cx.st.cursors.get_mut(cur) {
            Some(c) => {
                c.row_index = 0;
                c.at_end = u32::from(c.n_rows == 0);
            }
            None => cx.st.trap = ERR_BAD_CURSOR,
        }
    }

    #[inline(always)]
    pub(crate) fn next(cx: &mut ExecCtx<'_>, cur: usize) -> i32 {
        match cx.st.cursors.get_mut(cur) {
            Some(c) => {
                c.row_index += 1;
                if c.row_index < c.n_rows {
                    1
                } else {
                    c.at_end = 1;
                    0
                }
            }
            None => {
                cx.st.trap = ERR_BAD_CURSOR;
                0
            }
        }
    }

    #[inline(always)]
    pub(crate) fn cursor_at_end(cx: &mut ExecCtx<'_>, cur: usize) -> i32 {
        match cx.st.cursors.get(cur) {
            Some(c) => c.at_end as i32,
            None => {
                cx.st.trap = ERR_BAD_CURSOR;
                0
            }
        }
    }

    #[inline(always)]
    pub(crate) fn column(cx: &mut ExecCtx<'_>, cur: usize, col: i32, dst: usize) -> i32 {
        if dst >= cx.st.regs.len() {
            cx.st.trap = ERR_BAD_REGISTER;
            return 0;
        }
        let Some(cursor) = cx.st.cursors.get(cur) else {
            cx.st.trap = ERR_BAD_CURSOR;
            return 0;
        };
        let cursor = *cursor;
        read_column(cx.db, &cursor, col, &mut cx.st.regs[dst])
    }

    #[inline(always)]
    pub(crate) fn open_read(cx: &mut ExecCtx<'_>, cur: i32, tbl: i32) -> i32 {
        if cur < 0 {
            cx.st.trap = ERR_BAD_CURSOR;
            return 0;
        }
        match cx.st.cursors.get_mut(cur as usize) {
            Some(c) => open_cursor(cx.db, c, tbl),
            None => {
                cx.st.trap = ERR_BAD_CURSOR;
                0
            }
        }
    }

    #[inline(always)]
    pub(crate) fn set_row(cx: &mut ExecCtx<'_>, first: i32, n: i32) {
        cx.st.row_first = first;
        cx.st.row_count = n;
    }
}
