//! FFI surface shared with compiled regions.
//!
//! `QjitCtx`, `Mem`, `Cursor`, `COp`, and `RawOutcome` mirror the typedefs
//! in the generated C prelude; layout tests pin both sides. Runtime
//! services are passed to compiled code as function pointers in the
//! context, so emitted modules are self-contained and need no symbol
//! resolution against the host binary.

use crate::op::COp;
use crate::state::Cursor;
use crate::storage::Database;
use crate::value::{cmp_mem, Mem};

pub const OUT_ROW: i32 = 0;
pub const OUT_EXIT: i32 = 1;
pub const OUT_HALT: i32 = 2;
pub const OUT_ERROR: i32 = 3;
pub const OUT_DEOPT: i32 = 4;

/// Outcome struct returned by value from a compiled region.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawOutcome {
    pub kind: i32,
    pub val: i32,
}

pub type RegionEntry = unsafe extern "C" fn(*mut QjitCtx) -> RawOutcome;

pub type CmpFn = unsafe extern "C" fn(*const Mem, *const Mem) -> i32;
pub type ColumnFn = unsafe extern "C" fn(*mut QjitCtx, *mut Cursor, i32, *mut Mem) -> i32;
pub type OpenFn = unsafe extern "C" fn(*mut QjitCtx, i32, i32) -> i32;

#[repr(C)]
pub struct QjitCtx {
    pub regs: *mut Mem,
    pub cursors: *mut Cursor,
    pub ops: *const COp,
    pub db: *const Database,
    pub cmp_fn: CmpFn,
    pub column_fn: ColumnFn,
    pub open_fn: OpenFn,
    pub row_first: i32,
    pub row_count: i32,
    pub n_regs: i32,
    pub n_cursors: i32,
}

pub(crate) unsafe extern "C" fn rt_cmp(a: *const Mem, b: *const Mem) -> i32 {
    cmp_mem(&*a, &*b)
}

pub(crate) unsafe extern "C" fn rt_column(
    ctx: *mut QjitCtx,
    cur: *mut Cursor,
    col: i32,
    out: *mut Mem,
) -> i32 {
    let ctx = &*ctx;
    let db = &*ctx.db;
    let cursor = &mut *cur;
    let code = crate::state::read_column(db, cursor, col, &mut *out);
    code
}

pub(crate) unsafe extern "C" fn rt_open(ctx: *mut QjitCtx, cur: i32, tbl: i32) -> i32 {
    let ctx = &mut *ctx;
    let db = &*ctx.db;
    if cur < 0 || cur >= ctx.n_cursors {
        return crate::error::ERR_BAD_CURSOR;
    }
    let cursor = &mut *ctx.cursors.add(cur as usize);
    crate::state::open_cursor(db, cursor, tbl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::mem::{offset_of, size_of};

    // Layout pins: these mirror the struct definitions in the generated C
    // prelude. If one of these fails, compiled regions would read garbage.

    #[test]
    fn mem_layout_matches_c_cell() {
        assert_eq!(size_of::<Mem>(), 16);
        assert_eq!(offset_of!(Mem, tag), 0);
        assert_eq!(offset_of!(Mem, len), 4);
        assert_eq!(offset_of!(Mem, payload), 8);
    }

    #[test]
    fn cursor_layout_matches_c_cursor() {
        assert_eq!(size_of::<Cursor>(), 32);
        assert_eq!(offset_of!(Cursor, row_index), 0);
        assert_eq!(offset_of!(Cursor, n_rows), 8);
        assert_eq!(offset_of!(Cursor, at_end), 16);
        assert_eq!(offset_of!(Cursor, table_id), 20);
        assert_eq!(offset_of!(Cursor, valid), 24);
    }

    #[test]
    fn outcome_and_op_layout() {
        assert_eq!(size_of::<RawOutcome>(), 8);
        assert_eq!(size_of::<COp>(), 16);
        assert_eq!(offset_of!(COp, opcode), 0);
        assert_eq!(offset_of!(COp, p3), 12);
    }

    #[test]
    fn ctx_layout() {
        assert_eq!(offset_of!(QjitCtx, regs), 0);
        assert_eq!(offset_of!(QjitCtx, cursors), 8);
        assert_eq!(offset_of!(QjitCtx, ops), 16);
        assert_eq!(offset_of!(QjitCtx, db), 24);
        assert_eq!(offset_of!(QjitCtx, cmp_fn), 32);
        assert_eq!(offset_of!(QjitCtx, column_fn), 40);
        assert_eq!(offset_of!(QjitCtx, open_fn), 48);
        assert_eq!(offset_of!(QjitCtx, row_first), 56);
        assert_eq!(offset_of!(QjitCtx, row_count), 60);
    }
}
