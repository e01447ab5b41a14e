//! Query planning: micro-SQL in, bytecode in the shape of the classic
//! single-table scan plan out, plus the benchmark query generator.
//!
//! Plan layout (positions vary with predicate size):
//!
//! ```text
//! 0  Init             jump to the transaction/constant tail
//! 1  OpenRead         cursor 0 on the scanned table
//! 2  Rewind           jump past the loop when the table is empty
//! 3  Column           loop head: current row's column into reg 1
//!    <comparisons>    short-circuit DNF encoding, one op per atom
//!    Copy             column reg into the output reg
//!    ResultRow        yield
//!    Next             back-edge to the loop head
//!    Halt
//!    Transaction      tail: Init jumps here
//!    <Integer...>     one constant load per distinct literal
//!    Goto 1           back to OpenRead
//! ```
//!
//! All comparison literals are hoisted into registers before the loop, so
//! the loop body is exactly Column, the comparisons, Copy, ResultRow, Next.

mod parse;

pub use parse::parse_query;

use std::ops::Range;

use crate::error::PlanError;
use crate::op::{validate_program, Op, Program};
use crate::opcode::Opcode;
use crate::storage::Database;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    fn opcode(self) -> Opcode {
        match self {
            CmpOp::Lt => Opcode::Lt,
            CmpOp::Gt => Opcode::Gt,
            CmpOp::Le => Opcode::Le,
            CmpOp::Ge => Opcode::Ge,
            CmpOp::Eq => Opcode::Eq,
            CmpOp::Ne => Opcode::Ne,
        }
    }
}

/// `column OP literal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub column: String,
    pub op: CmpOp,
    pub literal: i64,
}

/// WHERE predicate, normalized to a disjunction of conjunctions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    True,
    Dnf(Vec<Vec<Atom>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAst {
    pub column: String,
    pub table: String,
    pub predicate: Predicate,
}

/// Positions of the plan's fixed structure, for tests and tooling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanLayout {
    pub init: usize,
    pub open_read: usize,
    pub rewind: usize,
    pub loop_head: usize,
    pub cmp_block: Range<usize>,
    pub copy: usize,
    pub result_row: usize,
    pub next: usize,
    pub halt: usize,
    pub transaction: usize,
    pub integer_block: Range<usize>,
    pub goto_back: usize,
}

pub fn plan(ast: &QueryAst, db: &Database) -> Result<Program, PlanError> {
    plan_with_layout(ast, db).map(|(program, _)| program)
}

pub fn plan_with_layout(
    ast: &QueryAst,
    db: &Database,
) -> Result<(Program, PlanLayout), PlanError> {
    let table_idx = db
        .table_index(&ast.table)
        .ok_or_else(|| PlanError::UnknownTable(ast.table.clone()))?;
    let schema = &db.table(table_idx).unwrap().schema;
    let col_idx = schema.column_index(&ast.column).ok_or_else(|| PlanError::UnknownColumn {
        table: ast.table.clone(),
        column: ast.column.clone(),
    })?;

    let groups: &[Vec<Atom>] = match &ast.predicate {
        Predicate::True => &[],
        Predicate::Dnf(groups) => groups,
    };
    // The loop reads exactly one column; every atom must test it.
    for atom in groups.iter().flatten() {
        if atom.column != ast.column {
            return Err(PlanError::UnknownColumn {
                table: ast.table.clone(),
                column: atom.column.clone(),
            });
        }
        if i32::try_from(atom.literal).is_err() {
            return Err(PlanError::LiteralOutOfRange(atom.literal));
        }
    }

    // Registers: 1 holds the column, 2.. hold the distinct literals (first
    // occurrence order), then the output register.
    let mut literals: Vec<i64> = Vec::new();
    for atom in groups.iter().flatten() {
        if !literals.contains(&atom.literal) {
            literals.push(atom.literal);
        }
    }
    let lit_reg = |v: i64| 2 + literals.iter().position(|&l| l == v).unwrap() as i32;
    let col_reg = 1;
    let out_reg = 2 + literals.len() as i32;

    let n_atoms: usize = groups.iter().map(Vec::len).sum();
    let loop_head = 3usize;
    let cmp_base = loop_head + 1;
    let copy_pos = cmp_base + n_atoms;
    let rr_pos = copy_pos + 1;
    let next_pos = rr_pos + 1;
    let halt_pos = next_pos + 1;
    let trans_pos = halt_pos + 1;
    let int_base = trans_pos + 1;
    let goto_pos = int_base + literals.len();

    // Atom positions per group, for short-circuit targets.
    let mut group_start = Vec::with_capacity(groups.len());
    let mut at = cmp_base;
    for group in groups {
        group_start.push(at);
        at += group.len();
    }

    let mut ops = Vec::with_capacity(goto_pos + 1);
    ops.push(Op::new(Opcode::Init, 0, trans_pos as i32, 0));
    ops.push(Op::new(Opcode::OpenRead, 0, table_idx as i32, 0));
    ops.push(Op::new(Opcode::Rewind, 0, halt_pos as i32, 0));
    ops.push(Op::new(Opcode::Column, 0, col_idx as i32, col_reg));
    for (g, group) in groups.iter().enumerate() {
        let last_group = g + 1 == groups.len();
        for (j, atom) in group.iter().enumerate() {
            let last_atom = j + 1 == group.len();
            let lit = lit_reg(atom.literal);
            // Comparison predicate is reg[p3] OP reg[p1]: the column value
            // sits in p3, the literal in p1.
            let (op, target) = if last_group {
                // Any failing atom skips the row; passing all falls into Copy.
                (atom.op.negated(), next_pos)
            } else if last_atom {
                // Group fully passed: accept the row.
                (atom.op, copy_pos)
            } else {
                // Failed atom: try the next group.
                (atom.op.negated(), group_start[g + 1])
            };
            ops.push(Op::new(op.opcode(), lit, target as i32, col_reg));
        }
    }
    ops.push(Op::new(Opcode::Copy, col_reg, out_reg, 0));
    ops.push(Op::new(Opcode::ResultRow, out_reg, 1, 0));
    ops.push(Op::new(Opcode::Next, 0, loop_head as i32, 0));
    ops.push(Op::new(Opcode::Halt, 0, 0, 0));
    ops.push(Op::new(Opcode::Transaction, 0, 0, 0));
    for &lit in &literals {
        ops.push(Op::new(Opcode::Integer, lit as i32, lit_reg(lit), 0));
    }
    ops.push(Op::new(Opcode::Goto, 0, 1, 0));

    let mut program = Program::new(ops, out_reg as usize + 1, 1);
    program.main_loop_head = Some(loop_head);
    debug_assert!(validate_program(&program).is_ok(), "planner emitted an invalid program");

    let layout = PlanLayout {
        init: 0,
        open_read: 1,
        rewind: 2,
        loop_head,
        cmp_block: cmp_base..copy_pos,
        copy: copy_pos,
        result_row: rr_pos,
        next: next_pos,
        halt: halt_pos,
        transaction: trans_pos,
        integer_block: int_base..goto_pos,
        goto_back: goto_pos,
    };
    Ok((program, layout))
}

/// Benchmark query text: `pairs` unsatisfiable conjunctions (each
/// `(i<a AND i>b)` with a < b) joined by OR, plus an optional satisfiable
/// group `(i<bound AND i>-1)` controlling selectivity.
pub fn gen_bench_query(pairs: usize, selectivity_bound: Option<i64>) -> String {
    if pairs == 0 && selectivity_bound.is_none() {
        return "SELECT i FROM test WHERE (i<0 AND i>1);".to_string();
    }
    let mut groups: Vec<String> = (0..pairs)
        .map(|j| {
            let base = 100 * j as i64;
            format!("(i<{} AND i>{})", base + 1, base + 6)
        })
        .collect();
    if let Some(bound) = selectivity_bound {
        groups.push(format!("(i<{bound} AND i>-1)"));
    }
    format!("SELECT i FROM test WHERE {};", groups.join(" OR "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoLoopError;

impl std::fmt::Display for NoLoopError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("program has no main loop")
    }
}

impl std::error::Error for NoLoopError {}

/// Number of instructions in the main loop, `[loop_head, Next]` inclusive.
pub fn count_loop_ops(program: &Program) -> Result<usize, NoLoopError> {
    let head = program.main_loop_head.ok_or(NoLoopError)?;
    let next = program.ops[head..]
        .iter()
        .position(|op| op.opcode == Opcode::Next)
        .ok_or(NoLoopError)?;
    Ok(next + 1)
}
