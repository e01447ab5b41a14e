//! Reference query evaluator: a direct per-row filter over the parsed
//! predicate, used by the test suites to check every execution backend.
//!
//! Deliberately independent of the planner, the bytecode, and every
//! dispatch path; the only shared piece is the value comparison order,
//! which is a documented convention of the engine.

use crate::planner::{Atom, CmpOp, Predicate, QueryAst};
use crate::storage::Table;
use crate::value::{compare_values, Value};

fn atom_holds(atom: &Atom, value: &Value) -> bool {
    use std::cmp::Ordering::*;
    let ord = compare_values(value, &Value::Int(atom.literal));
    match atom.op {
        CmpOp::Lt => ord == Less,
        CmpOp::Le => ord != Greater,
        CmpOp::Gt => ord == Greater,
        CmpOp::Ge => ord != Less,
        CmpOp::Eq => ord == Equal,
        CmpOp::Ne => ord != Equal,
    }
}

pub fn predicate_holds(predicate: &Predicate, value: &Value) -> bool {
    match predicate {
        Predicate::True => true,
        Predicate::Dnf(groups) => groups
            .iter()
            .any(|group| group.iter().all(|atom| atom_holds(atom, value))),
    }
}

/// Rows the query must produce, in scan order.
pub fn query_rows(ast: &QueryAst, table: &Table) -> Vec<Vec<Value>> {
    let col = match table.schema.column_index(&ast.column) {
        Some(c) => c,
        None => return Vec::new(),
    };
    let mut out = Vec::new();
    for row in 0..table.n_rows() {
        let value = table.value_at(row, col).expect("row within bounds");
        if predicate_holds(&ast.predicate, value) {
            out.push(vec![value.clone()]);
        }
    }
    out
}
