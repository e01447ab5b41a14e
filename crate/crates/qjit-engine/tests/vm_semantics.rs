//! Single-step semantics: the per-opcode contracts and the state
//! invariants around yields and errors.

mod common;

use common::*;
use qjit_engine::error::{ERR_BAD_REGISTER, ERR_TYPE_MISMATCH};
use qjit_engine::op::{Op, Program};
use qjit_engine::{step, Opcode, StepOutcome, Value, VmState, VmStatus};

fn empty_db() -> qjit_engine::Database {
    int_db(&[])
}

/// Minimal program wrapper: run the given ops at pc 0 with a register file
/// of the given size.
fn program_of(ops: Vec<Op>, regs: usize, cursors: usize) -> Program {
    Program::new(ops, regs, cursors)
}

#[test]
fn integer_stores_constant_in_register() {
    let program = program_of(
        vec![Op::new(Opcode::Integer, 20, 2, 0), Op::new(Opcode::Halt, 0, 0, 0)],
        3,
        0,
    );
    let mut state = VmState::new(&program);
    let outcome = step(&mut state, &empty_db(), &program);
    assert_eq!(outcome, StepOutcome::Continue);
    assert_eq!(state.reg(2), Value::Int(20));
    assert_eq!(state.pc, 1);
}

#[test]
fn ge_jumps_when_reg_p3_at_least_reg_p1() {
    // Ge p1=1 p2=8 p3=3 with reg[1]=20, reg[3]=25: predicate is
    // reg[p3] >= reg[p1], so the jump is taken.
    let mut ops: Vec<Op> = (0..9).map(|_| Op::new(Opcode::Transaction, 0, 0, 0)).collect();
    ops[0] = Op::new(Opcode::Ge, 1, 8, 3);
    ops[8] = Op::new(Opcode::Halt, 0, 0, 0);
    let program = program_of(ops, 4, 0);
    let mut state = VmState::new(&program);
    state.set_reg_int(1, 20);
    state.set_reg_int(3, 25);
    assert_eq!(step(&mut state, &empty_db(), &program), StepOutcome::Continue);
    assert_eq!(state.pc, 8, "jump taken");

    // 19 < 20: falls through instead.
    let mut state = VmState::new(&program);
    state.set_reg_int(1, 20);
    state.set_reg_int(3, 19);
    assert_eq!(step(&mut state, &empty_db(), &program), StepOutcome::Continue);
    assert_eq!(state.pc, 1);
}

#[test]
fn copy_onto_itself_changes_nothing() {
    let program = program_of(
        vec![Op::new(Opcode::Copy, 4, 4, 0), Op::new(Opcode::Halt, 0, 0, 0)],
        5,
        0,
    );
    let mut state = VmState::new(&program);
    state.set_reg_int(4, 9);
    assert_eq!(step(&mut state, &empty_db(), &program), StepOutcome::Continue);
    assert_eq!(state.reg(4), Value::Int(9));
    assert_eq!(state.pc, 1);
}

#[test]
fn result_row_yields_and_pc_is_resume_position() {
    let program = program_of(
        vec![
            Op::new(Opcode::Integer, 7, 1, 0),
            Op::new(Opcode::ResultRow, 1, 1, 0),
            Op::new(Opcode::Halt, 0, 0, 0),
        ],
        2,
        0,
    );
    let mut state = VmState::new(&program);
    let db = empty_db();
    assert_eq!(step(&mut state, &db, &program), StepOutcome::Continue);
    let outcome = step(&mut state, &db, &program);
    assert_eq!(outcome, StepOutcome::Row { first_reg: 1, reg_count: 1, resume_pc: 2 });
    assert_eq!(state.pc, 2, "pc equals the resume position after a yield");
    assert_eq!(state.status, VmStatus::Yielded);
}

#[test]
fn rewind_on_empty_table_jumps_past_loop() {
    let program = program_of(
        vec![
            Op::new(Opcode::OpenRead, 0, 0, 0),
            Op::new(Opcode::Rewind, 0, 3, 0),
            Op::new(Opcode::Transaction, 0, 0, 0),
            Op::new(Opcode::Halt, 0, 0, 0),
        ],
        1,
        1,
    );
    let db = empty_db();
    let mut state = VmState::new(&program);
    assert_eq!(step(&mut state, &db, &program), StepOutcome::Continue);
    assert_eq!(step(&mut state, &db, &program), StepOutcome::Continue);
    assert_eq!(state.pc, 3, "empty table jumps straight past the loop");
}

#[test]
fn column_past_schema_is_type_mismatch() {
    let program = program_of(
        vec![
            Op::new(Opcode::OpenRead, 0, 0, 0),
            Op::new(Opcode::Rewind, 0, 3, 0),
            Op::new(Opcode::Column, 0, 5, 1),
            Op::new(Opcode::Halt, 0, 0, 0),
        ],
        2,
        1,
    );
    let db = int_db(&[1, 2]);
    let mut state = VmState::new(&program);
    assert_eq!(step(&mut state, &db, &program), StepOutcome::Continue);
    assert_eq!(step(&mut state, &db, &program), StepOutcome::Continue);
    let outcome = step(&mut state, &db, &program);
    assert_eq!(outcome, StepOutcome::Error { code: ERR_TYPE_MISMATCH });
    assert_eq!(state.status, VmStatus::Errored(ERR_TYPE_MISMATCH));
}

#[test]
fn bad_register_only_on_unvalidated_programs() {
    // reg 9 is outside the register file; validation would reject this
    // program, and executing it anyway reports BadRegister.
    let program = program_of(
        vec![Op::new(Opcode::Integer, 1, 9, 0), Op::new(Opcode::Halt, 0, 0, 0)],
        2,
        0,
    );
    assert!(!qjit_engine::validate_program(&program).is_ok());
    let mut state = VmState::new(&program);
    assert_eq!(
        step(&mut state, &empty_db(), &program),
        StepOutcome::Error { code: ERR_BAD_REGISTER }
    );
}

#[test]
fn step_is_deterministic() {
    let db = int_db(&[5, 25, 7]);
    let program = plan_text(FIG2_QUERY, &db);
    let run = || {
        let mut state = VmState::new(&program);
        let mut trace = Vec::new();
        for _ in 0..200 {
            let outcome = step(&mut state, &db, &program);
            trace.push((state.pc, outcome));
            match outcome {
                StepOutcome::Halted | StepOutcome::Error { .. } => break,
                StepOutcome::Row { .. } => state.status = VmStatus::Running,
                StepOutcome::Continue => {}
            }
        }
        trace
    };
    assert_eq!(run(), run());
}

#[test]
fn jump_safety_on_validated_program() {
    let db = int_db(&[5, 25, 7, 0, 19, 20, 21]);
    let program = plan_text(FIG2_QUERY, &db);
    assert!(qjit_engine::validate_program(&program).is_ok());
    let mut state = VmState::new(&program);
    for _ in 0..10_000 {
        match step(&mut state, &db, &program) {
            StepOutcome::Continue => {
                assert!(state.pc < program.len(), "pc stays in range");
            }
            StepOutcome::Row { .. } => state.status = VmStatus::Running,
            StepOutcome::Halted => return,
            StepOutcome::Error { code } => panic!("unexpected error {code}"),
        }
    }
    panic!("program did not halt");
}
