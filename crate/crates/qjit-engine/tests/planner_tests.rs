//! Parser and planner: grammar coverage, the plan's fixed shape, loop-op
//! accounting, and the benchmark query generator.

mod common;

use common::*;
use qjit_engine::planner::{count_loop_ops, plan_with_layout, CmpOp, Predicate};
use qjit_engine::{gen_bench_query, oracle, parse_query, plan, Opcode, PlanError};

#[test]
fn parses_fig2_query() {
    let ast = parse_query(FIG2_QUERY).unwrap();
    assert_eq!(ast.column, "i");
    assert_eq!(ast.table, "test");
    match &ast.predicate {
        Predicate::Dnf(groups) => {
            assert_eq!(groups.len(), 1);
            assert_eq!(groups[0].len(), 1);
            assert_eq!(groups[0][0].op, CmpOp::Lt);
            assert_eq!(groups[0][0].literal, 20);
        }
        other => panic!("expected DNF, got {other:?}"),
    }
}

#[test]
fn parses_fig5_shape() {
    let text = "SELECT i FROM test WHERE\n(i<1 AND i>6) OR\n(i<101 AND i>106) OR\n(i<201 AND i>206);";
    let ast = parse_query(text).unwrap();
    match &ast.predicate {
        Predicate::Dnf(groups) => {
            assert_eq!(groups.len(), 3);
            assert!(groups.iter().all(|g| g.len() == 2));
        }
        other => panic!("expected DNF, got {other:?}"),
    }
}

#[test]
fn absent_where_is_predicate_true() {
    let ast = parse_query("SELECT i FROM test").unwrap();
    assert_eq!(ast.predicate, Predicate::True);
}

#[test]
fn keywords_are_case_insensitive() {
    let ast = parse_query("select i from test where i < 20").unwrap();
    assert!(matches!(ast.predicate, Predicate::Dnf(_)));
}

#[test]
fn syntax_error_carries_position() {
    let err = parse_query("SELECT i FROM test WHERE i <").unwrap_err();
    assert_eq!(err.line, 1);
    assert!(err.col > 20, "{err}");
}

#[test]
fn nested_parens_normalize_to_dnf() {
    let ast = parse_query("SELECT i FROM test WHERE i>0 AND (i<5 OR i>100)").unwrap();
    match &ast.predicate {
        Predicate::Dnf(groups) => {
            // (i>0 AND i<5) OR (i>0 AND i>100)
            assert_eq!(groups.len(), 2);
            assert!(groups.iter().all(|g| g.len() == 2));
        }
        other => panic!("expected DNF, got {other:?}"),
    }
}

#[test]
fn fig2_plan_is_isomorphic_to_the_classic_layout() {
    let db = int_db(&[5, 25, 7]);
    let ast = parse_query(FIG2_QUERY).unwrap();
    let (program, layout) = plan_with_layout(&ast, &db).unwrap();

    let names: Vec<&str> = program.ops.iter().map(|op| op.opcode.name()).collect();
    assert_eq!(
        names,
        vec![
            "Init", "OpenRead", "Rewind", "Column", "Ge", "Copy", "ResultRow", "Next", "Halt",
            "Transaction", "Integer", "Goto"
        ]
    );
    assert_eq!(program.main_loop_head, Some(3));
    assert_eq!(layout.loop_head, 3);
    assert_eq!(program.ops[layout.next].p2, layout.loop_head as i32);
    assert_eq!(program.ops[layout.init].p2, layout.transaction as i32);
    assert_eq!(program.ops[layout.goto_back].p2, layout.open_read as i32);
    // WHERE i<20 skips the row when i >= 20: a Ge guarding the Next.
    let ge = &program.ops[4];
    assert_eq!(ge.opcode, Opcode::Ge);
    assert_eq!(ge.p2, layout.next as i32);
    assert!(qjit_engine::validate_program(&program).is_ok());
    assert_eq!(count_loop_ops(&program).unwrap(), 5);
}

#[test]
fn predicate_true_plan_has_no_comparisons() {
    let db = int_db(&[1, 2]);
    let ast = parse_query("SELECT i FROM test").unwrap();
    let (program, layout) = plan_with_layout(&ast, &db).unwrap();
    assert_eq!(layout.cmp_block.len(), 0);
    assert_eq!(count_loop_ops(&program).unwrap(), 4);
}

#[test]
fn loop_ops_follow_the_2k_plus_4_formula() {
    let db = int_db(&[1]);
    for k in 0..=30 {
        let text = if k == 0 {
            "SELECT i FROM test".to_string()
        } else {
            gen_bench_query(k, None)
        };
        let program = plan_text(&text, &db);
        assert_eq!(
            count_loop_ops(&program).unwrap(),
            2 * k + 4,
            "k={k}: loop is Column + 2k comparisons + Copy + ResultRow + Next"
        );
    }
}

#[test]
fn loop_op_count_is_strictly_monotone_in_k() {
    let db = int_db(&[1]);
    let mut last = 0;
    for k in 1..=30 {
        let program = plan_text(&gen_bench_query(k, None), &db);
        let ops = count_loop_ops(&program).unwrap();
        assert!(ops > last);
        last = ops;
    }
}

#[test]
fn count_loop_ops_requires_a_loop() {
    let program = qjit_engine::Program::new(
        vec![qjit_engine::Op::new(Opcode::Halt, 0, 0, 0)],
        1,
        0,
    );
    assert!(count_loop_ops(&program).is_err());
}

#[test]
fn gen_bench_query_matches_fig5_text_at_k3() {
    assert_eq!(
        gen_bench_query(3, None),
        "SELECT i FROM test WHERE (i<1 AND i>6) OR (i<101 AND i>106) OR (i<201 AND i>206);"
    );
}

#[test]
fn gen_bench_query_k0_is_the_minimal_false_predicate() {
    assert_eq!(gen_bench_query(0, None), "SELECT i FROM test WHERE (i<0 AND i>1);");
}

#[test]
fn gen_bench_query_bound_selects_exactly_below_bound() {
    let db = int_db(&[0, 1, 1999, 2000, 2001, 500_000]);
    let ast = parse_query(&gen_bench_query(1, Some(2000))).unwrap();
    let rows = oracle::query_rows(&ast, db.table(0).unwrap());
    let got: Vec<i64> = rows
        .iter()
        .map(|r| match r[0] {
            qjit_engine::Value::Int(v) => v,
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(got, vec![0, 1, 1999]);
}

#[test]
fn unsatisfiable_pairs_contribute_zero_rows() {
    let db = int_db(&[0, 3, 50, 104, 205, 9999]);
    for k in [0, 1, 3, 10] {
        let ast = parse_query(&gen_bench_query(k, None)).unwrap();
        assert!(oracle::query_rows(&ast, db.table(0).unwrap()).is_empty(), "k={k}");
    }
}

#[test]
fn k3_plan_filters_like_the_oracle_on_a_small_table() {
    let values = [0i64, 3, 50, 103, 105, 200, 204, 207, 1000, 5];
    let db = int_db(&values);
    let text = "SELECT i FROM test WHERE (i<4 AND i>1) OR (i<105 AND i>102) OR (i<210 AND i>205)";
    let ast = parse_query(text).unwrap();
    let program = plan(&ast, &db).unwrap();
    assert_eq!(count_loop_ops(&program).unwrap(), 10);

    let expected = oracle::query_rows(&ast, db.table(0).unwrap());
    let (rows, _) = run_collect(qjit_engine::Backend::Switch, &program, &db, &test_jit_config("planner"));
    assert_eq!(rows, expected);
    assert_eq!(as_ints(&rows), vec![3, 103, 207]);
}

#[test]
fn unknown_table_and_column_are_rejected() {
    let db = int_db(&[1]);
    let ast = parse_query("SELECT i FROM nosuch WHERE i<1").unwrap();
    assert!(matches!(plan(&ast, &db), Err(PlanError::UnknownTable(_))));
    let ast = parse_query("SELECT nope FROM test WHERE nope<1").unwrap();
    assert!(matches!(plan(&ast, &db), Err(PlanError::UnknownColumn { .. })));
}

#[test]
fn oversized_literal_is_rejected() {
    let db = int_db(&[1]);
    let ast = parse_query("SELECT i FROM test WHERE i<4294967296").unwrap();
    assert!(matches!(plan(&ast, &db), Err(PlanError::LiteralOutOfRange(_))));
}

#[test]
fn distinct_literals_are_hoisted_once() {
    let db = int_db(&[1]);
    let ast = parse_query("SELECT i FROM test WHERE (i<7 AND i>0) OR (i<7 AND i>3)").unwrap();
    let (program, layout) = plan_with_layout(&ast, &db).unwrap();
    // Literals {7, 0, 3}: three Integer ops despite four atoms.
    assert_eq!(layout.integer_block.len(), 3);
    let loaded: Vec<i32> = program.ops[layout.integer_block.clone()]
        .iter()
        .map(|op| op.p1)
        .collect();
    assert_eq!(loaded, vec![7, 0, 3]);
}
