//! Switch/threaded backend equivalence: identical rows, identical counts,
//! checked against the reference row filter, including property tests over
//! randomized benchmark queries and tables.

mod common;

use common::*;
use proptest::prelude::*;
use qjit_engine::backends::{CollectSink, CountSink, SinkAction};
use qjit_engine::{
    gen_bench_query, oracle, parse_query, plan, run_switch, run_threaded, Backend, RunConfig,
    Value,
};

#[test]
fn fig2_rows_in_scan_order() {
    let db = int_db(&[5, 25, 7]);
    let program = plan_text(FIG2_QUERY, &db);
    for backend in [Backend::Switch, Backend::Threaded] {
        let (rows, stats) = run_collect(backend, &program, &db, &test_jit_config("equiv"));
        assert_eq!(as_ints(&rows), vec![5, 7], "{backend}");
        assert_eq!(stats.rows_emitted, 2);
        assert_eq!(stats.compilations, 0);
        assert_eq!(stats.compile_ns, 0);
    }
}

#[test]
fn empty_table_emits_nothing() {
    let db = int_db(&[]);
    let program = plan_text(FIG2_QUERY, &db);
    for backend in [Backend::Switch, Backend::Threaded] {
        let (rows, stats) = run_collect(backend, &program, &db, &test_jit_config("equiv"));
        assert!(rows.is_empty(), "{backend}");
        assert_eq!(stats.rows_emitted, 0);
    }
}

#[test]
fn abort_after_first_row_is_not_an_error() {
    let db = int_db(&[5, 7]);
    let program = plan_text(FIG2_QUERY, &db);
    for backend in [Backend::Switch, Backend::Threaded] {
        let mut seen = 0u64;
        let mut sink = |_row: &[Value]| {
            seen += 1;
            SinkAction::Abort
        };
        let run = match backend {
            Backend::Switch => run_switch(&program, &db, &mut sink, &RunConfig::default()),
            _ => run_threaded(&program, &db, &mut sink, &RunConfig::default()),
        };
        let stats = run.expect("abort is a clean stop");
        assert_eq!(stats.rows_emitted, 1, "{backend}");
        assert_eq!(seen, 1);
    }
}

#[test]
fn sink_invocations_equal_rows_emitted() {
    let db = int_db(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
    let program = plan_text("SELECT i FROM test WHERE i>3", &db);
    let mut sink = CountSink::default();
    let stats = run_switch(&program, &db, &mut sink, &RunConfig::default()).unwrap();
    assert_eq!(sink.rows, stats.rows_emitted);
    assert_eq!(stats.rows_emitted, 7);
}

#[test]
fn retired_instruction_counts_match_between_backends() {
    let db = int_db(&[5, 25, 7, 0, 19, 20, 21, 100]);
    let program = plan_text(FIG2_QUERY, &db);
    let cfg = RunConfig { count_instructions: true };
    let mut a = CollectSink::default();
    let mut b = CollectSink::default();
    let switch_stats = run_switch(&program, &db, &mut a, &cfg).unwrap();
    let threaded_stats = run_threaded(&program, &db, &mut b, &cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert!(switch_stats.instructions_retired > 0);
    assert_eq!(switch_stats.instructions_retired, threaded_stats.instructions_retired);
}

#[test]
fn counting_disabled_reports_zero() {
    let db = int_db(&[1, 2, 3]);
    let program = plan_text("SELECT i FROM test", &db);
    let mut sink = CountSink::default();
    let stats = run_switch(&program, &db, &mut sink, &RunConfig::default()).unwrap();
    assert_eq!(stats.instructions_retired, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Randomized benchmark queries over randomized tables: both
    /// interpreters agree with each other and with the reference filter.
    #[test]
    fn interpreters_match_oracle_on_random_inputs(
        k in 0usize..12,
        bound in proptest::option::of(0i64..2_000),
        values in proptest::collection::vec(-50i64..2_050, 0..300),
    ) {
        let db = int_db(&values);
        let text = gen_bench_query(k, bound);
        let ast = parse_query(&text).unwrap();
        let program = plan(&ast, &db).unwrap();
        prop_assert!(qjit_engine::validate_program(&program).is_ok());

        let expected = oracle::query_rows(&ast, db.table(0).unwrap());
        let cfg = RunConfig { count_instructions: true };

        let mut s = CollectSink::default();
        let switch_stats = run_switch(&program, &db, &mut s, &cfg).unwrap();
        let mut t = CollectSink::default();
        let threaded_stats = run_threaded(&program, &db, &mut t, &cfg).unwrap();

        prop_assert_eq!(&s.rows, &expected);
        prop_assert_eq!(&t.rows, &expected);
        prop_assert_eq!(switch_stats.rows_emitted, expected.len() as u64);
        prop_assert_eq!(switch_stats.instructions_retired, threaded_stats.instructions_retired);
    }
}
