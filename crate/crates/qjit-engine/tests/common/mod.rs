//! Shared helpers for the engine integration suites.

use qjit_engine::backends::CollectSink;
use qjit_engine::{
    parse_query, plan, run_backend, Backend, Database, JitConfig, Program, RunConfig, RunStats,
    Table, TableSchema, Value,
};

pub const FIG2_QUERY: &str = "SELECT i FROM test WHERE i<20;";

pub fn int_table(values: &[i64]) -> Table {
    let mut table = Table::new(TableSchema::bench("test"));
    for &v in values {
        table.push_row(vec![Value::Int(v)]).unwrap();
    }
    table
}

pub fn int_db(values: &[i64]) -> Database {
    Database::single(int_table(values))
}

pub fn plan_text(query: &str, db: &Database) -> Program {
    let ast = parse_query(query).expect("query parses");
    plan(&ast, db).expect("query plans")
}

/// Runs and collects rows; panics on execution errors.
pub fn run_collect(
    backend: Backend,
    program: &Program,
    db: &Database,
    jit_cfg: &JitConfig,
) -> (Vec<Vec<Value>>, RunStats) {
    let mut sink = CollectSink::default();
    let stats = run_backend(backend, program, db, &mut sink, &RunConfig::default(), jit_cfg)
        .expect("run succeeds");
    (sink.rows, stats)
}

/// Single-column rows as plain integers, for terse assertions.
pub fn as_ints(rows: &[Vec<Value>]) -> Vec<i64> {
    rows.iter()
        .map(|r| match &r[0] {
            Value::Int(v) => *v,
            other => panic!("expected Int, got {other:?}"),
        })
        .collect()
}

/// JIT config pointed at a fresh scratch directory with a low threshold,
/// so small tables already trigger compilation.
pub fn test_jit_config(tag: &str) -> JitConfig {
    let dir = std::env::temp_dir().join(format!(
        "qjit-test-{}-{}-{tag}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .subsec_nanos()
    ));
    let mut cfg = JitConfig::default();
    cfg.temp_dir = Some(dir);
    cfg.threshold = 4;
    cfg
}
