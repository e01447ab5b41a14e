//! Table storage: generation determinism, file format round-trips, and
//! CSV import.

mod common;

use common::*;
use proptest::prelude::*;
use qjit_engine::storage::ColumnType;
use qjit_engine::{generate_table, import_csv, load_table, save_table, StorageError, Table, TableSchema, Value};

#[test]
fn generate_zero_rows() {
    let table = generate_table(0, 1, (0, 100));
    assert_eq!(table.n_rows(), 0);
}

#[test]
fn generation_is_deterministic_per_seed() {
    let a = generate_table(1000, 1, (0, 1_000_000));
    let b = generate_table(1000, 1, (0, 1_000_000));
    assert_eq!(a, b);
    let c = generate_table(1000, 2, (0, 1_000_000));
    assert_ne!(a, c);
}

#[test]
fn uniform_fraction_below_bound_within_three_sigma() {
    let n = 1_000_000usize;
    let table = generate_table(n, 7, (0, 1_000_000));
    let below = table
        .rows()
        .filter(|r| matches!(r[0], Value::Int(v) if v < 2000))
        .count() as f64;
    let p = 2000.0 / 1_000_000.0;
    let mean = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    assert!(
        (below - mean).abs() <= 3.0 * sigma,
        "count {below} outside {mean} ± 3·{sigma:.1}"
    );
}

#[test]
fn roundtrip_generated_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.qjdb");
    let table = generate_table(5000, 3, (-100, 100));
    save_table(&table, &path).unwrap();
    let loaded = load_table(&path).unwrap();
    assert_eq!(table, loaded);
}

#[test]
fn truncated_file_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.qjdb");
    let table = generate_table(100, 3, (0, 10));
    save_table(&table, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(load_table(&path), Err(StorageError::Format(_))));
}

#[test]
fn unknown_version_is_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.qjdb");
    let table = generate_table(10, 3, (0, 10));
    save_table(&table, &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4] = 9;
    std::fs::write(&path, &bytes).unwrap();
    match load_table(&path) {
        Err(StorageError::Format(msg)) => assert!(msg.contains('9'), "{msg}"),
        other => panic!("expected format error, got {other:?}"),
    }
}

#[test]
fn bad_magic_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.qjdb");
    std::fs::write(&path, b"NOPE....").unwrap();
    assert!(matches!(load_table(&path), Err(StorageError::Format(_))));
}

#[test]
fn csv_import_int_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "5\n25\n7\n").unwrap();
    let table = import_csv(&path, TableSchema::bench("test")).unwrap();
    assert_eq!(table.n_rows(), 3);
    assert_eq!(table.value_at(1, 0), Some(&Value::Int(25)));
}

#[test]
fn csv_bad_int_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "abc\n").unwrap();
    match import_csv(&path, TableSchema::bench("test")) {
        Err(StorageError::Parse { row: 1, col: 1, .. }) => {}
        other => panic!("expected parse error at 1:1, got {other:?}"),
    }
}

#[test]
fn csv_any_column_preserves_mixed_types() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "1\nhello\n2.5\n\"\"\n42\n").unwrap();
    let schema = TableSchema {
        name: "test".to_string(),
        columns: vec![("i".to_string(), ColumnType::Any)],
    };
    let table = import_csv(&path, schema).unwrap();
    assert_eq!(table.value_at(0, 0), Some(&Value::Int(1)));
    assert_eq!(table.value_at(1, 0), Some(&Value::Text("hello".to_string())));
    assert_eq!(table.value_at(2, 0), Some(&Value::Real(2.5)));
    assert_eq!(table.value_at(4, 0), Some(&Value::Int(42)));
}

#[test]
fn scan_order_is_storage_order() {
    let values = vec![9i64, 1, 8, 2, 7, 3];
    let db = int_db(&values);
    let program = plan_text("SELECT i FROM test", &db);
    let (rows, _) = run_collect(
        qjit_engine::Backend::Switch,
        &program,
        &db,
        &test_jit_config("scan"),
    );
    assert_eq!(as_ints(&rows), values);
}

fn value_strategy() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<i64>().prop_map(Value::Int),
        (-1.0e12f64..1.0e12).prop_map(Value::Real),
        "[ -~]{0,12}".prop_map(Value::Text),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn roundtrip_identity_over_random_tables(
        rows in proptest::collection::vec(value_strategy(), 0..200)
    ) {
        let schema = TableSchema {
            name: "test".to_string(),
            columns: vec![("i".to_string(), ColumnType::Any)],
        };
        let mut table = Table::new(schema);
        for v in rows {
            table.push_row(vec![v]).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.qjdb");
        save_table(&table, &path).unwrap();
        let loaded = load_table(&path).unwrap();
        prop_assert_eq!(table, loaded);
    }

    /// Comparison total order: antisymmetry and transitivity over sampled
    /// triples.
    #[test]
    fn comparison_order_is_total(
        a in value_strategy(),
        b in value_strategy(),
        c in value_strategy(),
    ) {
        use std::cmp::Ordering;
        use qjit_engine::compare_values;
        prop_assert_eq!(compare_values(&a, &b), compare_values(&b, &a).reverse());
        prop_assert_eq!(compare_values(&a, &a), Ordering::Equal);
        // Transitivity: a<=b and b<=c imply a<=c.
        if compare_values(&a, &b) != Ordering::Greater
            && compare_values(&b, &c) != Ordering::Greater
        {
            prop_assert_ne!(compare_values(&a, &c), Ordering::Greater);
        }
    }

    /// Exactly one comparison opcode family branch is true for every pair,
    /// and the derived operators are coherent with Eq/Lt/Gt.
    #[test]
    fn comparison_family_coherence(a in value_strategy(), b in value_strategy()) {
        use std::cmp::Ordering::*;
        let ord = qjit_engine::compare_values(&a, &b);
        let (eq, lt, gt) = (ord == Equal, ord == Less, ord == Greater);
        prop_assert_eq!(u8::from(eq) + u8::from(lt) + u8::from(gt), 1);
        let le = lt || eq;
        let ge = gt || eq;
        let ne = !eq;
        prop_assert_eq!(le, ord != Greater);
        prop_assert_eq!(ge, ord != Less);
        prop_assert_eq!(ne, ord != Equal);
    }
}
