//! In-memory row-oriented tables, dataset generation, and the table file
//! format.
//!
//! Benchmarks run full scans over a single integer column; storage is
//! deliberately minimal (no indexes, no updates).

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::StorageError;
use crate::value::{Mem, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Any,
    Int,
    Real,
    Text,
}

impl ColumnType {
    fn tag(self) -> u8 {
        match self {
            ColumnType::Any => 0,
            ColumnType::Int => 1,
            ColumnType::Real => 2,
            ColumnType::Text => 3,
        }
    }

    fn from_tag(tag: u8) -> Option<ColumnType> {
        Some(match tag {
            0 => ColumnType::Any,
            1 => ColumnType::Int,
            2 => ColumnType::Real,
            3 => ColumnType::Text,
            _ => return None,
        })
    }

    fn accepts(self, v: &Value) -> bool {
        matches!(
            (self, v),
            (ColumnType::Any, _)
                | (_, Value::Null)
                | (ColumnType::Int, Value::Int(_))
                | (ColumnType::Real, Value::Real(_))
                | (ColumnType::Text, Value::Text(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<(String, ColumnType)>,
}

impl TableSchema {
    /// Single Int column `i`, the benchmark shape.
    pub fn bench(name: &str) -> TableSchema {
        TableSchema {
            name: name.to_string(),
            columns: vec![("i".to_string(), ColumnType::Int)],
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }
}

/// Row-major storage: row `r` occupies `data[r*arity .. (r+1)*arity]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: TableSchema,
    arity: usize,
    data: Vec<Value>,
}

impl Table {
    pub fn new(schema: TableSchema) -> Table {
        let arity = schema.columns.len();
        Table { schema, arity, data: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n_rows(&self) -> usize {
        if self.arity == 0 {
            0
        } else {
            self.data.len() / self.arity
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<(), StorageError> {
        if row.len() != self.arity {
            return Err(StorageError::SchemaMismatch(format!(
                "row arity {} != schema arity {}",
                row.len(),
                self.arity
            )));
        }
        for (value, (name, ty)) in row.iter().zip(&self.schema.columns) {
            if !ty.accepts(value) {
                return Err(StorageError::SchemaMismatch(format!(
                    "column {name} declared {ty:?} cannot hold {}",
                    value.type_name()
                )));
            }
        }
        self.data.extend(row);
        Ok(())
    }

    pub fn value_at(&self, row: usize, col: usize) -> Option<&Value> {
        if col >= self.arity {
            return None;
        }
        self.data.get(row * self.arity + col)
    }

    /// Register-cell view of a table cell; text borrows storage that lives
    /// as long as the table.
    pub(crate) fn mem_at(&self, row: usize, col: usize) -> Option<Mem> {
        self.value_at(row, col).map(Mem::from_value)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Value]> {
        self.data.chunks(self.arity.max(1))
    }
}

/// The set of tables a query can address; cursors hold indices into it.
#[derive(Debug, Clone, Default)]
pub struct Database {
    tables: Vec<Table>,
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    pub fn single(table: Table) -> Database {
        Database { tables: vec![table] }
    }

    pub fn add_table(&mut self, table: Table) -> usize {
        self.tables.push(table);
        self.tables.len() - 1
    }

    pub fn table(&self, idx: usize) -> Option<&Table> {
        self.tables.get(idx)
    }

    pub fn table_index(&self, name: &str) -> Option<usize> {
        self.tables.iter().position(|t| t.schema.name == name)
    }

    pub fn schemas(&self) -> impl Iterator<Item = &TableSchema> {
        self.tables.iter().map(|t| &t.schema)
    }
}

/// Uniform random integers over `value_range`, deterministic per seed.
pub fn generate_table(n_rows: usize, seed: u64, value_range: (i64, i64)) -> Table {
    let mut table = Table::new(TableSchema::bench("test"));
    let (lo, hi) = value_range;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(lo, hi.max(lo + 1));
    table.data.reserve(n_rows);
    for _ in 0..n_rows {
        table.data.push(Value::Int(dist.sample(&mut rng)));
    }
    table
}

const MAGIC: &[u8; 4] = b"QJDB";
const VERSION: u8 = 1;

const VTAG_NULL: u8 = 0;
const VTAG_INT: u8 = 1;
const VTAG_REAL: u8 = 2;
const VTAG_TEXT: u8 = 3;

/// Binary table format: magic "QJDB", version byte, u32 column count,
/// per-column length-prefixed name + type tag, u64 row count, then
/// row-major tagged values. Little-endian, length-prefixed text.
pub fn save_table(table: &Table, path: &Path) -> Result<(), StorageError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&(table.schema.columns.len() as u32).to_le_bytes())?;
    for (name, ty) in &table.schema.columns {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
        w.write_all(&[ty.tag()])?;
    }
    w.write_all(&(table.n_rows() as u64).to_le_bytes())?;
    for value in &table.data {
        match value {
            Value::Null => w.write_all(&[VTAG_NULL])?,
            Value::Int(v) => {
                w.write_all(&[VTAG_INT])?;
                w.write_all(&v.to_le_bytes())?;
            }
            Value::Real(v) => {
                w.write_all(&[VTAG_REAL])?;
                w.write_all(&v.to_bits().to_le_bytes())?;
            }
            Value::Text(s) => {
                w.write_all(&[VTAG_TEXT])?;
                w.write_all(&(s.len() as u32).to_le_bytes())?;
                w.write_all(s.as_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_table(path: &Path) -> Result<Table, StorageError> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let err = |msg: &str| StorageError::Format(msg.to_string());

    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(err("bad magic"));
    }
    let mut version = [0u8; 1];
    read_exact(&mut r, &mut version, "version")?;
    if version[0] != VERSION {
        return Err(StorageError::Format(format!("unsupported version {}", version[0])));
    }
    let n_cols = read_u32(&mut r)? as usize;
    if n_cols == 0 || n_cols > 4096 {
        return Err(err("implausible column count"));
    }
    let mut columns = Vec::with_capacity(n_cols);
    for _ in 0..n_cols {
        let name_len = read_u32(&mut r)? as usize;
        if name_len > 4096 {
            return Err(err("implausible column name length"));
        }
        let mut name = vec![0u8; name_len];
        read_exact(&mut r, &mut name, "column name")?;
        let mut tag = [0u8; 1];
        read_exact(&mut r, &mut tag, "column type")?;
        let ty = ColumnType::from_tag(tag[0]).ok_or_else(|| err("unknown column type tag"))?;
        let name = String::from_utf8(name).map_err(|_| err("column name not utf-8"))?;
        columns.push((name, ty));
    }
    let n_rows = read_u64(&mut r)? as usize;
    // Table name is not part of the file; scans address tables by index and
    // the planner by catalog name, so loading assigns the benchmark name.
    let mut table = Table::new(TableSchema { name: "test".to_string(), columns });
    table.data.reserve(n_rows.saturating_mul(table.arity));
    for _ in 0..n_rows * table.arity {
        let mut tag = [0u8; 1];
        read_exact(&mut r, &mut tag, "value tag")?;
        let value = match tag[0] {
            VTAG_NULL => Value::Null,
            VTAG_INT => Value::Int(read_i64(&mut r)?),
            VTAG_REAL => Value::Real(f64::from_bits(read_u64(&mut r)?)),
            VTAG_TEXT => {
                let len = read_u32(&mut r)? as usize;
                let mut buf = vec![0u8; len];
                read_exact(&mut r, &mut buf, "text payload")?;
                Value::Text(String::from_utf8(buf).map_err(|_| err("text not utf-8"))?)
            }
            _ => return Err(err("unknown value tag")),
        };
        table.data.push(value);
    }
    Ok(table)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<(), StorageError> {
    r.read_exact(buf)
        .map_err(|_| StorageError::Format(format!("truncated while reading {what}")))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, StorageError> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, "u32")?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, StorageError> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, "u64")?;
    Ok(u64::from_le_bytes(buf))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64, StorageError> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, "i64")?;
    Ok(i64::from_le_bytes(buf))
}

/// CSV import against a declared schema; empty fields become Null, `Any`
/// columns take whatever parses (Int, then Real, else Text).
pub fn import_csv(path: &Path, schema: TableSchema) -> Result<Table, StorageError> {
    let mut table = Table::new(schema);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| StorageError::Format(e.to_string()))?;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| StorageError::Parse {
            row: row_idx + 1,
            col: 0,
            msg: e.to_string(),
        })?;
        if record.len() != table.arity() {
            return Err(StorageError::Parse {
                row: row_idx + 1,
                col: 0,
                msg: format!("expected {} fields, found {}", table.arity(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(table.arity());
        for (col_idx, field) in record.iter().enumerate() {
            let ty = table.schema.columns[col_idx].1;
            row.push(parse_field(field, ty).map_err(|msg| StorageError::Parse {
                row: row_idx + 1,
                col: col_idx + 1,
                msg,
            })?);
        }
        table.push_row(row)?;
    }
    Ok(table)
}

fn parse_field(field: &str, ty: ColumnType) -> Result<Value, String> {
    if field.is_empty() {
        return Ok(Value::Null);
    }
    match ty {
        ColumnType::Int => field
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| format!("`{field}` is not an integer")),
        ColumnType::Real => field
            .parse::<f64>()
            .map(Value::Real)
            .map_err(|_| format!("`{field}` is not a real")),
        ColumnType::Text => Ok(Value::Text(field.to_string())),
        ColumnType::Any => Ok(field
            .parse::<i64>()
            .map(Value::Int)
            .or_else(|_| field.parse::<f64>().map(Value::Real))
            .unwrap_or_else(|_| Value::Text(field.to_string()))),
    }
}
