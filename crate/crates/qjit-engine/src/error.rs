//! Engine error types and the numeric error codes shared with generated
//! code.

use std::fmt;

pub const ERR_TYPE_MISMATCH: i32 = 1;
pub const ERR_BAD_REGISTER: i32 = 2;
pub const ERR_BAD_PC: i32 = 3;
pub const ERR_BAD_CURSOR: i32 = 4;
pub const ERR_NO_TABLE: i32 = 5;

pub fn error_code_name(code: i32) -> &'static str {
    match code {
        ERR_TYPE_MISMATCH => "TypeMismatch",
        ERR_BAD_REGISTER => "BadRegister",
        ERR_BAD_PC => "BadPc",
        ERR_BAD_CURSOR => "BadCursor",
        ERR_NO_TABLE => "NoTable",
        _ => "Unknown",
    }
}

/// A run stopped with an error outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecError {
    pub code: i32,
    pub pc: usize,
}

impl fmt::Display for ExecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "execution error {} at pc {}", error_code_name(self.code), self.pc)
    }
}

impl std::error::Error for ExecError {}

/// Query text does not conform to the grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanError {
    UnknownTable(String),
    UnknownColumn { table: String, column: String },
    /// Comparison literals must fit the instruction's 32-bit operand.
    LiteralOutOfRange(i64),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::UnknownTable(t) => write!(f, "unknown table: {t}"),
            PlanError::UnknownColumn { table, column } => {
                write!(f, "unknown column {column} in table {table}")
            }
            PlanError::LiteralOutOfRange(v) => {
                write!(f, "literal {v} does not fit a 32-bit operand")
            }
        }
    }
}

impl std::error::Error for PlanError {}

#[derive(Debug)]
pub enum StorageError {
    Io(std::io::Error),
    /// Bad magic, version, or truncation in the table file.
    Format(String),
    /// CSV cell that does not parse under the declared column type.
    Parse { row: usize, col: usize, msg: String },
    SchemaMismatch(String),
}

impl fmt::Display for StorageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StorageError::Io(e) => write!(f, "io error: {e}"),
            StorageError::Format(msg) => write!(f, "bad table file: {msg}"),
            StorageError::Parse { row, col, msg } => {
                write!(f, "csv parse error at row {row}, column {col}: {msg}")
            }
            StorageError::SchemaMismatch(msg) => write!(f, "schema mismatch: {msg}"),
        }
    }
}

impl std::error::Error for StorageError {}

impl From<std::io::Error> for StorageError {
    fn from(e: std::io::Error) -> Self {
        StorageError::Io(e)
    }
}

#[derive(Debug)]
pub enum JitError {
    /// The configured compiler could not be invoked at all.
    ToolchainMissing(String),
    /// The compiler ran and rejected the emitted source.
    CompileFailed { diagnostics: String },
    LoadFailed(String),
    MissingTemplate(crate::opcode::Opcode),
    UnsupportedOpcode(crate::opcode::Opcode),
    /// Region with no path out; rejected before emission.
    NonTerminatingRegion { head: usize, tail: usize },
    AlreadyInstalled { head: usize },
    Io(std::io::Error),
}

impl fmt::Display for JitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JitError::ToolchainMissing(cmd) => write!(f, "toolchain not available: {cmd}"),
            JitError::CompileFailed { diagnostics } => {
                write!(f, "region compilation failed: {diagnostics}")
            }
            JitError::LoadFailed(msg) => write!(f, "could not load compiled region: {msg}"),
            JitError::MissingTemplate(op) => write!(f, "no template for opcode {op}"),
            JitError::UnsupportedOpcode(op) => write!(f, "opcode {op} is not compilable"),
            JitError::NonTerminatingRegion { head, tail } => {
                write!(f, "region [{head}, {tail}] has no exit path")
            }
            JitError::AlreadyInstalled { head } => {
                write!(f, "compiled entry already installed at {head}")
            }
            JitError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for JitError {}

impl From<std::io::Error> for JitError {
    fn from(e: std::io::Error) -> Self {
        JitError::Io(e)
    }
}
