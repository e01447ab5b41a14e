use std::fmt;

/// Errors produced while parsing or rewriting the opcode semantics source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractError {
    /// The source does not lex/parse under the declared grammar.
    Parse { line: u32, col: u32, msg: String },
    /// The source parses but uses a construct outside the declared subset.
    SubsetViolation { line: u32, col: u32, construct: String },
    /// An ISA opcode has no case block in the semantics source.
    MissingOpcode(String),
    /// A `goto` targets a label that is neither local, an error label,
    /// nor the shared p2 label, so no rewrite rule applies.
    UnrewritableJump { line: u32, col: u32, label: String },
    /// A construct valid for template emission cannot be mapped to the
    /// interpreter target.
    Untranspilable { line: u32, col: u32, construct: String },
    Io(String),
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::Parse { line, col, msg } => {
                write!(f, "parse error at {line}:{col}: {msg}")
            }
            ExtractError::SubsetViolation { line, col, construct } => {
                write!(f, "subset violation at {line}:{col}: {construct}")
            }
            ExtractError::MissingOpcode(name) => {
                write!(f, "opcode {name} has no case block in the semantics source")
            }
            ExtractError::UnrewritableJump { line, col, label } => {
                write!(f, "unrewritable jump at {line}:{col}: goto {label}")
            }
            ExtractError::Untranspilable { line, col, construct } => {
                write!(f, "cannot transpile construct at {line}:{col}: {construct}")
            }
            ExtractError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for ExtractError {}

impl From<std::io::Error> for ExtractError {
    fn from(e: std::io::Error) -> Self {
        ExtractError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ExtractError>;
