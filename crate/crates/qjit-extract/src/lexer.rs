//! Tokenizer for the semantics-source subset.
//!
//! Preprocessing is folded in here: preprocessor lines (`#include` and
//! friends) are skipped and the `QJIT_NOINLINE` annotation token is dropped,
//! which is all the "dummy header / no-inline" treatment this source needs.

use crate::error::{ExtractError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Arrow,
    Dot,
    Amp,
    AndAnd,
    OrOr,
    Star,
    Bang,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    PlusPlus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Arrow => "->",
            Tok::Dot => ".",
            Tok::Amp => "&",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Star => "*",
            Tok::Bang => "!",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::PlusPlus => "++",
            Tok::Minus => "-",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut toks: Vec<Token> = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($t:expr, $l:expr, $c:expr) => {
            toks.push(Token { tok: $t, span: Span::new($l, $c) })
        };
    }

    while i < bytes.len() {
        let (l, c) = (line, col);
        let b = bytes[i];
        match b {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'#' if col == 1 || toks.last().map(|t| t.span.line != line).unwrap_or(true) => {
                // Preprocessor line: skip to end of line.
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'/' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if i + 1 < bytes.len() && bytes[i + 1] == b'*' => {
                i += 2;
                col += 2;
                loop {
                    if i + 1 >= bytes.len() {
                        return Err(ExtractError::Parse {
                            line: l,
                            col: c,
                            msg: "unterminated block comment".to_string(),
                        });
                    }
                    if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                let word = &src[start..i];
                if word != "QJIT_NOINLINE" {
                    push!(Tok::Ident(word.to_string()), l, c);
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let text = &src[start..i];
                let value = text.parse::<i64>().map_err(|_| ExtractError::Parse {
                    line: l,
                    col: c,
                    msg: format!("integer literal out of range: {text}"),
                })?;
                push!(Tok::Int(value), l, c);
            }
            _ => {
                let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
                let (tok, len) = match two {
                    "->" => (Tok::Arrow, 2),
                    "==" => (Tok::EqEq, 2),
                    "!=" => (Tok::NotEq, 2),
                    "<=" => (Tok::Le, 2),
                    ">=" => (Tok::Ge, 2),
                    "&&" => (Tok::AndAnd, 2),
                    "||" => (Tok::OrOr, 2),
                    "++" => (Tok::PlusPlus, 2),
                    _ => match b {
                        b'(' => (Tok::LParen, 1),
                        b')' => (Tok::RParen, 1),
                        b'{' => (Tok::LBrace, 1),
                        b'}' => (Tok::RBrace, 1),
                        b'[' => (Tok::LBracket, 1),
                        b']' => (Tok::RBracket, 1),
                        b';' => (Tok::Semi, 1),
                        b':' => (Tok::Colon, 1),
                        b',' => (Tok::Comma, 1),
                        b'.' => (Tok::Dot, 1),
                        b'&' => (Tok::Amp, 1),
                        b'*' => (Tok::Star, 1),
                        b'!' => (Tok::Bang, 1),
                        b'=' => (Tok::Assign, 1),
                        b'<' => (Tok::Lt, 1),
                        b'>' => (Tok::Gt, 1),
                        b'+' => (Tok::Plus, 1),
                        b'-' => (Tok::Minus, 1),
                        other => {
                            return Err(ExtractError::Parse {
                                line: l,
                                col: c,
                                msg: format!("unexpected character `{}`", other as char),
                            })
                        }
                    },
                };
                i += len;
                col += len as u32;
                push!(tok, l, c);
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_pointer_member_chain() {
        let toks = tokenize("pIn3 = &aMem[pOp->p3];").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert!(matches!(kinds[0], Tok::Ident(s) if s == "pIn3"));
        assert_eq!(kinds[1], &Tok::Assign);
        assert_eq!(kinds[2], &Tok::Amp);
        assert!(matches!(kinds[3], Tok::Ident(s) if s == "aMem"));
        assert_eq!(kinds[4], &Tok::LBracket);
        assert!(matches!(kinds[5], Tok::Ident(s) if s == "pOp"));
        assert_eq!(kinds[6], &Tok::Arrow);
    }

    #[test]
    fn strips_preprocessor_lines_and_noinline() {
        let toks = tokenize("#include \"qjit_runtime.h\"\nQJIT_NOINLINE int f;\n").unwrap();
        assert!(matches!(&toks[0].tok, Tok::Ident(s) if s == "int"));
        assert_eq!(toks[0].span.line, 2);
    }

    #[test]
    fn tracks_positions() {
        let toks = tokenize("a\n  b").unwrap();
        assert_eq!(toks[0].span, Span::new(1, 1));
        assert_eq!(toks[1].span, Span::new(2, 3));
    }
}
