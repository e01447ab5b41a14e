//! Micro-SQL parser.
//!
//! Grammar:
//!
//! ```text
//! query   := "SELECT" ident "FROM" ident ["WHERE" orExpr] [";"]
//! orExpr  := andExpr {"OR" andExpr}
//! andExpr := atom {"AND" atom}
//! atom    := "(" orExpr ")" | ident cmp intLiteral
//! cmp     := "<" | ">" | "<=" | ">=" | "=" | "<>"
//! ```
//!
//! Keywords are case-insensitive; the trailing semicolon is optional.

use super::{Atom, CmpOp, Predicate, QueryAst};
use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Cmp(CmpOp),
    LParen,
    RParen,
    Semi,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < bytes.len() {
        let (l, c) = (line, col);
        match bytes[i] {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
            }
            b'(' => {
                toks.push(Token { tok: Tok::LParen, line: l, col: c });
                i += 1;
                col += 1;
            }
            b')' => {
                toks.push(Token { tok: Tok::RParen, line: l, col: c });
                i += 1;
                col += 1;
            }
            b';' => {
                toks.push(Token { tok: Tok::Semi, line: l, col: c });
                i += 1;
                col += 1;
            }
            b'<' | b'>' | b'=' => {
                let two = if i + 1 < bytes.len() { &text[i..i + 2] } else { "" };
                let (op, len) = match two {
                    "<=" => (CmpOp::Le, 2),
                    ">=" => (CmpOp::Ge, 2),
                    "<>" => (CmpOp::Ne, 2),
                    _ => match bytes[i] {
                        b'<' => (CmpOp::Lt, 1),
                        b'>' => (CmpOp::Gt, 1),
                        _ => (CmpOp::Eq, 1),
                    },
                };
                toks.push(Token { tok: Tok::Cmp(op), line: l, col: c });
                i += len;
                col += len as u32;
            }
            b'-' | b'0'..=b'9' => {
                let start = i;
                if bytes[i] == b'-' {
                    i += 1;
                    col += 1;
                }
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                if i == digits {
                    return Err(SyntaxError { line: l, col: c, msg: "expected digits".into() });
                }
                let value = text[start..i].parse::<i64>().map_err(|_| SyntaxError {
                    line: l,
                    col: c,
                    msg: format!("integer literal out of range: {}", &text[start..i]),
                })?;
                toks.push(Token { tok: Tok::Int(value), line: l, col: c });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                toks.push(Token { tok: Tok::Ident(text[start..i].to_string()), line: l, col: c });
            }
            other => {
                return Err(SyntaxError {
                    line: l,
                    col: c,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}

/// Predicate expression before DNF normalization.
enum PredExpr {
    Atom(Atom),
    And(Vec<PredExpr>),
    Or(Vec<PredExpr>),
}

fn to_dnf(expr: &PredExpr) -> Vec<Vec<Atom>> {
    match expr {
        PredExpr::Atom(a) => vec![vec![a.clone()]],
        PredExpr::Or(children) => children.iter().flat_map(to_dnf).collect(),
        PredExpr::And(children) => {
            let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
            for child in children {
                let child_dnf = to_dnf(child);
                let mut next = Vec::with_capacity(acc.len() * child_dnf.len());
                for group in &acc {
                    for extension in &child_dnf {
                        let mut combined = group.clone();
                        combined.extend(extension.iter().cloned());
                        next.push(combined);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> SyntaxError {
        let t = self.peek();
        SyntaxError { line: t.line, col: t.col, msg: msg.to_string() }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        match &self.peek().tok {
            Tok::Ident(s) if s.eq_ignore_ascii_case(kw) => {
                self.bump();
                Ok(())
            }
            _ => Err(self.err(&format!("expected {kw}"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn or_expr(&mut self) -> Result<PredExpr, SyntaxError> {
        let mut children = vec![self.and_expr()?];
        while self.at_keyword("OR") {
            self.bump();
            children.push(self.and_expr()?);
        }
        Ok(if children.len() == 1 { children.pop().unwrap() } else { PredExpr::Or(children) })
    }

    fn and_expr(&mut self) -> Result<PredExpr, SyntaxError> {
        let mut children = vec![self.atom()?];
        while self.at_keyword("AND") {
            self.bump();
            children.push(self.atom()?);
        }
        Ok(if children.len() == 1 { children.pop().unwrap() } else { PredExpr::And(children) })
    }

    fn atom(&mut self) -> Result<PredExpr, SyntaxError> {
        if self.peek().tok == Tok::LParen {
            self.bump();
            let inner = self.or_expr()?;
            if self.bump().tok != Tok::RParen {
                return Err(self.err("expected )"));
            }
            return Ok(inner);
        }
        let column = self.ident()?;
        let op = match self.bump().tok {
            Tok::Cmp(op) => op,
            _ => return Err(self.err("expected comparison operator")),
        };
        let literal = match self.bump().tok {
            Tok::Int(v) => v,
            _ => return Err(self.err("expected integer literal")),
        };
        Ok(PredExpr::Atom(Atom { column, op, literal }))
    }
}

pub fn parse_query(text: &str) -> Result<QueryAst, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    p.keyword("SELECT")?;
    let column = p.ident()?;
    p.keyword("FROM")?;
    let table = p.ident()?;
    let predicate = if p.at_keyword("WHERE") {
        p.bump();
        Predicate::Dnf(to_dnf(&p.or_expr()?))
    } else {
        Predicate::True
    };
    if p.peek().tok == Tok::Semi {
        p.bump();
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.err("trailing input after query"));
    }
    Ok(QueryAst { column, table, predicate })
}
