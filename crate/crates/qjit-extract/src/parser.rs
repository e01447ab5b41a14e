//! Recursive-descent parser for the semantics-source subset.
//!
//! The accepted grammar (after preprocessing):
//!
//! ```text
//! file      := { function }
//! function  := ident ident "(" [ param { "," param } ] ")" compound
//! param     := ident { "*" } ident
//! compound  := "{" { stmt } "}"
//! stmt      := decl | if | switch | for | goto | break | return
//!            | label | compound | expr ";"
//! decl      := ident { "*" } ident [ "=" expr ] ";"
//! if        := "if" "(" expr ")" compound [ "else" (if | compound) ]
//! switch    := "switch" "(" expr ")" "{" { case-group } "}"
//! case-group:= ("case" ident ":")+ compound
//! for       := "for" "(" expr ";" expr ";" expr ")" compound
//! goto      := "goto" ident ";"
//! label     := ident ":"
//! expr      := assignment with C precedence over || && == != < <= > >= + -
//!              and unary & ! - * plus postfix -> . [] () ++
//! ```
//!
//! Nested dispatch (a `switch` inside a case block) is rejected here as a
//! subset violation; all other subset rules are enforced by the extraction
//! and transform passes where the offending construct is known.

use crate::ast::*;
use crate::error::{ExtractError, Result};
use crate::lexer::{tokenize, Span, Tok, Token};

pub fn parse_semantics_source(src: &str) -> Result<SemanticsAst> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, switch_depth: 0 };
    let mut functions = Vec::new();
    while !p.at(&Tok::Eof) {
        functions.push(p.function()?);
    }
    if functions.is_empty() {
        return Err(ExtractError::Parse {
            line: 1,
            col: 1,
            msg: "no function definitions found".to_string(),
        });
    }
    Ok(SemanticsAst { functions, sha256: crate::sha256_hex(src) })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    switch_depth: u32,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<Token> {
        if self.at(t) {
            Ok(self.bump())
        } else {
            Err(self.err(&format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn err(&self, msg: &str) -> ExtractError {
        let s = self.span();
        ExtractError::Parse { line: s.line, col: s.col, msg: msg.to_string() }
    }

    fn ident(&mut self) -> Result<(String, Span)> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, span))
            }
            other => Err(self.err(&format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn is_keyword(s: &str) -> bool {
        matches!(s, "if" | "else" | "switch" | "case" | "for" | "goto" | "break" | "return" | "default" | "while" | "do")
    }

    // ---- declarations and functions ------------------------------------

    fn function(&mut self) -> Result<Function> {
        let span = self.span();
        let (ret_type, _) = self.ident()?;
        let (name, _) = self.ident()?;
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                let (mut ty, _) = self.ident()?;
                while self.eat(&Tok::Star) {
                    ty.push('*');
                }
                let (pname, _) = self.ident()?;
                params.push((ty, pname));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        let body = self.compound()?;
        Ok(Function { ret_type, name, params, body, span })
    }

    fn compound(&mut self) -> Result<Block> {
        self.expect(&Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return Err(self.err("unexpected end of input inside block"));
            }
            stmts.push(self.stmt()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(stmts)
    }

    /// `ident (* | ident)` starts a declaration; a label is `ident :` not
    /// followed by another label-ish construct.
    fn stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LBrace => Ok(Stmt::Block(self.compound()?)),
            Tok::Ident(word) => match word.as_str() {
                "if" => self.if_stmt(),
                "switch" => self.switch_stmt(),
                "for" => self.for_stmt(),
                "goto" => {
                    self.bump();
                    let (label, _) = self.ident()?;
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Goto { label, span })
                }
                "break" => {
                    self.bump();
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Break { span })
                }
                "return" => {
                    self.bump();
                    let expr = if self.at(&Tok::Semi) { None } else { Some(self.expr()?) };
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Return { expr, span })
                }
                _ if Self::is_keyword(&word) => {
                    Err(self.err(&format!("unsupported keyword `{word}`")))
                }
                _ => {
                    // Label, declaration, or expression statement.
                    if *self.peek_at(1) == Tok::Colon {
                        self.bump();
                        self.bump();
                        return Ok(Stmt::Label { name: word, span });
                    }
                    let starts_decl = matches!(self.peek_at(1), Tok::Star)
                        || matches!(self.peek_at(1), Tok::Ident(_));
                    if starts_decl {
                        let (ty, _) = self.ident()?;
                        let mut stars = 0u8;
                        while self.eat(&Tok::Star) {
                            stars += 1;
                        }
                        let (name, _) = self.ident()?;
                        let init = if self.eat(&Tok::Assign) { Some(self.expr()?) } else { None };
                        self.expect(&Tok::Semi)?;
                        return Ok(Stmt::Decl(Decl { ty, stars, name, init, span }));
                    }
                    let e = self.expr()?;
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Expr(e))
                }
            },
            _ => {
                let e = self.expr()?;
                self.expect(&Tok::Semi)?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        self.bump(); // if
        self.expect(&Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(&Tok::RParen)?;
        let then = self.compound()?;
        let else_ = if self.at(&Tok::Ident("else".to_string())) {
            self.bump();
            if self.at(&Tok::Ident("if".to_string())) {
                Some(vec![self.if_stmt()?])
            } else {
                Some(self.compound()?)
            }
        } else {
            None
        };
        Ok(Stmt::If { cond, then, else_, span })
    }

    fn switch_stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        if self.switch_depth > 0 {
            return Err(ExtractError::SubsetViolation {
                line: span.line,
                col: span.col,
                construct: "nested dispatch (switch inside a case block)".to_string(),
            });
        }
        self.bump(); // switch
        self.expect(&Tok::LParen)?;
        let subject = self.expr()?;
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::LBrace)?;
        self.switch_depth += 1;
        let mut groups = Vec::new();
        while !self.at(&Tok::RBrace) {
            let mut labels = Vec::new();
            while self.at(&Tok::Ident("case".to_string())) {
                self.bump();
                let (label, lspan) = self.ident()?;
                self.expect(&Tok::Colon)?;
                labels.push((label, lspan));
            }
            if labels.is_empty() {
                self.switch_depth -= 1;
                return Err(self.err("expected `case` label"));
            }
            let body = self.compound()?;
            groups.push(CaseGroup { labels, body });
        }
        self.switch_depth -= 1;
        self.expect(&Tok::RBrace)?;
        Ok(Stmt::Switch { subject, groups, span })
    }

    fn for_stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        self.bump(); // for
        self.expect(&Tok::LParen)?;
        let init = self.expr()?;
        self.expect(&Tok::Semi)?;
        let cond = self.expr()?;
        self.expect(&Tok::Semi)?;
        let step = self.expr()?;
        self.expect(&Tok::RParen)?;
        let body = self.compound()?;
        Ok(Stmt::For { init, cond, step, body, span })
    }

    // ---- expressions ----------------------------------------------------

    fn expr(&mut self) -> Result<Expr> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Expr> {
        let lhs = self.logic_or()?;
        if self.eat(&Tok::Assign) {
            let rhs = self.assignment()?;
            return Ok(Expr::Assign { lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn logic_or(&mut self) -> Result<Expr> {
        let mut lhs = self.logic_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.logic_and()?;
            lhs = Expr::Binary { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn logic_and(&mut self) -> Result<Expr> {
        let mut lhs = self.equality()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.equality()?;
            lhs = Expr::Binary { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<Expr> {
        let mut lhs = self.relational()?;
        loop {
            let op = if self.eat(&Tok::EqEq) {
                BinOp::Eq
            } else if self.eat(&Tok::NotEq) {
                BinOp::Ne
            } else {
                break;
            };
            let rhs = self.relational()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> Result<Expr> {
        let mut lhs = self.additive()?;
        loop {
            let op = if self.eat(&Tok::Lt) {
                BinOp::Lt
            } else if self.eat(&Tok::Le) {
                BinOp::Le
            } else if self.eat(&Tok::Gt) {
                BinOp::Gt
            } else if self.eat(&Tok::Ge) {
                BinOp::Ge
            } else {
                break;
            };
            let rhs = self.additive()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&Tok::Plus) {
                BinOp::Add
            } else if self.eat(&Tok::Minus) {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Amp) {
            return Ok(Expr::AddrOf(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Bang) {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat(&Tok::Arrow) {
                let (field, _) = self.ident()?;
                e = Expr::Member { base: Box::new(e), field, arrow: true };
            } else if self.eat(&Tok::Dot) {
                let (field, _) = self.ident()?;
                e = Expr::Member { base: Box::new(e), field, arrow: false };
            } else if self.eat(&Tok::LBracket) {
                let idx = self.expr()?;
                self.expect(&Tok::RBracket)?;
                e = Expr::Index { base: Box::new(e), idx: Box::new(idx) };
            } else if self.at(&Tok::LParen) {
                let callee = match &e {
                    Expr::Ident(name) => name.clone(),
                    _ => return Err(self.err("calls through non-identifiers are not in the subset")),
                };
                self.bump();
                let mut args = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RParen)?;
                e = Expr::Call { callee, args };
            } else if self.eat(&Tok::PlusPlus) {
                e = Expr::PostIncr(Box::new(e));
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Ident(s))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(Expr::Paren(Box::new(e)))
            }
            other => Err(self.err(&format!("expected expression, found {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_a_parse_error() {
        let err = parse_semantics_source("").unwrap_err();
        assert!(matches!(err, ExtractError::Parse { .. }));
    }

    #[test]
    fn parses_case_groups_with_fallthrough_labels() {
        let src = r#"
int f(QjitCtx *ctx) {
  switch (x) {
    case OP_Eq:
    case OP_Ne: {
      break;
    }
  }
}
"#;
        let ast = parse_semantics_source(src).unwrap();
        assert_eq!(ast.dispatch_count(), 1);
        let f = &ast.functions[0];
        match &f.body[0] {
            Stmt::Switch { groups, .. } => {
                assert_eq!(groups.len(), 1);
                assert_eq!(groups[0].labels.len(), 2);
            }
            other => panic!("expected switch, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nested_dispatch() {
        let src = r#"
int f(QjitCtx *ctx) {
  switch (x) {
    case OP_Init: {
      switch (y) {
        case OP_Goto: {
          break;
        }
      }
      break;
    }
  }
}
"#;
        let err = parse_semantics_source(src).unwrap_err();
        assert!(matches!(err, ExtractError::SubsetViolation { .. }), "{err}");
    }

    #[test]
    fn parses_member_chain_condition() {
        let src = "int f(A *c) { if (pIn3->u.i >= pIn1->u.i) { goto jump_to_p2; } }";
        let ast = parse_semantics_source(src).unwrap();
        match &ast.functions[0].body[0] {
            Stmt::If { cond, .. } => match cond {
                Expr::Binary { op: BinOp::Ge, .. } => {}
                other => panic!("expected >=, got {other:?}"),
            },
            other => panic!("expected if, got {other:?}"),
        }
    }
}
