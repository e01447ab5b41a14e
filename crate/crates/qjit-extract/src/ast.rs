//! AST for the semantics-source subset.

use crate::lexer::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticsAst {
    pub functions: Vec<Function>,
    /// Hash of the raw source text, recorded in every generated artifact.
    pub sha256: String,
}

impl SemanticsAst {
    /// Number of dispatch constructs (switch statements) in the file.
    pub fn dispatch_count(&self) -> usize {
        fn count_block(b: &Block) -> usize {
            b.iter().map(count_stmt).sum()
        }
        fn count_stmt(s: &Stmt) -> usize {
            match s {
                Stmt::Switch { groups, .. } => {
                    1 + groups.iter().map(|g| count_block(&g.body)).sum::<usize>()
                }
                Stmt::If { then, else_, .. } => {
                    count_block(then) + else_.as_ref().map(|b| count_block(b)).unwrap_or(0)
                }
                Stmt::For { body, .. } => count_block(body),
                Stmt::Block(b) => count_block(b),
                _ => 0,
            }
        }
        self.functions.iter().map(|f| count_block(&f.body)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub ret_type: String,
    pub name: String,
    /// (type name incl. stars, parameter name)
    pub params: Vec<(String, String)>,
    pub body: Block,
    pub span: Span,
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub ty: String,
    pub stars: u8,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseGroup {
    /// Case labels in source order, e.g. `OP_Eq`, `OP_Ne`.
    pub labels: Vec<(String, Span)>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Decl(Decl),
    Expr(Expr),
    If { cond: Expr, then: Block, else_: Option<Block>, span: Span },
    Switch { subject: Expr, groups: Vec<CaseGroup>, span: Span },
    For { init: Expr, cond: Expr, step: Expr, body: Block, span: Span },
    Goto { label: String, span: Span },
    Label { name: String, span: Span },
    Break { span: Span },
    Return { expr: Option<Expr>, span: Span },
    Block(Block),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Add,
    Sub,
}

impl BinOp {
    pub fn c_text(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ident(String),
    Int(i64),
    /// `base->field` (arrow) or `base.field`.
    Member { base: Box<Expr>, field: String, arrow: bool },
    Index { base: Box<Expr>, idx: Box<Expr> },
    AddrOf(Box<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Assign { lhs: Box<Expr>, rhs: Box<Expr> },
    Call { callee: String, args: Vec<Expr> },
    PostIncr(Box<Expr>),
    /// Parenthesized expression, kept so emitted C matches the source shape.
    Paren(Box<Expr>),
}

impl Expr {
    pub fn ident(s: &str) -> Expr {
        Expr::Ident(s.to_string())
    }

    /// `pOp->p1` style operand read; returns the field name if so.
    pub fn as_op_field(&self, op_var: &str) -> Option<&str> {
        if let Expr::Member { base, field, arrow: true } = self {
            if let Expr::Ident(name) = base.as_ref() {
                if name == op_var {
                    return Some(field);
                }
            }
        }
        None
    }
}
