//! Mechanical rewrite of a case block into a parametric opcode template.
//!
//! The rewrite rules, applied in order:
//!
//! * R1  — prepend an entry label derived from `pos`.
//! * R2  — prepend a statement rebinding the current-operation pointer to
//!         the instruction at `pos`.
//! * R3  — jumps to the error/return labels become `return` statements
//!         carrying an outcome, moving resource cleanup to the interpreter.
//! * R4  — `goto jump_to_p2` becomes a jump to the entry label of the
//!         instruction at `P2`.
//! * R5  — remaining internal labels and jumps are localized by suffixing
//!         the instruction position.
//! * R6  — the block-terminating `break` becomes a jump to `next`.
//! * R7  — reads of the three operands and the opcode tag become the macro
//!         parameters `P1`, `P2`, `P3`, `OPC`.

use std::collections::BTreeSet;

use crate::ast::{Block, Expr, Stmt};
use crate::cprint;
use crate::error::{ExtractError, Result};
use crate::extract::{CaseBlock, ShellInfo};
use crate::lexer::Span;

pub const LABEL_JUMP_TO_P2: &str = "jump_to_p2";
pub const LABEL_ABORT: &str = "abort_due_to_error";
pub const LABEL_RETURN_ROW: &str = "vdbe_return_row";
pub const LABEL_RETURN_HALT: &str = "vdbe_return_halt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TemplateParam {
    Pos,
    Next,
    P1,
    P2,
    P3,
    Opc,
}

impl TemplateParam {
    pub fn c_name(self) -> &'static str {
        match self {
            TemplateParam::Pos => "pos",
            TemplateParam::Next => "next",
            TemplateParam::P1 => "P1",
            TemplateParam::P2 => "P2",
            TemplateParam::P3 => "P3",
            TemplateParam::Opc => "OPC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitKind {
    FallthroughNext,
    JumpToP2,
    ErrorReturn,
    HaltReturn,
    RowReturn,
    DeoptReturn,
}

/// A parametric code block for one opcode, instantiated at concrete
/// (pos, next, operands) by the region emitter.
#[derive(Debug, Clone)]
pub struct Template {
    pub opcode: String,
    /// All opcodes sharing the originating case block.
    pub group: Vec<String>,
    pub params: Vec<TemplateParam>,
    pub body: Block,
    pub exit_kinds: BTreeSet<ExitKind>,
    pub specialized: bool,
}

impl Template {
    pub fn macro_name(&self) -> String {
        let base = self.opcode.to_uppercase();
        if self.specialized {
            format!("{base}_SPEC_TEMPL")
        } else {
            format!("{base}_TEMPL")
        }
    }

    /// Renders the `#define` text. Every line except the last carries a
    /// macro continuation backslash.
    pub fn render(&self) -> String {
        let params: Vec<&str> = self.params.iter().map(|p| p.c_name()).collect();
        let mut lines = vec![
            format!("#define {}({})", self.macro_name(), params.join(", ")),
            "L##pos: {".to_string(),
        ];
        cprint::block_to_lines(&self.body, 1, &mut lines);
        lines.push("}".to_string());
        let last = lines.len() - 1;
        lines
            .iter()
            .enumerate()
            .map(|(i, l)| if i == last { l.clone() } else { format!("{l} \\") })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }
}

struct Rewriter<'a> {
    shell: &'a ShellInfo,
    local_labels: Vec<String>,
    exit_kinds: BTreeSet<ExitKind>,
    used_p1: bool,
    used_p2_value: bool,
    used_p3: bool,
    used_opc: bool,
    p2_jump: bool,
}

pub fn transform_block(block: &CaseBlock, opcode: &str, shell: &ShellInfo) -> Result<Template> {
    if !block.opcodes.iter().any(|o| o == opcode) {
        return Err(ExtractError::SubsetViolation {
            line: block.span.line,
            col: block.span.col,
            construct: format!("opcode {opcode} does not belong to this case block"),
        });
    }
    let mut rw = Rewriter {
        shell,
        local_labels: collect_labels(&block.body),
        exit_kinds: BTreeSet::new(),
        used_p1: false,
        used_p2_value: false,
        used_p3: false,
        used_opc: false,
        p2_jump: false,
    };
    let mut body = rw.rewrite_block(&block.body)?;

    // R2: current-op rebinding as the first statement.
    body.insert(
        0,
        Stmt::Expr(Expr::Assign {
            lhs: Box::new(Expr::ident(&shell.op_var)),
            rhs: Box::new(Expr::AddrOf(Box::new(Expr::Index {
                base: Box::new(Expr::ident(&shell.op_array)),
                idx: Box::new(Expr::ident("pos")),
            }))),
        }),
    );

    let mut params = vec![TemplateParam::Pos, TemplateParam::Next];
    if rw.used_p1 {
        params.push(TemplateParam::P1);
    }
    if rw.used_p2_value {
        params.push(TemplateParam::P2);
    }
    if rw.used_p3 {
        params.push(TemplateParam::P3);
    }
    if rw.p2_jump && !rw.used_p2_value {
        params.push(TemplateParam::P2);
    }
    if rw.used_opc {
        params.push(TemplateParam::Opc);
    }

    Ok(Template {
        opcode: opcode.to_string(),
        group: block.opcodes.clone(),
        params,
        body,
        exit_kinds: rw.exit_kinds,
        specialized: false,
    })
}

fn collect_labels(block: &Block) -> Vec<String> {
    let mut labels = Vec::new();
    fn walk(block: &Block, labels: &mut Vec<String>) {
        for stmt in block {
            match stmt {
                Stmt::Label { name, .. } => labels.push(name.clone()),
                Stmt::If { then, else_, .. } => {
                    walk(then, labels);
                    if let Some(e) = else_ {
                        walk(e, labels);
                    }
                }
                Stmt::Block(b) => walk(b, labels),
                _ => {}
            }
        }
    }
    walk(block, &mut labels);
    labels
}

impl Rewriter<'_> {
    fn rewrite_block(&mut self, block: &Block) -> Result<Block> {
        let mut out = Vec::with_capacity(block.len());
        for stmt in block {
            out.push(self.rewrite_stmt(stmt)?);
        }
        Ok(out)
    }

    fn rewrite_stmt(&mut self, stmt: &Stmt) -> Result<Stmt> {
        match stmt {
            Stmt::Goto { label, span } => self.rewrite_goto(label, *span),
            Stmt::Break { .. } => {
                // R6.
                self.exit_kinds.insert(ExitKind::FallthroughNext);
                Ok(Stmt::Goto { label: "next".to_string(), span: Span::new(0, 0) })
            }
            Stmt::Label { name, span } => Ok(Stmt::Label {
                name: format!("{name}_##pos"),
                span: *span,
            }),
            Stmt::If { cond, then, else_, span } => Ok(Stmt::If {
                cond: self.rewrite_expr(cond)?,
                then: self.rewrite_block(then)?,
                else_: match else_ {
                    Some(b) => Some(self.rewrite_block(b)?),
                    None => None,
                },
                span: *span,
            }),
            Stmt::Expr(e) => Ok(Stmt::Expr(self.rewrite_expr(e)?)),
            Stmt::Decl(d) => {
                let mut d = d.clone();
                if let Some(init) = &d.init {
                    d.init = Some(self.rewrite_expr(init)?);
                }
                Ok(Stmt::Decl(d))
            }
            Stmt::Block(b) => Ok(Stmt::Block(self.rewrite_block(b)?)),
            Stmt::Return { span, .. } => Err(ExtractError::SubsetViolation {
                line: span.line,
                col: span.col,
                construct: "raw return inside a case block (exits go through named labels)"
                    .to_string(),
            }),
            Stmt::Switch { span, .. } => Err(ExtractError::SubsetViolation {
                line: span.line,
                col: span.col,
                construct: "nested dispatch".to_string(),
            }),
            Stmt::For { span, .. } => Err(ExtractError::SubsetViolation {
                line: span.line,
                col: span.col,
                construct: "loop inside a case block".to_string(),
            }),
        }
    }

    fn rewrite_goto(&mut self, label: &str, span: Span) -> Result<Stmt> {
        match label {
            // R4.
            LABEL_JUMP_TO_P2 => {
                self.p2_jump = true;
                self.exit_kinds.insert(ExitKind::JumpToP2);
                Ok(Stmt::Goto { label: "L##P2".to_string(), span })
            }
            // R3.
            LABEL_ABORT => {
                self.exit_kinds.insert(ExitKind::ErrorReturn);
                Ok(outcome_return("QJIT_OUT_ERROR", Expr::ident("rc")))
            }
            LABEL_RETURN_ROW => {
                self.exit_kinds.insert(ExitKind::RowReturn);
                Ok(outcome_return(
                    "QJIT_OUT_ROW",
                    Expr::Binary {
                        op: crate::ast::BinOp::Add,
                        lhs: Box::new(Expr::ident("pos")),
                        rhs: Box::new(Expr::Int(1)),
                    },
                ))
            }
            LABEL_RETURN_HALT => {
                self.exit_kinds.insert(ExitKind::HaltReturn);
                Ok(outcome_return("QJIT_OUT_HALT", Expr::Int(0)))
            }
            // R5.
            local if self.local_labels.iter().any(|l| l == local) => {
                Ok(Stmt::Goto { label: format!("{local}_##pos"), span })
            }
            other => Err(ExtractError::UnrewritableJump {
                line: span.line,
                col: span.col,
                label: other.to_string(),
            }),
        }
    }

    // R7.
    fn rewrite_expr(&mut self, e: &Expr) -> Result<Expr> {
        if let Some(field) = e.as_op_field(&self.shell.op_var) {
            return match field {
                "p1" => {
                    self.used_p1 = true;
                    Ok(Expr::ident("P1"))
                }
                "p2" => {
                    self.used_p2_value = true;
                    Ok(Expr::ident("P2"))
                }
                "p3" => {
                    self.used_p3 = true;
                    Ok(Expr::ident("P3"))
                }
                "opcode" => {
                    self.used_opc = true;
                    Ok(Expr::ident("OPC"))
                }
                other => Err(ExtractError::SubsetViolation {
                    line: 0,
                    col: 0,
                    construct: format!("unknown operation field `{other}`"),
                }),
            };
        }
        Ok(match e {
            Expr::Ident(_) | Expr::Int(_) => e.clone(),
            Expr::Member { base, field, arrow } => Expr::Member {
                base: Box::new(self.rewrite_expr(base)?),
                field: field.clone(),
                arrow: *arrow,
            },
            Expr::Index { base, idx } => Expr::Index {
                base: Box::new(self.rewrite_expr(base)?),
                idx: Box::new(self.rewrite_expr(idx)?),
            },
            Expr::AddrOf(inner) => Expr::AddrOf(Box::new(self.rewrite_expr(inner)?)),
            Expr::Not(inner) => Expr::Not(Box::new(self.rewrite_expr(inner)?)),
            Expr::Neg(inner) => Expr::Neg(Box::new(self.rewrite_expr(inner)?)),
            Expr::Binary { op, lhs, rhs } => Expr::Binary {
                op: *op,
                lhs: Box::new(self.rewrite_expr(lhs)?),
                rhs: Box::new(self.rewrite_expr(rhs)?),
            },
            Expr::Assign { lhs, rhs } => Expr::Assign {
                lhs: Box::new(self.rewrite_expr(lhs)?),
                rhs: Box::new(self.rewrite_expr(rhs)?),
            },
            Expr::Call { callee, args } => Expr::Call {
                callee: callee.clone(),
                args: args.iter().map(|a| self.rewrite_expr(a)).collect::<Result<_>>()?,
            },
            Expr::PostIncr(inner) => Expr::PostIncr(Box::new(self.rewrite_expr(inner)?)),
            Expr::Paren(inner) => Expr::Paren(Box::new(self.rewrite_expr(inner)?)),
        })
    }
}

fn outcome_return(kind: &str, val: Expr) -> Stmt {
    Stmt::Return {
        expr: Some(Expr::Call {
            callee: "qjit_make_outcome".to_string(),
            args: vec![Expr::ident(kind), val],
        }),
        span: Span::new(0, 0),
    }
}

/// Integer-specialized variants of every template that performs a generic
/// comparison: the runtime comparison call is replaced with a direct integer
/// compare and a type guard at block entry exits with a deopt outcome
/// carrying the instruction position.
pub fn specialize_comparison_templates(
    templates: &[Template],
    shell: &ShellInfo,
) -> Vec<Template> {
    templates
        .iter()
        .filter(|t| !t.specialized && block_calls(&t.body, "qjit_cmp"))
        .map(|t| specialize_one(t, shell))
        .collect()
}

fn specialize_one(t: &Template, shell: &ShellInfo) -> Template {
    let mut spec = t.clone();
    spec.specialized = true;
    rewrite_cmp_calls(&mut spec.body);

    let is_int = |param: &str| Expr::Call {
        callee: "qjit_cell_is_int".to_string(),
        args: vec![Expr::AddrOf(Box::new(Expr::Index {
            base: Box::new(Expr::ident(&shell.reg_array)),
            idx: Box::new(Expr::ident(param)),
        }))],
    };
    let guard = Stmt::If {
        cond: Expr::Not(Box::new(Expr::Paren(Box::new(Expr::Binary {
            op: crate::ast::BinOp::And,
            lhs: Box::new(is_int("P1")),
            rhs: Box::new(is_int("P3")),
        })))),
        then: vec![outcome_return("QJIT_OUT_DEOPT", Expr::ident("pos"))],
        else_: None,
        span: Span::new(0, 0),
    };
    // After the R2 op rebinding.
    spec.body.insert(1, guard);
    spec.exit_kinds.insert(ExitKind::DeoptReturn);
    spec
}

fn block_calls(block: &Block, callee: &str) -> bool {
    fn expr_calls(e: &Expr, callee: &str) -> bool {
        match e {
            Expr::Call { callee: c, args } => {
                c == callee || args.iter().any(|a| expr_calls(a, callee))
            }
            Expr::Member { base, .. } => expr_calls(base, callee),
            Expr::Index { base, idx } => expr_calls(base, callee) || expr_calls(idx, callee),
            Expr::AddrOf(i) | Expr::Not(i) | Expr::Neg(i) | Expr::PostIncr(i) | Expr::Paren(i) => {
                expr_calls(i, callee)
            }
            Expr::Binary { lhs, rhs, .. } | Expr::Assign { lhs, rhs } => {
                expr_calls(lhs, callee) || expr_calls(rhs, callee)
            }
            _ => false,
        }
    }
    block.iter().any(|s| match s {
        Stmt::Expr(e) => expr_calls(e, callee),
        Stmt::If { cond, then, else_, .. } => {
            expr_calls(cond, callee)
                || block_calls(then, callee)
                || else_.as_ref().map(|b| block_calls(b, callee)).unwrap_or(false)
        }
        Stmt::Block(b) => block_calls(b, callee),
        Stmt::Decl(d) => d.init.as_ref().map(|e| expr_calls(e, callee)).unwrap_or(false),
        Stmt::Return { expr, .. } => expr.as_ref().map(|e| expr_calls(e, callee)).unwrap_or(false),
        _ => false,
    })
}

fn rewrite_cmp_calls(block: &mut Block) {
    fn fix_expr(e: &mut Expr) {
        match e {
            Expr::Call { callee, args } => {
                if callee == "qjit_cmp" && args.len() == 3 {
                    *callee = "qjit_cmp_int".to_string();
                    args.remove(0); // drop the ctx argument
                }
                for a in args {
                    fix_expr(a);
                }
            }
            Expr::Member { base, .. } => fix_expr(base),
            Expr::Index { base, idx } => {
                fix_expr(base);
                fix_expr(idx);
            }
            Expr::AddrOf(i) | Expr::Not(i) | Expr::Neg(i) | Expr::PostIncr(i) | Expr::Paren(i) => {
                fix_expr(i)
            }
            Expr::Binary { lhs, rhs, .. } | Expr::Assign { lhs, rhs } => {
                fix_expr(lhs);
                fix_expr(rhs);
            }
            _ => {}
        }
    }
    for stmt in block {
        match stmt {
            Stmt::Expr(e) => fix_expr(e),
            Stmt::If { cond, then, else_, .. } => {
                fix_expr(cond);
                rewrite_cmp_calls(then);
                if let Some(b) = else_ {
                    rewrite_cmp_calls(b);
                }
            }
            Stmt::Block(b) => rewrite_cmp_calls(b),
            Stmt::Decl(d) => {
                if let Some(e) = &mut d.init {
                    fix_expr(e);
                }
            }
            Stmt::Return { expr, .. } => {
                if let Some(e) = expr {
                    fix_expr(e);
                }
            }
            _ => {}
        }
    }
}
