//! Interpreter-side emission: the case blocks transpiled into Rust opcode
//! bodies, the central-decode dispatch used by the switch backend, and the
//! pre-resolved handler table used by the threaded backend.
//!
//! Both backends therefore execute the same opcode semantics the template
//! extractor feeds from; each generated artifact records the source hash so
//! drift between them fails the build.

use std::fmt::Write as _;

use crate::ast::{BinOp, Block, Expr, Stmt};
use crate::error::{ExtractError, Result};
use crate::extract::{CaseBlock, ShellInfo};
use crate::isa;
use crate::lexer::Span;
use crate::transform::{LABEL_ABORT, LABEL_JUMP_TO_P2, LABEL_RETURN_HALT, LABEL_RETURN_ROW};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LocalKind {
    CellIdx,
    CursorIdx,
    Int,
}

struct Transpiler<'a> {
    shell: &'a ShellInfo,
    locals: Vec<(String, LocalKind)>,
    out: String,
    indent: usize,
}

pub fn body_fn_name(lead: &str) -> String {
    format!("body_{}", lead.to_lowercase())
}

/// Generates the `op_bodies` module: one function per case block.
pub fn gen_op_bodies(blocks: &[CaseBlock], shell: &ShellInfo, sha256: &str) -> Result<String> {
    let mut out = String::new();
    out.push_str("// @generated by qjit-extract from the opcode semantics source. Do not edit.\n");
    out.push_str("use crate::op::Op;\n");
    out.push_str("use crate::state::{rt, Effect, ExecCtx};\n\n");
    let _ = writeln!(out, "pub const SEMANTICS_SHA256: &str = {sha256:?};\n");

    for block in blocks {
        let mut t = Transpiler::new(shell);
        t.locals = shell
            .locals
            .iter()
            .filter_map(|(ty, stars, name)| {
                let kind = match (ty.as_str(), stars) {
                    ("QjitCell", 1) => LocalKind::CellIdx,
                    ("QjitCursor", 1) => LocalKind::CursorIdx,
                    ("int", 0) => LocalKind::Int,
                    _ => return None,
                };
                Some((name.clone(), kind))
            })
            .collect();

        let _ = writeln!(
            t.out,
            "/// {}",
            block.opcodes.join(", ")
        );
        let _ = writeln!(
            t.out,
            "#[inline(always)]\n#[allow(non_snake_case, unused_variables, unused_mut, unused_assignments, unused_parens, clippy::all)]\npub(crate) fn {}(cx: &mut ExecCtx<'_>, op: &Op) -> Effect {{",
            body_fn_name(block.lead())
        );
        t.indent = 1;
        for (name, kind) in t.locals.clone() {
            let (ty, init) = match kind {
                LocalKind::CellIdx | LocalKind::CursorIdx => ("usize", "0"),
                LocalKind::Int => ("i32", "0"),
            };
            t.line(&format!("let mut {name}: {ty} = {init};"));
        }
        t.block(&block.body)?;
        t.out.push_str("}\n\n");
        out.push_str(&t.out);
    }
    Ok(out)
}

/// Central-decode dispatch over the generated bodies (the switch backend).
pub fn gen_switch_dispatch(blocks: &[CaseBlock], sha256: &str) -> String {
    let mut out = String::new();
    out.push_str("// @generated by qjit-extract from the opcode semantics source. Do not edit.\n");
    let _ = writeln!(out, "pub const SEMANTICS_SHA256: &str = {sha256:?};\n");
    out.push_str(
        "#[inline(always)]\npub(crate) fn dispatch_op(cx: &mut crate::state::ExecCtx<'_>, op: &crate::op::Op) -> crate::state::Effect {\n    use crate::opcode::Opcode;\n    match op.opcode {\n",
    );
    for block in blocks {
        let pats: Vec<String> = block
            .opcodes
            .iter()
            .map(|o| format!("Opcode::{o}"))
            .collect();
        let _ = writeln!(
            out,
            "        {} => crate::gen::bodies::{}(cx, op),",
            pats.join(" | "),
            body_fn_name(block.lead())
        );
    }
    out.push_str("    }\n}\n");
    out
}

/// Per-opcode handlers and the opcode-indexed resolution table (the
/// threaded backend). Each handler statically knows its body function, so
/// no central decode remains.
pub fn gen_threaded_handlers(blocks: &[CaseBlock], sha256: &str) -> String {
    let mut out = String::new();
    out.push_str("// @generated by qjit-extract from the opcode semantics source. Do not edit.\n");
    out.push_str("use crate::backends::threaded::{apply, Handler, ThreadedCtx, Transfer};\n\n");
    let _ = writeln!(out, "pub const SEMANTICS_SHA256: &str = {sha256:?};\n");

    let mut table: Vec<(i32, String)> = Vec::new();
    for block in blocks {
        for opcode in &block.opcodes {
            let code = isa::opcode_code(opcode).expect("case labels are ISA-checked");
            table.push((code, format!("h_{}", opcode.to_lowercase())));
        }
    }
    table.sort_by_key(|(code, _)| *code);

    let _ = writeln!(
        out,
        "pub(crate) static HANDLER_TABLE: [Handler; {}] = [",
        table.len()
    );
    for (_, name) in &table {
        let _ = writeln!(out, "    {name},");
    }
    out.push_str("];\n\n");

    for block in blocks {
        for opcode in &block.opcodes {
            let _ = writeln!(
                out,
                "fn h_{}(tc: &mut ThreadedCtx<'_>) -> Transfer {{\n    apply(tc, crate::gen::bodies::{})\n}}\n",
                opcode.to_lowercase(),
                body_fn_name(block.lead())
            );
        }
    }
    out
}

impl<'a> Transpiler<'a> {
    fn new(shell: &'a ShellInfo) -> Self {
        Transpiler { shell, locals: Vec::new(), out: String::new(), indent: 0 }
    }

    fn line(&mut self, text: &str) {
        let _ = writeln!(self.out, "{}{}", "    ".repeat(self.indent), text);
    }

    fn kind_of(&self, name: &str) -> Option<LocalKind> {
        self.locals.iter().find(|(n, _)| n == name).map(|(_, k)| *k)
    }

    fn block(&mut self, block: &Block) -> Result<()> {
        for stmt in block {
            self.stmt(stmt)?;
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<()> {
        match stmt {
            Stmt::Decl(d) => {
                let kind = match (d.ty.as_str(), d.stars) {
                    ("QjitCell", 1) => LocalKind::CellIdx,
                    ("QjitCursor", 1) => LocalKind::CursorIdx,
                    ("int", 0) => LocalKind::Int,
                    _ => {
                        return Err(unsupported(d.span, &format!("declaration of type {}", d.ty)))
                    }
                };
                self.locals.push((d.name.clone(), kind));
                let ty = if kind == LocalKind::Int { "i32" } else { "usize" };
                let init = match &d.init {
                    Some(e) => self.value_expr(e)?,
                    None => "0".to_string(),
                };
                self.line(&format!("let mut {}: {ty} = {init};", d.name));
                Ok(())
            }
            Stmt::Expr(e) => {
                let text = self.stmt_expr(e)?;
                self.line(&format!("{text};"));
                Ok(())
            }
            Stmt::If { cond, then, else_, .. } => {
                let cond = self.cond_expr(cond)?;
                self.line(&format!("if {cond} {{"));
                self.indent += 1;
                self.block(then)?;
                self.indent -= 1;
                match else_ {
                    None => self.line("}"),
                    Some(b) => {
                        self.line("} else {");
                        self.indent += 1;
                        self.block(b)?;
                        self.indent -= 1;
                        self.line("}");
                    }
                }
                Ok(())
            }
            Stmt::Goto { label, span } => {
                match label.as_str() {
                    LABEL_JUMP_TO_P2 => self.line("return Effect::Jump(op.p2 as usize);"),
                    LABEL_ABORT => self.line("return Effect::Error(rc);"),
                    LABEL_RETURN_ROW => self.line("return Effect::Row;"),
                    LABEL_RETURN_HALT => self.line("return Effect::Halt;"),
                    other => {
                        return Err(unsupported(
                            *span,
                            &format!("goto {other} (no local jumps in the interpreter target)"),
                        ))
                    }
                }
                Ok(())
            }
            Stmt::Break { .. } => {
                self.line("return Effect::Next;");
                Ok(())
            }
            Stmt::Block(b) => {
                self.line("{");
                self.indent += 1;
                self.block(b)?;
                self.indent -= 1;
                self.line("}");
                Ok(())
            }
            Stmt::Label { span, .. } | Stmt::Return { span, .. } => {
                Err(unsupported(*span, "label or raw return in a case block"))
            }
            Stmt::Switch { span, .. } | Stmt::For { span, .. } => {
                Err(unsupported(*span, "nested dispatch or loop"))
            }
        }
    }

    /// Expression in statement position: calls and assignments.
    fn stmt_expr(&mut self, e: &Expr) -> Result<String> {
        match e {
            Expr::Assign { lhs, rhs } => {
                let name = match lhs.as_ref() {
                    Expr::Ident(name) => name.clone(),
                    _ => return Err(unsupported0("assignment to a non-local")),
                };
                match self.kind_of(&name) {
                    Some(LocalKind::CellIdx) => {
                        let idx = self.array_index(rhs, &self.shell.reg_array.clone())?;
                        Ok(format!("{name} = ({idx}) as usize"))
                    }
                    Some(LocalKind::CursorIdx) => {
                        let idx = self.array_index(rhs, &self.shell.cursor_array.clone())?;
                        Ok(format!("{name} = ({idx}) as usize"))
                    }
                    Some(LocalKind::Int) => Ok(format!("{name} = {}", self.value_expr(rhs)?)),
                    None => Err(unsupported0(&format!("assignment to unknown local {name}"))),
                }
            }
            Expr::Call { .. } => self.value_expr(e),
            other => Err(unsupported0(&format!(
                "expression statement {}",
                crate::cprint::expr_to_c(other)
            ))),
        }
    }

    /// `&aMem[EXPR]` / `&aCsr[EXPR]`: returns the transpiled index.
    fn array_index(&mut self, e: &Expr, array: &str) -> Result<String> {
        if let Expr::AddrOf(inner) = e {
            if let Expr::Index { base, idx } = inner.as_ref() {
                if let Expr::Ident(name) = base.as_ref() {
                    if name == array {
                        return self.value_expr(idx);
                    }
                }
            }
        }
        Err(unsupported0(&format!(
            "expected &{array}[..], found {}",
            crate::cprint::expr_to_c(e)
        )))
    }

    /// Integer-valued expression.
    fn value_expr(&mut self, e: &Expr) -> Result<String> {
        if let Some(field) = e.as_op_field(&self.shell.op_var) {
            return match field {
                "p1" => Ok("op.p1".to_string()),
                "p2" => Ok("op.p2".to_string()),
                "p3" => Ok("op.p3".to_string()),
                "opcode" => Ok("(op.opcode as i32)".to_string()),
                other => Err(unsupported0(&format!("operation field {other}"))),
            };
        }
        match e {
            Expr::Int(v) => Ok(v.to_string()),
            Expr::Ident(name) => match self.kind_of(name) {
                Some(LocalKind::Int) => Ok(name.clone()),
                Some(_) => Ok(name.clone()),
                None => {
                    if let Some(code) = name.strip_prefix("OP_").and_then(isa::opcode_code) {
                        Ok(code.to_string())
                    } else {
                        Err(unsupported0(&format!("unknown identifier {name}")))
                    }
                }
            },
            Expr::Member { base, field, arrow: true } => {
                if let Expr::Ident(name) = base.as_ref() {
                    if self.kind_of(name) == Some(LocalKind::CursorIdx) && field == "at_end" {
                        return Ok(format!("rt::cursor_at_end(cx, {name})"));
                    }
                }
                Err(unsupported0(&format!(
                    "member read {}",
                    crate::cprint::expr_to_c(e)
                )))
            }
            Expr::Paren(inner) => Ok(format!("({})", self.value_expr(inner)?)),
            Expr::Neg(inner) => Ok(format!("-({})", self.value_expr(inner)?)),
            Expr::Binary { op, lhs, rhs } => match op {
                BinOp::Add | BinOp::Sub => Ok(format!(
                    "{} {} {}",
                    self.value_expr(lhs)?,
                    op.c_text(),
                    self.value_expr(rhs)?
                )),
                // Comparison producing a C int.
                _ => Ok(format!("(({}) as i32)", self.cond_expr(e)?)),
            },
            Expr::Not(_) => Ok(format!("(({}) as i32)", self.cond_expr(e)?)),
            Expr::Call { callee, args } => self.call(callee, args),
            other => Err(unsupported0(&format!(
                "expression {}",
                crate::cprint::expr_to_c(other)
            ))),
        }
    }

    /// Boolean-valued expression (C truthiness).
    fn cond_expr(&mut self, e: &Expr) -> Result<String> {
        match e {
            Expr::Binary { op, lhs, rhs } => match op {
                BinOp::And => Ok(format!(
                    "{} && {}",
                    self.cond_expr(lhs)?,
                    self.cond_expr(rhs)?
                )),
                BinOp::Or => Ok(format!(
                    "{} || {}",
                    self.cond_expr(lhs)?,
                    self.cond_expr(rhs)?
                )),
                BinOp::Add | BinOp::Sub => Ok(format!("({}) != 0", self.value_expr(e)?)),
                _ => Ok(format!(
                    "{} {} {}",
                    self.value_expr(lhs)?,
                    op.c_text(),
                    self.value_expr(rhs)?
                )),
            },
            Expr::Not(inner) => Ok(format!("!({})", self.cond_expr(inner)?)),
            Expr::Paren(inner) => Ok(format!("({})", self.cond_expr(inner)?)),
            other => Ok(format!("({}) != 0", self.value_expr(other)?)),
        }
    }

    /// Runtime primitive calls. Cell/cursor pointer arguments are index
    /// locals on the interpreter side.
    fn call(&mut self, callee: &str, args: &[Expr]) -> Result<String> {
        let idx_arg = |t: &mut Self, e: &Expr| -> Result<String> {
            match e {
                Expr::Ident(name) if t.kind_of(name).is_some() => Ok(name.clone()),
                _ => Err(unsupported0(&format!(
                    "pointer argument {}",
                    crate::cprint::expr_to_c(e)
                ))),
            }
        };
        match (callee, args.len()) {
            ("qjit_set_int", 2) => {
                let dst = idx_arg(self, &args[0])?;
                let v = self.value_expr(&args[1])?;
                Ok(format!("rt::set_int(cx, {dst}, i64::from({v}))"))
            }
            ("qjit_copy", 2) => {
                let dst = idx_arg(self, &args[0])?;
                let src = idx_arg(self, &args[1])?;
                Ok(format!("rt::copy(cx, {dst}, {src})"))
            }
            ("qjit_cmp", 3) => {
                let a = idx_arg(self, &args[1])?;
                let b = idx_arg(self, &args[2])?;
                Ok(format!("rt::cmp(cx, {a}, {b})"))
            }
            ("qjit_rewind", 1) => {
                let c = idx_arg(self, &args[0])?;
                Ok(format!("rt::rewind(cx, {c})"))
            }
            ("qjit_next", 1) => {
                let c = idx_arg(self, &args[0])?;
                Ok(format!("rt::next(cx, {c})"))
            }
            ("qjit_column", 4) => {
                let c = idx_arg(self, &args[1])?;
                let col = self.value_expr(&args[2])?;
                let dst = idx_arg(self, &args[3])?;
                Ok(format!("rt::column(cx, {c}, {col}, {dst})"))
            }
            ("qjit_open_read", 3) => {
                let cur = self.value_expr(&args[1])?;
                let tbl = self.value_expr(&args[2])?;
                Ok(format!("rt::open_read(cx, {cur}, {tbl})"))
            }
            ("qjit_set_row", 3) => {
                let first = self.value_expr(&args[1])?;
                let n = self.value_expr(&args[2])?;
                Ok(format!("rt::set_row(cx, {first}, {n})"))
            }
            other => Err(unsupported0(&format!("runtime call {}", other.0))),
        }
    }
}

fn unsupported(span: Span, construct: &str) -> ExtractError {
    ExtractError::Untranspilable {
        line: span.line,
        col: span.col,
        construct: construct.to_string(),
    }
}

fn unsupported0(construct: &str) -> ExtractError {
    ExtractError::Untranspilable { line: 0, col: 0, construct: construct.to_string() }
}
