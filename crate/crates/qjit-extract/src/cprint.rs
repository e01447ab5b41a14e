//! Deterministic C pretty-printer for rewritten blocks.
//!
//! Emission always goes through this printer rather than source spans, so
//! template output is byte-stable regardless of input formatting.

use crate::ast::{Block, Expr, Stmt};

pub fn expr_to_c(e: &Expr) -> String {
    match e {
        Expr::Ident(s) => s.clone(),
        Expr::Int(v) => v.to_string(),
        Expr::Member { base, field, arrow } => {
            format!("{}{}{}", expr_to_c(base), if *arrow { "->" } else { "." }, field)
        }
        Expr::Index { base, idx } => format!("{}[{}]", expr_to_c(base), expr_to_c(idx)),
        Expr::AddrOf(inner) => format!("&{}", expr_to_c(inner)),
        Expr::Not(inner) => format!("!{}", expr_to_c(inner)),
        Expr::Neg(inner) => format!("-{}", expr_to_c(inner)),
        Expr::Binary { op, lhs, rhs } => {
            format!("{} {} {}", expr_to_c(lhs), op.c_text(), expr_to_c(rhs))
        }
        Expr::Assign { lhs, rhs } => format!("{} = {}", expr_to_c(lhs), expr_to_c(rhs)),
        Expr::Call { callee, args } => {
            let args: Vec<String> = args.iter().map(expr_to_c).collect();
            format!("{}({})", callee, args.join(", "))
        }
        Expr::PostIncr(inner) => format!("{}++", expr_to_c(inner)),
        Expr::Paren(inner) => format!("({})", expr_to_c(inner)),
    }
}

/// Prints a block's statements as indented C lines (no surrounding braces).
pub fn block_to_lines(block: &Block, indent: usize, out: &mut Vec<String>) {
    for stmt in block {
        stmt_to_lines(stmt, indent, out);
    }
}

fn pad(indent: usize) -> String {
    "  ".repeat(indent)
}

pub fn stmt_to_lines(stmt: &Stmt, indent: usize, out: &mut Vec<String>) {
    match stmt {
        Stmt::Decl(d) => {
            let stars = "*".repeat(d.stars as usize);
            let init = d
                .init
                .as_ref()
                .map(|e| format!(" = {}", expr_to_c(e)))
                .unwrap_or_default();
            let sep = if d.stars > 0 { " " } else { " " };
            out.push(format!("{}{}{sep}{stars}{}{init};", pad(indent), d.ty, d.name));
        }
        Stmt::Expr(e) => out.push(format!("{}{};", pad(indent), expr_to_c(e))),
        Stmt::If { cond, then, else_, .. } => {
            out.push(format!("{}if ({}) {{", pad(indent), expr_to_c(cond)));
            block_to_lines(then, indent + 1, out);
            match else_ {
                None => out.push(format!("{}}}", pad(indent))),
                Some(else_block) => {
                    // `else if` chains print flat.
                    if else_block.len() == 1 {
                        if let Stmt::If { cond, then, else_, .. } = &else_block[0] {
                            out.push(format!("{}}} else if ({}) {{", pad(indent), expr_to_c(cond)));
                            block_to_lines(then, indent + 1, out);
                            let tail = Stmt::If {
                                cond: cond.clone(),
                                then: Vec::new(),
                                else_: else_.clone(),
                                span: crate::lexer::Span::new(0, 0),
                            };
                            print_else_tail(&tail, indent, out);
                            return;
                        }
                    }
                    out.push(format!("{}}} else {{", pad(indent)));
                    block_to_lines(else_block, indent + 1, out);
                    out.push(format!("{}}}", pad(indent)));
                }
            }
        }
        Stmt::Goto { label, .. } => out.push(format!("{}goto {};", pad(indent), label)),
        Stmt::Label { name, .. } => out.push(format!("{}{}:", pad(indent), name)),
        Stmt::Break { .. } => out.push(format!("{}break;", pad(indent))),
        Stmt::Return { expr, .. } => match expr {
            Some(e) => out.push(format!("{}return {};", pad(indent), expr_to_c(e))),
            None => out.push(format!("{}return;", pad(indent))),
        },
        Stmt::Block(b) => {
            out.push(format!("{}{{", pad(indent)));
            block_to_lines(b, indent + 1, out);
            out.push(format!("{}}}", pad(indent)));
        }
        Stmt::Switch { .. } | Stmt::For { .. } => {
            // Never emitted: case blocks cannot contain dispatch or loops.
            out.push(format!("{}/* unprintable construct */", pad(indent)));
        }
    }
}

fn print_else_tail(stmt: &Stmt, indent: usize, out: &mut Vec<String>) {
    if let Stmt::If { else_, .. } = stmt {
        match else_ {
            None => out.push(format!("{}}}", pad(indent))),
            Some(else_block) => {
                if else_block.len() == 1 {
                    if let Stmt::If { cond, then, else_, .. } = &else_block[0] {
                        out.push(format!("{}}} else if ({}) {{", pad(indent), expr_to_c(cond)));
                        block_to_lines(then, indent + 1, out);
                        let tail = Stmt::If {
                            cond: cond.clone(),
                            then: Vec::new(),
                            else_: else_.clone(),
                            span: crate::lexer::Span::new(0, 0),
                        };
                        print_else_tail(&tail, indent, out);
                        return;
                    }
                }
                out.push(format!("{}}} else {{", pad(indent)));
                block_to_lines(else_block, indent + 1, out);
                out.push(format!("{}}}", pad(indent)));
            }
        }
    }
}
