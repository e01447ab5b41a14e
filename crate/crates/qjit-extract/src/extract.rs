//! Case-block extraction from the parsed semantics source.

use crate::ast::{Block, Decl, Expr, Function, SemanticsAst, Stmt};
use crate::error::{ExtractError, Result};
use crate::isa;
use crate::lexer::Span;

/// One case block of the dispatch construct. A fall-through group (several
/// labels sharing one body) is a single block serving multiple opcodes.
#[derive(Debug, Clone)]
pub struct CaseBlock {
    /// ISA opcode names served by this block, in source order.
    pub opcodes: Vec<String>,
    pub body: Block,
    pub span: Span,
}

impl CaseBlock {
    /// First opcode of the group; names the emitted template artifact.
    pub fn lead(&self) -> &str {
        &self.opcodes[0]
    }
}

/// The variable roles the transform and transpiler need from the
/// interpreter shell: which locals name the op/register/cursor arrays, the
/// dispatch context parameter, and the remaining scratch locals.
#[derive(Debug, Clone)]
pub struct ShellInfo {
    pub ctx_param: String,
    pub op_array: String,
    pub reg_array: String,
    pub cursor_array: String,
    pub op_var: String,
    /// Scratch locals declared in the shell, in order: (type, stars, name).
    pub locals: Vec<(String, u8, String)>,
}

/// Locates the single dispatch construct and returns its case blocks in
/// source order. Does not check ISA coverage; see [`extract_case_blocks`].
pub fn collect_case_blocks(ast: &SemanticsAst) -> Result<Vec<CaseBlock>> {
    let (_, groups) = find_dispatch(ast)?;
    let mut blocks = Vec::new();
    for group in groups {
        let mut opcodes = Vec::new();
        for (label, lspan) in &group.0 {
            match isa::opcode_from_label(label) {
                Some(name) => opcodes.push(name.to_string()),
                None => {
                    return Err(ExtractError::SubsetViolation {
                        line: lspan.line,
                        col: lspan.col,
                        construct: format!("case label `{label}` is not an ISA opcode"),
                    })
                }
            }
        }
        blocks.push(CaseBlock { opcodes, body: group.1, span: group.2 });
    }
    Ok(blocks)
}

/// Case blocks with ISA coverage enforced: every opcode must be served by
/// exactly one block.
pub fn extract_case_blocks(ast: &SemanticsAst) -> Result<Vec<CaseBlock>> {
    let blocks = collect_case_blocks(ast)?;
    let mut seen: Vec<&str> = Vec::new();
    for block in &blocks {
        for op in &block.opcodes {
            if seen.contains(&op.as_str()) {
                return Err(ExtractError::SubsetViolation {
                    line: block.span.line,
                    col: block.span.col,
                    construct: format!("opcode {op} appears in more than one case block"),
                });
            }
            seen.push(op);
        }
    }
    for info in isa::ISA {
        if !seen.contains(&info.name) {
            return Err(ExtractError::MissingOpcode(info.name.to_string()));
        }
    }
    Ok(blocks)
}

/// Extracts the shell variable roles from the function containing the
/// dispatch construct.
pub fn shell_info(ast: &SemanticsAst) -> Result<ShellInfo> {
    let function = dispatch_function(ast)?;
    let ctx_param = function
        .params
        .first()
        .map(|(_, name)| name.clone())
        .ok_or_else(|| ExtractError::SubsetViolation {
            line: function.span.line,
            col: function.span.col,
            construct: "dispatch function takes no context parameter".to_string(),
        })?;

    let mut op_array = None;
    let mut reg_array = None;
    let mut cursor_array = None;
    let mut op_var = None;
    let mut locals = Vec::new();

    for stmt in &function.body {
        if let Stmt::Decl(decl) = stmt {
            match binding_role(decl, &ctx_param) {
                Some("ops") => op_array = Some(decl.name.clone()),
                Some("regs") => reg_array = Some(decl.name.clone()),
                Some("cursors") => cursor_array = Some(decl.name.clone()),
                _ => {
                    if decl.ty == "QjitOp" && decl.stars == 1 && op_var.is_none() {
                        op_var = Some(decl.name.clone());
                    }
                    locals.push((decl.ty.clone(), decl.stars, decl.name.clone()));
                }
            }
        }
    }

    let missing = |what: &str| ExtractError::SubsetViolation {
        line: function.span.line,
        col: function.span.col,
        construct: format!("shell does not bind the {what} array from the context"),
    };
    Ok(ShellInfo {
        ctx_param,
        op_array: op_array.ok_or_else(|| missing("op"))?,
        reg_array: reg_array.ok_or_else(|| missing("register"))?,
        cursor_array: cursor_array.ok_or_else(|| missing("cursor"))?,
        op_var: op_var.ok_or_else(|| missing("current-op"))?,
        locals,
    })
}

/// `QjitOp *aOp = ctx->ops;` style binding; returns the context field name.
fn binding_role<'a>(decl: &'a Decl, ctx: &str) -> Option<&'a str> {
    if let Some(Expr::Member { base, field, arrow: true }) = &decl.init {
        if let Expr::Ident(name) = base.as_ref() {
            if name == ctx {
                return Some(field.as_str());
            }
        }
    }
    None
}

fn dispatch_function(ast: &SemanticsAst) -> Result<&Function> {
    for function in &ast.functions {
        if function_has_switch(&function.body) {
            return Ok(function);
        }
    }
    Err(ExtractError::SubsetViolation {
        line: 1,
        col: 1,
        construct: "no dispatch construct found".to_string(),
    })
}

fn function_has_switch(block: &Block) -> bool {
    block.iter().any(|s| match s {
        Stmt::Switch { .. } => true,
        Stmt::For { body, .. } => function_has_switch(body),
        Stmt::If { then, else_, .. } => {
            function_has_switch(then)
                || else_.as_ref().map(|b| function_has_switch(b)).unwrap_or(false)
        }
        Stmt::Block(b) => function_has_switch(b),
        _ => false,
    })
}

type RawGroup = (Vec<(String, Span)>, Block, Span);

fn find_dispatch(ast: &SemanticsAst) -> Result<(String, Vec<RawGroup>)> {
    fn walk(block: &Block, found: &mut Option<(String, Vec<RawGroup>)>) {
        for stmt in block {
            match stmt {
                Stmt::Switch { subject, groups, span } => {
                    if found.is_none() {
                        let subj = crate::cprint::expr_to_c(subject);
                        let raw = groups
                            .iter()
                            .map(|g| (g.labels.clone(), g.body.clone(), g.labels[0].1))
                            .collect();
                        *found = Some((subj, raw));
                        let _ = span;
                    }
                }
                Stmt::For { body, .. } => walk(body, found),
                Stmt::If { then, else_, .. } => {
                    walk(then, found);
                    if let Some(e) = else_ {
                        walk(e, found);
                    }
                }
                Stmt::Block(b) => walk(b, found),
                _ => {}
            }
        }
    }
    let mut found = None;
    for function in &ast.functions {
        walk(&function.body, &mut found);
    }
    found.ok_or_else(|| ExtractError::SubsetViolation {
        line: 1,
        col: 1,
        construct: "no dispatch construct found".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_semantics_source;

    const MINI: &str = r#"
int qjit_exec(QjitCtx *ctx) {
  QjitOp *aOp = ctx->ops;
  QjitCell *aMem = ctx->regs;
  QjitCursor *aCsr = ctx->cursors;
  QjitOp *pOp;
  int rc;
  for (pOp = &aOp[0]; 1; pOp++) {
    switch (pOp->opcode) {
      case OP_Goto: {
        goto jump_to_p2;
      }
      case OP_Eq:
      case OP_Ge: {
        break;
      }
    }
  }
jump_to_p2:
  return 0;
}
"#;

    #[test]
    fn collects_groups_in_source_order() {
        let ast = parse_semantics_source(MINI).unwrap();
        let blocks = collect_case_blocks(&ast).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].opcodes, vec!["Goto"]);
        assert_eq!(blocks[1].opcodes, vec!["Eq", "Ge"]);
    }

    #[test]
    fn coverage_check_reports_missing_opcode() {
        let ast = parse_semantics_source(MINI).unwrap();
        let err = extract_case_blocks(&ast).unwrap_err();
        assert!(matches!(err, ExtractError::MissingOpcode(_)), "{err}");
    }

    #[test]
    fn shell_roles_resolved_from_bindings() {
        let ast = parse_semantics_source(MINI).unwrap();
        let shell = shell_info(&ast).unwrap();
        assert_eq!(shell.ctx_param, "ctx");
        assert_eq!(shell.op_array, "aOp");
        assert_eq!(shell.reg_array, "aMem");
        assert_eq!(shell.cursor_array, "aCsr");
        assert_eq!(shell.op_var, "pOp");
    }
}
