//! Golden-file checks for the case-block-to-template transform.

use qjit_extract::transform::{ExitKind, TemplateParam};
use qjit_extract::{
    collect_case_blocks, parse_semantics_source, shell_info, specialize_comparison_templates,
    transform_block,
};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

/// Collapse whitespace runs and drop blank lines; layout may drift, tokens
/// may not.
fn normalize(text: &str) -> String {
    text.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

fn transform_fixture(file: &str, opcode: &str) -> qjit_extract::Template {
    let ast = parse_semantics_source(&fixture(file)).unwrap();
    let shell = shell_info(&ast).unwrap();
    let blocks = collect_case_blocks(&ast).unwrap();
    let block = blocks
        .iter()
        .find(|b| b.opcodes.iter().any(|o| o == opcode))
        .unwrap();
    transform_block(block, opcode, &shell).unwrap()
}

#[test]
fn ge_fixture_reproduces_committed_golden() {
    let template = transform_fixture("ge_simplified.c", "Ge");
    assert_eq!(normalize(&template.render()), normalize(&golden("ge_templ.inc")));
}

#[test]
fn ge_fixture_parameter_order_and_exits() {
    let template = transform_fixture("ge_simplified.c", "Ge");
    assert_eq!(
        template.params,
        vec![
            TemplateParam::Pos,
            TemplateParam::Next,
            TemplateParam::P1,
            TemplateParam::P3,
            TemplateParam::P2,
        ]
    );
    assert!(template.exit_kinds.contains(&ExitKind::JumpToP2));
    assert!(template.exit_kinds.contains(&ExitKind::FallthroughNext));
}

#[test]
fn resultrow_bakes_resume_position() {
    let template = transform_fixture("mini_vdbe.c", "ResultRow");
    assert_eq!(normalize(&template.render()), normalize(&golden("resultrow_templ.inc")));
    assert_eq!(
        template.exit_kinds.into_iter().collect::<Vec<_>>(),
        vec![ExitKind::RowReturn]
    );
}

#[test]
fn halt_block_has_only_halt_exit() {
    let template = transform_fixture("mini_vdbe.c", "Halt");
    assert!(!template.render().contains("goto next"));
    assert_eq!(
        template.exit_kinds.into_iter().collect::<Vec<_>>(),
        vec![ExitKind::HaltReturn]
    );
}

#[test]
fn column_error_exit_becomes_return() {
    let template = transform_fixture("mini_vdbe.c", "Column");
    let text = template.render();
    assert!(text.contains("return qjit_make_outcome(QJIT_OUT_ERROR, rc);"));
    assert!(template.exit_kinds.contains(&ExitKind::ErrorReturn));
    assert_eq!(
        template.params,
        vec![
            TemplateParam::Pos,
            TemplateParam::Next,
            TemplateParam::P1,
            TemplateParam::P2,
            TemplateParam::P3,
        ]
    );
}

#[test]
fn internal_labels_are_localized_by_position() {
    let template = transform_fixture("mini_vdbe.c", "Goto");
    let text = template.render();
    assert!(text.contains("retry_##pos:"), "{text}");
    assert!(text.contains("goto retry_##pos;"), "{text}");
}

#[test]
fn fallthrough_group_shares_one_block() {
    let ast = parse_semantics_source(&fixture("mini_vdbe.c")).unwrap();
    let blocks = collect_case_blocks(&ast).unwrap();
    let cmp = blocks
        .iter()
        .find(|b| b.opcodes.len() > 1)
        .expect("comparison group present");
    assert_eq!(cmp.opcodes, vec!["Eq".to_string(), "Ge".to_string()]);
}

#[test]
fn specialized_variant_guards_and_deopts() {
    let ast = parse_semantics_source(&fixture("mini_vdbe.c")).unwrap();
    let shell = shell_info(&ast).unwrap();
    let blocks = collect_case_blocks(&ast).unwrap();
    let cmp = blocks.iter().find(|b| b.opcodes.len() > 1).unwrap();
    let generic = transform_block(cmp, "Ge", &shell).unwrap();
    let spec = specialize_comparison_templates(&[generic.clone()], &shell);
    assert_eq!(spec.len(), 1);
    let text = spec[0].render();
    assert!(text.starts_with("#define GE_SPEC_TEMPL("), "{text}");
    assert!(text.contains("qjit_cell_is_int(&aMem[P1])"), "{text}");
    assert!(text.contains("return qjit_make_outcome(QJIT_OUT_DEOPT, pos);"), "{text}");
    assert!(text.contains("qjit_cmp_int(pIn3, pIn1)"), "{text}");
    assert!(!text.contains("qjit_cmp(ctx"), "generic comparison must be gone: {text}");
    assert!(spec[0].exit_kinds.contains(&ExitKind::DeoptReturn));
    // The generic template is untouched.
    assert!(generic.render().contains("qjit_cmp(ctx, pIn3, pIn1)"));
}

#[test]
fn unknown_jump_target_is_rejected() {
    let src = r#"
int f(QjitCtx *ctx) {
  QjitOp *aOp = ctx->ops;
  QjitCell *aMem = ctx->regs;
  QjitCursor *aCsr = ctx->cursors;
  QjitOp *pOp;
  for (pOp = &aOp[0]; 1; pOp++) {
    switch (pOp->opcode) {
      case OP_Halt: {
        goto somewhere_else;
      }
    }
  }
}
"#;
    let ast = parse_semantics_source(src).unwrap();
    let shell = shell_info(&ast).unwrap();
    let blocks = collect_case_blocks(&ast).unwrap();
    let err = transform_block(&blocks[0], "Halt", &shell).unwrap_err();
    match err {
        qjit_extract::ExtractError::UnrewritableJump { label, .. } => {
            assert_eq!(label, "somewhere_else")
        }
        other => panic!("expected UnrewritableJump, got {other}"),
    }
}
