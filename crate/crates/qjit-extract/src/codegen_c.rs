//! C-side emission: the runtime prelude shared by all generated regions,
//! the per-group template files, the smoke-test translation unit, and the
//! generated emitter table consumed by the engine at runtime.

use std::fmt::Write as _;

use crate::extract::ShellInfo;
use crate::isa;
use crate::transform::{ExitKind, Template, TemplateParam};

/// The C runtime prelude. Struct layouts mirror the engine's `#[repr(C)]`
/// FFI types; the engine pins them with layout tests.
pub fn c_prelude() -> String {
    let mut out = String::new();
    out.push_str(
        r#"/* qjit region runtime prelude (generated) */
#include <stdint.h>

typedef struct {
  uint32_t tag;
  uint32_t len;
  union {
    int64_t i;
    double r;
    const uint8_t *z;
  } u;
} QjitCell;

typedef struct {
  uint64_t row_index;
  uint64_t n_rows;
  uint32_t at_end;
  uint32_t table_id;
  uint32_t valid;
  uint32_t pad_;
} QjitCursor;

typedef struct {
  int32_t opcode;
  int32_t p1;
  int32_t p2;
  int32_t p3;
} QjitOp;

typedef struct {
  int32_t kind;
  int32_t val;
} QjitOutcome;

enum {
  QJIT_TAG_NULL = 0,
  QJIT_TAG_INT = 1,
  QJIT_TAG_REAL = 2,
  QJIT_TAG_TEXT = 3
};

enum {
  QJIT_OUT_ROW = 0,
  QJIT_OUT_EXIT = 1,
  QJIT_OUT_HALT = 2,
  QJIT_OUT_ERROR = 3,
  QJIT_OUT_DEOPT = 4
};

struct QjitCtx;
typedef int32_t (*QjitCmpFn)(const QjitCell *, const QjitCell *);
typedef int32_t (*QjitColumnFn)(struct QjitCtx *, QjitCursor *, int32_t, QjitCell *);
typedef int32_t (*QjitOpenFn)(struct QjitCtx *, int32_t, int32_t);

typedef struct QjitCtx {
  QjitCell *regs;
  QjitCursor *cursors;
  QjitOp *ops;
  const void *db;
  QjitCmpFn cmp_fn;
  QjitColumnFn column_fn;
  QjitOpenFn open_fn;
  int32_t row_first;
  int32_t row_count;
  int32_t n_regs;
  int32_t n_cursors;
} QjitCtx;

static inline QjitOutcome qjit_make_outcome(int32_t kind, int32_t val) {
  QjitOutcome o;
  o.kind = kind;
  o.val = val;
  return o;
}

static inline void qjit_set_int(QjitCell *c, int64_t v) {
  c->tag = QJIT_TAG_INT;
  c->u.i = v;
}

static inline void qjit_copy(QjitCell *dst, const QjitCell *src) {
  *dst = *src;
}

static inline int32_t qjit_cell_is_int(const QjitCell *c) {
  return c->tag == QJIT_TAG_INT;
}

/* Generic comparison goes through the engine's comparison routine. */
static inline int32_t qjit_cmp(QjitCtx *ctx, const QjitCell *a, const QjitCell *b) {
  return ctx->cmp_fn(a, b);
}

/* Integer-only comparison for specialized templates. */
static inline int32_t qjit_cmp_int(const QjitCell *a, const QjitCell *b) {
  if (a->u.i < b->u.i) {
    return -1;
  }
  return a->u.i > b->u.i;
}

static inline void qjit_rewind(QjitCursor *c) {
  c->row_index = 0;
  c->at_end = c->n_rows == 0;
}

static inline int32_t qjit_next(QjitCursor *c) {
  c->row_index += 1;
  if (c->row_index < c->n_rows) {
    return 1;
  }
  c->at_end = 1;
  return 0;
}

static inline int32_t qjit_column(QjitCtx *ctx, QjitCursor *cur, int32_t col, QjitCell *out) {
  return ctx->column_fn(ctx, cur, col, out);
}

static inline int32_t qjit_open_read(QjitCtx *ctx, int32_t cur, int32_t tbl) {
  return ctx->open_fn(ctx, cur, tbl);
}

static inline void qjit_set_row(QjitCtx *ctx, int32_t first, int32_t n) {
  ctx->row_first = first;
  ctx->row_count = n;
}

"#,
    );
    for info in isa::ISA {
        let _ = writeln!(out, "#define OP_{} {}", info.name, info.code);
    }
    out
}

/// Local declarations for the top of every generated region function,
/// mirroring the interpreter shell's bindings and scratch locals.
pub fn region_fn_prologue(shell: &ShellInfo) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "  QjitOp *{} = ctx->ops;", shell.op_array);
    let _ = writeln!(out, "  QjitCell *{} = ctx->regs;", shell.reg_array);
    let _ = writeln!(out, "  QjitCursor *{} = ctx->cursors;", shell.cursor_array);
    for (ty, stars, name) in &shell.locals {
        let stars = "*".repeat(*stars as usize);
        let _ = writeln!(out, "  {ty} {stars}{name};");
    }
    let _ = writeln!(out, "  (void){};", shell.op_array);
    let _ = writeln!(out, "  (void){};", shell.reg_array);
    let _ = writeln!(out, "  (void){};", shell.cursor_array);
    for (_, _, name) in &shell.locals {
        let _ = writeln!(out, "  (void){name};");
    }
    out
}

/// Groups templates by their originating case block and renders the
/// per-group `.inc` artifacts, named after the group's lead opcode.
pub fn template_group_files(templates: &[Template], specialized: bool) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = Vec::new();
    let mut seen_leads: Vec<String> = Vec::new();
    for t in templates {
        if t.specialized != specialized {
            continue;
        }
        let lead = t.group[0].to_lowercase();
        if !seen_leads.contains(&lead) {
            seen_leads.push(lead.clone());
            let suffix = if specialized { "_spec" } else { "" };
            files.push((format!("tmpl_{lead}{suffix}.inc"), String::new()));
        }
        let suffix = if specialized { "_spec" } else { "" };
        let fname = format!("tmpl_{}{suffix}.inc", lead);
        let entry = files.iter_mut().find(|(n, _)| *n == fname).unwrap();
        entry.1.push_str(&t.render());
        entry.1.push('\n');
    }
    files
}

/// One invocation line for a template at a concrete instruction.
pub fn invocation_line(
    t: &Template,
    pos: usize,
    next_label: &str,
    p1: i32,
    p2: i32,
    p3: i32,
) -> String {
    let args: Vec<String> = t
        .params
        .iter()
        .map(|p| match p {
            TemplateParam::Pos => pos.to_string(),
            TemplateParam::Next => next_label.to_string(),
            TemplateParam::P1 => p1.to_string(),
            TemplateParam::P2 => p2.to_string(),
            TemplateParam::P3 => p3.to_string(),
            TemplateParam::Opc => format!("OP_{}", t.opcode),
        })
        .collect();
    format!("{}({})", t.macro_name(), args.join(", "))
}

/// A translation unit that instantiates every template once at dummy
/// positions. Compiling it proves every emitted macro expands to valid C.
pub fn smoke_source(shell: &ShellInfo, generic: &[Template], spec: &[Template]) -> String {
    let mut out = c_prelude();
    out.push('\n');
    for t in generic.iter().chain(spec.iter()) {
        out.push_str(&t.render());
        out.push('\n');
    }
    out.push_str("QjitOutcome qjit_smoke(QjitCtx *ctx) {\n");
    out.push_str(&region_fn_prologue(shell));
    out.push_str("  goto L0;\n");

    let mut stubs: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    let emit_chain = |templates: &[Template], pos: &mut usize, out: &mut String, stubs: &mut Vec<usize>| {
        for t in templates {
            let jumps = t.exit_kinds.contains(&ExitKind::JumpToP2);
            let p2 = if jumps {
                let stub = 900 + *pos as i32;
                stubs.push(stub as usize);
                stub
            } else {
                1
            };
            out.push_str("  ");
            out.push_str(&invocation_line(t, *pos, &format!("L{}", *pos + 1), 0, p2, 1));
            out.push('\n');
            *pos += 1;
        }
        stubs.push(*pos);
    };
    emit_chain(generic, &mut pos, &mut out, &mut stubs);
    let spec_start = 100;
    out.push_str(&format!("L{pos}: goto L{spec_start};\n"));
    stubs.retain(|s| *s != pos);
    pos = spec_start;
    emit_chain(spec, &mut pos, &mut out, &mut stubs);

    stubs.sort_unstable();
    stubs.dedup();
    for s in stubs {
        let _ = writeln!(out, "L{s}: return qjit_make_outcome(QJIT_OUT_EXIT, {s});");
    }
    out.push_str("}\n");
    out
}

/// The generated opcode documentation table.
pub fn opcodes_md(sha256: &str) -> String {
    let mut out = String::new();
    out.push_str("# Opcodes\n\n");
    let _ = writeln!(
        out,
        "Generated from the opcode semantics source (sha256 `{sha256}`).\n"
    );
    out.push_str("Numeric codes are stable within a build; emitted templates bake them in.\n\n");
    out.push_str("| Code | Name | Semantics |\n");
    out.push_str("|-----:|------|-----------|\n");
    for info in isa::ISA {
        let _ = writeln!(out, "| {} | {} | {} |", info.code, info.name, info.brief);
    }
    out
}

/// The emitter-table source: a Rust module mapping each opcode to a writer
/// that serializes a template invocation for a concrete instruction, plus
/// the embedded prelude/template texts the region emitter pastes together.
pub fn emitter_table_source(
    sha256: &str,
    shell: &ShellInfo,
    generic: &[Template],
    spec: &[Template],
) -> String {
    let generic_files = template_group_files(generic, false);
    let spec_files = template_group_files(spec, true);

    let mut out = String::new();
    out.push_str("// @generated by qjit-extract from the opcode semantics source. Do not edit.\n");
    let _ = writeln!(out, "pub const SEMANTICS_SHA256: &str = {sha256:?};");
    let _ = writeln!(out, "pub const C_PRELUDE: &str = {:?};", c_prelude());
    let _ = writeln!(
        out,
        "pub const REGION_FN_PROLOGUE: &str = {:?};",
        region_fn_prologue(shell)
    );
    let _ = writeln!(out, "pub const OPCODES_MD: &str = {:?};", opcodes_md(sha256));
    let _ = writeln!(
        out,
        "pub const SMOKE_C_SOURCE: &str = {:?};",
        smoke_source(shell, generic, spec)
    );

    let file_array = |name: &str, files: &[(String, String)], out: &mut String| {
        let _ = writeln!(out, "pub static {name}: &[(&str, &str)] = &[");
        for (fname, text) in files {
            let _ = writeln!(out, "    ({fname:?}, {text:?}),");
        }
        let _ = writeln!(out, "];");
    };
    file_array("TEMPLATE_FILES", &generic_files, &mut out);
    file_array("TEMPLATE_FILES_SPECIALIZED", &spec_files, &mut out);

    // Group-file index per opcode, for pulling in only the defines a region
    // needs.
    let index_fn = |fn_name: &str, templates: &[Template], files: &[(String, String)], specialized: bool, out: &mut String| {
        let _ = writeln!(out, "pub fn {fn_name}(opcode: i32) -> Option<usize> {{");
        let _ = writeln!(out, "    match opcode {{");
        for t in templates {
            if t.specialized != specialized {
                continue;
            }
            let lead = t.group[0].to_lowercase();
            let suffix = if specialized { "_spec" } else { "" };
            let fname = format!("tmpl_{lead}{suffix}.inc");
            let idx = files.iter().position(|(n, _)| *n == fname).unwrap();
            let code = isa::opcode_code(&t.opcode).unwrap();
            let _ = writeln!(out, "        {code} => Some({idx}),");
        }
        let _ = writeln!(out, "        _ => None,");
        let _ = writeln!(out, "    }}");
        let _ = writeln!(out, "}}");
    };
    index_fn("group_index", generic, &generic_files, false, &mut out);
    index_fn("spec_group_index", spec, &spec_files, true, &mut out);

    // The per-opcode invocation writers.
    out.push_str(
        "/// Serializes one template invocation. Returns false when the opcode\n\
         /// has no template.\n\
         #[allow(clippy::too_many_arguments)]\n\
         pub fn write_invocation(\n\
             out: &mut String,\n\
             opcode: i32,\n\
             pos: usize,\n\
             next_label: &str,\n\
             p1: i32,\n\
             p2: i32,\n\
             p3: i32,\n\
             specialized: bool,\n\
         ) -> bool {\n\
             use std::fmt::Write as _;\n\
             match opcode {\n",
    );
    for info in isa::ISA {
        let gt = generic.iter().find(|t| t.opcode == info.name && !t.specialized);
        let st = spec.iter().find(|t| t.opcode == info.name && t.specialized);
        let Some(gt) = gt else { continue };
        let generic_fmt = invocation_fmt(gt);
        let _ = writeln!(out, "        {} => {{", info.code);
        match st {
            Some(st) => {
                let spec_fmt = invocation_fmt(st);
                let _ = writeln!(out, "            if specialized {{");
                let _ = writeln!(out, "                let _ = writeln!(out, {spec_fmt});");
                let _ = writeln!(out, "            }} else {{");
                let _ = writeln!(out, "                let _ = writeln!(out, {generic_fmt});");
                let _ = writeln!(out, "            }}");
            }
            None => {
                let _ = writeln!(out, "            let _ = writeln!(out, {generic_fmt});");
            }
        }
        let _ = writeln!(out, "            true");
        let _ = writeln!(out, "        }}");
    }
    out.push_str("        _ => false,\n    }\n}\n");
    out
}

/// A Rust `writeln!` argument list reproducing [`invocation_line`] for a
/// template, with pos/next/p1/p2/p3 interpolated at runtime.
fn invocation_fmt(t: &Template) -> String {
    let args: Vec<String> = t
        .params
        .iter()
        .map(|p| match p {
            TemplateParam::Pos => "{pos}".to_string(),
            TemplateParam::Next => "{next_label}".to_string(),
            TemplateParam::P1 => "{p1}".to_string(),
            TemplateParam::P2 => "{p2}".to_string(),
            TemplateParam::P3 => "{p3}".to_string(),
            TemplateParam::Opc => format!("OP_{}", t.opcode),
        })
        .collect();
    format!("{:?}", format!("  {}({})", t.macro_name(), args.join(", ")))
}
