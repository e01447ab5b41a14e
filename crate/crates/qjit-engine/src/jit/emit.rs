//! Region source emission: pastes the prelude, the template definitions a
//! region needs, and one template invocation per instruction into a single
//! C translation unit.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{JitMode, Region};
use crate::error::JitError;
use crate::gen::templates;
use crate::op::Program;
use crate::opcode::Opcode;

/// Maps each opcode to its instantiation writer and carries the embedded
/// template texts. Generated at build time from the semantics source.
#[derive(Debug, Clone, Copy)]
pub struct EmitterTable(());

impl EmitterTable {
    pub fn embedded() -> EmitterTable {
        EmitterTable(())
    }

    pub fn semantics_sha256(&self) -> &'static str {
        templates::SEMANTICS_SHA256
    }
}

#[derive(Debug, Clone)]
pub struct RegionSource {
    pub text: String,
    /// `region_<programhash>_<head>_<tail>`, names the emitted artifacts.
    pub file_stem: String,
    pub head: usize,
    pub tail: usize,
}

/// Emits the function implementing one region: entry jumps to the head
/// label, each instruction is one template instantiation, and p2 targets
/// or fall-throughs leaving the region become Exit returns.
pub fn emit_region_source(
    program: &Program,
    region: Region,
    table: &EmitterTable,
    mode: JitMode,
) -> Result<RegionSource, JitError> {
    let _ = table;
    let (head, tail) = (region.head_pc, region.tail_pc);
    assert!(head <= tail && tail < program.ops.len(), "region out of bounds");
    check_region_exits(program, region)?;

    let specialized = mode == JitMode::Specialized;
    let in_region = |pc: i32| pc >= head as i32 && pc <= tail as i32;

    // Template define groups needed by this region's opcodes.
    let mut generic_groups: BTreeSet<usize> = BTreeSet::new();
    let mut spec_groups: BTreeSet<usize> = BTreeSet::new();
    for op in &program.ops[head..=tail] {
        let code = op.opcode.code() as i32;
        let spec_idx = if specialized { templates::spec_group_index(code) } else { None };
        match spec_idx {
            Some(idx) => {
                spec_groups.insert(idx);
            }
            None => {
                let idx = templates::group_index(code)
                    .ok_or(JitError::MissingTemplate(op.opcode))?;
                generic_groups.insert(idx);
            }
        }
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "/* qjit compiled region [{head}, {tail}] of program {:016x} ({} mode) */",
        program.fingerprint(),
        if specialized { "specialized" } else { "generic" },
    );
    text.push_str(templates::C_PRELUDE);
    text.push('\n');
    for idx in generic_groups {
        text.push_str(templates::TEMPLATE_FILES[idx].1);
    }
    for idx in spec_groups {
        text.push_str(templates::TEMPLATE_FILES_SPECIALIZED[idx].1);
    }
    text.push('\n');
    text.push_str("QjitOutcome qjit_region_entry(QjitCtx *ctx) {\n");
    text.push_str(templates::REGION_FN_PROLOGUE);
    let _ = writeln!(text, "  goto L{head};");

    let mut exits: BTreeSet<usize> = BTreeSet::new();
    exits.insert(tail + 1);
    for pos in head..=tail {
        let op = &program.ops[pos];
        if op.opcode.is_jump() && !in_region(op.p2) && op.p2 >= 0 {
            exits.insert(op.p2 as usize);
        }
        let next_label = if pos < tail {
            format!("L{}", pos + 1)
        } else {
            format!("L{}", tail + 1)
        };
        let written = templates::write_invocation(
            &mut text,
            op.opcode.code() as i32,
            pos,
            &next_label,
            op.p1,
            op.p2,
            op.p3,
            specialized,
        );
        if !written {
            return Err(JitError::MissingTemplate(op.opcode));
        }
    }
    for pc in exits {
        let _ = writeln!(text, "L{pc}: return qjit_make_outcome(QJIT_OUT_EXIT, {pc});");
    }
    text.push_str("}\n");

    Ok(RegionSource {
        text,
        file_stem: format!("region_{:016x}_{head}_{tail}", program.fingerprint()),
        head,
        tail,
    })
}

/// Rejects regions with no path out: every instruction only jumps inside
/// the span and nothing yields, halts, or falls through past the tail.
fn check_region_exits(program: &Program, region: Region) -> Result<(), JitError> {
    let (head, tail) = (region.head_pc, region.tail_pc);
    let in_region = |pc: i32| pc >= head as i32 && pc <= tail as i32;
    for pos in head..=tail {
        let op = &program.ops[pos];
        match op.opcode {
            Opcode::ResultRow | Opcode::Halt | Opcode::Column | Opcode::OpenRead => return Ok(()),
            _ => {}
        }
        if op.opcode.is_jump() && !in_region(op.p2) {
            return Ok(());
        }
        if pos == tail && op.opcode.falls_through() {
            return Ok(());
        }
    }
    Err(JitError::NonTerminatingRegion { head, tail })
}

/// The build-time smoke translation unit (every template instantiated
/// once); exposed so tests can compile it with the configured toolchain.
pub fn smoke_source() -> &'static str {
    templates::SMOKE_C_SOURCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::Op;
    use crate::opcode::Opcode;

    #[test]
    fn self_loop_goto_region_is_rejected() {
        let ops = vec![
            Op::new(Opcode::Init, 0, 1, 0),
            Op::new(Opcode::Goto, 0, 1, 0),
            Op::new(Opcode::Halt, 0, 0, 0),
        ];
        let program = Program::new(ops, 1, 0);
        let err = emit_region_source(
            &program,
            Region { head_pc: 1, tail_pc: 1 },
            &EmitterTable::embedded(),
            JitMode::Generic,
        )
        .unwrap_err();
        assert!(matches!(err, JitError::NonTerminatingRegion { head: 1, tail: 1 }));
    }
}
