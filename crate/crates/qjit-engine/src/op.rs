//! Instructions, programs, and static validation.

use std::cell::Cell as MutCell;

use crate::ffi::RegionEntry;
use crate::opcode::Opcode;

/// One bytecode instruction: opcode plus three integer operands, a hot-loop
/// counter, and the compiled-region entry once a loop headed here has been
/// compiled. The counter and entry are only touched by the thread executing
/// the program.
#[derive(Debug)]
pub struct Op {
    pub opcode: Opcode,
    pub p1: i32,
    pub p2: i32,
    pub p3: i32,
    pub hot_count: MutCell<u32>,
    pub compiled_entry: MutCell<Option<RegionEntry>>,
}

impl Op {
    pub fn new(opcode: Opcode, p1: i32, p2: i32, p3: i32) -> Op {
        Op {
            opcode,
            p1,
            p2,
            p3,
            hot_count: MutCell::new(0),
            compiled_entry: MutCell::new(None),
        }
    }
}

impl Clone for Op {
    fn clone(&self) -> Op {
        // Counters and installed entries are per-instance state and do not
        // travel with copies of the instruction.
        Op::new(self.opcode, self.p1, self.p2, self.p3)
    }
}

/// C-visible mirror of an instruction, referenced by generated regions.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct COp {
    pub opcode: i32,
    pub p1: i32,
    pub p2: i32,
    pub p3: i32,
}

/// A validated instruction sequence plus the register/cursor budget the
/// planner computed for it.
#[derive(Debug, Clone)]
pub struct Program {
    pub ops: Vec<Op>,
    pub main_loop_head: Option<usize>,
    pub source_text: Option<String>,
    pub reg_count: usize,
    pub cursor_count: usize,
    c_ops: Vec<COp>,
}

impl Program {
    pub fn new(ops: Vec<Op>, reg_count: usize, cursor_count: usize) -> Program {
        let c_ops = ops
            .iter()
            .map(|op| COp {
                opcode: op.opcode.code() as i32,
                p1: op.p1,
                p2: op.p2,
                p3: op.p3,
            })
            .collect();
        Program {
            ops,
            main_loop_head: None,
            source_text: None,
            reg_count,
            cursor_count,
            c_ops,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub(crate) fn c_ops(&self) -> &[COp] {
        &self.c_ops
    }

    /// Short stable fingerprint of the instruction stream, used to name
    /// emitted region artifacts.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the instruction words.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: i64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for op in &self.ops {
            eat(op.opcode.code() as i64);
            eat(op.p1 as i64);
            eat(op.p2 as i64);
            eat(op.p3 as i64);
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    JumpOutOfRange,
    RegisterOutOfRange,
    CursorBeforeOpen,
    CursorOutOfRange,
    FallsOffEnd,
    ExitPath,
    BadRowCount,
}

#[derive(Debug, Clone)]
pub struct Finding {
    pub pos: usize,
    pub kind: FindingKind,
    pub message: String,
}

/// Result of static validation; an empty report means every jump target,
/// register index, and cursor use is in bounds and exactly one Halt is
/// reachable.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.findings.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.findings.is_empty() {
            return write!(f, "ok");
        }
        for finding in &self.findings {
            writeln!(f, "at {}: {:?}: {}", finding.pos, finding.kind, finding.message)?;
        }
        Ok(())
    }
}

/// Static checks over a program: jump targets within `[0, len)`, register
/// indices within the program's register file, cursors opened before use,
/// no fall-through past the end, and exactly one reachable Halt. A program
/// with an empty report cannot raise `BadRegister` or `BadPc` during
/// execution.
pub fn validate_program(program: &Program) -> ValidationReport {
    let mut findings: Vec<Finding> = Vec::new();
    let len = program.ops.len();
    let reg_ok = |r: i32| r >= 0 && (r as usize) < program.reg_count;
    let mut opened_at: Vec<Option<usize>> = vec![None; program.cursor_count];

    for (pos, op) in program.ops.iter().enumerate() {
        use Opcode::*;
        if op.opcode.is_jump() {
            let target = op.p2;
            if target < 0 || target as usize >= len {
                findings.push(Finding {
                    pos,
                    kind: FindingKind::JumpOutOfRange,
                    message: format!("jump target {target} outside [0, {len})"),
                });
            }
        }
        let mut bad_regs: Vec<i32> = Vec::new();
        let mut check_reg = |r: i32| {
            if !reg_ok(r) {
                bad_regs.push(r);
            }
        };
        match op.opcode {
            Integer => check_reg(op.p2),
            Column => check_reg(op.p3),
            Copy => {
                check_reg(op.p1);
                check_reg(op.p2);
            }
            ResultRow => {
                if op.p2 < 1 {
                    findings.push(Finding {
                        pos,
                        kind: FindingKind::BadRowCount,
                        message: format!("row of {} registers", op.p2),
                    });
                }
                check_reg(op.p1);
                if op.p2 >= 1 {
                    check_reg(op.p1 + op.p2 - 1);
                }
            }
            Eq | Ne | Lt | Le | Gt | Ge => {
                check_reg(op.p1);
                check_reg(op.p3);
            }
            _ => {}
        }
        for r in bad_regs {
            findings.push(Finding {
                pos,
                kind: FindingKind::RegisterOutOfRange,
                message: format!("register {r} outside file of size {}", program.reg_count),
            });
        }
        match op.opcode {
            OpenRead | Rewind | Column | Next => {
                let cur = op.p1;
                if cur < 0 || cur as usize >= program.cursor_count {
                    findings.push(Finding {
                        pos,
                        kind: FindingKind::CursorOutOfRange,
                        message: format!("cursor {cur} outside budget {}", program.cursor_count),
                    });
                } else if op.opcode == OpenRead && opened_at[cur as usize].is_none() {
                    opened_at[cur as usize] = Some(pos);
                }
            }
            _ => {}
        }
        if op.opcode.falls_through() && pos + 1 >= len {
            findings.push(Finding {
                pos,
                kind: FindingKind::FallsOffEnd,
                message: "execution can fall off the end".to_string(),
            });
        }
    }

    // Cursor use before any OpenRead for that cursor.
    for (pos, op) in program.ops.iter().enumerate() {
        use Opcode::*;
        if matches!(op.opcode, Rewind | Column | Next) {
            let cur = op.p1;
            if cur >= 0 && (cur as usize) < program.cursor_count {
                match opened_at[cur as usize] {
                    Some(open_pos) if open_pos < pos => {}
                    _ => findings.push(Finding {
                        pos,
                        kind: FindingKind::CursorBeforeOpen,
                        message: format!("cursor {cur} used before OpenRead"),
                    }),
                }
            }
        }
    }

    // Reachability: exactly one Halt reachable from 0.
    if len > 0 {
        let mut seen = vec![false; len];
        let mut stack = vec![0usize];
        let mut halts = 0usize;
        while let Some(pc) = stack.pop() {
            if pc >= len || seen[pc] {
                continue;
            }
            seen[pc] = true;
            let op = &program.ops[pc];
            if op.opcode == Opcode::Halt {
                halts += 1;
                continue;
            }
            if op.opcode.is_jump() && op.p2 >= 0 {
                stack.push(op.p2 as usize);
            }
            if op.opcode.falls_through() {
                stack.push(pc + 1);
            }
        }
        if halts != 1 {
            findings.push(Finding {
                pos: 0,
                kind: FindingKind::ExitPath,
                message: format!("{halts} reachable Halt instructions, expected 1"),
            });
        }
    } else {
        findings.push(Finding {
            pos: 0,
            kind: FindingKind::ExitPath,
            message: "empty program".to_string(),
        });
    }

    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_goto_out_of_range() {
        let program = Program::new(vec![Op::new(Opcode::Goto, 0, 5, 0)], 1, 0);
        let report = validate_program(&program);
        assert!(report
            .findings
            .iter()
            .any(|f| f.kind == FindingKind::JumpOutOfRange && f.pos == 0));
    }

    #[test]
    fn register_beyond_file_size() {
        let program = Program::new(
            vec![Op::new(Opcode::Integer, 7, 3, 0), Op::new(Opcode::Halt, 0, 0, 0)],
            2,
            0,
        );
        let report = validate_program(&program);
        assert!(report
            .findings
            .iter()
            .any(|f| f.kind == FindingKind::RegisterOutOfRange));
    }

    #[test]
    fn cursor_use_before_open() {
        let program = Program::new(
            vec![Op::new(Opcode::Next, 0, 0, 0), Op::new(Opcode::Halt, 0, 0, 0)],
            1,
            1,
        );
        let report = validate_program(&program);
        assert!(report
            .findings
            .iter()
            .any(|f| f.kind == FindingKind::CursorBeforeOpen));
    }
}
