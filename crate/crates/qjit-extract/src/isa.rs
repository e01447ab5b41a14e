//! The canonical instruction set: names, stable numeric codes, and the
//! one-line semantics used to generate `opcodes.md`.
//!
//! Numeric codes are baked into emitted templates, so they must stay stable
//! within a build. The engine's `Opcode` enum mirrors this table and is
//! checked against it by a test.

/// One row of the instruction-set table.
#[derive(Debug, Clone, Copy)]
pub struct OpcodeInfo {
    pub name: &'static str,
    pub code: i32,
    pub brief: &'static str,
}

pub const ISA: &[OpcodeInfo] = &[
    OpcodeInfo { name: "Init", code: 0, brief: "Jump to p2. First instruction of every program." },
    OpcodeInfo { name: "Transaction", code: 1, brief: "Start a transaction. No-op in this engine." },
    OpcodeInfo { name: "Integer", code: 2, brief: "Store the integer p1 in register p2." },
    OpcodeInfo { name: "OpenRead", code: 3, brief: "Open read cursor p1 on table p2. The cursor is rewound lazily." },
    OpcodeInfo { name: "Rewind", code: 4, brief: "Position cursor p1 at the first row; jump to p2 if the table is empty." },
    OpcodeInfo { name: "Column", code: 5, brief: "Read column p2 of cursor p1's current row into register p3." },
    OpcodeInfo { name: "Copy", code: 6, brief: "Copy register p1 into register p2." },
    OpcodeInfo { name: "ResultRow", code: 7, brief: "Yield registers p1..p1+p2 as a result row; resume after this instruction." },
    OpcodeInfo { name: "Next", code: 8, brief: "Advance cursor p1; jump to p2 if a row remains, else fall through." },
    OpcodeInfo { name: "Goto", code: 9, brief: "Jump to p2." },
    OpcodeInfo { name: "Halt", code: 10, brief: "Stop execution." },
    OpcodeInfo { name: "Eq", code: 11, brief: "Jump to p2 if reg[p3] == reg[p1]." },
    OpcodeInfo { name: "Ne", code: 12, brief: "Jump to p2 if reg[p3] != reg[p1]." },
    OpcodeInfo { name: "Lt", code: 13, brief: "Jump to p2 if reg[p3] < reg[p1]." },
    OpcodeInfo { name: "Le", code: 14, brief: "Jump to p2 if reg[p3] <= reg[p1]." },
    OpcodeInfo { name: "Gt", code: 15, brief: "Jump to p2 if reg[p3] > reg[p1]." },
    OpcodeInfo { name: "Ge", code: 16, brief: "Jump to p2 if reg[p3] >= reg[p1]." },
];

pub fn opcode_code(name: &str) -> Option<i32> {
    ISA.iter().find(|i| i.name == name).map(|i| i.code)
}

pub fn opcode_name(code: i32) -> Option<&'static str> {
    ISA.iter().find(|i| i.code == code).map(|i| i.name)
}

/// `OP_<Name>` label as it appears in the semantics source.
pub fn case_label(name: &str) -> String {
    format!("OP_{name}")
}

/// Strip the `OP_` prefix from a case label, if it matches an ISA opcode.
pub fn opcode_from_label(label: &str) -> Option<&'static str> {
    let name = label.strip_prefix("OP_")?;
    ISA.iter().find(|i| i.name == name).map(|i| i.name)
}
