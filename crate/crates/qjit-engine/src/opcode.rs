//! The instruction set.
//!
//! Numeric codes are stable within a build (emitted templates bake them in)
//! and documented in the generated `opcodes.md`. A test pins this enum
//! against the extractor's canonical table.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    Init = 0,
    Transaction = 1,
    Integer = 2,
    OpenRead = 3,
    Rewind = 4,
    Column = 5,
    Copy = 6,
    ResultRow = 7,
    Next = 8,
    Goto = 9,
    Halt = 10,
    Eq = 11,
    Ne = 12,
    Lt = 13,
    Le = 14,
    Gt = 15,
    Ge = 16,
}

pub const OPCODE_COUNT: usize = 17;

impl Opcode {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Opcode> {
        use Opcode::*;
        Some(match code {
            0 => Init,
            1 => Transaction,
            2 => Integer,
            3 => OpenRead,
            4 => Rewind,
            5 => Column,
            6 => Copy,
            7 => ResultRow,
            8 => Next,
            9 => Goto,
            10 => Halt,
            11 => Eq,
            12 => Ne,
            13 => Lt,
            14 => Le,
            15 => Gt,
            16 => Ge,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        use Opcode::*;
        match self {
            Init => "Init",
            Transaction => "Transaction",
            Integer => "Integer",
            OpenRead => "OpenRead",
            Rewind => "Rewind",
            Column => "Column",
            Copy => "Copy",
            ResultRow => "ResultRow",
            Next => "Next",
            Goto => "Goto",
            Halt => "Halt",
            Eq => "Eq",
            Ne => "Ne",
            Lt => "Lt",
            Le => "Le",
            Gt => "Gt",
            Ge => "Ge",
        }
    }

    /// The six comparison opcodes share one case block parameterized by the
    /// comparison operator.
    pub fn is_comparison(self) -> bool {
        (self as u8) >= Opcode::Eq as u8
    }

    /// Opcodes whose p2 operand is a jump target.
    pub fn is_jump(self) -> bool {
        use Opcode::*;
        matches!(self, Init | Rewind | Next | Goto) || self.is_comparison()
    }

    /// True when execution can continue at pc+1 after this instruction.
    pub fn falls_through(self) -> bool {
        use Opcode::*;
        !matches!(self, Init | Goto | Halt)
    }
}

impl std::fmt::Display for Opcode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
