//! Instruction set of the synthetic 8-bit core and its text format.
//!
//! Programs are written one instruction per line as `op dest, src`. A `;`
//! also separates instructions, so listings such as
//! `mov r3, r20;  mov r4, r21;` parse as written. `#` starts a comment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IsaError;

/// Number of general purpose registers.
pub const NUM_REGS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opcode {
    Mov,
    Add,
    Sub,
    Mul,
    Lsl,
    Eor,
    And,
    Or,
    Nop,
}

impl Opcode {
    pub const ALL: [Opcode; 9] = [
        Opcode::Mov,
        Opcode::Add,
        Opcode::Sub,
        Opcode::Mul,
        Opcode::Lsl,
        Opcode::Eor,
        Opcode::And,
        Opcode::Or,
        Opcode::Nop,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Mov => "mov",
            Opcode::Add => "add",
            Opcode::Sub => "sub",
            Opcode::Mul => "mul",
            Opcode::Lsl => "lsl",
            Opcode::Eor => "eor",
            Opcode::And => "and",
            Opcode::Or => "or",
            Opcode::Nop => "nop",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for Opcode {
    type Err = IsaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Opcode::ALL
            .iter()
            .copied()
            .find(|op| op.mnemonic() == lower)
            .ok_or_else(|| IsaError::UnknownOpcode(s.trim().to_string()))
    }
}

/// Register index, always below [`NUM_REGS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Reg(u8);

impl Reg {
    pub fn new(index: u8) -> Result<Self, IsaError> {
        if usize::from(index) < NUM_REGS {
            Ok(Reg(index))
        } else {
            Err(IsaError::BadRegister(format!("r{index}")))
        }
    }

    /// Panics on an out-of-range index; meant for program builders with literal indices.
    pub const fn r(index: u8) -> Self {
        assert!((index as usize) < NUM_REGS, "register index out of range");
        Reg(index)
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }
}

impl TryFrom<u8> for Reg {
    type Error = IsaError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Reg::new(v)
    }
}

impl From<Reg> for u8 {
    fn from(r: Reg) -> u8 {
        r.0
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl FromStr for Reg {
    type Err = IsaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t
            .strip_prefix('r')
            .or_else(|| t.strip_prefix('R'))
            .ok_or_else(|| IsaError::BadRegister(t.to_string()))?;
        let index: u8 = digits
            .parse()
            .map_err(|_| IsaError::BadRegister(t.to_string()))?;
        Reg::new(index).map_err(|_| IsaError::BadRegister(t.to_string()))
    }
}

/// Two-operand instruction `op dest, src`.
///
/// Semantics (all arithmetic modulo 256):
/// * `mov d, s`: d = s
/// * `add`/`sub`/`eor`/`and`/`or d, s`: d = d op s
/// * `lsl d, s`: d = s << 1
/// * `mul d, s`: r1:r0 = d * s (16-bit product), d and s unchanged
/// * `nop`: no effect, operands ignored
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub op: Opcode,
    pub dest: Reg,
    pub src: Reg,
}

impl Instruction {
    pub const fn new(op: Opcode, dest: Reg, src: Reg) -> Self {
        Instruction { op, dest, src }
    }

    /// Shorthand used by the program builders.
    pub const fn rr(op: Opcode, dest: u8, src: u8) -> Self {
        Instruction::new(op, Reg::r(dest), Reg::r(src))
    }

    pub const fn nop() -> Self {
        Instruction::new(Opcode::Nop, Reg::r(0), Reg::r(0))
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op {
            Opcode::Nop => f.write_str("nop"),
            op => write!(f, "{} {}, {}", op, self.dest, self.src),
        }
    }
}

impl FromStr for Instruction {
    type Err = IsaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (mnemonic, rest) = match t.find(char::is_whitespace) {
            Some(i) => (&t[..i], t[i..].trim()),
            None => (t, ""),
        };
        let op: Opcode = mnemonic.parse()?;
        if op == Opcode::Nop {
            if !rest.is_empty() {
                return Err(IsaError::Syntax(t.to_string()));
            }
            return Ok(Instruction::nop());
        }
        let operands: Vec<&str> = rest.split(',').map(str::trim).collect();
        match operands.as_slice() {
            [d, s] if !d.is_empty() && !s.is_empty() => {
                Ok(Instruction::new(op, d.parse()?, s.parse()?))
            }
            // `lsl r3` shifts a register in place.
            [d] if op == Opcode::Lsl && !d.is_empty() => {
                let r: Reg = d.parse()?;
                Ok(Instruction::new(op, r, r))
            }
            _ => Err(IsaError::Syntax(t.to_string())),
        }
    }
}

/// Parses a program in the `op dest, src` text format.
pub fn parse_program(text: &str) -> Result<Vec<Instruction>, IsaError> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(';'))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Renders a program back into the text format, one instruction per line.
pub fn format_program(instrs: &[Instruction]) -> String {
    let mut out = String::new();
    for i in instrs {
        out.push_str(&i.to_string());
        out.push('\n');
    }
    out
}

#[inline]
pub fn hamming_weight(v: u16) -> u32 {
    v.count_ones()
}

#[inline]
pub fn hamming_distance(a: u16, b: u16) -> u32 {
    (a ^ b).count_ones()
}

/// Active partial-product bits of an 8x8 array multiplier: each set bit of
/// `a` gates a full row holding `b`, so the count is `HW(a) * HW(b)`.
#[inline]
pub fn partial_product_bits(a: u8, b: u8) -> u32 {
    (0..8)
        .filter(|i| a >> i & 1 == 1)
        .map(|_| b.count_ones())
        .sum()
}
