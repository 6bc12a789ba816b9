//! Benchmark kernels compiled to fixed straight-line programs.
//!
//! The core has no load/store opcodes, so memory traffic goes through a
//! dedicated port register: a load latches the memory byte into
//! [`MEM_PORT`] and then issues `mov dest, MEM_PORT`; a store issues
//! `mov MEM_PORT, src` and writes the latched byte back. Both therefore cost
//! exactly one `mov` cycle with the usual data-dependent terms.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EnergyTrace, Instruction, IsaError, MachineState, Opcode, PowerModelParams, Reg};
use crate::isa_sim::machine::measurement_noise;

/// Register that backs the memory port. Kernels never allocate it.
pub const MEM_PORT: Reg = Reg::r(31);

/// Memory shape of a benchmark's input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layout {
    /// Two `n`x`n` matrices of 8-bit elements, row-major, A then B.
    MatMult { n: usize },
    /// One 8x8 block of 16-bit little-endian values, row-major.
    Fdct,
}

impl Layout {
    pub fn byte_len(&self) -> usize {
        self.element_count() * self.element_bytes()
    }

    pub fn element_count(&self) -> usize {
        match *self {
            Layout::MatMult { n } => 2 * n * n,
            Layout::Fdct => 64,
        }
    }

    pub fn element_bytes(&self) -> usize {
        match self {
            Layout::MatMult { .. } => 1,
            Layout::Fdct => 2,
        }
    }

    pub fn element_bits(&self) -> u32 {
        8 * self.element_bytes() as u32
    }

    /// Number of independent input bits, i.e. log2 of the data-space size.
    pub fn input_bits(&self) -> u64 {
        8 * self.byte_len() as u64
    }
}

/// Raw input bytes bound to a layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDataset {
    layout: Layout,
    bytes: Vec<u8>,
}

impl InputDataset {
    pub fn new(layout: Layout, bytes: Vec<u8>) -> Result<Self, IsaError> {
        if bytes.len() != layout.byte_len() {
            return Err(IsaError::LayoutMismatch {
                expected: layout.byte_len(),
                actual: bytes.len(),
            });
        }
        Ok(InputDataset { layout, bytes })
    }

    pub fn zeroed(layout: Layout) -> Self {
        InputDataset {
            layout,
            bytes: vec![0; layout.byte_len()],
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bytes_mut(&mut self) -> &mut [u8] {
        &mut self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Element `i` as an unsigned value (little-endian for multi-byte elements).
    pub fn element(&self, i: usize) -> u16 {
        let w = self.layout.element_bytes();
        let chunk = &self.bytes[i * w..(i + 1) * w];
        chunk
            .iter()
            .rev()
            .fold(0u16, |acc, &b| (acc << 8) | u16::from(b))
    }

    pub fn set_element(&mut self, i: usize, value: u16) {
        let w = self.layout.element_bytes();
        let le = value.to_le_bytes();
        self.bytes[i * w..(i + 1) * w].copy_from_slice(&le[..w]);
    }

    /// Parses whitespace-separated or contiguous hex digits.
    pub fn from_hex(layout: Layout, text: &str) -> Result<Self, IsaError> {
        let digits: Vec<u8> = text
            .bytes()
            .filter(|c| !c.is_ascii_whitespace())
            .collect();
        if digits.len() % 2 != 0 {
            return Err(IsaError::BadHex("odd number of hex digits".into()));
        }
        let bytes = digits
            .chunks(2)
            .map(|pair| {
                let s = std::str::from_utf8(pair).map_err(|e| IsaError::BadHex(e.to_string()))?;
                u8::from_str_radix(s, 16).map_err(|_| IsaError::BadHex(format!("invalid digits {s:?}")))
            })
            .collect::<Result<Vec<u8>, _>>()?;
        InputDataset::new(layout, bytes)
    }

    /// Lower-case hex, 32 bytes per line.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.bytes.len() * 2 + self.bytes.len() / 32 + 1);
        for line in self.bytes.chunks(32) {
            for b in line {
                out.push_str(&format!("{b:02x}"));
            }
            out.push('\n');
        }
        out
    }

    /// Reads a dataset file: raw binary when the size matches the layout
    /// exactly, hex text otherwise.
    pub fn read_file(layout: Layout, path: &Path) -> Result<Self, IsaError> {
        let raw = std::fs::read(path)?;
        if raw.len() == layout.byte_len() {
            return InputDataset::new(layout, raw);
        }
        let text = String::from_utf8(raw).map_err(|_| IsaError::LayoutMismatch {
            expected: layout.byte_len(),
            actual: std::fs::metadata(path).map(|m| m.len() as usize).unwrap_or(0),
        })?;
        InputDataset::from_hex(layout, &text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Benchmark {
    MatMult { n: usize },
    Fdct,
}

impl Benchmark {
    /// 20x20 matrix multiply.
    pub const MATMULT: Benchmark = Benchmark::MatMult { n: 20 };
    /// 8x8 matrix multiply for quick experiments.
    pub const MATMULT_SMALL: Benchmark = Benchmark::MatMult { n: 8 };
    pub const FDCT: Benchmark = Benchmark::Fdct;

    pub fn layout(&self) -> Layout {
        match *self {
            Benchmark::MatMult { n } => Layout::MatMult { n },
            Benchmark::Fdct => Layout::Fdct,
        }
    }

    pub fn compile(&self) -> BenchmarkProgram {
        match *self {
            Benchmark::MatMult { n } => compile_matmult(n),
            Benchmark::Fdct => compile_fdct(),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Benchmark::MatMult { n: 20 } => f.write_str("matmult-int"),
            Benchmark::MatMult { n } => write!(f, "matmult-int:{n}"),
            Benchmark::Fdct => f.write_str("fdct"),
        }
    }
}

impl FromStr for Benchmark {
    type Err = IsaError;

    /// Accepts `fdct`, `matmult-int` (20x20) and `matmult-int:N`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "fdct" => return Ok(Benchmark::Fdct),
            "matmult-int" | "matmult" => return Ok(Benchmark::MATMULT),
            _ => {}
        }
        let size = t
            .strip_prefix("matmult-int:")
            .or_else(|| t.strip_prefix("matmult:"))
            .ok_or_else(|| IsaError::UnknownBenchmark(t.to_string()))?;
        match size.parse::<usize>() {
            Ok(n) if (1..=64).contains(&n) => Ok(Benchmark::MatMult { n }),
            _ => Err(IsaError::UnknownBenchmark(t.to_string())),
        }
    }
}

impl From<Benchmark> for String {
    fn from(b: Benchmark) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for Benchmark {
    type Error = IsaError;

    fn try_from(s: String) -> Result<Self, IsaError> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchStep {
    Exec(Instruction),
    Load { dest: Reg, addr: usize },
    Store { src: Reg, addr: usize },
}

/// A compiled kernel: a straight-line step list over a flat byte memory whose
/// first `layout.byte_len()` bytes hold the input dataset.
#[derive(Debug, Clone)]
pub struct BenchmarkProgram {
    layout: Layout,
    steps: Vec<BenchStep>,
    memory_len: usize,
    constants: Vec<(usize, u8)>,
    output: std::ops::Range<usize>,
}

impl BenchmarkProgram {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn steps(&self) -> &[BenchStep] {
        &self.steps
    }

    /// Cycle count of every run; independent of the data.
    pub fn cycles(&self) -> u64 {
        self.steps.len() as u64
    }

    pub fn run(
        &self,
        data: &InputDataset,
        params: &PowerModelParams,
        seed: u64,
    ) -> Result<EnergyTrace, IsaError> {
        let (per_cycle, _) = self.execute(data, params)?;
        Ok(EnergyTrace::from_cycles(
            per_cycle,
            measurement_noise(params, seed),
            params,
        ))
    }

    /// Noise-free execution returning per-cycle energies and the kernel's
    /// output bytes.
    pub fn execute(
        &self,
        data: &InputDataset,
        params: &PowerModelParams,
    ) -> Result<(Vec<f64>, Vec<u8>), IsaError> {
        if data.layout() != self.layout {
            return Err(IsaError::LayoutMismatch {
                expected: self.layout.byte_len(),
                actual: data.bytes().len(),
            });
        }
        let mut mem = vec![0u8; self.memory_len];
        mem[..data.bytes().len()].copy_from_slice(data.bytes());
        for &(addr, v) in &self.constants {
            mem[addr] = v;
        }
        let port = MEM_PORT.index();
        let mut state = MachineState::default();
        let mut per_cycle = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let e = match *step {
                BenchStep::Exec(ref i) => state.step(i, params),
                BenchStep::Load { dest, addr } => {
                    state.regs[port] = mem[addr];
                    state.step(&Instruction::new(Opcode::Mov, dest, MEM_PORT), params)
                }
                BenchStep::Store { src, addr } => {
                    let e = state.step(&Instruction::new(Opcode::Mov, MEM_PORT, src), params);
                    mem[addr] = state.regs[port];
                    e
                }
            };
            per_cycle.push(e);
        }
        Ok((per_cycle, mem[self.output.clone()].to_vec()))
    }
}

/// Compiles and runs `benchmark` on `data`.
pub fn run_benchmark(
    benchmark: Benchmark,
    data: &InputDataset,
    params: &PowerModelParams,
    seed: u64,
) -> Result<EnergyTrace, IsaError> {
    if data.layout() != benchmark.layout() {
        return Err(IsaError::LayoutMismatch {
            expected: benchmark.layout().byte_len(),
            actual: data.bytes().len(),
        });
    }
    benchmark.compile().run(data, params, seed)
}

struct Emitter {
    steps: Vec<BenchStep>,
}

impl Emitter {
    fn op(&mut self, op: Opcode, dest: u8, src: u8) {
        self.steps.push(BenchStep::Exec(Instruction::rr(op, dest, src)));
    }
    fn load(&mut self, dest: u8, addr: usize) {
        self.steps.push(BenchStep::Load {
            dest: Reg::r(dest),
            addr,
        });
    }
    fn store(&mut self, src: u8, addr: usize) {
        self.steps.push(BenchStep::Store {
            src: Reg::r(src),
            addr,
        });
    }
}

/// C = A * B with 8-bit elements. The 16-bit products are accumulated in two
/// byte lanes (r2 low, r3 high) without carry between them.
fn compile_matmult(n: usize) -> BenchmarkProgram {
    use Opcode::*;
    let a_base = 0;
    let b_base = n * n;
    let c_base = 2 * n * n;
    let mut e = Emitter { steps: Vec::new() };
    for i in 0..n {
        for j in 0..n {
            e.op(Eor, 2, 2);
            e.op(Eor, 3, 3);
            for k in 0..n {
                e.load(16, a_base + i * n + k);
                e.load(17, b_base + k * n + j);
                e.op(Mul, 16, 17);
                e.op(Add, 2, 0);
                e.op(Add, 3, 1);
            }
            let out = c_base + 2 * (i * n + j);
            e.store(2, out);
            e.store(3, out + 1);
        }
    }
    BenchmarkProgram {
        layout: Layout::MatMult { n },
        steps: e.steps,
        memory_len: 4 * n * n,
        constants: Vec::new(),
        output: c_base..4 * n * n,
    }
}

// fdct memory map
const FDCT_SCRATCH: usize = 128;
const FDCT_OUT: usize = 256;
const FDCT_CONST: usize = 384;

/// round(256 * cos(k*pi/16)) for k = 1..=7, saturated to a byte.
const DCT_COEFFS: [u8; 7] = [251, 237, 213, 181, 142, 98, 50];

/// Coefficient index (1..=7) and sign for output `u`, input term `m`. Even
/// outputs combine the butterfly sums, odd outputs the differences.
const DCT_TERMS: [[i8; 4]; 8] = [
    [4, 4, 4, 4],
    [1, 3, 5, 7],
    [2, 6, -6, -2],
    [3, -7, -1, -5],
    [4, -4, -4, 4],
    [5, -1, 7, 3],
    [6, -2, 2, -6],
    [7, -5, 3, -1],
];

/// Row-column 8x8 integer DCT. 16-bit values live in byte-lane register
/// pairs; constant multiplies keep the top 16 bits of the 24-bit product.
fn compile_fdct() -> BenchmarkProgram {
    let mut e = Emitter { steps: Vec::new() };
    for row in 0..8 {
        let input: [usize; 8] = std::array::from_fn(|c| 2 * (row * 8 + c));
        let output: [usize; 8] = std::array::from_fn(|u| FDCT_SCRATCH + 2 * (row * 8 + u));
        fdct_pass(&mut e, input, output);
    }
    for col in 0..8 {
        let input: [usize; 8] = std::array::from_fn(|r| FDCT_SCRATCH + 2 * (r * 8 + col));
        let output: [usize; 8] = std::array::from_fn(|u| FDCT_OUT + 2 * (u * 8 + col));
        fdct_pass(&mut e, input, output);
    }
    let constants = DCT_COEFFS
        .iter()
        .enumerate()
        .map(|(i, &c)| (FDCT_CONST + i, c))
        .collect();
    BenchmarkProgram {
        layout: Layout::Fdct,
        steps: e.steps,
        memory_len: FDCT_CONST + DCT_COEFFS.len(),
        constants,
        output: FDCT_OUT..FDCT_OUT + 128,
    }
}

fn fdct_pass(e: &mut Emitter, input: [usize; 8], output: [usize; 8]) {
    use Opcode::*;
    // x_i occupies r(2+2i) (low) and r(3+2i) (high).
    let lo = |i: usize| (2 + 2 * i) as u8;
    let hi = |i: usize| (3 + 2 * i) as u8;
    const T: [u8; 2] = [18, 19];
    const ACC: [u8; 2] = [20, 21];
    const TERM: [u8; 2] = [22, 23];
    const K: u8 = 24;

    for (i, &addr) in input.iter().enumerate() {
        e.load(lo(i), addr);
        e.load(hi(i), addr + 1);
    }
    // Butterflies: x_i <- x_i + x_(7-i), x_(7-i) <- x_i - x_(7-i).
    for i in 0..4 {
        let j = 7 - i;
        for (lane, (ri, rj)) in [(lo(i), lo(j)), (hi(i), hi(j))].into_iter().enumerate() {
            e.op(Mov, T[lane], ri);
            e.op(Sub, T[lane], rj);
            e.op(Add, ri, rj);
            e.op(Mov, rj, T[lane]);
        }
    }
    for (u, terms) in DCT_TERMS.iter().enumerate() {
        for (m, &coef) in terms.iter().enumerate() {
            let v = if u % 2 == 0 { m } else { 7 - m };
            e.load(K, FDCT_CONST + usize::from(coef.unsigned_abs()) - 1);
            e.op(Mul, lo(v), K);
            e.op(Mov, TERM[0], 1);
            e.op(Mul, hi(v), K);
            e.op(Add, TERM[0], 0);
            e.op(Mov, TERM[1], 1);
            let combine = match (m, coef < 0) {
                (0, _) => Mov,
                (_, false) => Add,
                (_, true) => Sub,
            };
            e.op(combine, ACC[0], TERM[0]);
            e.op(combine, ACC[1], TERM[1]);
        }
        e.store(ACC[0], output[u]);
        e.store(ACC[1], output[u] + 1);
    }
}
