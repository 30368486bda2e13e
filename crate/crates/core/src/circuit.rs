//! Gate-level IR for permutation circuits built from NOT, CNOT and Toffoli.
//!
//! Qubits are 0-based. Within a register or operand, bit 0 is the least
//! significant bit. Basis states are packed into a `u128`, so circuits are
//! limited to [`MAX_WIDTH`] qubits.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest circuit width the packed basis-state simulator supports.
pub const MAX_WIDTH: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::Cnot => 2,
            GateKind::Toffoli => 3,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Not => "x",
            GateKind::Cnot => "cx",
            GateKind::Toffoli => "ccx",
        }
    }
}

/// A single reversible gate. The last qubit is always the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 3],
}

impl Gate {
    pub fn not(target: usize) -> Self {
        Self { kind: GateKind::Not, qubits: [target, 0, 0] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, qubits: [control, target, 0] }
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self { kind: GateKind::Toffoli, qubits: [c0, c1, target] }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn controls(&self) -> &[usize] {
        &self.qubits[..self.kind.arity() - 1]
    }

    pub fn target(&self) -> usize {
        self.qubits[self.kind.arity() - 1]
    }

    /// Applies the gate to a packed basis state.
    #[inline]
    pub fn apply(&self, state: u128) -> u128 {
        let fire = self.controls().iter().all(|&c| state >> c & 1 == 1);
        if fire {
            state ^ (1u128 << self.target())
        } else {
            state
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterRole {
    /// Read by the circuit and returned unchanged.
    Input,
    /// Read by the circuit and overwritten with (part of) the result.
    Inout,
    /// Starts at zero and holds (part of) the result.
    Output,
    /// Starts at zero; scratch space, possibly left dirty.
    Ancilla,
}

impl RegisterRole {
    pub fn as_str(self) -> &'static str {
        match self {
            RegisterRole::Input => "input",
            RegisterRole::Inout => "inout",
            RegisterRole::Output => "output",
            RegisterRole::Ancilla => "ancilla",
        }
    }

    /// Registers with this role must be zero before the circuit runs.
    pub fn zero_initialized(self) -> bool {
        matches!(self, RegisterRole::Output | RegisterRole::Ancilla)
    }
}

impl std::str::FromStr for RegisterRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "input" => Ok(RegisterRole::Input),
            "inout" => Ok(RegisterRole::Inout),
            "output" => Ok(RegisterRole::Output),
            "ancilla" => Ok(RegisterRole::Ancilla),
            other => Err(format!("unknown register role `{other}`")),
        }
    }
}

/// A named, contiguous, inclusive qubit range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub lo: usize,
    pub hi: usize,
    pub role: RegisterRole,
}

impl Register {
    pub fn new(name: impl Into<String>, lo: usize, hi: usize, role: RegisterRole) -> Self {
        Self { name: name.into(), lo, hi, role }
    }

    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn contains(&self, q: usize) -> bool {
        (self.lo..=self.hi).contains(&q)
    }
}

/// A named integer view over a list of qubits, least significant first.
/// Operands may span several registers (for example a sum that lives partly
/// in an overwritten input and partly in a carry qubit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operand {
    pub name: String,
    pub qubits: Vec<usize>,
}

impl Operand {
    pub fn new(name: impl Into<String>, qubits: Vec<usize>) -> Self {
        Self { name: name.into(), qubits }
    }

    pub fn pack(&self, value: u64, state: u128) -> u128 {
        self.qubits.iter().enumerate().fold(state, |s, (i, &q)| {
            let bit = (value >> i & 1) as u128;
            (s & !(1u128 << q)) | (bit << q)
        })
    }

    pub fn extract(&self, state: u128) -> u64 {
        self.qubits.iter().enumerate().fold(0u64, |v, (i, &q)| v | (((state >> q) & 1) as u64) << i)
    }
}

/// A flat, ordered list of gates over a fixed number of qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub name: String,
    width: usize,
    gates: Vec<Gate>,
    pub registers: Vec<Register>,
    pub inputs: Vec<Operand>,
    pub output: Option<Operand>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CircuitIssue {
    #[error("circuit width {0} exceeds the supported maximum of {MAX_WIDTH}")]
    WidthTooLarge(usize),
    #[error("gate {gate}: qubit {qubit} out of range for width {width}")]
    IndexOutOfRange { gate: usize, qubit: usize, width: usize },
    #[error("gate {gate}: qubit {qubit} used more than once")]
    DuplicateQubit { gate: usize, qubit: usize },
    #[error("register `{name}` ({lo}..{hi}) out of range for width {width}")]
    RegisterOutOfRange { name: String, lo: usize, hi: usize, width: usize },
    #[error("registers `{first}` and `{second}` overlap")]
    OverlappingRegisters { first: String, second: String },
    #[error("operand `{name}` references qubit {qubit} out of range")]
    OperandOutOfRange { name: String, qubit: usize },
    #[error("operand `{name}` is wider than 64 bits")]
    OperandTooWide { name: String },
}

impl Circuit {
    pub fn new(name: impl Into<String>, width: usize) -> Self {
        Self { name: name.into(), width, gates: Vec::new(), registers: Vec::new(), inputs: Vec::new(), output: None }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Gate::not(q))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::cnot(control, target))
    }

    pub fn ccx(&mut self, c0: usize, c1: usize, target: usize) -> &mut Self {
        self.push(Gate::toffoli(c0, c1, target))
    }

    pub fn add_register(&mut self, name: impl Into<String>, lo: usize, hi: usize, role: RegisterRole) {
        self.registers.push(Register::new(name, lo, hi, role));
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn input(&self, name: &str) -> Option<&Operand> {
        self.inputs.iter().find(|o| o.name == name)
    }

    /// Qubits belonging to `input` registers; these must come out unchanged.
    pub fn passthrough_qubits(&self) -> Vec<usize> {
        self.registers.iter().filter(|r| r.role == RegisterRole::Input).flat_map(|r| r.qubits()).collect()
    }

    /// Checks every gate and register invariant, returning all violations.
    pub fn validate(&self) -> Result<(), Vec<CircuitIssue>> {
        let mut issues = Vec::new();
        if self.width > MAX_WIDTH {
            issues.push(CircuitIssue::WidthTooLarge(self.width));
        }
        for (i, gate) in self.gates.iter().enumerate() {
            let qs = gate.qubits();
            for (j, &q) in qs.iter().enumerate() {
                if q >= self.width {
                    issues.push(CircuitIssue::IndexOutOfRange { gate: i, qubit: q, width: self.width });
                }
                if qs[..j].contains(&q) {
                    issues.push(CircuitIssue::DuplicateQubit { gate: i, qubit: q });
                }
            }
        }
        for (i, r) in self.registers.iter().enumerate() {
            if r.lo > r.hi || r.hi >= self.width {
                issues.push(CircuitIssue::RegisterOutOfRange {
                    name: r.name.clone(),
                    lo: r.lo,
                    hi: r.hi,
                    width: self.width,
                });
            }
            for other in &self.registers[..i] {
                if r.lo <= other.hi && other.lo <= r.hi {
                    issues
                        .push(CircuitIssue::OverlappingRegisters { first: other.name.clone(), second: r.name.clone() });
                }
            }
        }
        for op in self.inputs.iter().chain(self.output.iter()) {
            if op.qubits.len() > 64 {
                issues.push(CircuitIssue::OperandTooWide { name: op.name.clone() });
            }
            if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.width) {
                issues.push(CircuitIssue::OperandOutOfRange { name: op.name.clone(), qubit: q });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// Noiseless evaluation on a packed basis state.
    pub fn run_basis(&self, state: u128) -> u128 {
        self.gates.iter().fold(state, |s, g| g.apply(s))
    }

    /// Applies the circuit to a basis bitstring where `bits[q]` is qubit `q`.
    pub fn apply_permutation(&self, bits: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if bits.len() != self.width {
            return Err(CircuitError::WidthMismatch { expected: self.width, found: bits.len() });
        }
        self.validate().map_err(CircuitError::Invalid)?;
        let state = bits.iter().enumerate().fold(0u128, |s, (q, &b)| s | (b as u128) << q);
        let out = self.run_basis(state);
        Ok((0..self.width).map(|q| out >> q & 1 == 1).collect())
    }

    pub fn resource_report(&self) -> Result<ResourceReport, CircuitError> {
        self.validate().map_err(CircuitError::Invalid)?;
        Ok(ResourceReport::of(self))
    }
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("invalid circuit: {}", join_issues(.0))]
    Invalid(Vec<CircuitIssue>),
    #[error("expected {expected} bits, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn join_issues(issues: &[CircuitIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parses a basis bitstring such as `"110"`; character `i` is qubit `i`.
pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Gate counts and ASAP depths. Per-kind depths are taken on the circuit
/// with every other kind of gate removed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub qubit_count: usize,
    pub toffoli_count: usize,
    pub cnot_count: usize,
    pub not_count: usize,
    pub toffoli_depth: usize,
    pub cnot_depth: usize,
    pub total_depth: usize,
}

impl ResourceReport {
    fn of(circuit: &Circuit) -> Self {
        let gates = circuit.gates();
        let count = |k: GateKind| gates.iter().filter(|g| g.kind() == k).count();
        let kind_depth = |k: GateKind| asap_depth(circuit.width(), gates.iter().filter(|g| g.kind() == k));
        Self {
            qubit_count: circuit.width(),
            toffoli_count: count(GateKind::Toffoli),
            cnot_count: count(GateKind::Cnot),
            not_count: count(GateKind::Not),
            toffoli_depth: kind_depth(GateKind::Toffoli),
            cnot_depth: kind_depth(GateKind::Cnot),
            total_depth: asap_depth(circuit.width(), gates.iter()),
        }
    }
}

/// Number of layers when each gate is placed in the earliest layer after the
/// last layer touching any of its qubits.
pub fn asap_depth<'a>(width: usize, gates: impl Iterator<Item = &'a Gate>) -> usize {
    let mut level = vec![0usize; width];
    let mut depth = 0;
    for g in gates {
        let layer = 1 + g.qubits().iter().map(|&q| level[q]).max().unwrap_or(0);
        for &q in g.qubits() {
            level[q] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}

const TEXT_HEADER: &str = "# qsmart circuit\n\
# qubits are 0-based; register and operand bit 0 is the least significant bit\n";

impl Circuit {
    /// Serializes to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from(TEXT_HEADER);
        out.push_str(&format!("name {}\n", self.name));
        out.push_str(&format!("qubits {}\n", self.width));
        for r in &self.registers {
            out.push_str(&format!("reg {} {}..{} {}\n", r.name, r.lo, r.hi, r.role.as_str()));
        }
        let operand_line = |tag: &str, op: &Operand| {
            let qs: Vec<String> = op.qubits.iter().map(ToString::to_string).collect();
            format!("{tag} {} {}\n", op.name, qs.join(" "))
        };
        for op in &self.inputs {
            out.push_str(&operand_line("in", op));
        }
        if let Some(op) = &self.output {
            out.push_str(&operand_line("out", op));
        }
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        let mut name = String::from("unnamed");
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| CircuitError::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            let rest: Vec<&str> = tokens.collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected integer, found `{s}`")));
            if head == "name" {
                name = rest.join(" ");
                if let Some(c) = circuit.as_mut() {
                    c.name = name.clone();
                }
                continue;
            }
            if head == "qubits" {
                if circuit.is_some() {
                    return Err(err("duplicate `qubits` header".into()));
                }
                let [n] = rest[..] else {
                    return Err(err("usage: qubits N".into()));
                };
                circuit = Some(Circuit::new(name.clone(), num(n)?));
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| err("`qubits N` header must come first".into()))?;
            match head {
                "reg" => {
                    let [reg_name, range, role] = rest[..] else {
                        return Err(err("usage: reg NAME LO..HI ROLE".into()));
                    };
                    let (lo, hi) = range.split_once("..").ok_or_else(|| err(format!("bad range `{range}`")))?;
                    let role = role.parse::<RegisterRole>().map_err(err)?;
                    c.add_register(reg_name, num(lo)?, num(hi)?, role);
                }
                "in" | "out" => {
                    let (op_name, qs) = rest.split_first().ok_or_else(|| err(format!("usage: {head} NAME Q...")))?;
                    let qubits = qs.iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
                    let op = Operand::new(*op_name, qubits);
                    if head == "in" {
                        c.inputs.push(op);
                    } else {
                        c.output = Some(op);
                    }
                }
                "x" | "cx" | "ccx" => {
                    let qs = rest.iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
                    let gate = match (head, qs.as_slice()) {
                        ("x", &[t]) => Gate::not(t),
                        ("cx", &[c0, t]) => Gate::cnot(c0, t),
                        ("ccx", &[c0, c1, t]) => Gate::toffoli(c0, c1, t),
                        _ => return Err(err(format!("wrong operand count for `{head}`"))),
                    };
                    c.push(gate);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        circuit.ok_or(CircuitError::Parse { line: 0, message: "missing `qubits N` header".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_valid_circuit() {
        let mut c = Circuit::new("t", 2);
        c.cx(0, 1);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn duplicate_qubit_rejected() {
        let mut c = Circuit::new("t", 2);
        c.cx(0, 0);
        let issues = c.validate().unwrap_err();
        assert_eq!(issues, vec![CircuitIssue::DuplicateQubit { gate: 0, qubit: 0 }]);
    }

    #[test]
    fn out_of_range_rejected() {
        let mut c = Circuit::new("t", 1);
        c.cx(0, 1);
        let issues = c.validate().unwrap_err();
        assert_eq!(issues, vec![CircuitIssue::IndexOutOfRange { gate: 0, qubit: 1, width: 1 }]);
    }

    #[test]
    fn overlapping_registers_rejected() {
        let mut c = Circuit::new("t", 4);
        c.add_register("A", 0, 2, RegisterRole::Input);
        c.add_register("B", 2, 3, RegisterRole::Inout);
        assert!(matches!(c.validate().unwrap_err()[..], [CircuitIssue::OverlappingRegisters { .. }]));
    }

    #[test]
    fn textbook_gates() {
        let mut cx = Circuit::new("cx", 2);
        cx.cx(0, 1);
        assert_eq!(cx.apply_permutation(&parse_bits("10").unwrap()).unwrap(), parse_bits("11").unwrap());

        let mut ccx = Circuit::new("ccx", 3);
        ccx.ccx(0, 1, 2);
        let run = |s: &str| format_bits(&ccx.apply_permutation(&parse_bits(s).unwrap()).unwrap());
        assert_eq!(run("110"), "111");
        assert_eq!(run("100"), "100");
    }

    #[test]
    fn width_mismatch() {
        let c = Circuit::new("t", 3);
        assert!(matches!(c.apply_permutation(&[true]), Err(CircuitError::WidthMismatch { expected: 3, found: 1 })));
    }

    #[test]
    fn empty_circuit_report() {
        let r = Circuit::new("empty", 0).resource_report().unwrap();
        assert_eq!(r, ResourceReport::default());
    }

    #[test]
    fn kind_depth_ignores_other_kinds() {
        // The Toffoli sits between two CNOTs on disjoint qubits: the CNOT-only
        // sub-circuit is a single layer.
        let mut c = Circuit::new("t", 5);
        c.cx(0, 1).ccx(1, 2, 3).cx(2, 4);
        let r = c.resource_report().unwrap();
        assert_eq!(r.cnot_depth, 1);
        assert_eq!(r.toffoli_depth, 1);
        assert_eq!(r.total_depth, 3);
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new("demo circuit", 4);
        c.add_register("A", 0, 1, RegisterRole::Input);
        c.add_register("B", 2, 3, RegisterRole::Inout);
        c.inputs.push(Operand::new("A", vec![0, 1]));
        c.inputs.push(Operand::new("B", vec![2, 3]));
        c.output = Some(Operand::new("M", vec![2, 3]));
        c.x(0).cx(0, 2).ccx(0, 1, 3);
        let parsed = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(parsed, c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Circuit::from_text("qubits 2\ncx 0\n").unwrap_err();
        assert!(matches!(err, CircuitError::Parse { line: 2, .. }));
        assert!(Circuit::from_text("cx 0 1\n").is_err());
        assert!(Circuit::from_text("qubits 2\nreg A 0..1 sideways\n").is_err());
    }

    #[test]
    fn operand_pack_extract() {
        let op = Operand::new("M", vec![5, 1, 3]);
        let s = op.pack(0b101, 0);
        assert_eq!(s, (1 << 5) | (1 << 3));
        assert_eq!(op.extract(s), 0b101);
    }
}
