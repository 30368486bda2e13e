//! Reversible adder builders: a ripple-carry full adder and modulo 2ⁿ,
//! 2ⁿ−1 and diminished-1 2ⁿ+1 adders, together with the classical oracle
//! they are checked against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Operand, RegisterRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdderError {
    #[error("{family} adder requires n >= {min}, got {n}")]
    SizeTooSmall { family: Family, n: u32, min: u32 },
    #[error("n = {0} is too large")]
    SizeTooLarge(u32),
    #[error("value {value} out of range for modulus {modulus}")]
    ValueOutOfRange { value: u64, modulus: u64 },
    #[error("{0} is not a 2^n, 2^n-1 or 2^n+1 modulus")]
    UnsupportedModulus(u64),
    #[error("unknown adder family `{0}`")]
    UnknownFamily(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Full,
    ModPow2,
    ModPow2Minus1,
    ModPow2Plus1,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Full => "full",
            Family::ModPow2 => "mod-pow2",
            Family::ModPow2Minus1 => "mod-pow2-minus1",
            Family::ModPow2Plus1 => "qdma",
        }
    }

    /// Short type label as used in adder comparison tables.
    pub fn type_label(self) -> &'static str {
        match self {
            Family::Full => "full",
            Family::ModPow2 => "2^n",
            Family::ModPow2Minus1 => "2^n-1",
            Family::ModPow2Plus1 => "2^n+1",
        }
    }

    pub fn min_n(self) -> u32 {
        match self {
            Family::ModPow2Minus1 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = AdderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Family::Full),
            "mod-pow2" | "pow2" => Ok(Family::ModPow2),
            "mod-pow2-minus1" | "pow2-minus1" => Ok(Family::ModPow2Minus1),
            "qdma" | "mod-pow2-plus1" | "pow2-plus1" => Ok(Family::ModPow2Plus1),
            other => Err(AdderError::UnknownFamily(other.to_string())),
        }
    }
}

/// A family plus size parameter. Everything needed to build the circuit and
/// to judge its outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdderSpec {
    pub family: Family,
    pub n: u32,
}

/// Widest size parameter accepted; keeps every operand within 64 bits and
/// every builder within the simulator's qubit limit.
pub const MAX_N: u32 = 40;

impl AdderSpec {
    pub fn new(family: Family, n: u32) -> Result<Self, AdderError> {
        if n < family.min_n() {
            return Err(AdderError::SizeTooSmall { family, n, min: family.min_n() });
        }
        if n > MAX_N {
            return Err(AdderError::SizeTooLarge(n));
        }
        Ok(Self { family, n })
    }

    /// Picks the adder family serving `modulus`. When a modulus fits more
    /// than one family the smallest `n` wins, so 3 maps to 2¹+1.
    pub fn for_modulus(modulus: u64) -> Result<Self, AdderError> {
        Self::for_modulus_with(modulus, false)
    }

    /// Like [`AdderSpec::for_modulus`], optionally forcing 3 onto the 2²−1
    /// adder for comparison runs.
    pub fn for_modulus_with(modulus: u64, three_as_minus1: bool) -> Result<Self, AdderError> {
        if three_as_minus1 && modulus == 3 {
            return Self::new(Family::ModPow2Minus1, 2);
        }
        let log2_exact = |v: u64| (v.is_power_of_two()).then(|| v.trailing_zeros());
        let mut candidates = Vec::new();
        if modulus >= 2 {
            if let Some(n) = log2_exact(modulus) {
                candidates.push((n, Family::ModPow2));
            }
            if let Some(n) = log2_exact(modulus - 1).filter(|&n| n >= 1) {
                candidates.push((n, Family::ModPow2Plus1));
            }
            if let Some(n) = modulus.checked_add(1).and_then(log2_exact).filter(|&n| n >= 2) {
                candidates.push((n, Family::ModPow2Minus1));
            }
        }
        let (n, family) = candidates.into_iter().min().ok_or(AdderError::UnsupportedModulus(modulus))?;
        Self::new(family, n)
    }

    /// The modulus of the adder; `None` for the full adder.
    pub fn modulus(&self) -> Option<u64> {
        let p = 1u64 << self.n;
        match self.family {
            Family::Full => None,
            Family::ModPow2 => Some(p),
            Family::ModPow2Minus1 => Some(p - 1),
            Family::ModPow2Plus1 => Some(p + 1),
        }
    }

    /// Number of legal operand values: operands range over `0..value_count()`.
    pub fn value_count(&self) -> u64 {
        self.modulus().unwrap_or(1u64 << self.n)
    }

    pub fn input_pairs(&self) -> u128 {
        let v = self.value_count() as u128;
        v * v
    }

    /// Basis encoding of an operand value as loaded into the input register.
    pub fn encode_operand(&self, value: u64) -> Result<u64, AdderError> {
        if value >= self.value_count() {
            return Err(AdderError::ValueOutOfRange { value, modulus: self.value_count() });
        }
        Ok(match self.family {
            Family::ModPow2Plus1 => dim1_encode(value, self.n)?.bits,
            _ => value,
        })
    }

    /// Interprets a measured output register as an integer result.
    pub fn decode_output(&self, bits: u64) -> u64 {
        match self.family {
            Family::ModPow2Plus1 => dim1_decode_lossy(bits, self.n),
            _ => bits,
        }
    }

    /// Classical result of the addition (a+b, or (a+b) mod m).
    pub fn expected_sum(&self, a: u64, b: u64) -> Result<u64, AdderError> {
        match self.modulus() {
            None => {
                let lim = self.value_count();
                for v in [a, b] {
                    if v >= lim {
                        return Err(AdderError::ValueOutOfRange { value: v, modulus: lim });
                    }
                }
                Ok(a + b)
            }
            Some(m) => classical_mod_add(a, b, m),
        }
    }

    /// The bit pattern a noiseless run leaves in the output register.
    pub fn expected_output(&self, a: u64, b: u64) -> Result<u64, AdderError> {
        let sum = self.expected_sum(a, b)?;
        Ok(match self.family {
            Family::ModPow2Plus1 => dim1_encode(sum, self.n)?.bits,
            _ => sum,
        })
    }

    pub fn build(&self) -> Circuit {
        match self.family {
            Family::Full => full_adder(self.n),
            Family::ModPow2 => mod_pow2(self.n),
            Family::ModPow2Minus1 => mod_pow2_minus1(self.n),
            Family::ModPow2Plus1 => qdma(self.n),
        }
    }

    pub fn label(&self) -> String {
        match self.modulus() {
            Some(m) => format!("mod {m} ({})", self.family.type_label()),
            None => format!("full adder n={}", self.n),
        }
    }
}

impl fmt::Display for AdderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.n)
    }
}

impl FromStr for AdderSpec {
    type Err = AdderError;

    /// Parses `family:n`, e.g. `qdma:3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (fam, n) = s.split_once(':').ok_or_else(|| AdderError::UnknownFamily(s.to_string()))?;
        let n = n.trim().parse::<u32>().map_err(|_| AdderError::UnknownFamily(s.to_string()))?;
        AdderSpec::new(fam.trim().parse()?, n)
    }
}

/// Modular sum for operands already reduced below `m`.
pub fn classical_mod_add(a: u64, b: u64, m: u64) -> Result<u64, AdderError> {
    for v in [a, b] {
        if v >= m {
            return Err(AdderError::ValueOutOfRange { value: v, modulus: m });
        }
    }
    let s = a as u128 + b as u128;
    let m = m as u128;
    Ok(if s < m {
        s as u64
    } else if s == m {
        0
    } else {
        (s % m) as u64
    })
}

/// A value modulo 2ⁿ+1 in diminished-1 form: v ≥ 1 is stored as v−1 and 0 is
/// stored as 2ⁿ (only the top bit set).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dim1Value {
    pub n: u32,
    pub bits: u64,
    pub value: u64,
}

pub fn dim1_encode(value: u64, n: u32) -> Result<Dim1Value, AdderError> {
    if n == 0 || n > MAX_N {
        return Err(AdderError::SizeTooSmall { family: Family::ModPow2Plus1, n, min: 1 });
    }
    let p = 1u64 << n;
    if value > p {
        return Err(AdderError::ValueOutOfRange { value, modulus: p + 1 });
    }
    let bits = if value == 0 { p } else { value - 1 };
    Ok(Dim1Value { n, bits, value })
}

/// Inverse of [`dim1_encode`]; rejects non-codewords.
pub fn dim1_decode(bits: u64, n: u32) -> Result<Dim1Value, AdderError> {
    let p = 1u64 << n;
    if bits > p {
        return Err(AdderError::ValueOutOfRange { value: bits, modulus: p + 1 });
    }
    let value = if bits == p { 0 } else { bits + 1 };
    Ok(Dim1Value { n, bits, value })
}

/// Decoding for noisy measurements: non-codewords (top bit set plus low
/// bits) are reduced modulo 2ⁿ+1 so every outcome maps to some residue.
fn dim1_decode_lossy(bits: u64, n: u32) -> u64 {
    let p = 1u64 << n;
    match dim1_decode(bits, n) {
        Ok(v) => v.value,
        Err(_) => (bits + 1) % (p + 1),
    }
}

/// In-place ripple-carry addition without input carry: `sum += addend`.
///
/// `addend` is restored; `carry`, if present, is XORed with the carry-out.
/// Uses 2m−1 Toffolis and no ancilla for an m-bit addend.
fn ripple_add(c: &mut Circuit, addend: &[usize], sum: &[usize], carry: Option<usize>) {
    let m = addend.len();
    assert_eq!(m, sum.len());
    let (a, b) = (addend, sum);
    match (m, carry) {
        (0, _) => {}
        (1, Some(z)) => {
            c.ccx(a[0], b[0], z);
            c.cx(a[0], b[0]);
        }
        (1, None) => {
            c.cx(a[0], b[0]);
        }
        (_, None) => {
            // The top carry only feeds the top sum bit, so add the low bits
            // with the top sum bit acting as the carry-out.
            ripple_add(c, &a[..m - 1], &b[..m - 1], Some(b[m - 1]));
            c.cx(a[m - 1], b[m - 1]);
        }
        (_, Some(z)) => {
            for i in 1..m {
                c.cx(a[i], b[i]);
            }
            c.cx(a[m - 1], z);
            for i in (1..m - 1).rev() {
                c.cx(a[i], a[i + 1]);
            }
            for i in 0..m - 1 {
                c.ccx(b[i], a[i], a[i + 1]);
            }
            c.ccx(b[m - 1], a[m - 1], z);
            for i in (1..m).rev() {
                c.cx(a[i], b[i]);
                c.ccx(b[i - 1], a[i - 1], a[i]);
            }
            for i in 1..m - 1 {
                c.cx(a[i], a[i + 1]);
            }
            for i in 0..m {
                c.cx(a[i], b[i]);
            }
        }
    }
}

fn range(lo: usize, len: usize) -> Vec<usize> {
    (lo..lo + len).collect()
}

/// n-bit full adder without input carry over 2n+1 qubits:
/// A (0..n) is restored, B (n..2n) receives the low sum bits and qubit 2n
/// the carry-out. The output operand `S` is B followed by the carry.
pub fn full_adder(n: u32) -> Circuit {
    let n = n as usize;
    let mut c = Circuit::new(format!("full adder n={n}"), 2 * n + 1);
    let a = range(0, n);
    let b = range(n, n);
    let z = 2 * n;
    c.add_register("A", 0, n - 1, RegisterRole::Input);
    c.add_register("B", n, 2 * n - 1, RegisterRole::Inout);
    c.add_register("carry", z, z, RegisterRole::Output);
    c.inputs = vec![Operand::new("A", a.clone()), Operand::new("B", b.clone())];
    let mut s = b.clone();
    s.push(z);
    c.output = Some(Operand::new("S", s));
    ripple_add(&mut c, &a, &b, Some(z));
    c
}

/// Modulo 2ⁿ adder over 2n qubits: the full adder with every carry-out
/// gate removed. A (0..n) receives M = (A+B) mod 2ⁿ; B passes unchanged.
pub fn mod_pow2(n: u32) -> Circuit {
    let n = n as usize;
    let mut c = Circuit::new(format!("mod {} adder (2^n, n={n})", 1u64 << n), 2 * n);
    let a = range(0, n);
    let b = range(n, n);
    c.add_register("A", 0, n - 1, RegisterRole::Inout);
    c.add_register("B", n, 2 * n - 1, RegisterRole::Input);
    c.inputs = vec![Operand::new("A", a.clone()), Operand::new("B", b.clone())];
    c.output = Some(Operand::new("M", a.clone()));
    ripple_add(&mut c, &b, &a, None);
    c
}

/// Modulo 2ⁿ−1 adder with end-around carry, operands in plain binary.
///
/// Two full ripple stages: A is added into B with carry-out `carry`, then the
/// carry is added back in at the LSB. A sum of exactly 2ⁿ−1 leaves B all-ones,
/// which is detected in E₀ and cleared. A passes unchanged; `carry` and E₀
/// are left dirty.
pub fn mod_pow2_minus1(n: u32) -> Circuit {
    let n = n as usize;
    let m = (1u64 << n) - 1;
    let mut c = Circuit::new(format!("mod {m} adder (2^n-1, n={n})"), 3 * n + 1);
    let a = range(0, n);
    let b = range(n, n);
    let z = 2 * n;
    let e = range(2 * n + 1, n);
    c.add_register("A", 0, n - 1, RegisterRole::Input);
    c.add_register("B", n, 2 * n - 1, RegisterRole::Inout);
    c.add_register("carry", z, z, RegisterRole::Ancilla);
    c.add_register("E", e[0], e[n - 1], RegisterRole::Ancilla);
    c.inputs = vec![Operand::new("A", a.clone()), Operand::new("B", b.clone())];
    c.output = Some(Operand::new("M", b.clone()));

    ripple_add(&mut c, &a, &b, Some(z));

    // End-around carry: a second full stage adds (0, …, 0, z) with its
    // carry-out in E₀, which stays 0 because the first sum never exceeds
    // 2ⁿ⁺¹-4.
    let mut addend = vec![z];
    addend.extend_from_slice(&e[1..]);
    ripple_add(&mut c, &addend, &b, Some(e[0]));

    // All-ones is the second code for zero: detect it in E₀ (partial
    // products staged in E₁.. and uncomputed), then clear B.
    if n == 2 {
        c.ccx(b[0], b[1], e[0]);
    } else {
        let scratch = &e[1..n - 1];
        c.ccx(b[0], b[1], scratch[0]);
        for i in 2..n - 1 {
            c.ccx(scratch[i - 2], b[i], scratch[i - 1]);
        }
        c.ccx(scratch[n - 3], b[n - 1], e[0]);
        for i in (2..n - 1).rev() {
            c.ccx(scratch[i - 2], b[i], scratch[i - 1]);
        }
        c.ccx(b[0], b[1], scratch[0]);
    }
    for &q in &b {
        c.cx(e[0], q);
    }
    c
}

/// Diminished-1 modulo 2ⁿ+1 adder (QDMA) over 3n+5 qubits.
///
/// Operands are (n+1)-bit diminished-1 codewords. The n low bits of B are
/// added into the low bits of A with carry-out `carry`; the partial product
/// ¬Aₙ·¬Bₙ·¬carry is formed in `partial` with two Toffolis and six NOTs; a
/// half-adder chain then adds it to (Aₙ·Bₙ, S), with the top carry and Aₙ·Bₙ
/// landing in `msb`. Output M is A's low bits followed by `msb`. B and Aₙ pass
/// unchanged.
pub fn qdma(n: u32) -> Circuit {
    let n = n as usize;
    let modulus = (1u64 << n) + 1;
    let width = 3 * n + 5;
    let mut c = Circuit::new(format!("mod {modulus} adder (2^n+1 diminished-1, n={n})"), width);
    let a = range(0, n + 1);
    let b = range(n + 1, n + 1);
    let carry = 2 * n + 2;
    let nand = 2 * n + 3;
    let partial = 2 * n + 4;
    let msb = 2 * n + 5;
    let ripple = range(2 * n + 6, n - 1);
    let (a_top, b_top) = (a[n], b[n]);

    if n > 0 {
        c.add_register("A", 0, n - 1, RegisterRole::Inout);
    }
    c.add_register("A_msb", n, n, RegisterRole::Input);
    c.add_register("B", n + 1, 2 * n + 1, RegisterRole::Input);
    c.add_register("carry", carry, carry, RegisterRole::Ancilla);
    c.add_register("nand", nand, nand, RegisterRole::Ancilla);
    c.add_register("partial", partial, partial, RegisterRole::Ancilla);
    c.add_register("msb", msb, msb, RegisterRole::Output);
    if n > 1 {
        c.add_register("ripple", ripple[0], ripple[n - 2], RegisterRole::Ancilla);
    }
    c.inputs = vec![Operand::new("A", a.clone()), Operand::new("B", b.clone())];
    let mut m_bits = a[..n].to_vec();
    m_bits.push(msb);
    c.output = Some(Operand::new("M", m_bits));

    // Sum of the low bits; A's low bits become S.
    ripple_add(&mut c, &b[..n], &a[..n], Some(carry));

    // partial = ¬Aₙ·¬Bₙ·¬carry
    for q in [a_top, b_top, carry] {
        c.x(q);
    }
    c.ccx(a_top, b_top, nand);
    c.ccx(nand, carry, partial);
    for q in [a_top, b_top, carry] {
        c.x(q);
    }

    // Half-adder chain for S + partial: k₁ = S₀·partial, kᵢ₊₁ = Sᵢ·kᵢ, with
    // the final carry folded into msb.
    let s = &a[..n];
    let carry_slot = |i: usize| if i == n { msb } else { ripple[i - 1] };
    c.ccx(s[0], partial, carry_slot(1));
    for (i, &si) in s.iter().enumerate().skip(1) {
        c.ccx(si, carry_slot(i), carry_slot(i + 1));
    }
    c.ccx(a_top, b_top, msb);
    for i in (1..n).rev() {
        c.cx(carry_slot(i), s[i]);
    }
    c.cx(partial, s[0]);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(spec: AdderSpec, a: u64, b: u64) -> u64 {
        let c = spec.build();
        let ea = spec.encode_operand(a).unwrap();
        let eb = spec.encode_operand(b).unwrap();
        let state = c.input("B").unwrap().pack(eb, c.input("A").unwrap().pack(ea, 0));
        c.output.as_ref().unwrap().extract(c.run_basis(state))
    }

    #[test]
    fn dim1_examples() {
        assert_eq!(dim1_encode(0, 3).unwrap().bits, 0b1000);
        assert_eq!(dim1_encode(1, 3).unwrap().bits, 0b0000);
        assert_eq!(dim1_encode(5, 3).unwrap().bits, 0b0100);
        assert!(dim1_encode(9, 3).is_err());
        for v in 0..=8 {
            assert_eq!(dim1_decode(dim1_encode(v, 3).unwrap().bits, 3).unwrap().value, v);
        }
        assert!(dim1_decode(0b1001, 3).is_err());
    }

    #[test]
    fn mod_add_examples() {
        assert_eq!(classical_mod_add(4, 7, 9).unwrap(), 2);
        assert_eq!(classical_mod_add(2, 1, 3).unwrap(), 0);
        assert_eq!(classical_mod_add(0, 0, 5).unwrap(), 0);
        assert!(classical_mod_add(9, 0, 9).is_err());
    }

    #[test]
    fn size_preconditions() {
        assert!(AdderSpec::new(Family::Full, 0).is_err());
        assert!(AdderSpec::new(Family::ModPow2, 0).is_err());
        assert!(AdderSpec::new(Family::ModPow2Minus1, 1).is_err());
        assert!(AdderSpec::new(Family::ModPow2Plus1, 0).is_err());
    }

    #[test]
    fn full_adder_examples() {
        let spec = AdderSpec::new(Family::Full, 5).unwrap();
        assert_eq!(spec.build().width(), 11);
        assert_eq!(run(spec, 17, 25), 42);
        assert_eq!(run(spec, 31, 1), 32);
        assert_eq!(AdderSpec::new(Family::Full, 9).unwrap().build().width(), 19);
    }

    #[test]
    fn mod_pow2_examples() {
        let one = mod_pow2(1);
        assert_eq!(one.gates(), &[crate::circuit::Gate::cnot(1, 0)]);
        assert_eq!(run(AdderSpec::new(Family::ModPow2, 2).unwrap(), 3, 2), 1);
        let r = mod_pow2(3).resource_report().unwrap();
        assert_eq!((r.toffoli_count, r.cnot_count, r.qubit_count), (3, 6, 6));
    }

    #[test]
    fn mod_pow2_minus1_examples() {
        let s2 = AdderSpec::new(Family::ModPow2Minus1, 2).unwrap();
        assert_eq!(run(s2, 2, 2), 1);
        let s3 = AdderSpec::new(Family::ModPow2Minus1, 3).unwrap();
        assert_eq!(run(s3, 6, 6), 5);
    }

    #[test]
    fn qdma_examples() {
        let s3 = AdderSpec::new(Family::ModPow2Plus1, 3).unwrap();
        let c = s3.build();
        let state = c.input("B").unwrap().pack(0b0110, c.input("A").unwrap().pack(0b0011, 0));
        assert_eq!(c.output.as_ref().unwrap().extract(c.run_basis(state)), 0b0001);
        let state = c.input("B").unwrap().pack(0b1000, c.input("A").unwrap().pack(0b1000, 0));
        assert_eq!(c.output.as_ref().unwrap().extract(c.run_basis(state)), 0b1000);
    }

    #[test]
    fn qdma_n1_matches_reference_resources() {
        let r = qdma(1).resource_report().unwrap();
        assert_eq!((r.toffoli_count, r.cnot_count, r.toffoli_depth, r.cnot_depth, r.qubit_count), (5, 2, 4, 2, 8));
        assert_eq!(r.not_count, 6);
    }

    #[test]
    fn family_for_modulus() {
        let fam = |m| AdderSpec::for_modulus(m).map(|s| (s.family, s.n));
        assert_eq!(fam(2), Ok((Family::ModPow2, 1)));
        assert_eq!(fam(3), Ok((Family::ModPow2Plus1, 1)));
        assert_eq!(fam(4), Ok((Family::ModPow2, 2)));
        assert_eq!(fam(5), Ok((Family::ModPow2Plus1, 2)));
        assert_eq!(fam(7), Ok((Family::ModPow2Minus1, 3)));
        assert_eq!(fam(8), Ok((Family::ModPow2, 3)));
        assert_eq!(fam(9), Ok((Family::ModPow2Plus1, 3)));
        assert_eq!(fam(15), Ok((Family::ModPow2Minus1, 4)));
        assert!(fam(6).is_err());
        assert!(fam(1).is_err());
        let forced = AdderSpec::for_modulus_with(3, true).unwrap();
        assert_eq!((forced.family, forced.n), (Family::ModPow2Minus1, 2));
    }

    #[test]
    fn spec_parse() {
        let s: AdderSpec = "qdma:3".parse().unwrap();
        assert_eq!(s, AdderSpec::new(Family::ModPow2Plus1, 3).unwrap());
        assert_eq!(s.to_string().parse::<AdderSpec>().unwrap(), s);
        assert!("full:0".parse::<AdderSpec>().is_err());
        assert!("bogus:2".parse::<AdderSpec>().is_err());
    }

    #[test]
    fn builders_validate() {
        for fam in [Family::Full, Family::ModPow2, Family::ModPow2Minus1, Family::ModPow2Plus1] {
            for n in fam.min_n()..=8 {
                let c = AdderSpec::new(fam, n).unwrap().build();
                assert!(c.validate().is_ok(), "{fam} n={n}: {:?}", c.validate());
            }
        }
    }
}
