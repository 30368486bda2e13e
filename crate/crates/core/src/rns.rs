//! Residue number system arithmetic over 2ⁿ−1, 2ⁿ and 2ⁿ+1 moduli.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::adders::{AdderError, AdderSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RnsError {
    #[error("moduli set is empty")]
    Empty,
    #[error("modulus {0} must be at least 2")]
    ModulusTooSmall(u64),
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("range of {0:?} overflows 64 bits")]
    Overflow(Vec<u64>),
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error("{value} is outside [0, {range})")]
    OutOfRange { value: u64, range: u64 },
    #[error("residue {residue} is not below modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("expected {expected} residues, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("K must be at least 1")]
    ZeroK,
}

/// Ordered, pairwise-coprime moduli, each served by one adder family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsSet {
    moduli: Vec<u64>,
    adders: Vec<AdderSpec>,
    range: u64,
}

impl RnsSet {
    pub fn new(moduli: &[u64]) -> Result<Self, RnsError> {
        Self::with_options(moduli, false)
    }

    /// `three_as_minus1` routes modulus 3 to the 2²−1 adder instead of the
    /// diminished-1 2¹+1 adder.
    pub fn with_options(moduli: &[u64], three_as_minus1: bool) -> Result<Self, RnsError> {
        if moduli.is_empty() {
            return Err(RnsError::Empty);
        }
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(RnsError::ModulusTooSmall(m));
        }
        for (i, &x) in moduli.iter().enumerate() {
            for &y in &moduli[i + 1..] {
                if x.gcd(&y) != 1 {
                    return Err(RnsError::NotCoprime(x, y));
                }
            }
        }
        let range = checked_product(moduli).ok_or_else(|| RnsError::Overflow(moduli.to_vec()))?;
        let adders =
            moduli.iter().map(|&m| AdderSpec::for_modulus_with(m, three_as_minus1)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { moduli: moduli.to_vec(), adders, range })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn adders(&self) -> &[AdderSpec] {
        &self.adders
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn efficiency(&self, k: u64) -> Result<Efficiency, RnsError> {
        rns_efficiency(self, k)
    }

    pub fn encode(&self, x: u64) -> Result<ResidueVector, RnsError> {
        encode_residues(x, self)
    }
}

impl fmt::Display for RnsSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RnsSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.moduli.serialize(s)
    }
}

fn checked_product(values: &[u64]) -> Option<u64> {
    values.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m))
}

/// Product of the moduli, with overflow detection.
pub fn rns_range(moduli: &[u64]) -> Result<u64, RnsError> {
    checked_product(moduli).ok_or_else(|| RnsError::Overflow(moduli.to_vec()))
}

pub fn is_pairwise_coprime(moduli: &[u64]) -> bool {
    moduli.iter().enumerate().all(|(i, x)| moduli[i + 1..].iter().all(|y| x.gcd(y) == 1))
}

/// Range/K capped at 1, kept as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Efficiency(pub Ratio<u64>);

impl Efficiency {
    pub fn as_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.as_f64()
    }

    /// Percentage rounded to two decimals, e.g. `98.44`.
    pub fn percent_string(&self) -> String {
        format!("{:.2}", self.percent())
    }
}

pub fn rns_efficiency(set: &RnsSet, k: u64) -> Result<Efficiency, RnsError> {
    if k == 0 {
        return Err(RnsError::ZeroK);
    }
    let r = Ratio::new(set.range().min(k), k);
    Ok(Efficiency(r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueVector {
    pub set: RnsSet,
    pub residues: Vec<u64>,
}

impl ResidueVector {
    pub fn new(set: &RnsSet, residues: Vec<u64>) -> Result<Self, RnsError> {
        if residues.len() != set.len() {
            return Err(RnsError::LengthMismatch { expected: set.len(), found: residues.len() });
        }
        for (&r, &m) in residues.iter().zip(set.moduli()) {
            if r >= m {
                return Err(RnsError::ResidueOutOfRange { residue: r, modulus: m });
            }
        }
        Ok(Self { set: set.clone(), residues })
    }

    /// Component-wise modular sum.
    pub fn add(&self, other: &ResidueVector) -> Result<ResidueVector, RnsError> {
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.set.moduli())
            .map(|((&a, &b), &m)| ((a as u128 + b as u128) % m as u128) as u64)
            .collect();
        ResidueVector::new(&self.set, residues)
    }
}

pub fn encode_residues(x: u64, set: &RnsSet) -> Result<ResidueVector, RnsError> {
    if x >= set.range() {
        return Err(RnsError::OutOfRange { value: x, range: set.range() });
    }
    Ok(ResidueVector { set: set.clone(), residues: set.moduli().iter().map(|&m| x % m).collect() })
}

/// Modular inverse of `a` modulo `m` via the extended Euclidean algorithm.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

/// Garner's mixed-radix reconstruction.
pub fn crt_reconstruct(rv: &ResidueVector) -> Result<u64, RnsError> {
    let moduli = rv.set.moduli();
    if rv.residues.len() != moduli.len() {
        return Err(RnsError::LengthMismatch { expected: moduli.len(), found: rv.residues.len() });
    }
    for (&r, &m) in rv.residues.iter().zip(moduli) {
        if r >= m {
            return Err(RnsError::ResidueOutOfRange { residue: r, modulus: m });
        }
    }
    // x = v₀ + v₁·m₀ + v₂·m₀m₁ + …
    let mut digits: Vec<u64> = Vec::with_capacity(moduli.len());
    for (&r, &m) in rv.residues.iter().zip(moduli) {
        let mut v = r as u128;
        let m128 = m as u128;
        for (j, &d) in digits.iter().enumerate() {
            let mj = moduli[j];
            let inv = mod_inverse(mj % m, m).expect("moduli are pairwise coprime") as u128;
            v = ((v + m128 - (d as u128 % m128)) % m128) * inv % m128;
        }
        digits.push(v as u64);
    }
    let mut x: u128 = 0;
    let mut radix: u128 = 1;
    for (&d, &m) in digits.iter().zip(moduli) {
        x += d as u128 * radix;
        radix *= m as u128;
    }
    Ok(x as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(m: &[u64]) -> RnsSet {
        RnsSet::new(m).unwrap()
    }

    /// Linear scan for the unique x in [0, range) matching every congruence.
    fn brute_force_crt(residues: &[u64], moduli: &[u64]) -> u64 {
        let range: u64 = moduli.iter().product();
        (0..range).find(|x| residues.iter().zip(moduli).all(|(&r, &m)| x % m == r)).unwrap()
    }

    #[test]
    fn range_examples() {
        assert_eq!(set(&[3, 4, 5]).range(), 60);
        assert_eq!(set(&[5, 8, 9]).range(), 360);
        assert_eq!(set(&[7, 8, 9]).range(), 504);
        assert!(matches!(rns_range(&[u64::MAX, 3]), Err(RnsError::Overflow(_))));
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(set(&[3, 4, 5]).efficiency(64).unwrap().0, Ratio::new(15, 16));
        assert_eq!(set(&[3, 4, 5]).efficiency(64).unwrap().percent_string(), "93.75");
        let e = set(&[7, 8, 9]).efficiency(512).unwrap();
        assert_eq!(e.0, Ratio::new(504, 512));
        assert_eq!(e.percent_string(), "98.44");
        assert_eq!(set(&[5, 8, 9]).efficiency(256).unwrap().0, Ratio::from_integer(1));
        assert_eq!(set(&[3, 4, 5]).efficiency(0), Err(RnsError::ZeroK));
    }

    #[test]
    fn coprime_examples() {
        assert!(is_pairwise_coprime(&[3, 4, 5]));
        assert!(!is_pairwise_coprime(&[3, 9, 4]));
        assert!(is_pairwise_coprime(&[5, 7, 8, 9]));
        assert_eq!(RnsSet::new(&[3, 9, 4]), Err(RnsError::NotCoprime(3, 9)));
        assert!(matches!(RnsSet::new(&[6, 5]), Err(RnsError::Adder(_))));
    }

    #[test]
    fn encode_examples() {
        let s = set(&[3, 4, 5]);
        assert_eq!(s.encode(23).unwrap().residues, vec![2, 3, 3]);
        assert_eq!(s.encode(0).unwrap().residues, vec![0, 0, 0]);
        assert_eq!(s.encode(59).unwrap().residues, vec![2, 3, 4]);
        assert!(s.encode(60).is_err());
    }

    #[test]
    fn crt_examples() {
        let s = set(&[3, 4, 5]);
        let expected = brute_force_crt(&[2, 3, 3], &[3, 4, 5]);
        assert_eq!(expected, 23);
        assert_eq!(crt_reconstruct(&ResidueVector::new(&s, vec![2, 3, 3]).unwrap()).unwrap(), 23);
        assert_eq!(crt_reconstruct(&ResidueVector::new(&s, vec![0, 0, 0]).unwrap()).unwrap(), 0);
        assert_eq!(brute_force_crt(&[0, 2, 2], &[3, 4, 5]), 42);
        assert_eq!(crt_reconstruct(&ResidueVector::new(&s, vec![0, 2, 2]).unwrap()).unwrap(), 42);
        assert!(ResidueVector::new(&s, vec![3, 0, 0]).is_err());
    }

    #[test]
    fn crt_matches_brute_force() {
        for m in [&[2u64, 3, 5][..], &[4, 5, 9], &[7, 8, 9], &[3, 5, 8]] {
            let s = set(m);
            for x in (0..s.range()).step_by(7) {
                let rv = s.encode(x).unwrap();
                assert_eq!(brute_force_crt(&rv.residues, m), x);
                assert_eq!(crt_reconstruct(&rv).unwrap(), x);
            }
        }
    }

    #[test]
    fn round_trip_exhaustive() {
        for m in [&[5u64, 7, 8, 9][..], &[15, 16, 17], &[31, 32, 33, 7]] {
            let s = set(m);
            let limit = s.range().min(100_000);
            for x in 0..limit {
                assert_eq!(crt_reconstruct(&s.encode(x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn large_moduli_do_not_overflow() {
        let s = set(&[(1 << 21) - 1, 1 << 21, (1 << 21) + 1]);
        let x = s.range() - 1;
        assert_eq!(crt_reconstruct(&s.encode(x).unwrap()).unwrap(), x);
    }

    proptest! {
        #[test]
        fn efficiency_non_increasing_in_k(k1 in 1u64..5000, dk in 0u64..5000) {
            let s = set(&[5, 7, 8, 9]);
            let e1 = s.efficiency(k1).unwrap();
            let e2 = s.efficiency(k1 + dk).unwrap();
            prop_assert!(e2 <= e1);
            prop_assert!(e1.0 <= Ratio::from_integer(1));
        }

        #[test]
        fn homomorphic_addition(x in 0u64..2520, y in 0u64..2520) {
            let s = set(&[5, 7, 8, 9]);
            let sum = s.encode(x).unwrap().add(&s.encode(y).unwrap()).unwrap();
            prop_assert_eq!(crt_reconstruct(&sum).unwrap(), (x + y) % 2520);
        }
    }
}
