//! Published reference values (paper-reported), kept read-only and shown
//! next to measured values in reports. Never used as expected outputs of the
//! simulator.

use crate::adders::Family;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub modulus: u64,
    pub family: Family,
    pub n: u32,
    pub qubits: usize,
    pub toffoli_depth: usize,
    pub cnot_depth: usize,
    pub toffoli_count: usize,
    pub cnot_count: usize,
    pub output_probability: f64,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    modulus: u64,
    family: Family,
    n: u32,
    qubits: usize,
    toffoli_depth: usize,
    cnot_depth: usize,
    toffoli_count: usize,
    cnot_count: usize,
    output_probability: f64,
) -> Table1Row {
    Table1Row { modulus, family, n, qubits, toffoli_depth, cnot_depth, toffoli_count, cnot_count, output_probability }
}

/// Modulo adder comparison, in published row order.
pub const TABLE1: [Table1Row; 8] = [
    row(2, Family::ModPow2, 1, 2, 0, 1, 0, 1, 0.995),
    row(3, Family::ModPow2Minus1, 2, 7, 6, 7, 8, 8, 0.912),
    row(3, Family::ModPow2Plus1, 1, 8, 4, 2, 5, 2, 0.964),
    row(4, Family::ModPow2, 2, 4, 1, 1, 1, 2, 0.985),
    row(5, Family::ModPow2Plus1, 2, 11, 6, 5, 8, 7, 0.931),
    row(7, Family::ModPow2Minus1, 3, 10, 12, 10, 14, 12, 0.865),
    row(8, Family::ModPow2, 3, 6, 3, 4, 3, 6, 0.966),
    row(9, Family::ModPow2Plus1, 3, 14, 9, 7, 11, 13, 0.893),
];

/// Toffoli depth of the default adder for `modulus` (3 → diminished-1).
pub fn table1_toffoli_depth(modulus: u64) -> Option<usize> {
    let preferred = TABLE1
        .iter()
        .find(|r| r.modulus == modulus && r.family != Family::ModPow2Minus1)
        .or_else(|| TABLE1.iter().find(|r| r.modulus == modulus));
    preferred.map(|r| r.toffoli_depth)
}

pub fn table1_row(modulus: u64, family: Family) -> Option<&'static Table1Row> {
    TABLE1.iter().find(|r| r.modulus == modulus && r.family == family)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub size: u32,
    pub mono_qubits: usize,
    pub mono_toffoli_depth: usize,
    pub mono_cnot_depth: usize,
    pub mono_probability: Option<f64>,
    pub rns_set: &'static [u64],
    pub efficiency_percent: f64,
    pub max_qubits: usize,
    pub max_toffoli_depth: usize,
    pub max_cnot_depth: usize,
    pub rns_probability: f64,
    pub gain_percent: Option<f64>,
}

/// Monolithic full adder versus distributed RNS addition, sizes 6 to 11.
pub const TABLE2: [Table2Row; 6] = [
    Table2Row {
        size: 6,
        mono_qubits: 11,
        mono_toffoli_depth: 9,
        mono_cnot_depth: 13,
        mono_probability: Some(0.836),
        rns_set: &[3, 4, 5],
        efficiency_percent: 93.75,
        max_qubits: 11,
        max_toffoli_depth: 6,
        max_cnot_depth: 5,
        rns_probability: 0.931,
        gain_percent: Some(11.36),
    },
    Table2Row {
        size: 7,
        mono_qubits: 13,
        mono_toffoli_depth: 11,
        mono_cnot_depth: 16,
        mono_probability: Some(0.702),
        rns_set: &[4, 5, 9],
        efficiency_percent: 100.0,
        max_qubits: 14,
        max_toffoli_depth: 9,
        max_cnot_depth: 7,
        rns_probability: 0.893,
        gain_percent: Some(27.21),
    },
    Table2Row {
        size: 8,
        mono_qubits: 15,
        mono_toffoli_depth: 13,
        mono_cnot_depth: 19,
        mono_probability: Some(0.595),
        rns_set: &[5, 8, 9],
        efficiency_percent: 100.0,
        max_qubits: 14,
        max_toffoli_depth: 9,
        max_cnot_depth: 7,
        rns_probability: 0.893,
        gain_percent: Some(50.08),
    },
    Table2Row {
        size: 9,
        mono_qubits: 17,
        mono_toffoli_depth: 15,
        mono_cnot_depth: 22,
        mono_probability: Some(0.481),
        rns_set: &[7, 8, 9],
        efficiency_percent: 98.44,
        max_qubits: 14,
        max_toffoli_depth: 12,
        max_cnot_depth: 10,
        rns_probability: 0.862,
        gain_percent: Some(79.21),
    },
    Table2Row {
        size: 10,
        mono_qubits: 19,
        mono_toffoli_depth: 17,
        mono_cnot_depth: 25,
        mono_probability: Some(0.371),
        rns_set: &[4, 5, 7, 9],
        efficiency_percent: 100.0,
        max_qubits: 14,
        max_toffoli_depth: 12,
        max_cnot_depth: 10,
        rns_probability: 0.865,
        gain_percent: Some(133.15),
    },
    Table2Row {
        size: 11,
        mono_qubits: 21,
        mono_toffoli_depth: 19,
        mono_cnot_depth: 28,
        mono_probability: None,
        rns_set: &[5, 7, 8, 9],
        efficiency_percent: 100.0,
        max_qubits: 14,
        max_toffoli_depth: 12,
        max_cnot_depth: 10,
        rns_probability: 0.865,
        gain_percent: None,
    },
];

pub fn table2_row(size: u32) -> Option<&'static Table2Row> {
    TABLE2.iter().find(|r| r.size == size)
}

/// Device qubit budget used to mark monolithic adders as not runnable.
pub const DEFAULT_QUBIT_BUDGET: usize = 20;
