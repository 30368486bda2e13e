//! Noiseless and Monte-Carlo noisy simulation of permutation circuits.
//!
//! Every gate is NOT, CNOT or Toffoli and inputs are basis states, so a shot
//! is a single bitstring trajectory. Noise is attached to gates: after a gate
//! of kind `k` acts, an error event fires with probability `p_k`, and each
//! qubit the gate touches is then flipped independently with probability ½.
//! Phase errors are not modelled; on basis-state inputs to permutation
//! circuits they only contribute a global phase.
//!
//! Each shot consumes exactly one `u64` per gate from its stream, so runs
//! with different noise strengths share random numbers (common random
//! numbers), which keeps calibration objectives stable.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adders::{AdderError, AdderSpec};
use crate::circuit::{Circuit, CircuitError, Gate, GateKind};

/// Shots per independent RNG stream.
pub const SHOT_BLOCK: u64 = 256;
/// Largest input-pair count evaluated exhaustively.
pub const EXHAUSTIVE_PAIR_CAP: u128 = 1 << 12;
/// Random input pairs drawn when the pair space exceeds the cap.
pub const DEFAULT_SAMPLE_PAIRS: usize = 256;
pub const DEFAULT_MODULAR_SHOTS: u64 = 100;
pub const DEFAULT_FULL_ADDER_SHOTS: u64 = 200;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error("circuit has no input operand `{0}`")]
    UnknownInput(String),
    #[error("input operand `{0}` is not assigned")]
    MissingInput(String),
    #[error("value {value} does not fit in the {bits}-bit operand `{name}`")]
    InputTooWide { name: String, value: u64, bits: usize },
    #[error("circuit declares no output operand")]
    NoOutput,
    #[error("shots must be at least 1")]
    NoShots,
    #[error("noise probability {name} = {value} outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
    #[error("exhaustive sampling of {0} input pairs exceeds the cap of {EXHAUSTIVE_PAIR_CAP}")]
    TooManyPairs(u128),
    #[error("calibration needs at least 3 targets, got {0}")]
    InsufficientTargets(usize),
    #[error("noise file line {line}: {message}")]
    NoiseParse { line: usize, message: String },
}

/// Per-gate-kind error-event probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_not: f64,
    pub p_cnot: f64,
    pub p_toffoli: f64,
}

impl NoiseModel {
    pub const fn zero() -> Self {
        Self { p_not: 0.0, p_cnot: 0.0, p_toffoli: 0.0 }
    }

    /// Model fitted to the eight published modulo-adder output probabilities
    /// with [`calibrate_noise`] at 10 000 shots per input pair, seed 2024.
    /// Re-derive with `cargo run --release --example calibrate`.
    pub const fn calibrated() -> Self {
        Self { p_not: 0.017_031_25, p_cnot: 0.009_921_875, p_toffoli: 0.002_5 }
    }

    pub fn new(p_not: f64, p_cnot: f64, p_toffoli: f64) -> Result<Self, SimError> {
        let m = Self { p_not, p_cnot, p_toffoli };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in self.fields() {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::BadProbability { name, value });
            }
        }
        Ok(())
    }

    fn fields(&self) -> [(&'static str, f64); 3] {
        [("p_not", self.p_not), ("p_cnot", self.p_cnot), ("p_toffoli", self.p_toffoli)]
    }

    pub fn probability(&self, kind: GateKind) -> f64 {
        match kind {
            GateKind::Not => self.p_not,
            GateKind::Cnot => self.p_cnot,
            GateKind::Toffoli => self.p_toffoli,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fields().iter().all(|(_, p)| *p == 0.0)
    }

    /// Key-value text form, one `key = value` per line.
    pub fn to_text(&self) -> String {
        self.fields().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        let mut m = Self::zero();
        let mut seen = [false; 3];
        for (idx, raw) in text.lines().enumerate() {
            let err = |message: String| SimError::NoiseParse { line: idx + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let v: f64 = v.trim().parse().map_err(|_| err(format!("bad number `{}`", v.trim())))?;
            let slot = match k.trim() {
                "p_not" => 0,
                "p_cnot" => 1,
                "p_toffoli" => 2,
                other => return Err(err(format!("unknown key `{other}`"))),
            };
            seen[slot] = true;
            match slot {
                0 => m.p_not = v,
                1 => m.p_cnot = v,
                _ => m.p_toffoli = v,
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(SimError::NoiseParse { line: 0, message: format!("missing `{}`", m.fields()[i].0) });
        }
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p_not={} p_cnot={} p_toffoli={}", self.p_not, self.p_cnot, self.p_toffoli)
    }
}

impl FromStr for NoiseModel {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_text(s)
    }
}

/// Splitmix64 finalizer; used to derive independent stream seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ a) ^ b.rotate_left(32))
}

fn stream(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, a, b))
}

/// Gates paired with their error probability, ready for trajectories.
struct NoisyProgram {
    ops: Vec<(Gate, f64)>,
    noiseless: bool,
}

impl NoisyProgram {
    fn new(circuit: &Circuit, noise: &NoiseModel) -> Self {
        Self {
            ops: circuit.gates().iter().map(|g| (*g, noise.probability(g.kind()))).collect(),
            noiseless: noise.is_zero(),
        }
    }

    #[inline]
    fn shot(&self, mut state: u128, rng: &mut impl RngCore) -> u128 {
        for &(gate, p) in &self.ops {
            state = gate.apply(state);
            if self.noiseless {
                continue;
            }
            let r = rng.next_u64();
            let u = (r >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u < p {
                for (i, &q) in gate.qubits().iter().enumerate() {
                    if r >> i & 1 == 1 {
                        state ^= 1u128 << q;
                    }
                }
            }
        }
        state
    }
}

fn checked_circuit(circuit: &Circuit) -> Result<(), SimError> {
    circuit.validate().map_err(|e| SimError::Circuit(CircuitError::Invalid(e)))
}

/// Packs named operand values into a basis state; every input operand must
/// be assigned and all other qubits start at zero.
pub fn initial_state(circuit: &Circuit, inputs: &[(&str, u64)]) -> Result<u128, SimError> {
    for (name, _) in inputs {
        if circuit.input(name).is_none() {
            return Err(SimError::UnknownInput(name.to_string()));
        }
    }
    let mut state = 0u128;
    for op in &circuit.inputs {
        let (_, value) =
            inputs.iter().find(|(n, _)| *n == op.name).ok_or_else(|| SimError::MissingInput(op.name.clone()))?;
        let bits = op.qubits.len();
        if bits < 64 && *value >> bits != 0 {
            return Err(SimError::InputTooWide { name: op.name.clone(), value: *value, bits });
        }
        state = op.pack(*value, state);
    }
    Ok(state)
}

/// Noiseless run; returns the value of the output operand.
pub fn run_exact(circuit: &Circuit, inputs: &[(&str, u64)]) -> Result<u64, SimError> {
    checked_circuit(circuit)?;
    let output = circuit.output.as_ref().ok_or(SimError::NoOutput)?;
    let state = initial_state(circuit, inputs)?;
    Ok(output.extract(circuit.run_basis(state)))
}

pub type Histogram = BTreeMap<u64, u64>;

/// Noisy shots on one input assignment; histogram of output-operand values.
pub fn run_shots(
    circuit: &Circuit,
    inputs: &[(&str, u64)],
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Histogram, SimError> {
    checked_circuit(circuit)?;
    noise.validate()?;
    if shots == 0 {
        return Err(SimError::NoShots);
    }
    let output = circuit.output.as_ref().ok_or(SimError::NoOutput)?;
    let state = initial_state(circuit, inputs)?;
    let program = NoisyProgram::new(circuit, noise);
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let partial: Vec<Histogram> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = stream(seed, 0, block);
            let n = SHOT_BLOCK.min(shots - block * SHOT_BLOCK);
            let mut h = Histogram::new();
            for _ in 0..n {
                *h.entry(output.extract(program.shot(state, &mut rng))).or_default() += 1;
            }
            h
        })
        .collect();
    let mut hist = Histogram::new();
    for h in partial {
        for (k, v) in h {
            *hist.entry(k).or_default() += v;
        }
    }
    Ok(hist)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "pairs", rename_all = "lowercase")]
pub enum Sampling {
    Exhaustive,
    Random(usize),
}

impl Sampling {
    /// Exhaustive up to the cap, otherwise a random sample.
    pub fn auto(pairs: u128) -> Self {
        if pairs <= EXHAUSTIVE_PAIR_CAP {
            Sampling::Exhaustive
        } else {
            Sampling::Random(DEFAULT_SAMPLE_PAIRS)
        }
    }
}

/// Output-probability workload for one adder circuit.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub adder: AdderSpec,
    pub circuit: Circuit,
    pub shots: u64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl RunSpec {
    /// Builds the adder and applies the default shot count and sampling.
    pub fn for_adder(adder: AdderSpec, seed: u64) -> Self {
        let shots = match adder.family {
            crate::adders::Family::Full => DEFAULT_FULL_ADDER_SHOTS,
            _ => DEFAULT_MODULAR_SHOTS,
        };
        Self { circuit: adder.build(), sampling: Sampling::auto(adder.input_pairs()), adder, shots, seed }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    /// Operand value pairs this spec evaluates, in a fixed order.
    pub fn input_pairs(&self) -> Result<Vec<(u64, u64)>, SimError> {
        let v = self.adder.value_count();
        match self.sampling {
            Sampling::Exhaustive => {
                let total = self.adder.input_pairs();
                if total > EXHAUSTIVE_PAIR_CAP {
                    return Err(SimError::TooManyPairs(total));
                }
                Ok((0..v).flat_map(|a| (0..v).map(move |b| (a, b))).collect())
            }
            Sampling::Random(count) => {
                let mut rng = stream(self.seed, u64::MAX, 0);
                Ok((0..count).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairProbability {
    pub a: u64,
    pub b: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub mean: f64,
    pub pairs: Vec<PairProbability>,
    pub shots: u64,
    pub seed: u64,
    /// Binomial bound sqrt(0.25/shots) on each per-pair estimate.
    pub pair_std_error_bound: f64,
    /// Binomial standard error of the mean over all evaluated shots.
    pub std_error: f64,
}

impl ProbabilityEstimate {
    pub fn total_shots(&self) -> u64 {
        self.shots * self.pairs.len() as u64
    }
}

/// Mean fraction of shots whose output equals the classical result,
/// averaged over input pairs.
pub fn output_probability(spec: &RunSpec, noise: &NoiseModel) -> Result<ProbabilityEstimate, SimError> {
    checked_circuit(&spec.circuit)?;
    noise.validate()?;
    if spec.shots == 0 {
        return Err(SimError::NoShots);
    }
    let output = spec.circuit.output.as_ref().ok_or(SimError::NoOutput)?;
    let pairs = spec.input_pairs()?;
    let mut prepared = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let state = initial_state(
            &spec.circuit,
            &[("A", spec.adder.encode_operand(a)?), ("B", spec.adder.encode_operand(b)?)],
        )?;
        prepared.push((state, spec.adder.expected_output(a, b)?));
    }
    let program = NoisyProgram::new(&spec.circuit, noise);
    let blocks = spec.shots.div_ceil(SHOT_BLOCK);
    let shots = spec.shots;
    let correct: Vec<u64> = (0..prepared.len() * blocks as usize)
        .into_par_iter()
        .map(|job| {
            let (pair, block) = (job / blocks as usize, job as u64 % blocks);
            let (state, expected) = prepared[pair];
            let mut rng = stream(spec.seed, pair as u64, block);
            let n = SHOT_BLOCK.min(shots - block * SHOT_BLOCK);
            (0..n).filter(|_| output.extract(program.shot(state, &mut rng)) == expected).count() as u64
        })
        .collect();
    let per_pair: Vec<PairProbability> = pairs
        .iter()
        .zip(correct.chunks(blocks as usize))
        .map(|(&(a, b), c)| PairProbability { a, b, probability: c.iter().sum::<u64>() as f64 / shots as f64 })
        .collect();
    let mean = per_pair.iter().map(|p| p.probability).sum::<f64>() / per_pair.len() as f64;
    let total = (shots * per_pair.len() as u64) as f64;
    Ok(ProbabilityEstimate {
        mean,
        pairs: per_pair,
        shots,
        seed: spec.seed,
        pair_std_error_bound: (0.25 / shots as f64).sqrt(),
        std_error: (mean * (1.0 - mean) / total).sqrt(),
    })
}

#[derive(Clone, Debug)]
pub struct CalibrationTarget {
    pub spec: RunSpec,
    pub observed: f64,
}

#[derive(Clone, Debug)]
pub struct CalibrationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iterations: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { initial_step: 0.01, min_step: 1e-5, max_iterations: 400 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub model: NoiseModel,
    /// Sum of squared differences between simulated and target probabilities.
    pub residual: f64,
    pub predictions: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration cap was hit before the step size converged.
    pub converged: bool,
}

/// Calibration targets from published modulo-adder rows.
pub fn reference_targets(
    rows: &[crate::reference::Table1Row],
    shots: u64,
    seed: u64,
) -> Result<Vec<CalibrationTarget>, SimError> {
    rows.iter()
        .map(|r| {
            let adder = AdderSpec::new(r.family, r.n)?;
            Ok(CalibrationTarget {
                spec: RunSpec::for_adder(adder, seed).with_shots(shots),
                observed: r.output_probability,
            })
        })
        .collect()
}

fn objective(targets: &[CalibrationTarget], model: &NoiseModel) -> Result<(f64, Vec<f64>), SimError> {
    let mut sse = 0.0;
    let mut preds = Vec::with_capacity(targets.len());
    for t in targets {
        let p = output_probability(&t.spec, model)?.mean;
        sse += (p - t.observed).powi(2);
        preds.push(p);
    }
    Ok((sse, preds))
}

/// Fits (p_not, p_cnot, p_toffoli) by coordinate search on the squared
/// error between simulated and observed output probabilities.
pub fn calibrate_noise(targets: &[CalibrationTarget], opts: &CalibrationOptions) -> Result<Calibration, SimError> {
    if targets.len() < 3 {
        return Err(SimError::InsufficientTargets(targets.len()));
    }
    let mut params = [0.0f64; 3];
    let to_model = |p: &[f64; 3]| NoiseModel { p_not: p[0], p_cnot: p[1], p_toffoli: p[2] };
    let (mut best, mut preds) = objective(targets, &to_model(&params))?;
    let mut step = opts.initial_step;
    let mut iterations = 0;
    while step >= opts.min_step && iterations < opts.max_iterations {
        let mut improved = false;
        for i in 0..3 {
            for dir in [1.0, -1.0] {
                iterations += 1;
                let mut trial = params;
                trial[i] = (trial[i] + dir * step).clamp(0.0, 1.0);
                if trial[i] == params[i] {
                    continue;
                }
                let (value, p) = objective(targets, &to_model(&trial))?;
                if value < best {
                    best = value;
                    preds = p;
                    params = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(Calibration {
        model: to_model(&params),
        residual: best,
        predictions: preds,
        iterations,
        converged: step < opts.min_step,
    })
}
