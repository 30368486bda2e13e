//! Distributed residue addition: one independent job per modulus, executed
//! on a bounded worker pool and recombined classically by CRT.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adders::{AdderError, AdderSpec, Family};
use crate::circuit::Circuit;
use crate::reference::DEFAULT_QUBIT_BUDGET;
use crate::rns::{crt_reconstruct, Efficiency, ResidueVector, RnsError, RnsSet};
use crate::select::{select_rns, SelectError, SelectorConfig};
use crate::sim::{
    derive_seed, output_probability, run_shots, Histogram, NoiseModel, ProbabilityEstimate, RunSpec, SimError,
};

#[derive(Debug, Error)]
pub enum DqcError {
    #[error("a + b = {sum} is not representable in range {range}")]
    RangeOverflow { sum: u128, range: u64 },
    #[error("operand {value} is outside [0, {range})")]
    OperandOutOfRange { value: u64, range: u64 },
    #[error("no result for modulus {0}")]
    MissingResult(u64),
    #[error("job {id} (mod {modulus}) failed: {message}")]
    JobFailed { id: usize, modulus: u64, message: String },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("adder size must be at least 6, got {0}")]
    SizeTooSmall(u32),
    #[error(transparent)]
    Rns(#[from] RnsError),
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Everything a remote executor would need to run one residue addition.
#[derive(Clone, Debug, Serialize)]
pub struct ResidueJob {
    pub id: usize,
    pub modulus: u64,
    #[serde(rename = "adder", serialize_with = "ser_display")]
    pub adder: AdderSpec,
    #[serde(skip)]
    pub circuit: Circuit,
    /// Residues a mod m, b mod m.
    pub a: u64,
    pub b: u64,
    /// Register encodings of the residues (diminished-1 for 2ⁿ+1).
    pub a_bits: u64,
    pub b_bits: u64,
    pub shots: u64,
    pub seed: u64,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ResidueJob {
    /// Register bits a noiseless run leaves in the output.
    pub fn expected_bits(&self) -> Result<u64, AdderError> {
        self.adder.expected_output(self.a, self.b)
    }

    pub fn circuit_text(&self) -> String {
        self.circuit.to_text()
    }
}

pub fn plan_jobs(a: u64, b: u64, set: &RnsSet, shots: u64, base_seed: u64) -> Result<Vec<ResidueJob>, DqcError> {
    let range = set.range();
    for v in [a, b] {
        if v >= range {
            return Err(DqcError::OperandOutOfRange { value: v, range });
        }
    }
    let sum = a as u128 + b as u128;
    if sum >= range as u128 {
        return Err(DqcError::RangeOverflow { sum, range });
    }
    let ra = set.encode(a)?;
    let rb = set.encode(b)?;
    set.adders()
        .iter()
        .enumerate()
        .map(|(id, adder)| {
            let (x, y) = (ra.residues[id], rb.residues[id]);
            Ok(ResidueJob {
                id,
                modulus: set.moduli()[id],
                adder: *adder,
                circuit: adder.build(),
                a: x,
                b: y,
                a_bits: adder.encode_operand(x)?,
                b_bits: adder.encode_operand(y)?,
                shots,
                seed: derive_seed(base_seed, 0x6a6f_6273, id as u64),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobResult {
    pub id: usize,
    pub modulus: u64,
    pub histogram: Histogram,
    pub shots: u64,
    /// Frequency of the oracle-correct output.
    pub correct_probability: f64,
}

pub type JobOutcome = Result<JobResult, DqcError>;

fn run_job(job: &ResidueJob, noise: &NoiseModel) -> JobOutcome {
    let fail =
        |e: &dyn std::fmt::Display| DqcError::JobFailed { id: job.id, modulus: job.modulus, message: e.to_string() };
    let hist = run_shots(&job.circuit, &[("A", job.a_bits), ("B", job.b_bits)], job.shots, noise, job.seed)
        .map_err(|e| fail(&e))?;
    let expected = job.expected_bits().map_err(|e| fail(&e))?;
    let correct = hist.get(&expected).copied().unwrap_or(0);
    Ok(JobResult {
        id: job.id,
        modulus: job.modulus,
        correct_probability: correct as f64 / job.shots as f64,
        shots: job.shots,
        histogram: hist,
    })
}

/// Runs every job on a pool of `workers` threads. Failures stay attached to
/// their own job; results come back in job order.
pub fn execute_jobs(jobs: &[ResidueJob], workers: usize, noise: &NoiseModel) -> Result<Vec<JobOutcome>, DqcError> {
    if workers == 0 {
        return Err(DqcError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    Ok(pool.install(|| jobs.par_iter().map(|j| run_job(j, noise)).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobSummary {
    pub modulus: u64,
    pub top_bits: u64,
    pub top_probability: f64,
    /// Decoded residue of the modal outcome.
    pub residue: u64,
    /// More than one outcome shared the top count.
    pub tie: bool,
    pub correct_probability: f64,
    pub histogram: Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributedSum {
    pub moduli: Vec<u64>,
    pub jobs: Vec<JobSummary>,
    pub sum: u64,
    /// Minimum per-job correct-output probability.
    pub set_output_probability: f64,
    /// Product of per-job correct-output probabilities.
    pub end_to_end_probability: f64,
    pub tie: bool,
}

pub fn min_rule(probabilities: &[f64]) -> f64 {
    probabilities.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn product_rule(probabilities: &[f64]) -> f64 {
    probabilities.iter().product()
}

fn summarize(result: &JobResult, adder: &AdderSpec) -> JobSummary {
    let modulus = result.modulus;
    // Ties resolve to the smaller decoded value.
    let mut ranked: Vec<(u64, u64, u64)> =
        result.histogram.iter().map(|(&bits, &count)| (count, adder.decode_output(bits) % modulus, bits)).collect();
    ranked.sort_by_key(|&(count, residue, bits)| (std::cmp::Reverse(count), residue, bits));
    let (count, residue, bits) = ranked.first().copied().unwrap_or((0, 0, 0));
    let tie = ranked.get(1).is_some_and(|r| r.0 == count && r.1 != residue);
    JobSummary {
        modulus,
        top_bits: bits,
        top_probability: count as f64 / result.shots.max(1) as f64,
        residue,
        tie,
        correct_probability: result.correct_probability,
        histogram: result.histogram.clone(),
    }
}

/// Decodes each job's modal outcome and recombines by CRT.
pub fn aggregate(results: &[JobResult], set: &RnsSet) -> Result<DistributedSum, DqcError> {
    let mut jobs = Vec::with_capacity(set.len());
    for (&m, adder) in set.moduli().iter().zip(set.adders()) {
        let r = results.iter().find(|r| r.modulus == m).ok_or(DqcError::MissingResult(m))?;
        jobs.push(summarize(r, adder));
    }
    let rv = ResidueVector::new(set, jobs.iter().map(|j| j.residue).collect())?;
    let probs: Vec<f64> = jobs.iter().map(|j| j.correct_probability).collect();
    Ok(DistributedSum {
        moduli: set.moduli().to_vec(),
        sum: crt_reconstruct(&rv)?,
        set_output_probability: min_rule(&probs),
        end_to_end_probability: product_rule(&probs),
        tie: jobs.iter().any(|j| j.tie),
        jobs,
    })
}

/// Plan, execute and aggregate in one call; any job failure is an error.
pub fn distributed_add(
    a: u64,
    b: u64,
    set: &RnsSet,
    shots: u64,
    seed: u64,
    workers: usize,
    noise: &NoiseModel,
) -> Result<DistributedSum, DqcError> {
    let jobs = plan_jobs(a, b, set, shots, seed)?;
    let results = execute_jobs(&jobs, workers, noise)?.into_iter().collect::<Result<Vec<_>, _>>()?;
    aggregate(&results, set)
}

#[derive(Clone, Debug)]
pub struct ComparisonOptions {
    pub efficiency: f64,
    pub budget: usize,
    pub seed: u64,
    /// Shots per input pair; `None` keeps the per-family defaults.
    pub modular_shots: Option<u64>,
    pub full_shots: Option<u64>,
    /// Raise shots per pair until pairs × shots reaches this.
    pub min_effective_shots: u64,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self {
            efficiency: 0.9,
            budget: DEFAULT_QUBIT_BUDGET,
            seed: 0,
            modular_shots: None,
            full_shots: None,
            min_effective_shots: 0,
        }
    }
}

impl ComparisonOptions {
    fn run_spec(&self, adder: AdderSpec, seed: u64) -> Result<RunSpec, DqcError> {
        let mut spec = RunSpec::for_adder(adder, seed);
        let chosen = match adder.family {
            Family::Full => self.full_shots,
            _ => self.modular_shots,
        };
        if let Some(s) = chosen {
            spec = spec.with_shots(s);
        }
        let pairs = spec.input_pairs()?.len() as u64;
        let needed = self.min_effective_shots.div_ceil(pairs.max(1));
        if needed > spec.shots {
            spec = spec.with_shots(needed);
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusProbability {
    pub modulus: u64,
    pub probability: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub size: u32,
    pub mono_qubits: usize,
    pub mono_toffoli_depth: usize,
    pub mono_cnot_depth: usize,
    /// `None` when the monolithic adder exceeds the qubit budget.
    pub mono_probability: Option<f64>,
    pub mono_std_error: Option<f64>,
    pub rns_set: RnsSet,
    #[serde(serialize_with = "ser_efficiency")]
    pub efficiency: Efficiency,
    pub max_qubits: usize,
    pub max_toffoli_depth: usize,
    pub max_cnot_depth: usize,
    /// Min-rule probability of the set.
    pub rns_probability: f64,
    pub rns_std_error: f64,
    /// Product-rule probability of the set.
    pub rns_end_to_end_probability: f64,
    pub per_modulus: Vec<ModulusProbability>,
    pub gain_percent: Option<f64>,
}

fn ser_efficiency<S: serde::Serializer>(e: &Efficiency, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(e.percent())
}

pub fn gain_percent(p_rns: f64, p_mono: f64) -> f64 {
    100.0 * (p_rns / p_mono - 1.0)
}

fn measure(
    opts: &ComparisonOptions,
    adder: AdderSpec,
    seed: u64,
    noise: &NoiseModel,
) -> Result<ProbabilityEstimate, DqcError> {
    Ok(output_probability(&opts.run_spec(adder, seed)?, noise)?)
}

/// Monolithic full adder versus the selected RNS set, one row per size.
pub fn gain_report(
    sizes: &[u32],
    noise: &NoiseModel,
    opts: &ComparisonOptions,
) -> Result<Vec<ComparisonRow>, DqcError> {
    sizes.iter().map(|&s| comparison_row(s, noise, opts)).collect()
}

/// Full adder whose (n+1)-bit result has `size` bits.
pub fn monolithic_adder(size: u32) -> Result<AdderSpec, DqcError> {
    Ok(AdderSpec::new(Family::Full, size.saturating_sub(1))?)
}

pub fn comparison_row(size: u32, noise: &NoiseModel, opts: &ComparisonOptions) -> Result<ComparisonRow, DqcError> {
    if size < 6 {
        return Err(DqcError::SizeTooSmall(size));
    }
    let k = 1u64 << size;
    let set = select_rns(&SelectorConfig::new(k).with_efficiency(opts.efficiency))?;
    let mono = monolithic_adder(size)?;
    let mono_res = mono.build().resource_report().map_err(SimError::from)?;
    let mono_est = if mono_res.qubit_count > opts.budget {
        None
    } else {
        Some(measure(opts, mono, derive_seed(opts.seed, size as u64, 0), noise)?)
    };

    let mut per_modulus = Vec::with_capacity(set.len());
    let (mut max_q, mut max_t, mut max_c) = (0, 0, 0);
    for (&m, adder) in set.moduli().iter().zip(set.adders()) {
        let r = adder.build().resource_report().map_err(SimError::from)?;
        max_q = max_q.max(r.qubit_count);
        max_t = max_t.max(r.toffoli_depth);
        max_c = max_c.max(r.cnot_depth);
        let est = measure(opts, *adder, derive_seed(opts.seed, size as u64, m), noise)?;
        per_modulus.push(ModulusProbability { modulus: m, probability: est.mean, std_error: est.std_error });
    }
    let worst = per_modulus.iter().min_by(|x, y| x.probability.total_cmp(&y.probability)).expect("non-empty set");
    let probs: Vec<f64> = per_modulus.iter().map(|p| p.probability).collect();
    let rns_probability = worst.probability;
    Ok(ComparisonRow {
        size,
        mono_qubits: mono_res.qubit_count,
        mono_toffoli_depth: mono_res.toffoli_depth,
        mono_cnot_depth: mono_res.cnot_depth,
        mono_probability: mono_est.as_ref().map(|e| e.mean),
        mono_std_error: mono_est.as_ref().map(|e| e.std_error),
        efficiency: set.efficiency(k)?,
        rns_set: set,
        max_qubits: max_q,
        max_toffoli_depth: max_t,
        max_cnot_depth: max_c,
        rns_probability,
        rns_std_error: worst.std_error,
        rns_end_to_end_probability: product_rule(&probs),
        gain_percent: mono_est.map(|e| gain_percent(rns_probability, e.mean)),
        per_modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: &[u64]) -> RnsSet {
        RnsSet::new(m).unwrap()
    }

    #[test]
    fn plan_residues() {
        let jobs = plan_jobs(17, 25, &set(&[3, 4, 5]), 10, 1).unwrap();
        let pairs: Vec<(u64, u64)> = jobs.iter().map(|j| (j.a, j.b)).collect();
        assert_eq!(pairs, vec![(2, 1), (1, 1), (2, 0)]);
        // 3 and 5 use diminished-1 registers.
        assert_eq!((jobs[0].a_bits, jobs[0].b_bits), (0b01, 0b00));
        assert_eq!((jobs[2].a_bits, jobs[2].b_bits), (0b001, 0b100));
        let zeros = plan_jobs(0, 0, &set(&[3, 4, 5]), 10, 1).unwrap();
        assert!(zeros.iter().all(|j| j.a == 0 && j.b == 0));
        assert!(matches!(
            plan_jobs(30, 30, &set(&[3, 4, 5]), 10, 1),
            Err(DqcError::RangeOverflow { sum: 60, range: 60 })
        ));
    }

    #[test]
    fn job_seeds_distinct() {
        let jobs = plan_jobs(1, 2, &set(&[5, 7, 8, 9]), 10, 3).unwrap();
        let mut seeds: Vec<u64> = jobs.iter().map(|j| j.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 4);
    }

    #[test]
    fn zero_noise_sum() {
        let s = set(&[3, 4, 5]);
        let jobs = plan_jobs(17, 25, &s, 50, 9).unwrap();
        let results: Vec<JobResult> =
            execute_jobs(&jobs, 2, &NoiseModel::zero()).unwrap().into_iter().map(Result::unwrap).collect();
        let d = aggregate(&results, &s).unwrap();
        assert_eq!(d.jobs.iter().map(|j| j.residue).collect::<Vec<_>>(), vec![0, 2, 2]);
        assert_eq!(d.sum, 42);
        assert_eq!(d.set_output_probability, 1.0);
        assert_eq!(d.end_to_end_probability, 1.0);
        assert!(!d.tie);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = set(&[5, 7, 8, 9]);
        let noise = NoiseModel::calibrated();
        let jobs = plan_jobs(1234, 987, &s, 300, 5).unwrap();
        let one: Vec<_> = execute_jobs(&jobs, 1, &noise).unwrap().into_iter().map(Result::unwrap).collect();
        let four: Vec<_> = execute_jobs(&jobs, 4, &noise).unwrap().into_iter().map(Result::unwrap).collect();
        assert_eq!(one, four);
    }

    #[test]
    fn failing_job_is_isolated() {
        let s = set(&[3, 4, 5]);
        let mut jobs = plan_jobs(17, 25, &s, 20, 1).unwrap();
        jobs[1].circuit.cx(0, 99);
        let out = execute_jobs(&jobs, 2, &NoiseModel::zero()).unwrap();
        assert!(out[0].is_ok() && out[2].is_ok());
        assert!(matches!(out[1], Err(DqcError::JobFailed { id: 1, modulus: 4, .. })));
    }

    fn result(modulus: u64, hist: &[(u64, u64)], correct: f64) -> JobResult {
        let histogram: Histogram = hist.iter().copied().collect();
        JobResult { id: 0, modulus, shots: histogram.values().sum(), histogram, correct_probability: correct }
    }

    #[test]
    fn min_and_product_rules() {
        let s = set(&[4, 5, 9]);
        let rs = [result(4, &[(1, 10)], 0.985), result(5, &[(0b001, 10)], 0.931), result(9, &[(0b0000, 10)], 0.893)];
        let d = aggregate(&rs, &s).unwrap();
        assert_eq!(d.set_output_probability, 0.893);
        assert!((d.end_to_end_probability - 0.985 * 0.931 * 0.893).abs() < 1e-12);
        assert!(d.end_to_end_probability <= d.set_output_probability);
        assert_eq!(d.sum, crt_reconstruct(&ResidueVector::new(&s, vec![1, 2, 1]).unwrap()).unwrap());
    }

    #[test]
    fn tie_breaks_toward_smaller_value() {
        let s = set(&[8]);
        let d = aggregate(&[result(8, &[(6, 5), (2, 5), (1, 1)], 0.5)], &s).unwrap();
        assert_eq!(d.sum, 2);
        assert!(d.tie);
        assert!(matches!(aggregate(&[], &s), Err(DqcError::MissingResult(8))));
    }

    #[test]
    fn single_modulus_set() {
        let s = set(&[9]);
        let d = distributed_add(3, 4, &s, 10, 0, 1, &NoiseModel::zero()).unwrap();
        assert_eq!(d.sum, 7);
        assert_eq!(d.jobs[0].top_bits, crate::adders::dim1_encode(7, 3).unwrap().bits);
    }

    #[test]
    fn zero_noise_gain_is_zero() {
        let opts = ComparisonOptions { modular_shots: Some(2), full_shots: Some(2), ..Default::default() };
        let rows = gain_report(&[6, 11], &NoiseModel::zero(), &opts).unwrap();
        assert_eq!(rows[0].gain_percent, Some(0.0));
        assert_eq!(rows[0].rns_set.moduli(), &[3, 4, 5]);
        assert_eq!(rows[0].efficiency.percent_string(), "93.75");
        assert_eq!(rows[0].max_qubits, 11);
        assert_eq!(rows[1].mono_qubits, 21);
        assert_eq!(rows[1].mono_probability, None);
        assert_eq!(rows[1].gain_percent, None);
        assert!(matches!(comparison_row(5, &NoiseModel::zero(), &opts), Err(DqcError::SizeTooSmall(5))));
    }
}
