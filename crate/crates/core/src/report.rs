//! Tabular report documents with JSON and CSV emitters.
//!
//! Cells are stored pre-formatted so both emitters carry identical values.
//! Published reference values appear in columns prefixed `paper_`.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::adders::AdderSpec;
use crate::circuit::ResourceReport;
use crate::dqc::{ComparisonRow, DistributedSum, ResidueJob};
use crate::reference::{table2_row, Table1Row, TABLE1};
use crate::select::{SelectionTrace, TraceEvent};
use crate::sim::{output_probability, NoiseModel, ProbabilityEstimate, RunSpec, SimError};

pub const NOT_AVAILABLE: &str = "N.A.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ReportKind {
    Table1,
    Table2,
    Trace,
    Run,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool_version: String,
    /// Seconds since the epoch; honours `SOURCE_DATE_EPOCH`.
    pub timestamp: u64,
    pub seed: Option<u64>,
    pub noise: Option<NoiseModel>,
    /// Run parameters needed to reproduce the rows.
    pub parameters: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(seed: Option<u64>, noise: Option<NoiseModel>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
            seed,
            noise,
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportDocument {
    pub fn new(kind: ReportKind, columns: &[&str], metadata: Metadata) -> Self {
        Self { kind, metadata, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the {:?} schema", self.kind);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Header plus rows; metadata lives in the JSON form only.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Space-aligned text table.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for r in &self.rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.columns);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

pub fn prob(p: f64) -> String {
    format!("{p:.3}")
}

pub fn opt_prob(p: Option<f64>) -> String {
    p.map(prob).unwrap_or_else(|| NOT_AVAILABLE.into())
}

fn pct(p: Option<f64>) -> String {
    p.map(|v| format!("{v:.2}")).unwrap_or_else(|| NOT_AVAILABLE.into())
}

fn set_label(m: &[u64]) -> String {
    let parts: Vec<String> = m.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug)]
pub struct Table1Measurement {
    pub reference: Table1Row,
    pub resources: ResourceReport,
    pub estimate: ProbabilityEstimate,
}

impl Table1Measurement {
    /// Names of resource fields that differ from the published row.
    pub fn deviations(&self) -> Vec<&'static str> {
        let (r, p) = (&self.resources, &self.reference);
        [
            ("qubits", r.qubit_count, p.qubits),
            ("toffoli_depth", r.toffoli_depth, p.toffoli_depth),
            ("cnot_depth", r.cnot_depth, p.cnot_depth),
            ("toffoli", r.toffoli_count, p.toffoli_count),
            ("cnot", r.cnot_count, p.cnot_count),
        ]
        .into_iter()
        .filter(|(_, a, b)| a != b)
        .map(|(n, _, _)| n)
        .collect()
    }
}

/// Builds and measures the eight published modulo-adder rows.
pub fn measure_table1(noise: &NoiseModel, shots: Option<u64>, seed: u64) -> Result<Vec<Table1Measurement>, SimError> {
    TABLE1
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let adder = AdderSpec::new(row.family, row.n)?;
            let mut spec = RunSpec::for_adder(adder, crate::sim::derive_seed(seed, i as u64, row.modulus));
            if let Some(s) = shots {
                spec = spec.with_shots(s);
            }
            Ok(Table1Measurement {
                reference: *row,
                resources: spec.circuit.resource_report()?,
                estimate: output_probability(&spec, noise)?,
            })
        })
        .collect()
}

pub const TABLE1_COLUMNS: [&str; 18] = [
    "modulus",
    "type",
    "n",
    "qubits",
    "toffoli_depth",
    "cnot_depth",
    "toffoli",
    "cnot",
    "not",
    "output_prob",
    "std_error",
    "paper_qubits",
    "paper_toffoli_depth",
    "paper_cnot_depth",
    "paper_toffoli",
    "paper_cnot",
    "paper_output_prob",
    "deviation",
];

pub fn table1_document(measurements: &[Table1Measurement], metadata: Metadata) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::Table1, &TABLE1_COLUMNS, metadata);
    for m in measurements {
        let (r, p) = (&m.resources, &m.reference);
        let dev = m.deviations();
        doc.push(vec![
            p.modulus.to_string(),
            p.family.type_label().to_string(),
            p.n.to_string(),
            r.qubit_count.to_string(),
            r.toffoli_depth.to_string(),
            r.cnot_depth.to_string(),
            r.toffoli_count.to_string(),
            r.cnot_count.to_string(),
            r.not_count.to_string(),
            prob(m.estimate.mean),
            format!("{:.4}", m.estimate.std_error),
            p.qubits.to_string(),
            p.toffoli_depth.to_string(),
            p.cnot_depth.to_string(),
            p.toffoli_count.to_string(),
            p.cnot_count.to_string(),
            prob(p.output_probability),
            if dev.is_empty() { "none".into() } else { dev.join("|") },
        ]);
    }
    doc
}

pub const TABLE2_COLUMNS: [&str; 17] = [
    "size",
    "mono_qubits",
    "mono_toffoli_depth",
    "mono_cnot_depth",
    "mono_prob",
    "rns_set",
    "efficiency_pct",
    "max_qubits",
    "max_toffoli_depth",
    "max_cnot_depth",
    "rns_prob",
    "rns_end_to_end_prob",
    "gain_pct",
    "paper_rns_set",
    "paper_mono_prob",
    "paper_rns_prob",
    "paper_gain_pct",
];

pub fn table2_document(rows: &[ComparisonRow], metadata: Metadata) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::Table2, &TABLE2_COLUMNS, metadata);
    for r in rows {
        let paper = table2_row(r.size);
        doc.push(vec![
            r.size.to_string(),
            r.mono_qubits.to_string(),
            r.mono_toffoli_depth.to_string(),
            r.mono_cnot_depth.to_string(),
            opt_prob(r.mono_probability),
            r.rns_set.to_string(),
            r.efficiency.percent_string(),
            r.max_qubits.to_string(),
            r.max_toffoli_depth.to_string(),
            r.max_cnot_depth.to_string(),
            prob(r.rns_probability),
            prob(r.rns_end_to_end_probability),
            pct(r.gain_percent),
            paper.map(|p| set_label(p.rns_set)).unwrap_or_else(|| NOT_AVAILABLE.into()),
            opt_prob(paper.and_then(|p| p.mono_probability)),
            opt_prob(paper.map(|p| p.rns_probability)),
            pct(paper.and_then(|p| p.gain_percent)),
        ]);
    }
    doc
}

/// Output probability against size for the monolithic and RNS adders.
pub fn fig5_document(rows: &[ComparisonRow], metadata: Metadata) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::Table2, &["size", "monolithic_prob", "rns_prob"], metadata);
    for r in rows {
        doc.push(vec![r.size.to_string(), opt_prob(r.mono_probability), prob(r.rns_probability)]);
    }
    doc
}

pub fn trace_document(trace: &SelectionTrace, metadata: Metadata) -> ReportDocument {
    let mut doc = ReportDocument::new(ReportKind::Trace, &["step", "event", "moduli", "range", "detail"], metadata);
    for (i, e) in trace.events.iter().enumerate() {
        let (event, moduli, range, detail) = match e {
            TraceEvent::ExactPower { h, candidate, range, accepted } => {
                ("exact_power", set_label(candidate), range.to_string(), format!("h={h} accepted={accepted}"))
            }
            TraceEvent::Candidate { count, moduli, range, meets_threshold, full_coverage, max_toffoli_depth } => (
                "candidate",
                set_label(moduli),
                range.to_string(),
                format!("C={count} meets={meets_threshold} full={full_coverage} max_toffoli_depth={max_toffoli_depth}"),
            ),
            TraceEvent::Rejected { moduli, in_favor_of, reason } => (
                "rejected",
                set_label(moduli),
                String::new(),
                format!(
                    "reason={} winner={}",
                    serde_json::to_value(reason).unwrap().as_str().unwrap_or(""),
                    set_label(in_favor_of)
                ),
            ),
            TraceEvent::IncrementCount { from, to } => {
                ("increment", String::new(), String::new(), format!("C {from}->{to}"))
            }
            TraceEvent::Selected { moduli, range, max_toffoli_depth } => (
                "selected",
                set_label(moduli),
                range.to_string(),
                max_toffoli_depth.map(|d| format!("max_toffoli_depth={d}")).unwrap_or_default(),
            ),
        };
        doc.push(vec![(i + 1).to_string(), event.into(), moduli, range, detail]);
    }
    doc
}

/// Histogram of one circuit run (output value → count).
pub fn run_document(
    hist: &crate::sim::Histogram,
    shots: u64,
    expected: Option<u64>,
    decode: Option<&AdderSpec>,
    metadata: Metadata,
) -> ReportDocument {
    let mut doc =
        ReportDocument::new(ReportKind::Run, &["output_bits", "value", "count", "frequency", "correct"], metadata);
    for (&bits, &count) in hist {
        doc.push(vec![
            format!("{bits:b}"),
            decode.map(|a| a.decode_output(bits)).unwrap_or(bits).to_string(),
            count.to_string(),
            prob(count as f64 / shots as f64),
            expected.map(|e| (e == bits).to_string()).unwrap_or_else(|| NOT_AVAILABLE.into()),
        ]);
    }
    doc
}

/// Per-modulus lines of a distributed addition followed by the CRT result.
pub fn dqc_document(jobs: &[ResidueJob], sum: &DistributedSum, metadata: Metadata) -> ReportDocument {
    let mut doc = ReportDocument::new(
        ReportKind::Run,
        &["modulus", "adder", "a_residue", "b_residue", "top_bits", "residue", "top_prob", "correct_prob", "seed"],
        metadata,
    );
    for (job, s) in jobs.iter().zip(&sum.jobs) {
        doc.push(vec![
            job.modulus.to_string(),
            job.adder.to_string(),
            job.a.to_string(),
            job.b.to_string(),
            format!("{:b}", s.top_bits),
            s.residue.to_string(),
            prob(s.top_probability),
            prob(s.correct_probability),
            job.seed.to_string(),
        ]);
    }
    doc.push(vec![
        "crt".into(),
        set_label(&sum.moduli),
        String::new(),
        String::new(),
        String::new(),
        sum.sum.to_string(),
        prob(sum.set_output_probability),
        prob(sum.end_to_end_probability),
        if sum.tie { "tie".into() } else { String::new() },
    ]);
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        let mut m = Metadata::new(Some(1), Some(NoiseModel::zero()));
        m.timestamp = 0;
        m
    }

    #[test]
    fn json_and_csv_agree() {
        let mut doc = ReportDocument::new(ReportKind::Run, &["a", "b"], meta());
        doc.push(vec!["1".into(), "x, y".into()]);
        doc.push(vec!["0.500".into(), NOT_AVAILABLE.into()]);
        let json: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        let csv_text = doc.to_csv();
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        let csv_rows: Vec<Vec<String>> = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
        let json_rows: Vec<Vec<String>> = serde_json::from_value(json["rows"].clone()).unwrap();
        assert_eq!(csv_rows, json_rows);
        assert_eq!(json["kind"], "RUN");
    }

    #[test]
    fn zero_noise_table1() {
        let ms = measure_table1(&NoiseModel::zero(), Some(3), 0).unwrap();
        let doc = table1_document(&ms, meta());
        assert_eq!(doc.rows.len(), 8);
        assert!(doc.column("output_prob").unwrap().iter().all(|p| *p == "1.000"));
        let dev = doc.column("deviation").unwrap();
        assert_eq!(dev[0], "none");
        assert_eq!(dev[2], "none");
    }

    #[test]
    fn formatting() {
        assert_eq!(prob(0.8934), "0.893");
        assert_eq!(opt_prob(None), "N.A.");
        assert_eq!(pct(Some(11.356)), "11.36");
    }
}
