use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsmart_core::adders::AdderSpec;
use qsmart_core::circuit::Circuit;
use qsmart_core::dqc::{self, ComparisonOptions, DqcError};
use qsmart_core::reference::{table1_row, DEFAULT_QUBIT_BUDGET, TABLE1};
use qsmart_core::report::{self, Metadata, ReportDocument};
use qsmart_core::select::{explain_selection, DepthSource, SelectError, SelectorConfig};
use qsmart_core::sim::{
    self, calibrate_noise, reference_targets, CalibrationOptions, NoiseModel, RunSpec, Sampling, SimError,
};
use qsmart_core::RnsSet;

#[derive(Parser)]
#[command(name = "qsmart", version, about = "RNS-based distributed quantum addition toolkit")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the report rows as CSV ("-" for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an adder circuit and print its resources.
    Synth {
        /// full | mod-pow2 | mod-pow2-minus1 | qdma
        family: String,
        n: u32,
        /// Circuit file to write (text format printed to stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose an RNS moduli set for the range [0, K).
    Select {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0.9)]
        efficiency: f64,
        /// Toffoli depths from the built circuits or the published table.
        #[arg(long, default_value = "paper")]
        depths: String,
        #[arg(long, default_value_t = 3)]
        max_n: u32,
        /// Print every step of the search.
        #[arg(long)]
        trace: bool,
    },
    /// Simulate one circuit under noise.
    Run {
        /// Circuit file or builder spec such as `qdma:3`.
        #[arg(long)]
        circuit: String,
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        noise: NoiseArg,
        /// Random input pairs instead of exhaustive coverage.
        #[arg(long)]
        sample: Option<usize>,
        /// Operand A (with --b: histogram of a single input pair).
        #[arg(long, requires = "b")]
        a: Option<u64>,
        #[arg(long, requires = "a")]
        b: Option<u64>,
    },
    /// Add two integers as independent residue jobs and recombine by CRT.
    DqcAdd {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0.9)]
        efficiency: f64,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = sim::DEFAULT_MODULAR_SHOTS)]
        shots: u64,
    },
    /// Monolithic full adder versus RNS sets over a range of sizes.
    Compare {
        /// Inclusive range `6..11` or list `6,8,10`.
        #[arg(long, default_value = "6..11")]
        sizes: String,
        #[arg(long, default_value_t = DEFAULT_QUBIT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 0.9)]
        efficiency: f64,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long)]
        shots_mod: Option<u64>,
        #[arg(long)]
        shots_full: Option<u64>,
        /// Raise shots until input pairs × shots reaches this.
        #[arg(long, default_value_t = 0)]
        min_effective_shots: u64,
        /// Write the probability-versus-size series as CSV.
        #[arg(long, value_name = "PATH")]
        fig5: Option<PathBuf>,
    },
    /// Resources and output probabilities of the eight modulo adders.
    Table1 {
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Fit a noise model to the published modulo-adder probabilities.
    Calibrate {
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Noise file to write.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 400)]
        max_iterations: usize,
    },
}

#[derive(Args)]
struct NoiseArg {
    /// default | zero | path to a noise file
    #[arg(long = "noise", default_value = "default")]
    noise: String,
}

impl NoiseArg {
    fn model(&self) -> Result<NoiseModel, Failure> {
        match self.noise.as_str() {
            "default" => Ok(NoiseModel::calibrated()),
            "zero" => Ok(NoiseModel::zero()),
            path => {
                let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
                NoiseModel::from_text(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))
            }
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl ToString) -> Self {
        Self { code: 1, message: m.to_string() }
    }

    fn sim(m: impl ToString) -> Self {
        Self { code: 3, message: m.to_string() }
    }
}

impl From<SelectError> for Failure {
    fn from(e: SelectError) -> Self {
        let code = if matches!(e, SelectError::Infeasible { .. }) { 2 } else { 1 };
        Self { code, message: e.to_string() }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::sim(e)
    }
}

impl From<DqcError> for Failure {
    fn from(e: DqcError) -> Self {
        match e {
            DqcError::Select(s) => s.into(),
            DqcError::Sim(_) | DqcError::JobFailed { .. } => Failure::sim(e),
            _ => Failure::usage(e),
        }
    }
}

struct Output<'a> {
    cli: &'a Cli,
}

impl Output<'_> {
    /// Prints the document in the requested form and writes the CSV copy.
    fn emit(&self, doc: &ReportDocument, summary: Option<String>) -> Result<(), Failure> {
        if self.cli.json {
            println!("{}", doc.to_json());
        } else {
            if let Some(s) = summary {
                println!("{s}");
            }
            print!("{}", doc.to_text());
        }
        if let Some(path) = &self.cli.csv {
            write_out(path, &doc.to_csv())?;
        }
        Ok(())
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_sizes(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::usage(format!("bad size list `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

fn load_circuit(arg: &str) -> Result<(Circuit, Option<AdderSpec>), Failure> {
    if Path::new(arg).is_file() {
        let text = fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")))?;
        let c = Circuit::from_text(&text).map_err(|e| Failure::usage(format!("{arg}: {e}")))?;
        return Ok((c, None));
    }
    let spec: AdderSpec = arg.parse().map_err(|e| Failure::usage(format!("`{arg}`: {e}")))?;
    Ok((spec.build(), Some(spec)))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = Output { cli };
    let seed = cli.seed;
    match &cli.command {
        Command::Synth { family, n, out: path } => {
            let spec: AdderSpec = format!("{family}:{n}").parse().map_err(Failure::usage)?;
            let c = spec.build();
            let r = c.resource_report().map_err(Failure::usage)?;
            match path {
                Some(p) => write_out(p, &c.to_text())?,
                None if !cli.json => print!("{}", c.to_text()),
                None => {}
            }
            let reference = spec.modulus().and_then(|m| table1_row(m, spec.family));
            if cli.json {
                let v = serde_json::json!({ "adder": spec.to_string(), "resources": r,
                    "paper_qubits": reference.map(|p| p.qubits) });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                let delta = |ours: usize, theirs: Option<usize>| match theirs {
                    Some(t) if t == ours => format!("{ours} (matches reference)"),
                    Some(t) => format!("{ours} (reference {t}, delta {:+})", ours as i64 - t as i64),
                    None => ours.to_string(),
                };
                eprintln!("{}", spec.label());
                eprintln!("qubits        {}", delta(r.qubit_count, reference.map(|p| p.qubits)));
                eprintln!("toffoli       {}", delta(r.toffoli_count, reference.map(|p| p.toffoli_count)));
                eprintln!("cnot          {}", delta(r.cnot_count, reference.map(|p| p.cnot_count)));
                eprintln!("not           {}", r.not_count);
                eprintln!("toffoli depth {}", delta(r.toffoli_depth, reference.map(|p| p.toffoli_depth)));
                eprintln!("cnot depth    {}", delta(r.cnot_depth, reference.map(|p| p.cnot_depth)));
                eprintln!("total depth   {}", r.total_depth);
            }
        }
        Command::Select { k, efficiency, depths, max_n, trace } => {
            let source: DepthSource = depths.parse().map_err(Failure::usage)?;
            let mut cfg = SelectorConfig::new(*k).with_efficiency(*efficiency).with_depth_source(source);
            cfg.max_n = *max_n;
            let t = explain_selection(&cfg)?;
            let set = t.selected();
            let eff = set.efficiency(*k).map_err(Failure::usage)?;
            let meta =
                Metadata::new(Some(seed), None).with("k", k).with("efficiency", efficiency).with("depths", depths);
            let summary = format!("set {set} range {} efficiency {}%", set.range(), eff.percent_string());
            if *trace {
                out.emit(&report::trace_document(&t, meta), Some(summary))?;
            } else if cli.json {
                let v = serde_json::json!({ "set": set, "range": set.range(),
                    "efficiency_pct": eff.percent_string(), "metadata": meta });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                println!("{summary}");
            }
        }
        Command::Run { circuit, shots, noise, sample, a, b } => {
            let model = noise.model()?;
            let (c, spec) = load_circuit(circuit)?;
            let meta = Metadata::new(Some(seed), Some(model)).with("circuit", circuit);
            if let (Some(a), Some(b)) = (a, b) {
                let (abits, bbits, expected) = match &spec {
                    Some(s) => (
                        s.encode_operand(*a).map_err(Failure::usage)?,
                        s.encode_operand(*b).map_err(Failure::usage)?,
                        Some(s.expected_output(*a, *b).map_err(Failure::usage)?),
                    ),
                    None => (*a, *b, None),
                };
                let shots = shots.unwrap_or(sim::DEFAULT_MODULAR_SHOTS);
                let hist = sim::run_shots(&c, &[("A", abits), ("B", bbits)], shots, &model, seed)?;
                let meta = meta.with("a", a).with("b", b).with("shots", shots);
                out.emit(&report::run_document(&hist, shots, expected, spec.as_ref(), meta), None)?;
            } else {
                let spec = spec.ok_or_else(|| {
                    Failure::usage("circuit files need --a and --b; use a builder spec for output probability")
                })?;
                let mut rs = RunSpec::for_adder(spec, seed);
                if let Some(s) = shots {
                    rs = rs.with_shots(*s);
                }
                if let Some(p) = sample {
                    rs = rs.with_sampling(Sampling::Random(*p));
                }
                let est = sim::output_probability(&rs, &model)?;
                let meta = meta.with("shots", rs.shots).with("pairs", est.pairs.len());
                let mut doc = ReportDocument::new(report::ReportKind::Run, &["a", "b", "probability"], meta);
                for p in &est.pairs {
                    doc.push(vec![p.a.to_string(), p.b.to_string(), report::prob(p.probability)]);
                }
                let summary = format!(
                    "{} output probability {} (std error {:.4}, per-pair bound {:.4})",
                    spec.label(),
                    report::prob(est.mean),
                    est.std_error,
                    est.pair_std_error_bound
                );
                out.emit(&doc, Some(summary))?;
            }
        }
        Command::DqcAdd { a, b, k, efficiency, noise, workers, shots } => {
            let model = noise.model()?;
            let set: RnsSet = qsmart_core::select_rns(&SelectorConfig::new(*k).with_efficiency(*efficiency))?;
            let jobs = dqc::plan_jobs(*a, *b, &set, *shots, seed)?;
            let results = dqc::execute_jobs(&jobs, *workers, &model)?.into_iter().collect::<Result<Vec<_>, _>>()?;
            let sum = dqc::aggregate(&results, &set)?;
            let meta = Metadata::new(Some(seed), Some(model))
                .with("a", a)
                .with("b", b)
                .with("k", k)
                .with("efficiency", efficiency)
                .with("shots", shots);
            let summary = format!(
                "{a} + {b} = {} via {set} (set probability {}, end-to-end {}{})",
                sum.sum,
                report::prob(sum.set_output_probability),
                report::prob(sum.end_to_end_probability),
                if sum.tie { ", tie broken toward smaller residue" } else { "" }
            );
            out.emit(&report::dqc_document(&jobs, &sum, meta), Some(summary))?;
        }
        Command::Compare { sizes, budget, efficiency, noise, shots_mod, shots_full, min_effective_shots, fig5 } => {
            let model = noise.model()?;
            let sizes = parse_sizes(sizes)?;
            let opts = ComparisonOptions {
                efficiency: *efficiency,
                budget: *budget,
                seed,
                modular_shots: *shots_mod,
                full_shots: *shots_full,
                min_effective_shots: *min_effective_shots,
            };
            let rows = dqc::gain_report(&sizes, &model, &opts)?;
            let meta = Metadata::new(Some(seed), Some(model))
                .with("budget", budget)
                .with("efficiency", efficiency)
                .with("min_effective_shots", min_effective_shots);
            if let Some(p) = fig5 {
                write_out(p, &report::fig5_document(&rows, meta.clone()).to_csv())?;
            }
            out.emit(&report::table2_document(&rows, meta), None)?;
        }
        Command::Table1 { noise, shots } => {
            let model = noise.model()?;
            let ms = report::measure_table1(&model, *shots, seed)?;
            let mut meta = Metadata::new(Some(seed), Some(model));
            if let Some(s) = shots {
                meta = meta.with("shots", s);
            }
            out.emit(&report::table1_document(&ms, meta), None)?;
        }
        Command::Calibrate { shots, out: path, max_iterations } => {
            let targets = reference_targets(&TABLE1, *shots, seed)?;
            let opts = CalibrationOptions { max_iterations: *max_iterations, ..Default::default() };
            let cal = calibrate_noise(&targets, &opts)?;
            if !cal.converged {
                eprintln!("warning: iteration cap reached; returning best model so far");
            }
            if let Some(p) = path {
                write_out(p, &cal.model.to_text())?;
            }
            let meta = Metadata::new(Some(seed), Some(cal.model))
                .with("shots", shots)
                .with("residual", format!("{:.6}", cal.residual))
                .with("converged", cal.converged);
            let mut doc = ReportDocument::new(
                report::ReportKind::Table1,
                &["modulus", "type", "paper_output_prob", "fitted_prob"],
                meta,
            );
            for (row, p) in TABLE1.iter().zip(&cal.predictions) {
                doc.push(vec![
                    row.modulus.to_string(),
                    row.family.type_label().into(),
                    report::prob(row.output_probability),
                    report::prob(*p),
                ]);
            }
            let summary = format!("{}\nresidual {:.6}", cal.model.to_text().trim_end(), cal.residual);
            out.emit(&doc, Some(summary))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
