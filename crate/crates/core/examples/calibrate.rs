//! Re-derives the checked-in default noise model from the published
//! modulo-adder probabilities.
//!
//!     cargo run --release -p qsmart-core --example calibrate [shots] [seed]

use qsmart_core::reference::TABLE1;
use qsmart_core::sim::{calibrate_noise, reference_targets, CalibrationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let shots = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);
    let targets = reference_targets(&TABLE1, shots, seed)?;
    let cal = calibrate_noise(&targets, &CalibrationOptions::default())?;
    for (row, p) in TABLE1.iter().zip(&cal.predictions) {
        println!("{:>2} {:<16} target {:.3} fit {:.4}", row.modulus, row.family.as_str(), row.output_probability, p);
    }
    println!("residual {:.6} iterations {} converged {}", cal.residual, cal.iterations, cal.converged);
    println!("{}", cal.model.to_text());
    Ok(())
}
