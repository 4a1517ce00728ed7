//! Classify λ + T across a handful of translations.
//!
//! ```bash
//! cargo run --release --example classify_translates
//! ```

use lyscan::classifier::{classify, oracle_membership, Budget};
use lyscan::numkit::C64;
use lyscan::operators::{Operator, WeightRule};

fn main() {
    let shift = Operator::backward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    let budget = Budget::default();
    println!("translates of the unit backward shift (verdict / oracle):");
    for lambda in [
        C64::new(0.0, 0.0),
        C64::new(0.5, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.9),
        C64::new(2.0, 0.0),
        C64::new(2.5, 0.0),
    ] {
        let op = shift.translate(lambda);
        let verdict = classify(&op, &budget);
        let truth = oracle_membership(&op)
            .map(|t| if t { "chaotic" } else { "not chaotic" })
            .unwrap_or("unknown");
        println!("  λ = {:>8} → {}   [closed form: {truth}]", format!("{lambda}"), verdict.code());
        if let lyscan::classifier::Certificate::AnalyticFilter { rule } = verdict.certificate {
            println!("      via analytic filter: {rule}");
        }
    }

    println!("\nsame λ values with the filters bypassed (certificate searches only):");
    for lambda in [C64::new(0.5, 0.0), C64::new(1.0, 0.0)] {
        let op = shift.translate(lambda);
        let verdict = lyscan::classifier::empirical_classify(&op, &budget);
        println!("  λ = {:>8} → {}", format!("{lambda}"), verdict.code());
        if let lyscan::classifier::Certificate::Criterion { report, .. } = &verdict.certificate {
            println!(
                "      decay-span peaks reached {:.3e} at level {}",
                report.last_peak(),
                report.levels.last().map(|l| l.level).unwrap_or(0)
            );
        }
    }
}
