//! Confusion matrix of empirical verdicts against the closed-form
//! translation sets on a coarse grid.
//!
//! ```bash
//! cargo run --release --example oracle_vs_empirical
//! ```

use lyscan::classifier::Budget;
use lyscan::numkit::C64;
use lyscan::operators::{parse_operator, Operator, WeightRule};
use lyscan::scanner::{scan, scan_oracle, ScanRegion};

fn confusion(op: &Operator, label: &str, resolution: usize) {
    let region = ScanRegion::auto(op, resolution);
    let budget = Budget::default();
    let empirical = scan(op, region, &budget);
    let oracle = scan_oracle(op, region, &budget);
    let mut agree = 0usize;
    let mut undetermined = 0usize;
    let mut contradictions = 0usize;
    for idx in 0..empirical.codes.len() {
        match (empirical.codes[idx], oracle.codes[idx]) {
            (_, 'U') => {}
            ('U', _) => undetermined += 1,
            (a, b) if a == b => agree += 1,
            _ => contradictions += 1,
        }
    }
    println!(
        "{label}: {agree} agree, {undetermined} undetermined, {contradictions} contradictions"
    );
}

fn main() {
    let b = Operator::backward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    confusion(&b, "unit backward shift (annulus 0 < |λ| < 2)", 41);

    let f = Operator::forward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    confusion(&f, "unit forward shift (empty set)", 41);

    let br = parse_operator("kind = backward_shift\nweights = reciprocal").unwrap();
    confusion(&br, "compact quasinilpotent backward shift (unit circle)", 41);

    let kal = Operator::kalisch();
    confusion(&kal, "Kalisch operator ({0}) — off-origin cells stay N or U", 21);
    println!("\ncontradictions are the one thing the classifier is never allowed to produce");
}
