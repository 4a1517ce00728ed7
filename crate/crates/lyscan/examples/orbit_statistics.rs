//! Orbit norms and dip verdicts for a few characteristic vectors.
//!
//! ```bash
//! cargo run --release --example orbit_statistics
//! ```

use lyscan::dynamics::{dip_classify, orbit, pair_stats, DIP_EPSILON};
use lyscan::kalisch::StepFunction;
use lyscan::numkit::C64;
use lyscan::operators::{Operator, SeqVector, Vector, WeightRule};

fn show(label: &str, op: &Operator, x: &Vector) {
    let rec = orbit(op, x, 2048).unwrap();
    let verdict = dip_classify(&rec, DIP_EPSILON);
    let head: Vec<String> =
        rec.samples.iter().take(6).map(|&(n, v)| format!("n={n}:{v:.3}")).collect();
    println!("{label}");
    println!("  first samples: {}", head.join("  "));
    println!("  min = {:.3e}, max = {:.3e}, dip verdict: {verdict:?}", rec.min_norm(), rec.max_norm());
}

fn main() {
    let contracting = Operator::diagonal(WeightRule::Constant(C64::new(0.5, 0.0))).unwrap();
    show("diagonal(0.5) on e₁ — clean geometric decay", &contracting, &Vector::Seq(SeqVector::basis(1)));

    let straddle = Operator::diagonal(WeightRule::List {
        head: vec![C64::new(0.5, 0.0), C64::new(2.0, 0.0)],
        tail: C64::new(0.5, 0.0),
    })
    .unwrap();
    let mixed = Vector::Seq(SeqVector::new(vec![C64::new(1.0, 0.0), C64::new(1e-3, 0.0)]));
    show(
        "\ndiagonal(0.5, 2) on e₁ + 10⁻³e₂ — dips once, then grows (a normal non-example)",
        &straddle,
        &mixed,
    );

    let shift = Operator::backward_shift(WeightRule::Constant(C64::new(1.0, 0.0)))
        .unwrap()
        .translate(C64::new(1.0, 0.0));
    show("\n(1 + B) on e₂ — norms √(1+n²), pure growth", &shift, &Vector::Seq(SeqVector::basis(2)));

    let kal = Operator::kalisch();
    let f = StepFunction::indicator(std::f64::consts::PI);
    let norm = f.norm();
    let eigen = Vector::Step(f.scale(C64::new(1.0 / norm, 0.0)));
    show("\nKalisch on normalized 1_{[π,2π]} — unimodular eigenvalue, flat orbit", &kal, &eigen);

    // Pair distances reduce to the orbit of the difference vector.
    let x = Vector::Seq(SeqVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]));
    let y = Vector::Seq(SeqVector::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]));
    let iso = Operator::forward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    let (hi, lo) = pair_stats(&iso, &x, &y, 512).unwrap();
    println!("\npair statistics under the isometric forward shift: limsup ≈ {hi:.3}, liminf ≈ {lo:.3}");
}
