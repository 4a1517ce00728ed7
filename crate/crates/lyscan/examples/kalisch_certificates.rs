//! The Kalisch operator: exact step-function calculus, the staggered-frame
//! chaos certificate at w = 0, and the orbit-bound certificates showing the
//! translated operators are tame.
//!
//! ```bash
//! cargo run --release --example kalisch_certificates
//! ```

use lyscan::classifier::{classify, Budget, Certificate};
use lyscan::kalisch::{claim_certificates, iterate_step, StepFunction};
use lyscan::numkit::C64;
use lyscan::operators::Operator;
use std::f64::consts::PI;

fn main() {
    // Indicators are exact eigenfunctions: (w+S)ⁿ 1_{[α,2π]} has norm
    // |w+e^{iα}|ⁿ √(2π−α) with no quadrature involved.
    let alpha = PI / 2.0;
    let f = StepFunction::indicator(alpha);
    let w = C64::new(0.5, 0.0);
    let it = iterate_step(w, 10, &f).unwrap();
    let rate = (w + C64::from_polar(1.0, alpha)).norm();
    println!(
        "‖(w+S)¹⁰ 1_{{[π/2,2π]}}‖ = {:.6}  (closed form {:.6})",
        it.norm(),
        rate.powi(10) * (std::f64::consts::TAU - alpha).sqrt()
    );

    // w = 0: chaotic, certified by the staggered eigenfunction frame.
    let verdict = classify(&Operator::kalisch(), &Budget::default());
    println!("\nw = 0 verdict: {}", verdict.code());
    if let Certificate::Interleave { level, peak, peak_time, dip, dip_time, .. } =
        &verdict.certificate
    {
        println!(
            "  frame level {level}: witness orbit peaks at {peak:.3} (n = {peak_time}) and dips to {dip:.3} (n = {dip_time})"
        );
    }

    // Nonzero translations: the three orbit-bound certificates.
    for w in [C64::new(0.5, 0.0), C64::new(-0.5, 0.0), C64::new(0.0, 0.3)] {
        let report = claim_certificates(w, 2000, 20, 7).unwrap();
        println!(
            "\nw = {w}: crossings at ({:.4}, {:.4}), decay base q = {:.4}, bound M = {:.2}",
            report.constants.a.rem_euclid(std::f64::consts::TAU),
            report.constants.b.rem_euclid(std::f64::consts::TAU),
            report.constants.q,
            report.constants.m_bound
        );
        for outcome in [&report.growth_divergence, &report.decay_bound, &report.edge_tail] {
            println!(
                "  {}: {} (max ratio {:.3}{})",
                outcome.name,
                if outcome.pass { "pass" } else { "FAIL" },
                outcome.max_ratio,
                outcome.witness_n.map(|n| format!(", witnessed at n = {n}")).unwrap_or_default()
            );
        }
    }
}
