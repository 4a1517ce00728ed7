//! The two set-algebra laws as scan-level checks: translation covariance
//! S(λ0 + T) = S(T) − λ0 and the direct-sum union law.
//!
//! ```bash
//! cargo run --release --example metamorphic_laws
//! ```

use lyscan::classifier::Budget;
use lyscan::numkit::C64;
use lyscan::operators::{Operator, WeightRule};
use lyscan::scanner::{metamorphic_translation, metamorphic_union, scan, ScanRegion};

fn main() {
    let b = Operator::backward_shift(WeightRule::Constant(C64::new(1.0, 0.0))).unwrap();
    let budget = Budget::default();

    // Covariance: scan T over W, scan λ0+T over W − λ0, compare pointwise.
    let lambda0 = C64::new(0.5, 0.0);
    let region = ScanRegion::auto(&b, 51);
    let base = scan(&b, region, &budget);
    let shifted = scan(&b.translate(lambda0), region.translated(-lambda0), &budget);
    let report = metamorphic_translation(&base, &shifted, lambda0).unwrap();
    println!(
        "translation covariance at λ0 = {lambda0}: {} ({} compared, {} disagreements)",
        if report.pass() { "pass" } else { "FAIL" },
        report.compared,
        report.disagreements.len()
    );

    // Union law: S(T₁ ⊕ T₂) = S(T₁) ∪ S(T₂); here the union is the full
    // radius-3 disk because 2D∖{0} ∪ 3D = 3D.
    let b2 = b.scale(C64::new(2.0, 0.0)).unwrap();
    let sum = Operator::direct_sum(vec![b.clone(), b2.clone()]).unwrap();
    let window = ScanRegion::new(C64::new(0.0, 0.0), 3.5, 3.5, 51);
    let scan_sum = scan(&sum, window, &budget);
    let scan_b = scan(&b, window, &budget);
    let scan_b2 = scan(&b2, window, &budget);
    let union = metamorphic_union(&scan_sum, &[&scan_b, &scan_b2]).unwrap();
    println!(
        "union law for B ⊕ 2B: {} ({} compared, {} disagreements)",
        if union.pass() { "pass" } else { "FAIL" },
        union.compared,
        union.disagreements.len()
    );
    let (chaotic, _, _) = scan_sum.counts();
    println!("the union scan shows {chaotic} chaotic cells — the radius-3 disk with λ = 0 included");
}
