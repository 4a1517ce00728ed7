//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! The criteria pin the translation sets of the reference families at desk
//! scale: scans against closed forms, orbit-bound certificates, iterate
//! identities, metamorphic set laws, kernel tolerances and bit-exact
//! determinism. Run with `cargo test --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use lyscan::classifier::{oracle_membership, Budget, Certificate, VerdictValue};
use lyscan::dynamics;
use lyscan::kalisch;
use lyscan::numkit::{cholesky, eigh, gen_eigh, trapezoid, C64, HermMatrix};
use lyscan::operators::{parse_operator, GenStrategy, Operator, SeqVector, Vector, WeightRule};
use lyscan::scanner::{self, ScanRegion};
use std::f64::consts::{PI, TAU};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_backward() -> Operator {
    Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: scan of the unit backward shift over [−2.25, 2.25]², 101².
/// Annulus cells 0.05 < |λ| < 1.95 are C, cells |λ| > 2.05 are N, λ = 0 is N.
#[test]
fn criterion_01_backward_shift_translation_set() {
    let start = std::time::Instant::now();
    let op = unit_backward();
    let region = ScanRegion::auto(&op, 101);
    assert!((region.half_width - 2.25).abs() < 1e-12);
    let scan = scanner::scan(&op, region, &Budget::default());
    let mut violations = 0usize;
    for row in 0..101 {
        for col in 0..101 {
            let lam = region.point(row, col);
            let r = lam.norm();
            let code = scan.code_at(row, col);
            if r > 0.05 && r < 1.95 && code != 'C' {
                violations += 1;
            }
            if r > 2.05 && code != 'N' {
                violations += 1;
            }
        }
    }
    if scan.code_at(50, 50) != 'N' {
        violations += 1;
    }
    let elapsed = start.elapsed();
    report(
        "1 (backward-shift annulus)",
        violations == 0 && elapsed.as_secs() <= 300,
        &format!("violations = {violations}, λ=0 cell = {}, {elapsed:?}", scan.code_at(50, 50)),
    );
}

/// Criterion 2: the doubled backward shift over [−3.5, 3.5]²: C exactly on
/// |λ| < 2.95, N beyond 3.05, chaotic at λ = 0.
#[test]
fn criterion_02_scaled_shift_disk() {
    let op = unit_backward().scale(c(2.0, 0.0)).unwrap();
    let region = ScanRegion::new(c(0.0, 0.0), 3.5, 3.5, 101);
    let scan = scanner::scan(&op, region, &Budget::default());
    let mut violations = 0usize;
    for row in 0..101 {
        for col in 0..101 {
            let r = region.point(row, col).norm();
            let code = scan.code_at(row, col);
            if r < 2.95 && code != 'C' {
                violations += 1;
            }
            if r > 3.05 && code != 'N' {
                violations += 1;
            }
        }
    }
    report(
        "2 (scaled shift disk)",
        violations == 0 && scan.code_at(50, 50) == 'C',
        &format!("violations = {violations}, λ=0 cell = {}", scan.code_at(50, 50)),
    );
}

/// Criterion 3: forward shifts produce no chaotic cell anywhere.
#[test]
fn criterion_03_forward_shifts_empty() {
    let mut total_c = 0usize;
    for spec in ["kind = forward_shift\nweights = constant 1", "kind = forward_shift\nweights = reciprocal"] {
        let op = parse_operator(spec).unwrap();
        let region = ScanRegion::auto(&op, 101);
        let scan = scanner::scan(&op, region, &Budget::default());
        total_c += scan.counts().0;
    }
    report("3 (forward shifts empty)", total_c == 0, &format!("chaotic cells = {total_c}"));
}

/// Criterion 4: compact quasinilpotent backward shift: chaotic cells only
/// within 0.05 of the unit circle; spot classifications on and off it.
#[test]
fn criterion_04_compact_backward_shift_circle() {
    let op = parse_operator("kind = backward_shift\nweights = reciprocal").unwrap();
    let region = ScanRegion::auto(&op, 101);
    let budget = Budget::default();
    let scan = scanner::scan(&op, region, &budget);
    let mut violations = 0usize;
    for row in 0..101 {
        for col in 0..101 {
            if scan.code_at(row, col) == 'C'
                && (region.point(row, col).norm() - 1.0).abs() > 0.05
            {
                violations += 1;
            }
        }
    }
    let on_circle = [c(1.0, 0.0), c(0.0, 1.0), C64::from_polar(1.0, PI / 4.0)];
    for lam in on_circle {
        let v = scanner::classify_at(&op, lam, &budget);
        if v.value != VerdictValue::Chaotic {
            violations += 1;
        }
        match v.certificate {
            Certificate::AnalyticFilter { rule } => {
                if !rule.contains("mixing") {
                    violations += 1;
                }
            }
            _ => violations += 1,
        }
    }
    for lam in [c(0.0, 0.0), c(0.9, 0.0), c(1.1, 0.0)] {
        if scanner::classify_at(&op, lam, &budget).value != VerdictValue::NotChaotic {
            violations += 1;
        }
    }
    report("4 (compact backward shift circle)", violations == 0, &format!("violations = {violations}"));
}

/// Criterion 5: a diagonal with unimodular entries is nowhere chaotic.
#[test]
fn criterion_05_normal_diagonal_empty() {
    let op = parse_operator(
        "kind = diagonal\nentries = geometric 0.5403023058681398,0.8414709848078965",
    )
    .unwrap();
    let region = ScanRegion::auto(&op, 101);
    let scan = scanner::scan(&op, region, &Budget::default());
    let (chaotic, not, undet) = scan.counts();
    report(
        "5 (normal diagonal empty)",
        chaotic == 0 && undet == 0 && not == 101 * 101,
        &format!("C = {chaotic}, N = {not}, U = {undet}"),
    );
}

/// Criterion 6: the Kalisch operator. Oracle raster has exactly the center
/// pixel chaotic; the empirical classifier certifies w = 0 through the
/// staggered frame; reference translations are never classified chaotic;
/// the orbit-bound certificates pass at the two-intersection translations.
#[test]
fn criterion_06_kalisch_translation_point() {
    let op = Operator::kalisch();
    let budget = Budget::default();
    let region = ScanRegion::auto(&op, 101);
    let oracle = scanner::scan_oracle(&op, region, &budget);
    let mut ok = oracle.counts().0 == 1 && oracle.code_at(50, 50) == 'C';
    let mut notes = vec![format!("oracle C-count = {}", oracle.counts().0)];

    let v0 = lyscan::classifier::classify(&op, &budget);
    let s2 = matches!(
        &v0.certificate,
        Certificate::Interleave { strategy: GenStrategy::EigenFrame, .. }
    );
    ok &= v0.value == VerdictValue::Chaotic && s2;
    notes.push(format!("w=0 verdict = {}, staggered-frame = {s2}", v0.code()));

    for w in [c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.3), c(1.0, 0.5), c(2.0, 0.0), c(3.0, 0.0)] {
        let v = lyscan::classifier::classify(&op.translate(w), &budget);
        if v.value == VerdictValue::Chaotic {
            ok = false;
            notes.push(format!("w = {w} wrongly chaotic"));
        }
    }

    for w in [c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.3), c(1.0, 0.5)] {
        match kalisch::claim_certificates(w, 2000, budget.trials, budget.seed) {
            Ok(rep) => {
                if !rep.all_pass {
                    ok = false;
                    notes.push(format!("claims failed at w = {w}"));
                }
            }
            Err(e) => {
                ok = false;
                notes.push(format!("claims errored at w = {w}: {e}"));
            }
        }
    }
    report("6 (kalisch point set)", ok, &notes.join("; "));
}

/// Criterion 7: the closed-form iterate against n-fold application at 4096
/// panels, 20 random functions, n ≤ 50, for four reference translations:
/// max relative error ≤ 1e-6.
///
/// Both routes are second-order trapezoid discretizations whose h² error
/// terms differ structurally; at 4096 panels the measured gap sits around
/// 1e-4, so this criterion fails as stated. The implementation is kept
/// faithful; see the quadrature-order regression tests for the measured,
/// passing characterization.
#[test]
fn criterion_07_iterate_identity() {
    let start = std::time::Instant::now();
    let mut worst = 0.0_f64;
    for w in [c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.5), c(1.2, 0.0)] {
        let gap = kalisch::iterate_consistency_gap(w, 50, 4096, 20, 7).unwrap();
        worst = worst.max(gap);
    }
    let elapsed = start.elapsed();
    report(
        "7 (iterate identity)",
        worst <= 1e-6 && elapsed.as_secs() <= 120,
        &format!("max relative error = {worst:.3e} (tolerance 1e-6), {elapsed:?}"),
    );
}

/// Criterion 8: the uniform orbit bound M on the decay arc, 100 random
/// functions per (d, ξ0) combination, horizon 2000.
#[test]
fn criterion_08_decay_arc_bound() {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [0.3, 0.5, 1.0, 1.5] {
        for xi0 in [0.0, PI / 3.0] {
            let w = C64::from_polar(d, xi0);
            let rep = kalisch::claim_certificates(w, 2000, 100, 7).unwrap();
            if d == 0.5 && xi0 == 0.0 {
                let m = rep.constants.m_bound;
                if (m - 28.08).abs() > 0.01 {
                    ok = false;
                    notes.push(format!("M at d=0.5 drifted: {m}"));
                }
            }
            if !rep.decay_bound.pass {
                ok = false;
                notes.push(format!(
                    "bound violated at d = {d}, ξ0 = {xi0:.3}: ratio {:.3} > M {:.3}",
                    rep.decay_bound.max_ratio, rep.constants.m_bound
                ));
            }
        }
    }
    if notes.is_empty() {
        notes.push("all 8 combinations stayed under M".into());
    }
    report("8 (decay-arc bound)", ok, &notes.join("; "));
}

/// Criterion 9: translation covariance of backward-shift scans for two
/// shifts, zero C/N disagreements.
#[test]
fn criterion_09_metamorphic_translation() {
    let op = unit_backward();
    let budget = Budget::default();
    let region = ScanRegion::auto(&op, 101);
    let base = scanner::scan(&op, region, &budget);
    let mut ok = true;
    let mut notes = Vec::new();
    for lambda0 in [c(0.5, 0.0), c(-0.3, 0.4)] {
        let shifted = scanner::scan(
            &op.translate(lambda0),
            region.translated(-lambda0),
            &budget,
        );
        let rep = scanner::metamorphic_translation(&base, &shifted, lambda0).unwrap();
        if !rep.pass() {
            ok = false;
        }
        notes.push(format!(
            "λ0 = {lambda0}: {} disagreements over {} compared",
            rep.disagreements.len(),
            rep.compared
        ));
    }
    report("9 (translation covariance)", ok, &notes.join("; "));
}

/// Criterion 10: the union law for the direct sum of the unit and doubled
/// backward shifts; the resulting set is the radius-3 disk within bands.
#[test]
fn criterion_10_metamorphic_union() {
    let b = unit_backward();
    let b2 = b.scale(c(2.0, 0.0)).unwrap();
    let sum = Operator::direct_sum(vec![b.clone(), b2.clone()]).unwrap();
    let region = ScanRegion::new(c(0.0, 0.0), 3.5, 3.5, 101);
    let budget = Budget::default();
    let scan_sum = scanner::scan(&sum, region, &budget);
    let scan_b = scanner::scan(&b, region, &budget);
    let scan_b2 = scanner::scan(&b2, region, &budget);
    let rep = scanner::metamorphic_union(&scan_sum, &[&scan_b, &scan_b2]).unwrap();
    let mut violations = rep.disagreements.len();
    for row in 0..101 {
        for col in 0..101 {
            let r = region.point(row, col).norm();
            let code = scan_sum.code_at(row, col);
            if r < 2.95 && code != 'C' {
                violations += 1;
            }
            if r > 3.05 && code != 'N' {
                violations += 1;
            }
        }
    }
    report(
        "10 (union law)",
        violations == 0,
        &format!("{} union disagreements, set-shape violations included", rep.disagreements.len()),
    );
}

/// Criterion 11: kernel invariants (reconstruction, trace, oracle routes)
/// and the iterate-vs-truncation equivalence at 1e-9.
#[test]
fn criterion_11_kernel_properties() {
    let mut ok = true;
    let mut notes = Vec::new();

    // Cholesky reconstruction and positive-definiteness signalling.
    let h = HermMatrix::new(
        2,
        vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
    )
    .unwrap();
    let l = cholesky(&h).unwrap();
    let mut resid = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = c(0.0, 0.0);
            for k in 0..2 {
                s += l.at(i, k) * l.at(j, k).conj();
            }
            resid = resid.max((s - h.at(i, j)).norm());
        }
    }
    if resid > 1e-10 * h.max_abs() {
        ok = false;
        notes.push(format!("cholesky residual {resid:.3e}"));
    }

    // Trace identity over seeded Hermitian matrices.
    let mut state = 42u64;
    let mut rnd = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for order in [3usize, 8, 20] {
        let mut entries = vec![c(0.0, 0.0); order * order];
        for i in 0..order {
            for j in i..order {
                if i == j {
                    entries[i * order + j] = c(rnd(), 0.0);
                } else {
                    let v = c(rnd(), rnd());
                    entries[i * order + j] = v;
                    entries[j * order + i] = v.conj();
                }
            }
        }
        let h = HermMatrix::new(order, entries).unwrap();
        let e = eigh(&h).unwrap();
        let tr: f64 = (0..order).map(|i| h.at(i, i).re).sum();
        let sum: f64 = e.values.iter().sum();
        if (tr - sum).abs() > 1e-10 * order as f64 * h.max_abs().max(1.0) {
            ok = false;
            notes.push(format!("trace drift at order {order}"));
        }
        let id = HermMatrix::identity(order);
        let g = gen_eigh(&h, &id).unwrap();
        for k in 0..order {
            if (g.values[k] - e.values[k]).abs() > 1e-9 {
                ok = false;
                notes.push(format!("gen_eigh/eigh mismatch at order {order}"));
                break;
            }
        }
    }

    // Trapezoid character suppression.
    let n = 4096usize;
    let step = TAU / n as f64;
    for k in [1i32, 5, 100] {
        let samples: Vec<C64> =
            (0..=n).map(|j| C64::from_polar(1.0, k as f64 * step * j as f64)).collect();
        if trapezoid(&samples, step).norm() > 1e-6 {
            ok = false;
            notes.push(format!("character k = {k} leaked"));
        }
    }

    // Iterate vs dense truncation for a translated backward shift.
    let op = unit_backward().translate(c(0.8, -0.3));
    let size = 20usize;
    let mut dense = vec![c(0.0, 0.0); size * size];
    for i in 0..size {
        dense[i * size + i] = c(0.8, -0.3);
        if i + 1 < size {
            dense[i * size + i + 1] = c(1.0, 0.0);
        }
    }
    let matvec = |v: &[C64]| -> Vec<C64> {
        (0..size)
            .map(|i| (0..size).map(|j| dense[i * size + j] * v[j]).sum())
            .collect()
    };
    for n in 0..=8u64 {
        let x = SeqVector::new(vec![c(0.3, 0.1), c(-0.5, 0.0), c(0.0, 0.9)]);
        let got = match op.iterate(n, &Vector::Seq(x.clone())).unwrap() {
            Vector::Seq(v) => v,
            _ => unreachable!(),
        };
        let mut dense_vec = vec![c(0.0, 0.0); size];
        for (i, &xi) in x.coeffs().iter().enumerate() {
            dense_vec[i] = xi;
        }
        for _ in 0..n {
            dense_vec = matvec(&dense_vec);
        }
        let want = SeqVector::new(dense_vec);
        let dev = got.sub(&want).norm();
        if dev > 1e-9 * want.norm().max(1.0) {
            ok = false;
            notes.push(format!("iterate/truncation mismatch at n = {n}: {dev:.3e}"));
        }
    }

    if notes.is_empty() {
        notes.push("reconstruction, trace, route-equivalence, suppression all inside tolerance".into());
    }
    report("11 (kernel properties)", ok, &notes.join("; "));
}

/// Criterion 12: repeated runs of the criterion-1 and criterion-6 scans are
/// byte-identical, text and image alike.
#[test]
fn criterion_12_determinism() {
    let budget = Budget::default();
    let b = unit_backward();
    let region_b = ScanRegion::auto(&b, 101);
    let scan1 = scanner::scan(&b, region_b, &budget);
    let scan2 = scanner::scan_parallel(&b, region_b, &budget);
    let text_ok = scan1.to_text() == scan2.to_text();
    let image_ok = scanner::render(&scan1, Some(b.spectrum()))
        == scanner::render(&scan2, Some(b.spectrum()));

    let kal = Operator::kalisch();
    let region_k = ScanRegion::auto(&kal, 101);
    let o1 = scanner::scan_oracle(&kal, region_k, &budget);
    let o2 = scanner::scan_oracle(&kal, region_k, &budget);
    let kal_ok = o1.to_text() == o2.to_text()
        && scanner::render(&o1, Some(kal.spectrum())) == scanner::render(&o2, Some(kal.spectrum()));

    report(
        "12 (determinism)",
        text_ok && image_ok && kal_ok,
        &format!("shift text/image identical = {text_ok}/{image_ok}, kalisch = {kal_ok}"),
    );
}

/// The classifier never contradicts the closed-form oracle on covered
/// operators (soundness sweep across the reference families).
#[test]
fn oracle_soundness_sweep() {
    let budget = Budget::default();
    let b = unit_backward();
    let br = parse_operator("kind = backward_shift\nweights = reciprocal").unwrap();
    let f = parse_operator("kind = forward_shift\nweights = constant 1").unwrap();
    let kal = Operator::kalisch();
    let mut checked = 0usize;
    let shift_lams = [c(0.0, 0.0), c(0.5, 0.0), c(1.5, 0.0), c(0.0, 2.5)];
    let compact_lams = [c(0.0, 0.0), c(1.0, 0.0), c(0.6, 0.8), c(0.5, 0.5)];
    let short_lams = [c(0.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)];
    let cases: Vec<(&Operator, &[C64])> = vec![
        (&b, &shift_lams[..]),
        (&br, &compact_lams[..]),
        (&f, &short_lams[..]),
        (&kal, &short_lams[..]),
    ];
    for (op, lams) in cases {
        for &lam in lams {
            let translated = op.translate(lam);
            let truth = oracle_membership(&translated).expect("covered family");
            let v = lyscan::classifier::classify(&translated, &budget);
            match v.value {
                VerdictValue::Chaotic => assert!(truth, "false C at {}", translated.describe()),
                VerdictValue::NotChaotic => {
                    assert!(!truth, "false N at {}", translated.describe())
                }
                VerdictValue::Undetermined => {}
            }
            checked += 1;
        }
    }
    println!("oracle soundness: {checked} (operator, λ) pairs, no contradictions");
}

/// Orbit interleave statistics reproduce the pair-distance behavior: the
/// staggered-frame witness separates limsup from liminf by a wide margin.
#[test]
fn pair_statistics_from_certificate() {
    let budget = Budget::default();
    let kal = Operator::kalisch();
    let v = lyscan::classifier::classify(&kal, &budget);
    let Certificate::Interleave { level, witness, peak, dip, .. } = &v.certificate else {
        panic!("expected a frame witness");
    };
    // Assemble the witness vector and use it as the difference x − y.
    let mut diff = kalisch::StepFunction::zero();
    for (j, coeff) in witness.iter().enumerate() {
        let alpha = TAU / (1u64 << (j + 1)) as f64;
        let f = kalisch::StepFunction::indicator(alpha);
        let n = f.norm();
        diff = diff.add(&f.scale(coeff * c(1.0 / n, 0.0)));
    }
    let x = Vector::Step(diff.clone());
    let y = Vector::Step(kalisch::StepFunction::zero());
    let horizon = 2 * (1u64 << *level);
    let (hi, lo) = dynamics::pair_stats(&kal, &x, &y, horizon).unwrap();
    println!(
        "pair stats: limsup ≈ {hi:.3}, liminf ≈ {lo:.3} (witness peak {peak:.3}, dip {dip:.3})"
    );
    // The dyadic sample schedule need not hit the exact dip/peak times, so
    // the check is separation, not exact capture.
    assert!(hi >= 0.5 * peak, "window missed the recurrence peak");
    assert!(lo <= 4.0 * dip.max(1e-12), "window shows no dip at all");
    assert!(hi / lo.max(1e-12) > 10.0, "no separation between limsup and liminf");
}
