//! Property-based invariants over randomized inputs.

use lyscan::dynamics::{dip_classify, orbit, DIP_EPSILON};
use lyscan::kalisch::{iterate_step, StepFunction};
use lyscan::numkit::{trapezoid, C64};
use lyscan::operators::{Operator, SeqVector, Vector, WeightRule};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn coeff() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

fn seq_vector() -> impl Strategy<Value = SeqVector> {
    prop::collection::vec(coeff(), 1..6).prop_map(SeqVector::new)
}

fn step_function() -> impl Strategy<Value = StepFunction> {
    (
        prop::collection::vec(0.01..(TAU - 0.01), 1..5),
        prop::collection::vec(coeff(), 6),
    )
        .prop_map(|(mut cuts, values)| {
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let mut breakpoints = vec![0.0];
            breakpoints.extend(cuts);
            let values = values[..breakpoints.len()].to_vec();
            StepFunction::new(breakpoints, values).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Full-period trapezoid sums of characters e^{ikt} vanish for k ≠ 0.
    #[test]
    fn trapezoid_suppresses_characters(k in 1i32..500) {
        let n = 4096usize;
        let step = TAU / n as f64;
        let samples: Vec<C64> =
            (0..=n).map(|j| C64::from_polar(1.0, k as f64 * step * j as f64)).collect();
        prop_assert!(trapezoid(&samples, step).norm() <= 1e-6);
    }

    /// Closed-form iterates agree with repeated application for every
    /// sequence kind.
    #[test]
    fn iterate_is_a_semigroup_on_sequences(
        x in seq_vector(),
        n in 1u64..16,
        lam_re in -1.5..1.5f64,
        lam_im in -1.5..1.5f64,
    ) {
        let ops = [
            Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap(),
            Operator::forward_shift(WeightRule::reciprocal()).unwrap(),
            Operator::diagonal(WeightRule::geometric(c(0.7, 0.2))).unwrap(),
        ];
        for base in ops {
            let op = base.translate(c(lam_re, lam_im));
            let direct = op.iterate(n, &Vector::Seq(x.clone())).unwrap();
            let mut stepwise = Vector::Seq(x.clone());
            for _ in 0..n {
                stepwise = op.apply(&stepwise).unwrap();
            }
            let dev = direct.sub(&stepwise).unwrap().norm();
            prop_assert!(dev <= 1e-9 * stepwise.norm().max(1.0), "dev = {dev}");
        }
    }

    /// The translated spectrum model is the model translated.
    #[test]
    fn spectrum_translation_covariance(lam_re in -3.0..3.0f64, lam_im in -3.0..3.0f64) {
        let lam = c(lam_re, lam_im);
        let ops = [
            Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap(),
            Operator::forward_shift(WeightRule::reciprocal()).unwrap(),
            Operator::kalisch(),
        ];
        for op in ops {
            let translated = op.translate(lam);
            let expected = op.spectrum().translated(lam);
            prop_assert_eq!(translated.spectrum(), &expected);
        }
    }

    /// Inner products are conjugate-symmetric with real nonnegative squares.
    #[test]
    fn inner_product_conjugate_symmetry(u in seq_vector(), v in seq_vector()) {
        let uv = u.inner(&v);
        let vu = v.inner(&u);
        prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
        let uu = u.inner(&u);
        prop_assert!(uu.im.abs() <= 1e-12 * (1.0 + uu.re.abs()));
        prop_assert!(uu.re >= -1e-15);
    }

    /// Step functions are an exact invariant class for the Kalisch iterate:
    /// one application of (w+S) matches the n = 1 closed form, and the
    /// squared norm decomposes over the eigen-jumps.
    #[test]
    fn step_iterate_base_case(f in step_function(), w_re in -1.0..1.0f64, w_im in -1.0..1.0f64) {
        let w = c(w_re, w_im);
        let direct = iterate_step(w, 1, &f).unwrap();
        let manual = iterate_step(c(0.0, 0.0), 1, &f).unwrap().add(&f.scale(w));
        prop_assert!(direct.sub(&manual).norm() <= 1e-10 * (1.0 + f.norm()));
    }

    /// Dip classification is a pure function of the orbit record.
    #[test]
    fn dip_classification_is_deterministic(x in seq_vector(), lam in -1.2..1.2f64) {
        prop_assume!(!x.is_zero());
        let op = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0)))
            .unwrap()
            .translate(c(lam, 0.0));
        let rec1 = orbit(&op, &Vector::Seq(x.clone()), 512).unwrap();
        let rec2 = orbit(&op, &Vector::Seq(x.clone()), 512).unwrap();
        prop_assert_eq!(dip_classify(&rec1, DIP_EPSILON), dip_classify(&rec2, DIP_EPSILON));
        prop_assert_eq!(rec1.samples, rec2.samples);
    }

    /// Unimodular scaling leaves every orbit norm unchanged.
    #[test]
    fn unimodular_scaling_preserves_norms(
        x in seq_vector(),
        phase in 0.0..TAU,
        n in 0u64..32,
    ) {
        let op = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0)))
            .unwrap()
            .translate(c(0.7, -0.2));
        let scaled = op.scale(C64::from_polar(1.0, phase)).unwrap();
        let a = op.iterate(n, &Vector::Seq(x.clone())).unwrap().norm();
        let b = scaled.iterate(n, &Vector::Seq(x.clone())).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }
}
