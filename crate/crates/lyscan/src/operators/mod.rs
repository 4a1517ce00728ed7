//! Operator families as immutable descriptions.
//!
//! Every operator here is kept in the canonical form `λ·I + base`, where the
//! base is a weighted unilateral shift or diagonal on ℓ²(ℕ), a scalar
//! multiple of the Kalisch operator on L²[0, 2π], or a direct sum of such
//! operators (sums distribute translations and scalings into their parts).
//! Scaling folds into the weight rules, so `2·backward_shift(1)` and
//! `backward_shift(2)` are the same description.
//!
//! The point of the representation is closed-form iteration: shift powers
//! are weight products, translations expand binomially (exact because λ·I
//! commutes with everything), diagonals power pointwise and the Kalisch base
//! uses its own iterate identity. All magnitude bookkeeping runs in log
//! scale so divergent orbits surface as a recoverable `Overflow` rather
//! than NaNs.

use crate::kalisch::{self, KalischError, SampledFunction, StepFunction};
use crate::numkit::{is_finite_c, C64};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

mod parse;

pub use parse::parse_operator;

/// Magnitudes beyond this are treated as +∞ (divergent orbit).
pub const OVERFLOW_LIMIT: f64 = 1e300;
const LN_OVERFLOW: f64 = 690.0; // ln(1e300) ≈ 690.8
const LN_UNDERFLOW: f64 = -760.0;

/// Tail cutoff for eigenvector and Neumann series truncation.
pub const SERIES_TAIL: f64 = 1e-18;

/// Decay-rate margin for the inside-eigenvalue generator region.
pub const EIGEN_DECAY_MARGIN: f64 = 0.9;

#[derive(Debug, Error)]
pub enum OpError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("vector does not live in the operator's space")]
    SpaceMismatch,
    #[error("iterate overflow at n = {0}; orbit treated as +∞ from here")]
    Overflow(u64),
    #[error("strategy {strategy} unsupported here: {why}")]
    UnsupportedStrategy { strategy: &'static str, why: String },
    #[error("eigenvalue region is empty for this translation")]
    EmptyRegion,
    #[error("function-space error: {0}")]
    Function(String),
}

impl From<KalischError> for OpError {
    fn from(e: KalischError) -> Self {
        match e {
            KalischError::Overflow(n) => OpError::Overflow(n),
            other => OpError::Function(other.to_string()),
        }
    }
}

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// ---------------------------------------------------------------------------
// Sequence vectors
// ---------------------------------------------------------------------------

/// Finitely supported ℓ²(ℕ) vector; coordinate k (1-indexed) lives at
/// `coeffs[k-1]`, with an implicit zero tail. Canonical form trims exact
/// zeros from the tail, so the last stored coefficient is nonzero unless the
/// vector is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    coeffs: Vec<C64>,
}

impl SeqVector {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|z| z.re == 0.0 && z.im == 0.0) {
            coeffs.pop();
        }
        SeqVector { coeffs }
    }

    pub fn zero() -> Self {
        SeqVector { coeffs: Vec::new() }
    }

    /// Standard basis vector e_k, k ≥ 1.
    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis index is 1-based");
        let mut coeffs = vec![cx(0.0, 0.0); k];
        coeffs[k - 1] = cx(1.0, 0.0);
        SeqVector { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coordinate k, 1-indexed; zero beyond the support.
    pub fn coeff(&self, k: usize) -> C64 {
        if k >= 1 && k <= self.coeffs.len() {
            self.coeffs[k - 1]
        } else {
            cx(0.0, 0.0)
        }
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        SeqVector::new(self.coeffs.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &SeqVector) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i + 1) + other.coeff(i + 1)).collect();
        SeqVector::new(coeffs)
    }

    pub fn sub(&self, other: &SeqVector) -> Self {
        self.add(&other.scale(cx(-1.0, 0.0)))
    }

    /// ℓ² pairing Σ u_k conj(v_k), linear in `self`.
    pub fn inner(&self, other: &SeqVector) -> C64 {
        let len = self.coeffs.len().min(other.coeffs.len());
        (0..len).map(|i| self.coeffs[i] * other.coeffs[i].conj()).sum()
    }
}

// ---------------------------------------------------------------------------
// Vectors across spaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Sequence,
    Function,
    Sum(Vec<Space>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Vector {
    Seq(SeqVector),
    Step(StepFunction),
    Sampled(SampledFunction),
    Sum(Vec<Vector>),
}

impl Vector {
    pub fn space(&self) -> Space {
        match self {
            Vector::Seq(_) => Space::Sequence,
            Vector::Step(_) | Vector::Sampled(_) => Space::Function,
            Vector::Sum(parts) => Space::Sum(parts.iter().map(|p| p.space()).collect()),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            Vector::Seq(v) => v.norm_sqr(),
            Vector::Step(f) => f.norm_sqr(),
            Vector::Sampled(f) => f.norm_sqr(),
            Vector::Sum(parts) => parts.iter().map(|p| p.norm_sqr()).sum(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: C64) -> Vector {
        match self {
            Vector::Seq(v) => Vector::Seq(v.scale(c)),
            Vector::Step(f) => Vector::Step(f.scale(c)),
            Vector::Sampled(f) => Vector::Sampled(f.scale(c)),
            Vector::Sum(parts) => Vector::Sum(parts.iter().map(|p| p.scale(c)).collect()),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector, OpError> {
        match (self, other) {
            (Vector::Seq(a), Vector::Seq(b)) => Ok(Vector::Seq(a.add(b))),
            (Vector::Step(a), Vector::Step(b)) => Ok(Vector::Step(a.add(b))),
            (Vector::Sampled(a), Vector::Sampled(b)) => {
                Ok(Vector::Sampled(a.add(b).map_err(OpError::from)?))
            }
            (Vector::Step(a), Vector::Sampled(b)) => {
                Ok(Vector::Sampled(a.to_sampled(b.panels()).add(b).map_err(OpError::from)?))
            }
            (Vector::Sampled(a), Vector::Step(b)) => {
                Ok(Vector::Sampled(a.add(&b.to_sampled(a.panels())).map_err(OpError::from)?))
            }
            (Vector::Sum(xs), Vector::Sum(ys)) if xs.len() == ys.len() => Ok(Vector::Sum(
                xs.iter().zip(ys).map(|(x, y)| x.add(y)).collect::<Result<_, _>>()?,
            )),
            _ => Err(OpError::SpaceMismatch),
        }
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector, OpError> {
        self.add(&other.scale(cx(-1.0, 0.0)))
    }

    /// Conjugate-symmetric pairing, linear in `self`. Exact for sequence and
    /// step representations, trapezoid-quadrature for sampled ones.
    pub fn inner(&self, other: &Vector) -> Result<C64, OpError> {
        match (self, other) {
            (Vector::Seq(a), Vector::Seq(b)) => Ok(a.inner(b)),
            (Vector::Step(a), Vector::Step(b)) => Ok(a.inner(b)),
            (Vector::Sampled(a), Vector::Sampled(b)) => a.inner(b).map_err(OpError::from),
            (Vector::Step(a), Vector::Sampled(b)) => {
                a.to_sampled(b.panels()).inner(b).map_err(OpError::from)
            }
            (Vector::Sampled(a), Vector::Step(b)) => {
                a.inner(&b.to_sampled(a.panels())).map_err(OpError::from)
            }
            (Vector::Sum(xs), Vector::Sum(ys)) if xs.len() == ys.len() => {
                let mut acc = cx(0.0, 0.0);
                for (x, y) in xs.iter().zip(ys) {
                    acc += x.inner(y)?;
                }
                Ok(acc)
            }
            _ => Err(OpError::SpaceMismatch),
        }
    }
}

// ---------------------------------------------------------------------------
// Weight rules
// ---------------------------------------------------------------------------

/// Weight sequence ω_1, ω_2, … for shifts, or diagonal entries d_1, d_2, ….
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    Constant(C64),
    /// Explicit head followed by a constant tail.
    List { head: Vec<C64>, tail: C64 },
    /// scale / n.
    Reciprocal { scale: C64 },
    /// scale · ratio^n, |ratio| ≤ 1 so the weights stay bounded.
    Geometric { scale: C64, ratio: C64 },
}

impl WeightRule {
    pub fn reciprocal() -> Self {
        WeightRule::Reciprocal { scale: cx(1.0, 0.0) }
    }

    pub fn geometric(ratio: C64) -> Self {
        WeightRule::Geometric { scale: cx(1.0, 0.0), ratio }
    }

    pub fn validate(&self) -> Result<(), OpError> {
        let finite_nonzero = |z: C64, what: &str| {
            if !is_finite_c(z) {
                Err(OpError::InvalidWeight(format!("{what} is not finite")))
            } else if z.norm() == 0.0 {
                Err(OpError::InvalidWeight(format!("{what} is zero; all weights must be nonzero")))
            } else {
                Ok(())
            }
        };
        match self {
            WeightRule::Constant(c) => finite_nonzero(*c, "constant weight"),
            WeightRule::List { head, tail } => {
                for (i, w) in head.iter().enumerate() {
                    finite_nonzero(*w, &format!("list weight #{}", i + 1))?;
                }
                finite_nonzero(*tail, "tail weight")
            }
            WeightRule::Reciprocal { scale } => finite_nonzero(*scale, "reciprocal scale"),
            WeightRule::Geometric { scale, ratio } => {
                finite_nonzero(*scale, "geometric scale")?;
                finite_nonzero(*ratio, "geometric ratio")?;
                if ratio.norm() > 1.0 + 1e-15 {
                    return Err(OpError::InvalidWeight(format!(
                        "geometric ratio modulus {} > 1 gives unbounded weights",
                        ratio.norm()
                    )));
                }
                Ok(())
            }
        }
    }

    /// ω_n for n ≥ 1.
    pub fn weight(&self, n: u64) -> C64 {
        match self {
            WeightRule::Constant(c) => *c,
            WeightRule::List { head, tail } => {
                head.get((n - 1) as usize).copied().unwrap_or(*tail)
            }
            WeightRule::Reciprocal { scale } => scale / n as f64,
            WeightRule::Geometric { scale, ratio } => {
                let r = ratio.norm();
                scale * C64::from_polar(r.powf(n as f64), n as f64 * ratio.arg())
            }
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            WeightRule::Constant(c) => c.norm(),
            WeightRule::List { head, tail } => head
                .iter()
                .map(|w| w.norm())
                .fold(tail.norm(), f64::max),
            WeightRule::Reciprocal { scale } => scale.norm(),
            WeightRule::Geometric { scale, ratio } => scale.norm() * ratio.norm(),
        }
    }

    /// Whether ω_n → 0; with nonzero weights this is compactness of the
    /// associated shift or diagonal.
    pub fn tends_to_zero(&self) -> bool {
        match self {
            WeightRule::Constant(_) => false,
            WeightRule::List { .. } => false,
            WeightRule::Reciprocal { .. } => true,
            WeightRule::Geometric { ratio, .. } => ratio.norm() < 1.0,
        }
    }

    pub fn all_unimodular(&self) -> bool {
        let uni = |z: C64| (z.norm() - 1.0).abs() <= 1e-12;
        match self {
            WeightRule::Constant(c) => uni(*c),
            WeightRule::List { head, tail } => head.iter().all(|w| uni(*w)) && uni(*tail),
            WeightRule::Reciprocal { .. } => false,
            WeightRule::Geometric { scale, ratio } => uni(*scale) && uni(*ratio),
        }
    }

    pub fn constant_value(&self) -> Option<C64> {
        match self {
            WeightRule::Constant(c) => Some(*c),
            _ => None,
        }
    }

    pub fn scaled(&self, c: C64) -> WeightRule {
        match self {
            WeightRule::Constant(v) => WeightRule::Constant(v * c),
            WeightRule::List { head, tail } => WeightRule::List {
                head: head.iter().map(|w| w * c).collect(),
                tail: tail * c,
            },
            WeightRule::Reciprocal { scale } => WeightRule::Reciprocal { scale: scale * c },
            WeightRule::Geometric { scale, ratio } => {
                WeightRule::Geometric { scale: scale * c, ratio: *ratio }
            }
        }
    }

    /// Spectral radius of the associated unilateral weighted shift:
    /// lim_n (sup_k |ω_k ⋯ ω_{k+n−1}|)^{1/n}.
    pub fn shift_radius(&self) -> f64 {
        match self {
            WeightRule::Constant(c) => c.norm(),
            WeightRule::List { tail, .. } => tail.norm(),
            WeightRule::Reciprocal { .. } => 0.0,
            WeightRule::Geometric { scale, ratio } => {
                if ratio.norm() < 1.0 {
                    0.0
                } else {
                    scale.norm()
                }
            }
        }
    }

    /// Closure of the entry set, as a diagonal spectrum model. Rules with
    /// infinitely many distinct entries are truncated; the accumulation
    /// point 0 is kept. Diagonal operators are normal, so this model is
    /// informational and never drives a chaos verdict.
    fn diagonal_points(&self) -> Vec<C64> {
        match self {
            WeightRule::Constant(c) => vec![*c],
            WeightRule::List { head, tail } => {
                let mut pts = head.clone();
                pts.push(*tail);
                pts
            }
            WeightRule::Reciprocal { .. } | WeightRule::Geometric { .. } => {
                let mut pts: Vec<C64> = (1..=64).map(|n| self.weight(n)).collect();
                pts.push(cx(0.0, 0.0));
                pts
            }
        }
    }

    fn describe(&self) -> String {
        let c = |z: C64| format!("{},{}", z.re, z.im);
        match self {
            WeightRule::Constant(v) => format!("constant({})", c(*v)),
            WeightRule::List { head, tail } => {
                let hs: Vec<String> = head.iter().map(|w| c(*w)).collect();
                format!("list({};tail={})", hs.join("|"), c(*tail))
            }
            WeightRule::Reciprocal { scale } => format!("reciprocal({})", c(*scale)),
            WeightRule::Geometric { scale, ratio } => {
                format!("geometric({};ratio={})", c(*scale), c(*ratio))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Spectrum models
// ---------------------------------------------------------------------------

/// Symbolic spectrum. Every family in scope has a known spectrum, and the
/// classifier's set-geometry rules need exact shapes, not numerics.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    ClosedDisk { center: C64, radius: f64 },
    Circle { center: C64, radius: f64 },
    /// Closure of finitely many points.
    Points(Vec<C64>),
    Union(Vec<SpectrumModel>),
}

impl SpectrumModel {
    pub fn translated(&self, lambda: C64) -> SpectrumModel {
        match self {
            SpectrumModel::ClosedDisk { center, radius } => {
                SpectrumModel::ClosedDisk { center: center + lambda, radius: *radius }
            }
            SpectrumModel::Circle { center, radius } => {
                SpectrumModel::Circle { center: center + lambda, radius: *radius }
            }
            SpectrumModel::Points(pts) => {
                SpectrumModel::Points(pts.iter().map(|p| p + lambda).collect())
            }
            SpectrumModel::Union(models) => {
                SpectrumModel::Union(models.iter().map(|m| m.translated(lambda)).collect())
            }
        }
    }

    pub fn scaled(&self, c: C64) -> SpectrumModel {
        match self {
            SpectrumModel::ClosedDisk { center, radius } => {
                SpectrumModel::ClosedDisk { center: center * c, radius: radius * c.norm() }
            }
            SpectrumModel::Circle { center, radius } => {
                SpectrumModel::Circle { center: center * c, radius: radius * c.norm() }
            }
            SpectrumModel::Points(pts) => {
                SpectrumModel::Points(pts.iter().map(|p| p * c).collect())
            }
            SpectrumModel::Union(models) => {
                SpectrumModel::Union(models.iter().map(|m| m.scaled(c)).collect())
            }
        }
    }

    /// max |z| over the model.
    pub fn radius(&self) -> f64 {
        match self {
            SpectrumModel::ClosedDisk { center, radius }
            | SpectrumModel::Circle { center, radius } => center.norm() + radius,
            SpectrumModel::Points(pts) => pts.iter().map(|p| p.norm()).fold(0.0, f64::max),
            SpectrumModel::Union(models) => {
                models.iter().map(|m| m.radius()).fold(0.0, f64::max)
            }
        }
    }

    /// min over the model of | |z| − 1 |, the distance to the unit circle in
    /// modulus. Exact: each shape's modulus range is an interval.
    pub fn unit_circle_distance(&self) -> f64 {
        fn interval_dist(lo: f64, hi: f64) -> f64 {
            if 1.0 < lo {
                lo - 1.0
            } else if 1.0 > hi {
                1.0 - hi
            } else {
                0.0
            }
        }
        match self {
            SpectrumModel::ClosedDisk { center, radius } => {
                interval_dist((center.norm() - radius).max(0.0), center.norm() + radius)
            }
            SpectrumModel::Circle { center, radius } => interval_dist(
                (center.norm() - radius).abs(),
                center.norm() + radius,
            ),
            SpectrumModel::Points(pts) => pts
                .iter()
                .map(|p| (p.norm() - 1.0).abs())
                .fold(f64::INFINITY, f64::min),
            SpectrumModel::Union(models) => models
                .iter()
                .map(|m| m.unit_circle_distance())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// min over the model of |z − p|.
    pub fn distance_to(&self, p: C64) -> f64 {
        match self {
            SpectrumModel::ClosedDisk { center, radius } => {
                ((p - center).norm() - radius).max(0.0)
            }
            SpectrumModel::Circle { center, radius } => ((p - center).norm() - radius).abs(),
            SpectrumModel::Points(pts) => {
                pts.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)
            }
            SpectrumModel::Union(models) => models
                .iter()
                .map(|m| m.distance_to(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            SpectrumModel::ClosedDisk { center, radius } => json!({
                "shape": "closed_disk", "center": [center.re, center.im], "radius": radius,
            }),
            SpectrumModel::Circle { center, radius } => json!({
                "shape": "circle", "center": [center.re, center.im], "radius": radius,
            }),
            SpectrumModel::Points(pts) => json!({
                "shape": "points",
                "points": pts.iter().map(|p| vec![p.re, p.im]).collect::<Vec<_>>(),
            }),
            SpectrumModel::Union(models) => json!({
                "shape": "union",
                "parts": models.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDir {
    /// (x₁, x₂, …) ↦ (0, ω₁x₁, ω₂x₂, …)
    Forward,
    /// (x₁, x₂, …) ↦ (ω₁x₂, ω₂x₃, …)
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    Shift { dir: ShiftDir, weights: WeightRule },
    Diagonal { entries: WeightRule },
    /// factor · S with S the Kalisch operator.
    Kalisch { factor: C64 },
    Sum(Vec<Operator>),
}

/// Open disk in ℂ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenDisk {
    pub center: C64,
    pub radius: f64,
}

impl OpenDisk {
    /// Whether the open disk meets the unit circle, with a safety margin so
    /// the answer is only `true` when certain.
    pub fn meets_unit_circle(&self) -> bool {
        (self.center.norm() - 1.0).abs() < self.radius - 1e-9
    }

    /// Whether the disk pokes outside the closed unit disk.
    pub fn escapes_closed_unit_disk(&self) -> bool {
        self.center.norm() + self.radius > 1.0 + 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Flags {
    pub normal: bool,
    pub compact: bool,
    pub isometry: bool,
    pub invertible: bool,
    pub cowen_douglas: Option<OpenDisk>,
}

/// Immutable operator description in the canonical form `translation + base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    base: BaseKind,
    translation: C64,
    flags: Flags,
    spectrum: SpectrumModel,
}

impl Operator {
    fn rebuild(base: BaseKind, translation: C64) -> Operator {
        let spectrum = Operator::spectrum_of(&base, translation);
        let flags = Operator::flags_of(&base, translation, &spectrum);
        Operator { base, translation, flags, spectrum }
    }

    fn spectrum_of(base: &BaseKind, translation: C64) -> SpectrumModel {
        match base {
            BaseKind::Shift { weights, .. } => {
                let r = weights.shift_radius();
                if r > 0.0 {
                    SpectrumModel::ClosedDisk { center: translation, radius: r }
                } else {
                    SpectrumModel::Points(vec![translation])
                }
            }
            BaseKind::Diagonal { entries } => SpectrumModel::Points(
                entries.diagonal_points().into_iter().map(|p| p + translation).collect(),
            ),
            BaseKind::Kalisch { factor } => {
                SpectrumModel::Circle { center: translation, radius: factor.norm() }
            }
            BaseKind::Sum(parts) => {
                SpectrumModel::Union(parts.iter().map(|p| p.spectrum.clone()).collect())
            }
        }
    }

    fn flags_of(base: &BaseKind, translation: C64, spectrum: &SpectrumModel) -> Flags {
        let zero_translation = translation.norm() == 0.0;
        let (normal, compact, isometry, cowen_douglas) = match base {
            BaseKind::Shift { dir, weights } => {
                let compact = weights.tends_to_zero();
                let isometry = zero_translation
                    && *dir == ShiftDir::Forward
                    && weights.constant_value().is_some_and(|c| (c.norm() - 1.0).abs() <= 1e-12);
                let cd = match (dir, weights.constant_value()) {
                    (ShiftDir::Backward, Some(c)) => {
                        Some(OpenDisk { center: translation, radius: c.norm() })
                    }
                    _ => None,
                };
                (false, compact && zero_translation, isometry, cd)
            }
            BaseKind::Diagonal { entries } => (
                true,
                entries.tends_to_zero() && zero_translation,
                zero_translation && entries.all_unimodular(),
                None,
            ),
            BaseKind::Kalisch { .. } => (false, false, false, None),
            BaseKind::Sum(parts) => (
                parts.iter().all(|p| p.flags.normal),
                parts.iter().all(|p| p.flags.compact),
                parts.iter().all(|p| p.flags.isometry),
                None,
            ),
        };
        Flags {
            normal,
            compact,
            isometry,
            invertible: spectrum.distance_to(cx(0.0, 0.0)) > 1e-9,
            cowen_douglas,
        }
    }

    pub fn forward_shift(weights: WeightRule) -> Result<Operator, OpError> {
        weights.validate()?;
        Ok(Operator::rebuild(BaseKind::Shift { dir: ShiftDir::Forward, weights }, cx(0.0, 0.0)))
    }

    pub fn backward_shift(weights: WeightRule) -> Result<Operator, OpError> {
        weights.validate()?;
        Ok(Operator::rebuild(BaseKind::Shift { dir: ShiftDir::Backward, weights }, cx(0.0, 0.0)))
    }

    pub fn diagonal(entries: WeightRule) -> Result<Operator, OpError> {
        entries.validate()?;
        Ok(Operator::rebuild(BaseKind::Diagonal { entries }, cx(0.0, 0.0)))
    }

    pub fn kalisch() -> Operator {
        Operator::rebuild(BaseKind::Kalisch { factor: cx(1.0, 0.0) }, cx(0.0, 0.0))
    }

    pub fn direct_sum(parts: Vec<Operator>) -> Result<Operator, OpError> {
        if parts.is_empty() {
            return Err(OpError::InvalidWeight("direct sum needs at least one part".into()));
        }
        // Nested sums flatten so translations keep distributing cleanly.
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p.base {
                BaseKind::Sum(inner) => flat.extend(inner),
                _ => flat.push(p),
            }
        }
        Ok(Operator::rebuild(BaseKind::Sum(flat), cx(0.0, 0.0)))
    }

    /// λ + self, canonicalized (sums push the translation into their parts).
    pub fn translate(&self, lambda: C64) -> Operator {
        match &self.base {
            BaseKind::Sum(parts) => {
                let moved: Vec<Operator> =
                    parts.iter().map(|p| p.translate(lambda)).collect();
                Operator::rebuild(BaseKind::Sum(moved), cx(0.0, 0.0))
            }
            _ => Operator::rebuild(self.base.clone(), self.translation + lambda),
        }
    }

    /// c · self, canonicalized: scale folds into weight rules and the
    /// Kalisch factor, and multiplies any existing translation.
    pub fn scale(&self, c: C64) -> Result<Operator, OpError> {
        if !is_finite_c(c) || c.norm() == 0.0 {
            return Err(OpError::InvalidWeight("scale factor must be finite and nonzero".into()));
        }
        let base = match &self.base {
            BaseKind::Shift { dir, weights } => {
                BaseKind::Shift { dir: *dir, weights: weights.scaled(c) }
            }
            BaseKind::Diagonal { entries } => BaseKind::Diagonal { entries: entries.scaled(c) },
            BaseKind::Kalisch { factor } => BaseKind::Kalisch { factor: factor * c },
            BaseKind::Sum(parts) => BaseKind::Sum(
                parts.iter().map(|p| p.scale(c)).collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(Operator::rebuild(base, self.translation * c))
    }

    pub fn base(&self) -> &BaseKind {
        &self.base
    }

    /// Direction and weight rule when the base is a shift.
    pub fn shift_info(&self) -> Option<(ShiftDir, &WeightRule)> {
        match &self.base {
            BaseKind::Shift { dir, weights } => Some((*dir, weights)),
            _ => None,
        }
    }

    /// Whether the translation-free base is a compact operator.
    pub fn base_is_compact(&self) -> bool {
        match &self.base {
            BaseKind::Shift { weights, .. } => weights.tends_to_zero(),
            BaseKind::Diagonal { entries } => entries.tends_to_zero(),
            BaseKind::Kalisch { .. } => false,
            BaseKind::Sum(parts) => parts.iter().all(|p| p.base_is_compact()),
        }
    }

    pub fn translation(&self) -> C64 {
        self.translation
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    pub fn spectrum(&self) -> &SpectrumModel {
        &self.spectrum
    }

    pub fn space(&self) -> Space {
        match &self.base {
            BaseKind::Shift { .. } | BaseKind::Diagonal { .. } => Space::Sequence,
            BaseKind::Kalisch { .. } => Space::Function,
            BaseKind::Sum(parts) => Space::Sum(parts.iter().map(|p| p.space()).collect()),
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectrum.radius()
    }

    /// Crude upper bound on the operator norm of the translation-free base,
    /// used to certify Neumann-series convergence.
    pub fn base_norm_bound(&self) -> f64 {
        match &self.base {
            BaseKind::Shift { weights, .. } => weights.sup_abs(),
            BaseKind::Diagonal { entries } => entries.sup_abs(),
            BaseKind::Kalisch { factor } => factor.norm() * (1.0 + TAU),
            BaseKind::Sum(parts) => parts
                .iter()
                .map(|p| p.base_norm_bound() + p.translation.norm())
                .fold(0.0, f64::max),
        }
    }

    pub fn inner(&self, u: &Vector, v: &Vector) -> Result<C64, OpError> {
        if u.space() != self.space() || v.space() != self.space() {
            return Err(OpError::SpaceMismatch);
        }
        u.inner(v)
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, OpError> {
        self.iterate(1, x)
    }

    /// Closed-form n-th iterate (λ + base)ⁿ x.
    pub fn iterate(&self, n: u64, x: &Vector) -> Result<Vector, OpError> {
        match (&self.base, x) {
            (BaseKind::Sum(parts), Vector::Sum(xs)) => {
                if parts.len() != xs.len() {
                    return Err(OpError::SpaceMismatch);
                }
                let out = parts
                    .iter()
                    .zip(xs)
                    .map(|(p, xi)| p.iterate(n, xi))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Vector::Sum(out))
            }
            (BaseKind::Diagonal { entries }, Vector::Seq(s)) => {
                Ok(Vector::Seq(iterate_diagonal(entries, self.translation, n, s)?))
            }
            (BaseKind::Shift { dir, weights }, Vector::Seq(s)) => {
                Ok(Vector::Seq(iterate_shift(*dir, weights, self.translation, n, s)?))
            }
            (BaseKind::Kalisch { factor }, Vector::Step(f)) => {
                let (w, scale) = kalisch_params(self.translation, *factor, n)?;
                let out = kalisch::iterate_step(w, n, f)?;
                Ok(Vector::Step(out.scale(scale)))
            }
            (BaseKind::Kalisch { factor }, Vector::Sampled(f)) => {
                let (w, scale) = kalisch_params(self.translation, *factor, n)?;
                let out = kalisch::iterate_sampled(w, n, f)?;
                Ok(Vector::Sampled(out.scale(scale)))
            }
            _ => Err(OpError::SpaceMismatch),
        }
    }

    /// Canonical one-line description; stable across runs, used for
    /// fingerprinting scan artifacts.
    pub fn describe(&self) -> String {
        let base = match &self.base {
            BaseKind::Shift { dir: ShiftDir::Forward, weights } => {
                format!("forward_shift({})", weights.describe())
            }
            BaseKind::Shift { dir: ShiftDir::Backward, weights } => {
                format!("backward_shift({})", weights.describe())
            }
            BaseKind::Diagonal { entries } => format!("diagonal({})", entries.describe()),
            BaseKind::Kalisch { factor } => {
                format!("kalisch(factor={},{})", factor.re, factor.im)
            }
            BaseKind::Sum(parts) => {
                let ps: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("direct_sum[{}]", ps.join(" ⊕ "))
            }
        };
        if self.translation.norm() == 0.0 {
            base
        } else {
            format!("translate({},{}; {})", self.translation.re, self.translation.im, base)
        }
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.describe().as_bytes());
        let out = h.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Structured metadata document (kind, flags, spectrum model).
    pub fn metadata_json(&self) -> serde_json::Value {
        let kind = match &self.base {
            BaseKind::Shift { dir, weights } => json!({
                "kind": if *dir == ShiftDir::Forward { "forward_shift" } else { "backward_shift" },
                "weights": weights.describe(),
            }),
            BaseKind::Diagonal { entries } => json!({
                "kind": "diagonal", "entries": entries.describe(),
            }),
            BaseKind::Kalisch { factor } => json!({
                "kind": "kalisch", "factor": [factor.re, factor.im],
            }),
            BaseKind::Sum(parts) => json!({
                "kind": "direct_sum",
                "parts": parts.iter().map(|p| p.metadata_json()).collect::<Vec<_>>(),
            }),
        };
        json!({
            "operator": kind,
            "translation": [self.translation.re, self.translation.im],
            "flags": {
                "normal": self.flags.normal,
                "compact": self.flags.compact,
                "isometry": self.flags.isometry,
                "invertible": self.flags.invertible,
                "cowen_douglas": self.flags.cowen_douglas.map(|d| json!({
                    "center": [d.center.re, d.center.im], "radius": d.radius,
                })),
            },
            "spectrum": self.spectrum.to_json(),
            "spectral_radius": self.spectral_radius(),
            "fingerprint": self.fingerprint(),
        })
    }

    /// (λ + base)⁻¹ v by the Neumann expansion
    /// λ⁻¹ Σ_k (−base/λ)^k v, with dynamic convergence detection (the series
    /// terminates exactly for backward shifts on finite support).
    pub fn inverse_apply(&self, v: &Vector) -> Result<Vector, OpError> {
        let lambda = self.translation;
        if lambda.norm() == 0.0 {
            return Err(OpError::UnsupportedStrategy {
                strategy: "inverse",
                why: "Neumann expansion needs a nonzero translation".into(),
            });
        }
        let base_op = Operator::rebuild(self.base.clone(), cx(0.0, 0.0));
        let neg_inv = -cx(1.0, 0.0) / lambda;
        let mut term = v.clone();
        let mut acc = v.clone();
        let v_norm = v.norm();
        for k in 1..=20_000u64 {
            term = base_op.apply(&term)?.scale(neg_inv);
            let t = term.norm();
            if t <= SERIES_TAIL * v_norm.max(acc.norm()) {
                return Ok(acc.add(&term)?.scale(cx(1.0, 0.0) / lambda));
            }
            if t > 1e9 * v_norm.max(1.0) {
                return Err(OpError::UnsupportedStrategy {
                    strategy: "inverse",
                    why: format!("Neumann series diverges (term norm {t:.3e} at k = {k})"),
                });
            }
            acc = acc.add(&term)?;
        }
        Err(OpError::UnsupportedStrategy {
            strategy: "inverse",
            why: "Neumann series did not settle within 20000 terms".into(),
        })
    }
}

fn kalisch_params(translation: C64, factor: C64, n: u64) -> Result<(C64, C64), OpError> {
    // (λ + c·S)ⁿ = cⁿ (λ/c + S)ⁿ
    let w = translation / factor;
    let ln_mag = n as f64 * factor.norm().ln();
    if ln_mag > LN_OVERFLOW {
        return Err(OpError::Overflow(n));
    }
    let scale = if ln_mag < LN_UNDERFLOW {
        cx(0.0, 0.0)
    } else {
        C64::from_polar(ln_mag.exp(), n as f64 * factor.arg())
    };
    Ok((w, scale))
}

// ---------------------------------------------------------------------------
// Closed-form iterates for sequence kinds
// ---------------------------------------------------------------------------

fn polar_checked(ln_mag: f64, phase: f64, n: u64) -> Result<C64, OpError> {
    if ln_mag > LN_OVERFLOW {
        return Err(OpError::Overflow(n));
    }
    if ln_mag < LN_UNDERFLOW || ln_mag.is_nan() {
        return Ok(cx(0.0, 0.0));
    }
    Ok(C64::from_polar(ln_mag.exp(), phase))
}

fn iterate_diagonal(
    entries: &WeightRule,
    lambda: C64,
    n: u64,
    x: &SeqVector,
) -> Result<SeqVector, OpError> {
    if n == 0 {
        return Ok(x.clone());
    }
    let mut coeffs = Vec::with_capacity(x.support_len());
    for (i, &xi) in x.coeffs().iter().enumerate() {
        if xi.norm() == 0.0 {
            coeffs.push(cx(0.0, 0.0));
            continue;
        }
        let z = lambda + entries.weight(i as u64 + 1);
        let r = z.norm();
        if r == 0.0 {
            coeffs.push(cx(0.0, 0.0));
            continue;
        }
        let pow = polar_checked(n as f64 * r.ln() + xi.norm().ln(), n as f64 * z.arg() + xi.arg(), n)?;
        coeffs.push(pow);
    }
    Ok(SeqVector::new(coeffs))
}

/// Prefix sums of (ln |ω_j|, arg ω_j) for j = 1..=len, so any weight product
/// ω_a ⋯ ω_b is a pair of subtractions.
struct WeightPrefix {
    ln_mag: Vec<f64>,
    phase: Vec<f64>,
}

impl WeightPrefix {
    fn build(rule: &WeightRule, len: usize) -> WeightPrefix {
        let mut ln_mag = Vec::with_capacity(len + 1);
        let mut phase = Vec::with_capacity(len + 1);
        ln_mag.push(0.0);
        phase.push(0.0);
        for j in 1..=len {
            let w = rule.weight(j as u64);
            ln_mag.push(ln_mag[j - 1] + w.norm().ln());
            phase.push(phase[j - 1] + w.arg());
        }
        WeightPrefix { ln_mag, phase }
    }

    /// Product ω_start ⋯ ω_end (inclusive, 1-indexed) in log-polar form.
    fn product(&self, start: usize, end: usize) -> (f64, f64) {
        (
            self.ln_mag[end] - self.ln_mag[start - 1],
            self.phase[end] - self.phase[start - 1],
        )
    }
}

/// Running table of ln C(n, k), built incrementally in k.
struct LnBinomial {
    n: u64,
    table: Vec<f64>,
}

impl LnBinomial {
    fn new(n: u64, k_max: u64) -> LnBinomial {
        let k_top = k_max.min(n) as usize;
        let mut table = Vec::with_capacity(k_top + 1);
        table.push(0.0);
        let mut acc = 0.0_f64;
        for k in 0..k_top as u64 {
            acc += ((n - k) as f64 / (k + 1) as f64).ln();
            table.push(acc);
        }
        LnBinomial { n, table }
    }

    fn get(&self, k: u64) -> f64 {
        if k > self.n {
            f64::NEG_INFINITY
        } else {
            self.table[k as usize]
        }
    }
}

fn iterate_shift(
    dir: ShiftDir,
    weights: &WeightRule,
    lambda: C64,
    n: u64,
    x: &SeqVector,
) -> Result<SeqVector, OpError> {
    if n == 0 {
        return Ok(x.clone());
    }
    if x.is_zero() {
        return Ok(SeqVector::zero());
    }
    let supp = x.support_len();
    if lambda.norm() == 0.0 {
        return shift_power(dir, weights, n, x);
    }
    let (ln_lam, arg_lam) = (lambda.norm().ln(), lambda.arg());

    match dir {
        ShiftDir::Backward => {
            // (λ + B)ⁿ x = Σ_k C(n,k) λ^{n−k} Bᵏ x, and Bᵏ x = 0 once k
            // reaches the support length.
            let k_max = (supp as u64 - 1).min(n);
            let binom = LnBinomial::new(n, k_max);
            let mut acc = vec![cx(0.0, 0.0); supp];
            let mut cur = x.clone();
            for k in 0..=k_max {
                if cur.is_zero() {
                    break;
                }
                let lm = binom.get(k) + (n - k) as f64 * ln_lam;
                let ph = (n - k) as f64 * arg_lam;
                for (i, &ci) in cur.coeffs().iter().enumerate() {
                    if ci.norm() == 0.0 {
                        continue;
                    }
                    let term = polar_checked(lm + ci.norm().ln(), ph + ci.arg(), n)?;
                    acc[i] += term;
                    if acc[i].norm() > OVERFLOW_LIMIT {
                        return Err(OpError::Overflow(n));
                    }
                }
                if k < k_max {
                    cur = apply_shift_once(dir, weights, &cur);
                }
            }
            Ok(SeqVector::new(acc))
        }
        ShiftDir::Forward => {
            // out[m] = Σ_src x[src] C(n, m−src) λ^{n−m+src} ω_src ⋯ ω_{m−1},
            // with at most `supp` sources per destination coordinate.
            let out_len = supp + n as usize;
            let prefix = WeightPrefix::build(weights, out_len);
            let binom = LnBinomial::new(n, n.min(out_len as u64));
            let mut acc = vec![cx(0.0, 0.0); out_len];
            for (m, slot) in acc.iter_mut().enumerate() {
                let m1 = m + 1; // 1-indexed destination
                for src in 1..=supp.min(m1) {
                    let k = (m1 - src) as u64;
                    if k > n {
                        continue;
                    }
                    let xi = x.coeff(src);
                    if xi.norm() == 0.0 {
                        continue;
                    }
                    let (mut lm, mut ph) = (binom.get(k) + (n - k) as f64 * ln_lam,
                                            (n - k) as f64 * arg_lam);
                    if k > 0 {
                        let (wl, wp) = prefix.product(src, m1 - 1);
                        lm += wl;
                        ph += wp;
                    }
                    let term = polar_checked(lm + xi.norm().ln(), ph + xi.arg(), n)?;
                    *slot += term;
                    if slot.norm() > OVERFLOW_LIMIT {
                        return Err(OpError::Overflow(n));
                    }
                }
            }
            Ok(SeqVector::new(acc))
        }
    }
}

fn apply_shift_once(dir: ShiftDir, weights: &WeightRule, x: &SeqVector) -> SeqVector {
    match dir {
        ShiftDir::Forward => {
            let mut coeffs = vec![cx(0.0, 0.0); x.support_len() + 1];
            for (i, &xi) in x.coeffs().iter().enumerate() {
                coeffs[i + 1] = weights.weight(i as u64 + 1) * xi;
            }
            SeqVector::new(coeffs)
        }
        ShiftDir::Backward => {
            let supp = x.support_len();
            if supp <= 1 {
                return SeqVector::zero();
            }
            let coeffs = (1..supp)
                .map(|m| weights.weight(m as u64) * x.coeff(m + 1))
                .collect();
            SeqVector::new(coeffs)
        }
    }
}

fn shift_power(
    dir: ShiftDir,
    weights: &WeightRule,
    n: u64,
    x: &SeqVector,
) -> Result<SeqVector, OpError> {
    let supp = x.support_len();
    match dir {
        ShiftDir::Backward => {
            // (Bⁿx)_m = ω_m ⋯ ω_{m+n−1} x_{m+n}
            if n as usize >= supp {
                return Ok(SeqVector::zero());
            }
            let out_len = supp - n as usize;
            let prefix = WeightPrefix::build(weights, supp);
            let mut coeffs = vec![cx(0.0, 0.0); out_len];
            for (m, slot) in coeffs.iter_mut().enumerate() {
                let m1 = m + 1;
                let xi = x.coeff(m1 + n as usize);
                if xi.norm() == 0.0 {
                    continue;
                }
                let (lm, ph) = prefix.product(m1, m1 + n as usize - 1);
                *slot = polar_checked(lm + xi.norm().ln(), ph + xi.arg(), n)?;
            }
            Ok(SeqVector::new(coeffs))
        }
        ShiftDir::Forward => {
            // (Fⁿx)_{k+n} = ω_{k+n−1} ⋯ ω_k x_k
            let out_len = supp + n as usize;
            let prefix = WeightPrefix::build(weights, out_len);
            let mut coeffs = vec![cx(0.0, 0.0); out_len];
            for k in 1..=supp {
                let xi = x.coeff(k);
                if xi.norm() == 0.0 {
                    continue;
                }
                let (lm, ph) = prefix.product(k, k + n as usize - 1);
                coeffs[k + n as usize - 1] = polar_checked(lm + xi.norm().ln(), ph + xi.arg(), n)?;
            }
            Ok(SeqVector::new(coeffs))
        }
    }
}

// ---------------------------------------------------------------------------
// Generator families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenStrategy {
    /// Standard basis vectors e₁, …, e_m (sequence kinds).
    Basis,
    /// Normalized geometric eigenvectors k_μ with both |μ| inside the shift's
    /// eigenvalue disk and |λ+μ| under the decay margin.
    EigenInside,
    /// Normalized indicator eigenfunctions of the Kalisch base at equally
    /// spaced angles.
    EigenFrame,
    /// Normalized inverse orbit op^{−j} u of a fixed seed.
    InverseOrbit,
}

impl GenStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            GenStrategy::Basis => "basis",
            GenStrategy::EigenInside => "eigen-inside",
            GenStrategy::EigenFrame => "eigen-frame",
            GenStrategy::InverseOrbit => "inverse-orbit",
        }
    }
}

/// A finite family of unit vectors, with the operator eigenvalue attached
/// when the strategy produces eigenvectors.
#[derive(Debug, Clone)]
pub struct GeneratorFamily {
    pub strategy: GenStrategy,
    pub level: usize,
    pub vectors: Vec<Vector>,
    /// Eigenvalue of the *full* operator (translation included) per vector.
    pub eigenvalues: Option<Vec<C64>>,
}

impl Operator {
    pub fn generators(&self, strategy: GenStrategy, m: usize) -> Result<GeneratorFamily, OpError> {
        assert!(m >= 1, "generator level must be positive");
        match strategy {
            GenStrategy::Basis => self.basis_generators(m),
            GenStrategy::EigenInside => self.eigen_inside_generators(m),
            GenStrategy::EigenFrame => self.eigen_frame_generators(m),
            GenStrategy::InverseOrbit => self.inverse_orbit_generators(m),
        }
    }

    fn basis_generators(&self, m: usize) -> Result<GeneratorFamily, OpError> {
        match self.base {
            BaseKind::Shift { .. } | BaseKind::Diagonal { .. } => Ok(GeneratorFamily {
                strategy: GenStrategy::Basis,
                level: m,
                vectors: (1..=m).map(|k| Vector::Seq(SeqVector::basis(k))).collect(),
                eigenvalues: None,
            }),
            _ => Err(OpError::UnsupportedStrategy {
                strategy: "basis",
                why: "standard basis vectors exist only for sequence kinds".into(),
            }),
        }
    }

    fn eigen_inside_generators(&self, m: usize) -> Result<GeneratorFamily, OpError> {
        let c = match &self.base {
            BaseKind::Shift { dir: ShiftDir::Backward, weights } => {
                weights.constant_value().ok_or_else(|| OpError::UnsupportedStrategy {
                    strategy: "eigen-inside",
                    why: "geometric eigenvectors need a constant-weight backward shift".into(),
                })?
            }
            _ => {
                return Err(OpError::UnsupportedStrategy {
                    strategy: "eigen-inside",
                    why: "only backward shifts carry an eigenvalue disk".into(),
                })
            }
        };
        let r = c.norm();
        let lambda = self.translation;
        // Region {|μ| < 0.97 r} ∩ {|λ+μ| < 0.9}; the 0.97 cap keeps the
        // truncated eigenvector supports short.
        let mu_cap = 0.97 * r;
        if lambda.norm() >= EIGEN_DECAY_MARGIN + mu_cap {
            return Err(OpError::EmptyRegion);
        }
        let center = -lambda;
        let half = EIGEN_DECAY_MARGIN;
        let mut chosen: Vec<C64> = Vec::new();
        let mut res = 9usize;
        while res <= 201 {
            let mut found = Vec::new();
            for iy in 0..res {
                for ix in 0..res {
                    let mu = cx(
                        center.re - half + 2.0 * half * ix as f64 / (res - 1) as f64,
                        center.im - half + 2.0 * half * iy as f64 / (res - 1) as f64,
                    );
                    if mu.norm() < mu_cap && (lambda + mu).norm() < EIGEN_DECAY_MARGIN {
                        found.push(mu);
                    }
                }
            }
            if found.len() >= m {
                chosen = (0..m).map(|i| found[i * found.len() / m]).collect();
                break;
            }
            chosen = found;
            res = res * 2 - 1;
        }
        if chosen.is_empty() {
            return Err(OpError::EmptyRegion);
        }
        let mut vectors = Vec::with_capacity(chosen.len());
        let mut eigenvalues = Vec::with_capacity(chosen.len());
        for &mu in &chosen {
            vectors.push(Vector::Seq(geometric_eigenvector(mu, c)));
            eigenvalues.push(lambda + mu);
        }
        Ok(GeneratorFamily {
            strategy: GenStrategy::EigenInside,
            level: vectors.len(),
            vectors,
            eigenvalues: Some(eigenvalues),
        })
    }

    fn eigen_frame_generators(&self, m: usize) -> Result<GeneratorFamily, OpError> {
        let factor = match self.base {
            BaseKind::Kalisch { factor } => factor,
            _ => {
                return Err(OpError::UnsupportedStrategy {
                    strategy: "eigen-frame",
                    why: "indicator eigenfunctions exist only for the Kalisch kind".into(),
                })
            }
        };
        let mut vectors = Vec::with_capacity(m);
        let mut eigenvalues = Vec::with_capacity(m);
        for j in 1..=m {
            let alpha = TAU * j as f64 / (m + 1) as f64;
            let f = StepFunction::indicator(alpha);
            let norm = f.norm();
            vectors.push(Vector::Step(f.scale(cx(1.0 / norm, 0.0))));
            eigenvalues.push(self.translation + factor * C64::from_polar(1.0, alpha));
        }
        Ok(GeneratorFamily {
            strategy: GenStrategy::EigenFrame,
            level: m,
            vectors,
            eigenvalues: Some(eigenvalues),
        })
    }

    fn inverse_orbit_generators(&self, m: usize) -> Result<GeneratorFamily, OpError> {
        if !self.flags.invertible {
            return Err(OpError::UnsupportedStrategy {
                strategy: "inverse-orbit",
                why: "spectrum model does not exclude 0".into(),
            });
        }
        let seed = match self.space() {
            Space::Sequence => Vector::Seq(SeqVector::basis(1)),
            Space::Function => {
                let f = StepFunction::indicator(PI);
                let n = f.norm();
                Vector::Step(f.scale(cx(1.0 / n, 0.0)))
            }
            Space::Sum(_) => {
                return Err(OpError::UnsupportedStrategy {
                    strategy: "inverse-orbit",
                    why: "direct sums are classified per part".into(),
                })
            }
        };
        let mut vectors = Vec::with_capacity(m);
        let mut cur = seed;
        for _ in 1..=m {
            cur = self.inverse_apply(&cur)?;
            let norm = cur.norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(OpError::UnsupportedStrategy {
                    strategy: "inverse-orbit",
                    why: "inverse orbit degenerated".into(),
                });
            }
            cur = cur.scale(cx(1.0 / norm, 0.0));
            vectors.push(cur.clone());
        }
        Ok(GeneratorFamily {
            strategy: GenStrategy::InverseOrbit,
            level: m,
            vectors,
            eigenvalues: None,
        })
    }
}

/// Normalized k_μ = (1, μ/c, (μ/c)², …) with the tail cut once
/// |μ/c|^k < SERIES_TAIL; the truncation error sits far below the 1e-10
/// eigen-residual contract.
fn geometric_eigenvector(mu: C64, c: C64) -> SeqVector {
    let q = mu / c;
    let qn = q.norm();
    let len = if qn < 1e-12 {
        1
    } else {
        (SERIES_TAIL.ln() / qn.ln()).ceil() as usize + 1
    };
    let mut coeffs = Vec::with_capacity(len);
    let mut cur = cx(1.0, 0.0);
    for _ in 0..len {
        coeffs.push(cur);
        cur *= q;
    }
    let v = SeqVector::new(coeffs);
    v.scale(cx(1.0 / v.norm(), 0.0))
}
