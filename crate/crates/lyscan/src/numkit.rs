//! Minimal dense numerical kernel.
//!
//! Everything downstream works with small Gram matrices (order ≤ 64), so the
//! solvers here favour robustness over speed: cyclic complex Jacobi for the
//! Hermitian eigenproblem, a plain Cholesky factorization, and the standard
//! Cholesky reduction `A v = μ B v  →  L⁻¹ A L⁻* y = μ y` for the generalized
//! problem. Quadrature is composite trapezoid on uniform grids.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Maximum matrix order accepted by the kernel.
pub const MAX_ORDER: usize = 64;

/// Jacobi sweep budget; exceeding it signals an implementation bug.
pub const JACOBI_SWEEP_BUDGET: usize = 50;

/// Relative pivot floor for Cholesky: a pivot below
/// `order * CHOLESKY_PIVOT_FACTOR * max_diagonal` is treated as degenerate.
pub const CHOLESKY_PIVOT_FACTOR: f64 = 1e-14;

/// Hermitian symmetry tolerance relative to the largest entry magnitude.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("Jacobi iteration did not converge within {JACOBI_SWEEP_BUDGET} sweeps")]
    NoConvergence,
    #[error("matrix of order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("matrix is not Hermitian: |H[{i}][{j}] - conj(H[{j}][{i}])| = {dev:.3e}")]
    NotHermitian { i: usize, j: usize, dev: f64 },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
}

pub fn is_finite_c(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Dense Hermitian matrix in row-major storage.
///
/// Construction checks Hermitian symmetry to [`HERMITIAN_TOL`] and then
/// symmetrizes exactly, so solver code may assume `H[j][k] == conj(H[k][j])`
/// bit for bit and real diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix {
    order: usize,
    entries: Vec<C64>,
}

impl HermMatrix {
    pub fn new(order: usize, entries: Vec<C64>) -> Result<Self, NumError> {
        if order == 0 || order > MAX_ORDER {
            return Err(NumError::OrderTooLarge(order));
        }
        assert_eq!(entries.len(), order * order, "entry count must be order^2");
        let mut m = HermMatrix { order, entries };
        for i in 0..order {
            for j in 0..order {
                if !is_finite_c(m.at(i, j)) {
                    return Err(NumError::NonFinite { i, j });
                }
            }
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..order {
            for j in i..order {
                let dev = (m.at(i, j) - m.at(j, i).conj()).norm();
                if dev > HERMITIAN_TOL * scale {
                    return Err(NumError::NotHermitian { i, j, dev });
                }
            }
        }
        // Exact symmetrization: average the two triangles, pin the diagonal real.
        for i in 0..order {
            for j in (i + 1)..order {
                let v = (m.at(i, j) + m.at(j, i).conj()) * 0.5;
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
            let d = m.at(i, i);
            m.set(i, i, C64::new(d.re, 0.0));
        }
        Ok(m)
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self, NumError> {
        let mut entries = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                entries.push(f(i, j));
            }
        }
        HermMatrix::new(order, entries)
    }

    pub fn identity(order: usize) -> Self {
        HermMatrix::from_fn(order, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .expect("identity is Hermitian")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.order + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.order + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn max_diag(&self) -> f64 {
        (0..self.order).map(|i| self.at(i, i).re).fold(0.0, f64::max)
    }
}

/// Lower-triangular Cholesky factor with `L · L* = H`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    order: usize,
    /// Row-major lower triangle; entries above the diagonal are zero.
    pub entries: Vec<C64>,
}

impl CholeskyFactor {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.order + j]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Forward substitution `L x = b`.
    pub fn solve_lower(&self, b: &[C64]) -> Vec<C64> {
        let n = self.order;
        let mut x = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.at(i, k) * x[k];
            }
            x[i] = s / self.at(i, i);
        }
        x
    }

    /// Back substitution `L* x = b`.
    pub fn solve_upper(&self, b: &[C64]) -> Vec<C64> {
        let n = self.order;
        let mut x = vec![C64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.at(j, i).conj() * x[j];
            }
            x[i] = s / self.at(i, i);
        }
        x
    }
}

/// Cholesky factorization of a Hermitian positive definite matrix.
///
/// A pivot at or below `order · 1e-14 · max_diag` reports
/// [`NumError::NotPositiveDefinite`]; callers treat that as a recoverable
/// signal that the Gram basis is numerically degenerate.
pub fn cholesky(h: &HermMatrix) -> Result<CholeskyFactor, NumError> {
    let n = h.order();
    let floor = n as f64 * CHOLESKY_PIVOT_FACTOR * h.max_diag();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut pivot = h.at(j, j).re;
        for k in 0..j {
            pivot -= l[j * n + k].norm_sqr();
        }
        if pivot <= floor {
            return Err(NumError::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[j * n + j] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = h.at(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(CholeskyFactor { order: n, entries: l })
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// an orthonormal set of eigenvectors (column `k` of `vectors` pairs with
/// `values[k]`).
#[derive(Debug, Clone)]
pub struct EighResult {
    pub values: Vec<f64>,
    /// Row-major unitary matrix; column k is the k-th eigenvector.
    pub vectors: Vec<C64>,
    pub order: usize,
}

impl EighResult {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.order).map(|i| self.vectors[i * self.order + k]).collect()
    }
}

/// Cyclic complex Jacobi iteration.
///
/// Each rotation annihilates one off-diagonal pair with a unitary plane
/// rotation; the off-diagonal mass is strictly decreasing, and for orders up
/// to 64 a handful of sweeps reaches machine precision.
pub fn eigh(h: &HermMatrix) -> Result<EighResult, NumError> {
    let n = h.order();
    let mut a = h.clone();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(EighResult { values: vec![0.0; n], vectors: v, order: n });
    }
    let stop = scale * 1e-15 * n as f64;

    let mut converged = false;
    let mut prev_off = f64::INFINITY;
    for _sweep in 0..JACOBI_SWEEP_BUDGET {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).norm());
            }
        }
        // Done when the off-diagonal is annihilated, or when it stagnates at
        // the roundoff floor (still far inside the residual contract).
        if off <= stop || (off <= scale * 1e-12 && off >= prev_off * 0.9) {
            converged = true;
            break;
        }
        prev_off = off;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.at(p, q);
                let gn = g.norm();
                if gn <= scale * f64::EPSILON * 0.1 {
                    continue;
                }
                let alpha = a.at(p, p).re;
                let beta = a.at(q, q).re;
                let tau = (beta - alpha) / (2.0 * gn);
                let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = -sgn / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = t * c;
                let phase = g / gn; // e^{iφ}

                // Column update A ← A·U with U[p][p]=U[q][q]=c,
                // U[p][q] = −σe^{iφ}, U[q][p] = σe^{−iφ}.
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, akp * c + akq * sigma * phase.conj());
                    a.set(k, q, akq * c - akp * sigma * phase);
                }
                // Row update A ← U*·A.
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, apk * c + aqk * sigma * phase);
                    a.set(q, k, aqk * c - apk * sigma * phase.conj());
                }
                // Pin the invariants roundoff tends to smear.
                let dp = a.at(p, p);
                let dq = a.at(q, q);
                a.set(p, p, C64::new(dp.re, 0.0));
                a.set(q, q, C64::new(dq.re, 0.0));
                let apq = a.at(p, q);
                let aqp = a.at(q, p);
                let herm = (apq + aqp.conj()) * 0.5;
                a.set(p, q, herm);
                a.set(q, p, herm.conj());
                // Accumulate eigenvectors V ← V·U.
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * sigma * phase.conj();
                    v[k * n + q] = vkq * c - vkp * sigma * phase;
                }
            }
        }
    }
    if !converged {
        // One last check after the final sweep.
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.at(p, q).norm());
            }
        }
        if off > stop {
            return Err(NumError::NoConvergence);
        }
    }

    let mut order_idx: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    order_idx.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values: Vec<f64> = order_idx.iter().map(|&i| diag[i]).collect();
    let mut vectors = vec![C64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order_idx.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok(EighResult { values, vectors, order: n })
}

/// Generalized Hermitian eigenproblem `A v = μ B v` with `B` positive
/// definite. Eigenvalues ascend; column `k` of `vectors` is the matching
/// eigenvector, `B`-orthonormal.
#[derive(Debug, Clone)]
pub struct GenEighResult {
    pub values: Vec<f64>,
    pub vectors: Vec<C64>,
    pub order: usize,
}

impl GenEighResult {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.order).map(|i| self.vectors[i * self.order + k]).collect()
    }
}

pub fn gen_eigh(a: &HermMatrix, b: &HermMatrix) -> Result<GenEighResult, NumError> {
    assert_eq!(a.order(), b.order(), "operand orders must match");
    let n = a.order();
    let l = cholesky(b)?;
    // C = L⁻¹ A L⁻*, assembled column by column then row-solved.
    let mut y = vec![C64::new(0.0, 0.0); n * n]; // Y = L⁻¹ A
    for col in 0..n {
        let rhs: Vec<C64> = (0..n).map(|i| a.at(i, col)).collect();
        let x = l.solve_lower(&rhs);
        for i in 0..n {
            y[i * n + col] = x[i];
        }
    }
    let mut c = vec![C64::new(0.0, 0.0); n * n]; // C = Y L⁻*
    for i in 0..n {
        for j in 0..n {
            let mut s = y[i * n + j];
            for k in 0..j {
                s -= c[i * n + k] * l.at(j, k).conj();
            }
            c[i * n + j] = s / l.at(j, j);
        }
    }
    // Symmetrize and rescale to O(1) before the Jacobi solver; reduced
    // matrices arising from near-degenerate Gram pairs can sit anywhere in
    // the exponent range.
    let magnitude = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rescale =
        if magnitude.is_finite() && magnitude > 1e-300 { 1.0 / magnitude } else { 1.0 };
    let cm =
        HermMatrix::from_fn(n, |i, j| (c[i * n + j] + c[j * n + i].conj()) * (0.5 * rescale))?;
    let mut eig = eigh(&cm)?;
    if rescale != 1.0 {
        for v in &mut eig.values {
            *v *= magnitude;
        }
    }
    let mut vectors = vec![C64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let yk = eig.vector(k);
        let vk = l.solve_upper(&yk);
        for i in 0..n {
            vectors[i * n + k] = vk[i];
        }
    }
    Ok(GenEighResult { values: eig.values, vectors, order: n })
}

/// Composite trapezoid rule over uniformly spaced samples.
///
/// `samples` holds f(x_0), …, f(x_m) with x_{k+1} − x_k = `step`; at least
/// two samples are required.
pub fn trapezoid(samples: &[C64], step: f64) -> C64 {
    assert!(samples.len() >= 2, "trapezoid needs at least 2 samples");
    assert!(step > 0.0 && step.is_finite(), "step must be positive and finite");
    let mut acc = (samples[0] + samples[samples.len() - 1]) * 0.5;
    for s in &samples[1..samples.len() - 1] {
        acc += s;
    }
    acc * step
}
