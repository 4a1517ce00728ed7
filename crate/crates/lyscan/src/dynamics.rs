//! Orbit computation and subspace filtration analysis.
//!
//! Two views of the same question — does this operator mix decay with
//! growth? Per vector, [`orbit`] samples ‖Tⁿx‖ and [`dip_classify`] reads
//! the dyadic-window statistics for recurring dips. Per subspace,
//! [`filtration`] tracks the restricted iterate norms ‖Tⁿ|_V‖ through Gram
//! matrices: with G_n[i][j] = ⟨Tⁿg_i, Tⁿg_j⟩ the squared restricted norm is
//! the largest generalized eigenvalue of (G_n, G₀), and its smallest one is
//! the squared restricted floor. Transient growth of these peaks across
//! filtration levels is the finite-level witness that a span supports
//! unbounded iterates over decaying generators.

use crate::numkit::{cholesky, gen_eigh, C64, HermMatrix, NumError};
use crate::operators::{GeneratorFamily, OpError, Operator, Vector};
use thiserror::Error;

/// Default orbit horizon.
pub const DEFAULT_HORIZON: u64 = 2048;

/// Default dip threshold.
pub const DIP_EPSILON: f64 = 1e-4;

/// Norm threshold treated as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Filtration horizons are capped here.
pub const MAX_LEVEL_HORIZON: u64 = 1 << 16;

/// Norms at or below this are "exactly zero" up to floating underflow;
/// orbits that hit it count as converging to zero even though equal window
/// minima are no longer strictly decreasing.
pub const ZERO_FLOOR: f64 = 1e-250;

/// Cholesky pivot floor (relative to the largest Gram diagonal) for
/// accepting a generator into a filtration basis. Much stricter than the
/// kernel's last-resort floor: generalized eigenvalues of (G_n, G₀) are
/// only trustworthy while the basis conditioning keeps the reduction well
/// inside machine precision, and restricted-norm peaks are read against
/// thresholds in the 1e3 range.
pub const FILTRATION_PIVOT_FLOOR: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("generator Gram matrix is degenerate even after pruning (kept {kept})")]
    DegenerateBasis { kept: usize },
    #[error(transparent)]
    Operator(#[from] OpError),
    #[error("kernel failure: {0}")]
    Kernel(#[from] NumError),
}

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

/// Sampled orbit norms with dyadic-window statistics. Overflowing iterates
/// record +∞ from the overflow time on.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    /// (n, ‖Tⁿx‖), ascending in n; samples[0] is (0, ‖x‖).
    pub samples: Vec<(u64, f64)>,
    /// Per dyadic window [2^j, 2^{j+1}): minimum sampled norm.
    pub window_minima: Vec<f64>,
    /// Per dyadic window: maximum sampled norm.
    pub window_maxima: Vec<f64>,
}

impl OrbitRecord {
    pub fn min_norm(&self) -> f64 {
        self.samples.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max_norm(&self) -> f64 {
        self.samples.iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    /// Delimiter-separated rows `n<TAB>norm` for plotting.
    pub fn to_rows(&self) -> String {
        let mut out = String::from("n\tnorm\n");
        for &(n, v) in &self.samples {
            out.push_str(&format!("{n}\t{v}\n"));
        }
        out
    }
}

/// Sample schedule: every n up to 64, then 8 samples per dyadic window, and
/// always the final horizon.
pub fn orbit_sample_times(horizon: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (0..=horizon.min(64)).collect();
    let mut lo = 64u64;
    while lo < horizon {
        let hi = (lo * 2).min(horizon);
        let step = ((hi - lo) / 8).max(1);
        let mut n = lo + step;
        while n < hi {
            times.push(n);
            n += step;
        }
        times.push(hi);
        lo *= 2;
    }
    times.sort_unstable();
    times.dedup();
    times
}

/// Denser schedule for restricted-norm peaks: all n ≤ 256, then a geometric
/// grid with ratio 1.08 up to the horizon.
pub fn filtration_sample_times(horizon: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (0..=horizon.min(256)).collect();
    let mut cur = 256.0_f64;
    while (cur * 1.08) < horizon as f64 {
        cur *= 1.08;
        times.push(cur.round() as u64);
    }
    times.push(horizon);
    times.sort_unstable();
    times.dedup();
    times
}

/// Horizon schedule N(m) = base · 2^{⌈m/4⌉}, capped at 2^16.
pub fn level_horizon(base: u64, m: usize) -> u64 {
    let bump = m.div_ceil(4) as u32;
    base.saturating_mul(1u64 << bump.min(16)).min(MAX_LEVEL_HORIZON)
}

/// Orbit norms of x under the operator's closed-form iterates.
pub fn orbit(op: &Operator, x: &Vector, horizon: u64) -> Result<OrbitRecord, DynError> {
    let times = orbit_sample_times(horizon);
    let mut samples = Vec::with_capacity(times.len());
    let mut overflowed = false;
    for &n in &times {
        if overflowed {
            samples.push((n, f64::INFINITY));
            continue;
        }
        match op.iterate(n, x) {
            Ok(v) => {
                let norm = v.norm();
                samples.push((n, if norm.is_finite() { norm } else { f64::INFINITY }));
            }
            Err(OpError::Overflow(_)) => {
                overflowed = true;
                samples.push((n, f64::INFINITY));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let (window_minima, window_maxima) = window_stats(&samples, horizon);
    Ok(OrbitRecord { samples, window_minima, window_maxima })
}

fn window_stats(samples: &[(u64, f64)], horizon: u64) -> (Vec<f64>, Vec<f64>) {
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    let mut lo = 1u64;
    while lo <= horizon {
        let hi = lo * 2;
        let mut mn = f64::INFINITY;
        let mut mx = 0.0_f64;
        for &(n, v) in samples {
            if n >= lo && n < hi {
                mn = mn.min(v);
                mx = mx.max(v);
            }
        }
        if mn.is_finite() || mx > 0.0 {
            minima.push(mn);
            maxima.push(mx);
        }
        lo = hi;
    }
    (minima, maxima)
}

// ---------------------------------------------------------------------------
// Dip classification
// ---------------------------------------------------------------------------

/// Finite-horizon reading of "has a subsequence converging to zero".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipVerdict {
    /// Window minima fall strictly through the last three dyadic windows and
    /// end at or below the dip threshold (or the orbit hits floating zero).
    RecurringToZero,
    /// The orbit keeps dipping to a positive floor (its value attached).
    RecurringBoundedBelow(f64),
    /// One deep dip followed by monotone window growth — the signature of a
    /// normal operator straddling the unit circle, not of recurring decay.
    SingleDipThenGrowth,
    NoDip,
}

pub fn dip_classify(rec: &OrbitRecord, dip_epsilon: f64) -> DipVerdict {
    let w = &rec.window_minima;
    if w.len() < 3 {
        return DipVerdict::NoDip;
    }
    let m1 = w[w.len() - 3];
    let m2 = w[w.len() - 2];
    let m3 = w[w.len() - 1];
    if m3 <= dip_epsilon && ((m1 > m2 && m2 > m3) || m3 <= ZERO_FLOOR) {
        return DipVerdict::RecurringToZero;
    }

    let norm0 = rec.samples[0].1;
    let (min_n, global_min) = rec
        .samples
        .iter()
        .skip(1)
        .fold((0u64, f64::INFINITY), |acc, &(n, v)| if v < acc.1 { (n, v) } else { acc });
    let dipped = global_min <= 0.5 * norm0;
    if !dipped {
        return DipVerdict::NoDip;
    }

    // Windows after the dip: monotone growth ⇒ single dip.
    let dip_window = (min_n.max(1) as f64).log2().floor() as usize;
    let after = &w[(dip_window + 1).min(w.len())..];
    let grows = after.windows(2).all(|p| p[1] >= p[0] * (1.0 - 1e-12))
        && rec.samples.last().map(|&(_, v)| v >= 10.0 * global_min).unwrap_or(false)
        && m3 > dip_epsilon.max(3.0 * global_min);
    if grows {
        return DipVerdict::SingleDipThenGrowth;
    }
    if m3 <= 3.0 * global_min {
        return DipVerdict::RecurringBoundedBelow(global_min);
    }
    DipVerdict::NoDip
}

// ---------------------------------------------------------------------------
// Restricted norms via Gram matrices
// ---------------------------------------------------------------------------

/// G_n[i][j] = ⟨Tⁿ g_i, Tⁿ g_j⟩ for an explicit basis, by closed-form
/// iteration. Hermitian by construction.
pub fn restricted_gram(
    op: &Operator,
    basis: &[Vector],
    n: u64,
) -> Result<HermMatrix, DynError> {
    let iterates = basis
        .iter()
        .map(|g| op.iterate(n, g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(DynError::from)?;
    gram_of(&iterates)
}

fn gram_of(vectors: &[Vector]) -> Result<HermMatrix, DynError> {
    let m = vectors.len();
    let mut entries = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i..m {
            let ip = vectors[i].inner(&vectors[j]).map_err(DynError::from)?;
            entries[i * m + j] = ip;
            entries[j * m + i] = ip.conj();
        }
    }
    HermMatrix::new(m, entries).map_err(DynError::from)
}

/// Gram evaluator for a fixed generator family: exact eigen-action when the
/// family carries eigenvalues (G_n = D G₀ D*), closed-form iteration
/// otherwise.
struct GramEngine<'a> {
    op: &'a Operator,
    vectors: Vec<Vector>,
    eigenvalues: Option<Vec<C64>>,
    g0: HermMatrix,
}

impl<'a> GramEngine<'a> {
    fn at(&self, n: u64) -> Result<Option<HermMatrix>, DynError> {
        let m = self.vectors.len();
        match &self.eigenvalues {
            Some(nus) => {
                // D G₀ D* with D = diag(ν^n); Gram entries carry |ν|^{2n},
                // so the overflow guard sits at half the f64 exponent range.
                let mut pows = Vec::with_capacity(m);
                for nu in nus {
                    let r = nu.norm();
                    if r == 0.0 {
                        pows.push(C64::new(0.0, 0.0));
                        continue;
                    }
                    let lm = n as f64 * r.ln();
                    if lm > 345.0 {
                        return Ok(None);
                    }
                    pows.push(if lm < -760.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::from_polar(lm.exp(), n as f64 * nu.arg())
                    });
                }
                let mut entries = vec![C64::new(0.0, 0.0); m * m];
                for i in 0..m {
                    for j in 0..m {
                        entries[i * m + j] = pows[i] * pows[j].conj() * self.g0.at(i, j);
                    }
                }
                // Flush fully decayed Grams to exact zero so the reduction
                // never works in the denormal range.
                if entries.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-280 {
                    entries.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                }
                Ok(Some(HermMatrix::new(m, entries)?))
            }
            None => match restricted_gram(self.op, &self.vectors, n) {
                Ok(g) => Ok(Some(g)),
                Err(DynError::Operator(OpError::Overflow(_))) => Ok(None),
                Err(e) => Err(e),
            },
        }
    }
}

/// Per-level peak/floor statistics of the restricted iterate norms.
#[derive(Debug, Clone)]
pub struct LevelStats {
    pub level: usize,
    pub horizon: u64,
    /// max over sampled n of ‖Tⁿ|_{V_m}‖.
    pub peak: f64,
    pub peak_time: u64,
    /// min over sampled n of σ_min(Tⁿ|_{V_m}).
    pub floor: f64,
    pub floor_time: u64,
}

#[derive(Debug, Clone)]
pub struct FiltrationReport {
    /// Indices (into the generator family) of the accepted generators.
    pub accepted: Vec<usize>,
    pub levels: Vec<LevelStats>,
}

impl FiltrationReport {
    pub fn last_peak(&self) -> f64 {
        self.levels.last().map(|l| l.peak).unwrap_or(0.0)
    }

    pub fn max_peak(&self) -> f64 {
        self.levels.iter().map(|l| l.peak).fold(0.0, f64::max)
    }

    /// Whether the peaks increase across the last `k` levels, each step by
    /// more than the given relative factor.
    pub fn peaks_increasing(&self, k: usize, factor: f64) -> bool {
        if self.levels.len() < k {
            return false;
        }
        self.levels[self.levels.len() - k..]
            .windows(2)
            .all(|p| p[1].peak > p[0].peak * (1.0 + factor))
    }

    /// Ratio of the final peak to the peak halfway through the level sweep;
    /// a growth-still-developing signal when clearly above 1.
    pub fn late_growth_ratio(&self) -> f64 {
        if self.levels.is_empty() {
            return 1.0;
        }
        let mid = self.levels[self.levels.len() / 2].peak.max(f64::MIN_POSITIVE);
        self.last_peak() / mid
    }

    /// Rows `level<TAB>horizon<TAB>peak<TAB>floor` for plotting.
    pub fn to_rows(&self) -> String {
        let mut out = String::from("level\thorizon\tpeak\tfloor\n");
        for l in &self.levels {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", l.level, l.horizon, l.peak, l.floor));
        }
        out
    }
}

/// Sweeps filtration levels V_2 ⊆ V_3 ⊆ … of the accepted generators.
///
/// Generators enter greedily: one whose arrival makes the Gram numerically
/// degenerate is dropped (the Cholesky pivot floor is the signal) and the
/// sweep moves on. Each level is computed from scratch over its own horizon
/// N(m) = base · 2^{⌈m/4⌉}.
pub fn filtration(
    op: &Operator,
    family: &GeneratorFamily,
    base_horizon: u64,
) -> Result<FiltrationReport, DynError> {
    let mut accepted: Vec<usize> = Vec::new();
    let mut kept_vectors: Vec<Vector> = Vec::new();
    let mut kept_eigs: Vec<C64> = Vec::new();
    for (idx, v) in family.vectors.iter().enumerate() {
        kept_vectors.push(v.clone());
        if let Some(eigs) = &family.eigenvalues {
            kept_eigs.push(eigs[idx]);
        }
        let g0 = gram_of(&kept_vectors)?;
        let ok = match cholesky(&g0) {
            Ok(l) => {
                let max_diag =
                    (0..g0.order()).map(|i| g0.at(i, i).re).fold(0.0_f64, f64::max);
                let min_pivot = (0..l.order())
                    .map(|i| l.at(i, i).re * l.at(i, i).re)
                    .fold(f64::INFINITY, f64::min);
                min_pivot >= FILTRATION_PIVOT_FLOOR * max_diag
            }
            Err(_) => false,
        };
        if !ok {
            kept_vectors.pop();
            if family.eigenvalues.is_some() {
                kept_eigs.pop();
            }
            continue;
        }
        accepted.push(idx);
    }
    if accepted.len() < 2 {
        return Err(DynError::DegenerateBasis { kept: accepted.len() });
    }

    let mut levels = Vec::new();
    for m in 2..=accepted.len() {
        let vectors = kept_vectors[..m].to_vec();
        let eigenvalues = family.eigenvalues.as_ref().map(|_| kept_eigs[..m].to_vec());
        let g0 = gram_of(&vectors)?;
        let engine = GramEngine { op, vectors, eigenvalues, g0 };
        let horizon = level_horizon(base_horizon, m);
        let mut peak = 0.0_f64;
        let mut peak_time = 0u64;
        let mut floor = f64::INFINITY;
        let mut floor_time = 0u64;
        for n in filtration_sample_times(horizon) {
            match engine.at(n)? {
                Some(gn) => {
                    let eig = gen_eigh(&gn, &engine.g0)?;
                    let hi = eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
                    let lo = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
                    if hi > peak {
                        peak = hi;
                        peak_time = n;
                    }
                    if lo < floor {
                        floor = lo;
                        floor_time = n;
                    }
                }
                None => {
                    peak = f64::INFINITY;
                    peak_time = n;
                    break;
                }
            }
        }
        levels.push(LevelStats { level: m, horizon, peak, peak_time, floor, floor_time });
    }
    Ok(FiltrationReport { accepted, levels })
}

// ---------------------------------------------------------------------------
// Pair statistics
// ---------------------------------------------------------------------------

/// (limsup, liminf) estimates for the iterate distance of the pair (x, y):
/// by linearity this is the orbit of x − y, read over the window [N/2, N].
pub fn pair_stats(
    op: &Operator,
    x: &Vector,
    y: &Vector,
    horizon: u64,
) -> Result<(f64, f64), DynError> {
    let diff = x.sub(y).map_err(DynError::from)?;
    let rec = orbit(op, &diff, horizon)?;
    let lo_cut = horizon / 2;
    let mut hi = 0.0_f64;
    let mut lo = f64::INFINITY;
    for &(n, v) in &rec.samples {
        if n >= lo_cut {
            hi = hi.max(v);
            lo = lo.min(v);
        }
    }
    Ok((hi, lo))
}
