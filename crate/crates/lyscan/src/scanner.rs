//! λ-plane scans of translation sets.
//!
//! A scan rasterizes {λ : λ + T is Li-Yorke chaotic} over a rectangular
//! grid: each grid point gets the three-valued verdict for λ + T. Points
//! outside the a-priori bound circle |λ| ≤ 1 + r(T) need no classification
//! (the spectrum of λ + T cannot reach the unit circle there). Grid points
//! are independent pure tasks; the parallel path is bitwise identical to
//! the sequential one.
//!
//! Scans serialize to a small line-oriented text format and render to plain
//! P3 pixmaps, with the unit circle and the spectrum-model outline
//! overdrawn in white.

use crate::classifier::{self, Budget, Certificate, Verdict, VerdictValue};
use crate::numkit::C64;
use crate::operators::{Operator, SpectrumModel};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan regions/resolutions do not match: {0}")]
    RegionMismatch(String),
    #[error("malformed scan file: {0}")]
    Malformed(String),
}

/// Rectangular scan window; odd resolution keeps the center on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRegion {
    pub center: C64,
    pub half_width: f64,
    pub half_height: f64,
    pub resolution: usize,
}

impl ScanRegion {
    pub fn new(center: C64, half_width: f64, half_height: f64, resolution: usize) -> ScanRegion {
        assert!(resolution % 2 == 1, "resolution must be odd");
        assert!(resolution >= 3 && resolution <= 401, "resolution out of range");
        assert!(half_width > 0.0 && half_height > 0.0);
        ScanRegion { center, half_width, half_height, resolution }
    }

    /// Square window of half-width 1 + r(T) + 0.25 centered at 0: the
    /// translation set lives inside |λ| ≤ 1 + r(T).
    pub fn auto(op: &Operator, resolution: usize) -> ScanRegion {
        let half = 1.0 + op.spectral_radius() + 0.25;
        ScanRegion::new(C64::new(0.0, 0.0), half, half, resolution)
    }

    /// Grid point at (row, col); row 0 carries the highest imaginary part.
    pub fn point(&self, row: usize, col: usize) -> C64 {
        let n = (self.resolution - 1) as f64;
        C64::new(
            self.center.re + self.half_width * (2.0 * col as f64 / n - 1.0),
            self.center.im + self.half_height * (1.0 - 2.0 * row as f64 / n),
        )
    }

    pub fn cell_half_size(&self) -> (f64, f64) {
        let n = (self.resolution - 1) as f64;
        (self.half_width / n, self.half_height / n)
    }

    pub fn translated(&self, lambda: C64) -> ScanRegion {
        ScanRegion { center: self.center + lambda, ..*self }
    }
}

/// Raster of verdict codes with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub region: ScanRegion,
    /// Row-major verdict codes C/N/U, resolution² of them.
    pub codes: Vec<char>,
    pub operator: String,
    pub fingerprint: String,
    pub budget: Budget,
}

impl ScanResult {
    pub fn code_at(&self, row: usize, col: usize) -> char {
        self.codes[row * self.region.resolution + col]
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for &ch in &self.codes {
            match ch {
                'C' => c.0 += 1,
                'N' => c.1 += 1,
                _ => c.2 += 1,
            }
        }
        c
    }

    /// Line-oriented persistence format; [`parse_scan`] reads it back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("lyscan-scan v1\n");
        out.push_str(&format!("operator: {}\n", self.operator));
        out.push_str(&format!("fingerprint: {}\n", self.fingerprint));
        out.push_str(&format!(
            "region: {} {} {} {}\n",
            self.region.center.re,
            self.region.center.im,
            self.region.half_width,
            self.region.half_height
        ));
        out.push_str(&format!("resolution: {}\n", self.region.resolution));
        out.push_str(&format!(
            "budget: horizon={} levels={} trials={} panels={} seed={}\n",
            self.budget.horizon,
            self.budget.max_level,
            self.budget.trials,
            self.budget.panels,
            self.budget.seed
        ));
        for row in 0..self.region.resolution {
            let start = row * self.region.resolution;
            let line: String = self.codes[start..start + self.region.resolution].iter().collect();
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

pub fn parse_scan(text: &str) -> Result<ScanResult, ScanError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| ScanError::Malformed("empty file".into()))?;
    if header.trim() != "lyscan-scan v1" {
        return Err(ScanError::Malformed("missing lyscan-scan v1 header".into()));
    }
    let mut operator = String::new();
    let mut fingerprint = String::new();
    let mut region: Option<(f64, f64, f64, f64)> = None;
    let mut resolution = 0usize;
    let mut budget = Budget::default();
    let mut rows: Vec<String> = Vec::new();
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(v) = line.strip_prefix("operator: ") {
            operator = v.to_string();
        } else if let Some(v) = line.strip_prefix("fingerprint: ") {
            fingerprint = v.to_string();
        } else if let Some(v) = line.strip_prefix("region: ") {
            let parts: Vec<f64> = v
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| ScanError::Malformed(format!("bad region number `{t}`"))))
                .collect::<Result<_, _>>()?;
            if parts.len() != 4 {
                return Err(ScanError::Malformed("region needs 4 numbers".into()));
            }
            region = Some((parts[0], parts[1], parts[2], parts[3]));
        } else if let Some(v) = line.strip_prefix("resolution: ") {
            resolution =
                v.parse().map_err(|_| ScanError::Malformed("bad resolution".into()))?;
        } else if let Some(v) = line.strip_prefix("budget: ") {
            for field in v.split_whitespace() {
                let (key, val) = field
                    .split_once('=')
                    .ok_or_else(|| ScanError::Malformed(format!("bad budget field `{field}`")))?;
                let parsed: u64 = val
                    .parse()
                    .map_err(|_| ScanError::Malformed(format!("bad budget value `{val}`")))?;
                match key {
                    "horizon" => budget.horizon = parsed,
                    "levels" => budget.max_level = parsed as usize,
                    "trials" => budget.trials = parsed as usize,
                    "panels" => budget.panels = parsed as usize,
                    "seed" => budget.seed = parsed,
                    other => {
                        return Err(ScanError::Malformed(format!("unknown budget key `{other}`")))
                    }
                }
            }
        } else {
            rows.push(line.to_string());
        }
    }
    let (cx, cy, hw, hh) =
        region.ok_or_else(|| ScanError::Malformed("missing region header".into()))?;
    if rows.len() != resolution || rows.iter().any(|r| r.chars().count() != resolution) {
        return Err(ScanError::Malformed("grid dimensions do not match resolution".into()));
    }
    let codes: Vec<char> = rows.iter().flat_map(|r| r.chars()).collect();
    if codes.iter().any(|&c| c != 'C' && c != 'N' && c != 'U') {
        return Err(ScanError::Malformed("grid contains characters other than C/N/U".into()));
    }
    Ok(ScanResult {
        region: ScanRegion::new(C64::new(cx, cy), hw, hh, resolution),
        codes,
        operator,
        fingerprint,
        budget,
    })
}

fn classify_point(op: &Operator, lambda: C64, bound: f64, budget: &Budget, index: usize) -> char {
    if lambda.norm() > bound + 1e-9 {
        return 'N';
    }
    let point_budget = Budget { seed: budget.seed ^ index as u64, ..*budget };
    classifier::classify(&op.translate(lambda), &point_budget).code()
}

fn assemble(
    op: &Operator,
    region: ScanRegion,
    budget: &Budget,
    codes: Vec<char>,
) -> ScanResult {
    // The bound-circle skip makes this structural, but assert it anyway:
    // no Chaotic cell may sit outside |λ| ≤ 1 + r(T).
    let bound = 1.0 + op.spectral_radius();
    for row in 0..region.resolution {
        for col in 0..region.resolution {
            let ch = codes[row * region.resolution + col];
            if ch == 'C' {
                assert!(
                    region.point(row, col).norm() <= bound + 1e-9,
                    "chaotic verdict outside the translation-set bound"
                );
            }
        }
    }
    ScanResult {
        region,
        codes,
        operator: op.describe(),
        fingerprint: op.fingerprint(),
        budget: *budget,
    }
}

/// Sequential scan.
pub fn scan(op: &Operator, region: ScanRegion, budget: &Budget) -> ScanResult {
    let bound = 1.0 + op.spectral_radius();
    let res = region.resolution;
    let codes: Vec<char> = (0..res * res)
        .map(|idx| classify_point(op, region.point(idx / res, idx % res), bound, budget, idx))
        .collect();
    assemble(op, region, budget, codes)
}

/// Parallel scan; per-point seeds derive from the index, so the result is
/// bitwise identical to [`scan`].
pub fn scan_parallel(op: &Operator, region: ScanRegion, budget: &Budget) -> ScanResult {
    let bound = 1.0 + op.spectral_radius();
    let res = region.resolution;
    let codes: Vec<char> = (0..res * res)
        .into_par_iter()
        .map(|idx| classify_point(op, region.point(idx / res, idx % res), bound, budget, idx))
        .collect();
    assemble(op, region, budget, codes)
}

/// Raster of the closed-form oracle (where it speaks; `U` elsewhere).
pub fn scan_oracle(op: &Operator, region: ScanRegion, budget: &Budget) -> ScanResult {
    let res = region.resolution;
    let codes: Vec<char> = (0..res * res)
        .map(|idx| {
            let lambda = region.point(idx / res, idx % res);
            match classifier::oracle_membership(&op.translate(lambda)) {
                Some(true) => 'C',
                Some(false) => 'N',
                None => 'U',
            }
        })
        .collect();
    assemble(op, region, budget, codes)
}

// ---------------------------------------------------------------------------
// Metamorphic set-law checks
// ---------------------------------------------------------------------------

/// Outcome of a metamorphic comparison: index-aligned C/N disagreements.
#[derive(Debug, Clone)]
pub struct MetamorphicReport {
    pub disagreements: Vec<(usize, char, char)>,
    pub compared: usize,
    pub skipped_undetermined: usize,
}

impl MetamorphicReport {
    pub fn pass(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Translation covariance: scanning T over a window equals scanning
/// λ0 + T over the window shifted by −λ0, point for point.
pub fn metamorphic_translation(
    scan_base: &ScanResult,
    scan_shifted: &ScanResult,
    lambda0: C64,
) -> Result<MetamorphicReport, ScanError> {
    let expected = scan_base.region.translated(-lambda0);
    let got = scan_shifted.region;
    if got.resolution != expected.resolution
        || (got.center - expected.center).norm() > 1e-12
        || (got.half_width - expected.half_width).abs() > 1e-12
        || (got.half_height - expected.half_height).abs() > 1e-12
    {
        return Err(ScanError::RegionMismatch(format!(
            "expected shifted region centered at {}, got {}",
            expected.center, got.center
        )));
    }
    let mut report =
        MetamorphicReport { disagreements: Vec::new(), compared: 0, skipped_undetermined: 0 };
    for (idx, (&a, &b)) in scan_base.codes.iter().zip(&scan_shifted.codes).enumerate() {
        if a == 'U' || b == 'U' {
            report.skipped_undetermined += 1;
            continue;
        }
        report.compared += 1;
        if a != b {
            report.disagreements.push((idx, a, b));
        }
    }
    Ok(report)
}

/// Union law: a direct sum is chaotic at λ exactly when some part is.
pub fn metamorphic_union(
    scan_sum: &ScanResult,
    scan_parts: &[&ScanResult],
) -> Result<MetamorphicReport, ScanError> {
    for part in scan_parts {
        if part.region != scan_sum.region {
            return Err(ScanError::RegionMismatch(
                "union comparison needs a common region".into(),
            ));
        }
    }
    let mut report =
        MetamorphicReport { disagreements: Vec::new(), compared: 0, skipped_undetermined: 0 };
    for idx in 0..scan_sum.codes.len() {
        let sum_code = scan_sum.codes[idx];
        let part_codes: Vec<char> = scan_parts.iter().map(|p| p.codes[idx]).collect();
        if sum_code == 'U' || part_codes.iter().any(|&c| c == 'U') {
            report.skipped_undetermined += 1;
            continue;
        }
        report.compared += 1;
        let any_c = part_codes.iter().any(|&c| c == 'C');
        if (sum_code == 'C') != any_c {
            report.disagreements.push((idx, sum_code, if any_c { 'C' } else { 'N' }));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

const COLOR_CHAOTIC: (u8, u8, u8) = (220, 40, 40);
const COLOR_NOT: (u8, u8, u8) = (25, 25, 112);
const COLOR_UNDET: (u8, u8, u8) = (200, 200, 60);
const COLOR_CURVE: (u8, u8, u8) = (255, 255, 255);

/// Modulus range (min, max) of z − center over the cell rectangle around p.
fn offset_modulus_range(p: C64, center: C64, hx: f64, hy: f64) -> (f64, f64) {
    let dx = (p.re - center.re).abs();
    let dy = (p.im - center.im).abs();
    let near = C64::new((dx - hx).max(0.0), (dy - hy).max(0.0)).norm();
    let far = C64::new(dx + hx, dy + hy).norm();
    (near, far)
}

fn cell_meets_model(p: C64, hx: f64, hy: f64, model: &SpectrumModel) -> bool {
    match model {
        SpectrumModel::ClosedDisk { center, radius }
        | SpectrumModel::Circle { center, radius } => {
            let (near, far) = offset_modulus_range(p, *center, hx, hy);
            near <= *radius && *radius <= far
        }
        SpectrumModel::Points(pts) => pts.iter().any(|q| {
            (q.re - p.re).abs() <= hx && (q.im - p.im).abs() <= hy
        }),
        SpectrumModel::Union(models) => models.iter().any(|m| cell_meets_model(p, hx, hy, m)),
    }
}

/// Plain-text P3 pixmap of the raster with the unit circle and the spectrum
/// outline overdrawn in white.
pub fn render(scan: &ScanResult, spectrum: Option<&SpectrumModel>) -> String {
    let res = scan.region.resolution;
    let (hx, hy) = scan.region.cell_half_size();
    let mut out = String::new();
    out.push_str("P3\n");
    out.push_str(&format!("{res} {res}\n255\n"));
    for row in 0..res {
        for col in 0..res {
            let p = scan.region.point(row, col);
            let (unit_near, unit_far) =
                offset_modulus_range(p, C64::new(0.0, 0.0), hx, hy);
            let on_unit_circle = unit_near <= 1.0 && 1.0 <= unit_far;
            let on_spectrum = spectrum.is_some_and(|m| cell_meets_model(p, hx, hy, m));
            let (r, g, b) = if on_unit_circle || on_spectrum {
                COLOR_CURVE
            } else {
                match scan.code_at(row, col) {
                    'C' => COLOR_CHAOTIC,
                    'N' => COLOR_NOT,
                    _ => COLOR_UNDET,
                }
            };
            out.push_str(&format!("{r} {g} {b}"));
            out.push(if col + 1 == res { '\n' } else { ' ' });
        }
    }
    out
}

/// Scan-bound soundness plus verdict replay hook for callers that want the
/// certificate of a single grid point.
pub fn classify_at(op: &Operator, lambda: C64, budget: &Budget) -> Verdict {
    let bound = 1.0 + op.spectral_radius();
    if lambda.norm() > bound + 1e-9 {
        return Verdict {
            value: VerdictValue::NotChaotic,
            certificate: Certificate::AnalyticFilter {
                rule: "outside the translation-set bound circle",
            },
        };
    }
    classifier::classify(&op.translate(lambda), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{parse_operator, WeightRule};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn small_budget() -> Budget {
        Budget { horizon: 512, max_level: 8, trials: 10, panels: 1024, seed: 7 }
    }

    #[test]
    fn auto_region_matches_bound() {
        let b = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap();
        let region = ScanRegion::auto(&b, 101);
        assert!((region.half_width - 2.25).abs() <= 1e-12);
        assert_eq!(region.point(50, 50), c(0.0, 0.0));
        assert_eq!(region.point(0, 100), c(2.25, 2.25));
    }

    #[test]
    fn scan_backward_shift_small_grid_matches_oracle() {
        let b = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap();
        let region = ScanRegion::auto(&b, 31);
        let result = scan(&b, region, &small_budget());
        let oracle = scan_oracle(&b, region, &small_budget());
        let (hx, _) = region.cell_half_size();
        for idx in 0..result.codes.len() {
            let lam = region.point(idx / 31, idx % 31);
            // Skip the band around the set boundary circles.
            if (lam.norm() - 2.0).abs() <= 2.0 * hx || lam.norm() <= 2.0 * hx {
                continue;
            }
            let got = result.codes[idx];
            if got == 'U' {
                continue;
            }
            assert_eq!(got, oracle.codes[idx], "λ = {lam}");
        }
    }

    #[test]
    fn parallel_scan_is_bitwise_identical() {
        let op = parse_operator("kind = diagonal\nentries = constant 0,1").unwrap();
        let region = ScanRegion::auto(&op, 21);
        let seq = scan(&op, region, &small_budget());
        let par = scan_parallel(&op, region, &small_budget());
        assert_eq!(seq, par);
        assert_eq!(seq.to_text(), par.to_text());
    }

    #[test]
    fn scan_round_trips_through_text() {
        let op = parse_operator("kind = forward_shift\nweights = constant 1").unwrap();
        let region = ScanRegion::auto(&op, 11);
        let result = scan(&op, region, &small_budget());
        let text = result.to_text();
        let back = parse_scan(&text).unwrap();
        assert_eq!(result, back);
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn metamorphic_translation_identity_case() {
        let b = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap();
        let region = ScanRegion::auto(&b, 15);
        let a = scan(&b, region, &small_budget());
        let report = metamorphic_translation(&a, &a, c(0.0, 0.0)).unwrap();
        assert!(report.pass());
        assert!(metamorphic_translation(&a, &a, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn metamorphic_translation_shifted_scan() {
        let b = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap();
        let lambda0 = c(0.5, 0.0);
        let region = ScanRegion::auto(&b, 15);
        let base = scan(&b, region, &small_budget());
        let shifted_op = b.translate(lambda0);
        let shifted = scan(&shifted_op, region.translated(-lambda0), &small_budget());
        let report = metamorphic_translation(&base, &shifted, lambda0).unwrap();
        assert!(report.pass(), "disagreements: {:?}", report.disagreements);
    }

    #[test]
    fn metamorphic_union_idempotent_case() {
        let b = Operator::backward_shift(WeightRule::Constant(c(1.0, 0.0))).unwrap();
        let sum = Operator::direct_sum(vec![b.clone(), b.clone()]).unwrap();
        let region = ScanRegion::auto(&b, 11);
        let part = scan(&b, region, &small_budget());
        let sum_scan = scan(&sum, region, &small_budget());
        let report = metamorphic_union(&sum_scan, &[&part, &part]).unwrap();
        assert!(report.pass(), "disagreements: {:?}", report.disagreements);
    }

    #[test]
    fn render_has_exact_header_and_size() {
        let op = parse_operator("kind = diagonal\nentries = constant 0,1").unwrap();
        let region = ScanRegion::new(c(0.0, 0.0), 1.5, 1.5, 3);
        let result = scan(&op, region, &small_budget());
        let ppm = render(&result, Some(op.spectrum()));
        let mut lines = ppm.lines();
        assert_eq!(lines.next(), Some("P3"));
        assert_eq!(lines.next(), Some("3 3"));
        assert_eq!(lines.next(), Some("255"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 3);
        // All nine cells are NotChaotic blue or white overlay.
        for row in rows {
            for px in row.split(' ').collect::<Vec<_>>().chunks(3) {
                let rgb: Vec<&str> = px.to_vec();
                assert!(
                    rgb == ["25", "25", "112"] || rgb == ["255", "255", "255"],
                    "pixel {rgb:?}"
                );
            }
        }
    }

    #[test]
    fn render_marks_unit_circle_cells() {
        let op = parse_operator("kind = diagonal\nentries = constant 0,1").unwrap();
        let region = ScanRegion::new(c(0.0, 0.0), 1.25, 1.25, 101);
        let result = scan(&op, region, &small_budget());
        let ppm = render(&result, None);
        // The pixel at (re, im) = (1, 0) sits on the unit circle: row 50,
        // col 90 (1.0 = 1.25·(2·90/100 − 1)).
        let body: Vec<&str> = ppm.lines().skip(3).collect();
        let row = body[50];
        let px: Vec<&str> = row.split(' ').collect();
        assert_eq!(&px[90 * 3..90 * 3 + 3], &["255", "255", "255"]);
    }
}
