//! The covering series bounding the `alpha`-dimensional Hausdorff measure of
//! the non-Diophantine set, and finite-length scans of the gap `d_l(x)`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::exact_from_f64;
use crate::words::{ball_gaps, enumerate_ball, IdentityTest, RELATION_FLOOR};

/// A measured `|P_l|` (`k = 0`) or `|Q_{l,k}|` (`k >= 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCount {
    pub l: u32,
    pub k: u32,
    pub count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffSumParams {
    /// Candidate dimension in `(0, 1]`.
    pub alpha: f64,
    pub a: f64,
    pub n_start: u32,
    pub l_max: u32,
    /// Constant in `|Q_{l,k}| <= C 100^(l/(k+1))`; at least 1 so that the
    /// `k = 0` term also bounds `|P_l| <= 100^l`.
    pub big_c: f64,
    /// Overrides for the head of the series.
    pub measured: Vec<MeasuredCount>,
    /// Refuse parameters with `2^(alpha a) <= 100`.
    pub certified: bool,
}

impl HausdorffSumParams {
    pub fn new(alpha: f64, a: f64, n_start: u32, l_max: u32) -> Self {
        HausdorffSumParams {
            alpha,
            a,
            n_start,
            l_max,
            big_c: 16.0 / (crate::covering::DEFAULT_R * crate::covering::DEFAULT_R),
            measured: Vec::new(),
            certified: true,
        }
    }

    /// `100 / 2^(alpha a)`.
    pub fn ratio(&self) -> f64 {
        100.0 * (-self.alpha * self.a * LN_2).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffTail {
    /// Sum over `n_start <= l <= l_max`.
    pub partial: f64,
    /// Upper bound for `l > max(l_max, n_start - 1)`.
    pub remainder: f64,
    pub total: f64,
    /// `100 / 2^(alpha a)`.
    pub ratio: f64,
    /// Largest `k` whose remainder contribution was summed exactly.
    pub k_terms: u32,
}

/// Largest `k` with `k <= ln l`.
fn max_k(l: u32) -> u32 {
    let mut k = (l as f64).ln().floor().max(0.0) as u32;
    while (k as f64) > (l as f64).ln() {
        k -= 1;
    }
    while ((k + 1) as f64) <= (l as f64).ln() {
        k += 1;
    }
    k
}

/// Smallest `l >= floor` with `k <= ln l`.
fn first_l(k: u32, floor: u32) -> f64 {
    let mut l = (k as f64).exp().ceil().max(floor as f64);
    while l > floor as f64 && ((l - 1.0).ln() >= k as f64) {
        l -= 1.0;
    }
    while l.ln() < k as f64 {
        l += 1.0;
    }
    l
}

/// `sum_{l >= n} l t^l` for `0 < t < 1`.
fn weighted_geometric(t: f64, n: f64) -> f64 {
    let tn = (n * t.ln()).exp();
    tn * (n - (n - 1.0) * t) / ((1.0 - t) * (1.0 - t))
}

/// `sum_{l >= n_start} sum_{k=0}^{[ln l]} |Q_{l,k}| 2l 2^(-alpha a l/(k+1))`
/// with `|Q_{l,0}| = |P_l|`; counts are the bounds `C 100^(l/(k+1))` unless
/// measured. Returns an upper bound.
pub fn hausdorff_tail(params: &HausdorffSumParams) -> Result<f64> {
    Ok(hausdorff_tail_detail(params)?.total)
}

pub fn hausdorff_tail_detail(params: &HausdorffSumParams) -> Result<HausdorffTail> {
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {}", params.alpha)));
    }
    if !(params.a > 1.0) || !params.a.is_finite() {
        return Err(invalid("a", format!("must be finite and > 1, got {}", params.a)));
    }
    if params.n_start == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(params.big_c >= 1.0) {
        return Err(invalid("C", format!("must be at least 1, got {}", params.big_c)));
    }
    let q = params.ratio();
    if params.certified && q >= 1.0 {
        return Err(Error::DecayConditionViolated((params.alpha * params.a * LN_2).exp()));
    }
    let measured: BTreeMap<(u32, u32), f64> = params.measured.iter().map(|m| ((m.l, m.k), m.count)).collect();
    let ln_c = params.big_c.ln();
    let aa = params.alpha * params.a * LN_2;

    let mut partial = 0.0;
    for l in params.n_start..=params.l_max {
        for k in 0..=max_k(l) {
            let e = (k + 1) as f64;
            let ln_count = match measured.get(&(l, k)) {
                Some(c) if *c <= 0.0 => continue,
                Some(c) => c.ln(),
                None => ln_c + l as f64 * 100f64.ln() / e,
            };
            partial += (ln_count + (2.0 * l as f64).ln() - aa * l as f64 / e).exp();
        }
    }

    let n = params.n_start.max(params.l_max + 1);
    let mut remainder = 0.0;
    let mut k_terms = 0;
    if q >= 1.0 {
        remainder = f64::INFINITY;
    } else {
        // swap the sums: for fixed k the terms run over l >= max(n, e^k)
        let mut prev = f64::INFINITY;
        for k in 0u32.. {
            let t = q.powf(1.0 / (k + 1) as f64);
            let s = 2.0 * params.big_c * weighted_geometric(t, first_l(k, n));
            k_terms = k;
            if s == 0.0 || (s <= 1e-20 * remainder && s <= 0.5 * prev) {
                // super-exponential decay in k: the rest is at most s
                remainder += s;
                break;
            }
            remainder += s;
            prev = s;
        }
    }
    Ok(HausdorffTail {
        partial,
        remainder,
        total: partial + remainder,
        ratio: q,
        k_terms,
    })
}

/// Uniform grid `x0 + i step + (y0 + j step) i` inside a rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub step: f64,
}

impl ScanSpec {
    pub fn dims(&self) -> Result<(usize, usize)> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(invalid("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.x1 >= self.x0 && self.y1 >= self.y0) {
            return Err(invalid("rect", "need x0 <= x1 and y0 <= y1"));
        }
        let count = |lo: f64, hi: f64| ((hi - lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((count(self.x0, self.x1), count(self.y0, self.y1)))
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x0 + i as f64 * self.step, self.y0 + j as f64 * self.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub i: usize,
    pub j: usize,
    pub x: Complex64,
    pub l: u32,
    pub d_l: f64,
    /// `d_l A^l`; below 1 when the gap already dips under `A^(-l)`.
    pub violation_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub nx: usize,
    pub ny: usize,
    pub l: u32,
    pub base: f64,
    /// Row-major in `j`, then `i`.
    pub grid: Vec<ScanPoint>,
}

/// Default cap on grid points times ball size.
pub const DEFAULT_SCAN_GUARD: f64 = 2e9;

/// `d_l(x)` over a grid, from one shared enumeration of the ball.
///
/// Identity is decided exactly at the binary value of each grid point, so
/// relations at integer `x` never produce a zero gap.
pub fn diophantine_scan(spec: &ScanSpec, l: u32, base: f64) -> Result<ScanResult> {
    diophantine_scan_with(spec, l, base, DEFAULT_SCAN_GUARD)
}

pub fn diophantine_scan_with(spec: &ScanSpec, l: u32, base: f64, guard: f64) -> Result<ScanResult> {
    if !(base > 0.0) || !base.is_finite() {
        return Err(invalid("A", format!("must be positive and finite, got {base}")));
    }
    let (nx, ny) = spec.dims()?;
    let cells: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    for (i, j) in &cells {
        let x = spec.point(*i, *j);
        if !(x.norm() > 1.0) {
            return Err(Error::InsideUnitDisk(x.norm()));
        }
    }
    let ball_estimate = crate::words::word_count(l).min(3f64.powi(l as i32) * 2.0);
    if cells.len() as f64 * ball_estimate > guard {
        return Err(Error::ResourceLimit {
            what: "scan evaluations",
            estimate: cells.len() as f64 * ball_estimate,
            limit: guard,
        });
    }
    let ball = enumerate_ball(l)?;
    let grid = cells
        .par_iter()
        .map(|(i, j)| {
            let x = spec.point(*i, *j);
            let exact = exact_from_f64(x)?;
            let test = IdentityTest::Exact {
                x: &exact,
                floor: RELATION_FLOOR,
            };
            let d_l = ball_gaps(&ball, x, &test)?.pop().expect("ball has layer 0").d_l;
            Ok(ScanPoint {
                i: *i,
                j: *j,
                x,
                l,
                d_l,
                violation_margin: d_l * base.powi(l as i32),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        spec: *spec,
        nx,
        ny,
        l,
        base,
        grid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub threshold: f64,
    /// Grid points with margin below the threshold.
    pub box_count: usize,
    /// `(box side, occupied boxes)` from the grid step upwards by factors of 2.
    pub levels: Vec<(f64, usize)>,
    /// Least-squares slope of `ln count` against `ln(1/side)`; omitted with
    /// fewer than two usable refinements. A heuristic, not a dimension
    /// certificate.
    pub dim_slope: Option<f64>,
}

/// Box counts of `{margin < threshold}` at dyadic coarsenings of the grid.
pub fn box_counting_estimate(scan: &ScanResult, thresholds: &[f64]) -> Vec<BoxCount> {
    let longest = scan.nx.max(scan.ny);
    let mut levels = 0u32;
    while (longest >> (levels + 1)) >= 4 {
        levels += 1;
    }
    thresholds
        .iter()
        .map(|&threshold| {
            let hits: Vec<(usize, usize)> = scan
                .grid
                .iter()
                .filter(|p| p.violation_margin < threshold)
                .map(|p| (p.i, p.j))
                .collect();
            let mut by_level = Vec::new();
            for s in 0..=levels {
                let boxes: std::collections::BTreeSet<(usize, usize)> =
                    hits.iter().map(|(i, j)| (i >> s, j >> s)).collect();
                by_level.push((scan.spec.step * (1u64 << s) as f64, boxes.len()));
            }
            let usable: Vec<(f64, f64)> = by_level
                .iter()
                .filter(|(_, c)| *c > 0)
                .map(|(side, c)| ((1.0 / side).ln(), (*c as f64).ln()))
                .collect();
            BoxCount {
                threshold,
                box_count: hits.len(),
                dim_slope: (usable.len() >= 2).then(|| slope(&usable)),
                levels: by_level,
            }
        })
        .collect()
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
