use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Inscribed-disk constant: every region contains a disk of radius
/// `REGION_C * 2^(-l/k)`.
pub const REGION_C: f64 = 0.125;

/// Annular sector `{rho_min <= |x| <= rho_max, theta_min <= arg x <= theta_max}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// Centre of the largest inscribed disk found for the sector.
    pub center: Complex64,
    /// Radius of that inscribed disk.
    pub inner_radius: f64,
    /// Exact diameter of the sector.
    pub outer_radius: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Region {
    fn sector(rho_min: f64, rho_max: f64, theta_min: f64, theta_max: f64) -> Self {
        let half = 0.5 * (theta_max - theta_min);
        let rho_mid = 0.5 * (rho_min + rho_max);
        let theta_mid = 0.5 * (theta_min + theta_max);
        let inner_radius = (0.5 * (rho_max - rho_min)).min(rho_mid * half.sin());
        Region {
            center: Complex64::from_polar(rho_mid, theta_mid),
            inner_radius,
            outer_radius: sector_diameter(rho_min, rho_max, 2.0 * half),
            rho_min,
            rho_max,
            theta_min,
            theta_max,
        }
    }

    pub fn contains(&self, x: Complex64) -> bool {
        let rho = x.norm();
        if rho < self.rho_min || rho > self.rho_max {
            return false;
        }
        let mut t = x.arg();
        if t < 0.0 {
            t += TAU;
        }
        (t >= self.theta_min && t <= self.theta_max) || (self.theta_max >= TAU && t + TAU <= self.theta_max)
    }

    /// `n x n` polar grid of the sector, corners included.
    pub fn sample_points(&self, n: usize) -> Vec<Complex64> {
        let n = n.max(2);
        let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let rho = step(self.rho_min, self.rho_max, i);
            for j in 0..n {
                out.push(Complex64::from_polar(rho, step(self.theta_min, self.theta_max, j)));
            }
        }
        out
    }

    /// Every point of the sector lies within this distance of a point of
    /// `sample_points(n)`.
    pub fn sample_spacing(&self, n: usize) -> f64 {
        let n = n.max(2) as f64 - 1.0;
        let dr = (self.rho_max - self.rho_min) / n;
        let arc = self.rho_max * (self.theta_max - self.theta_min) / n;
        0.5 * dr.hypot(arc)
    }
}

/// Diameter of an annular sector of opening `delta <= pi`.
fn sector_diameter(r0: f64, r1: f64, delta: f64) -> f64 {
    let chord = 2.0 * r1 * (0.5 * delta).sin();
    let diagonal = (r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * delta.cos()).sqrt();
    chord.max(diagonal).max(r1 - r0)
}

/// Partition of `{1 + r <= |x| <= 1/r}` into annular sectors of diameter at
/// most `2^(-l/k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusDecomposition {
    pub r: f64,
    pub l: u32,
    pub k: u32,
    /// `2^(-l/k)`.
    pub scale: f64,
    /// Bands from the inside out, sectors counter-clockwise from angle 0.
    pub regions: Vec<Region>,
    pub band_width: f64,
    /// Index of the first region of each band, plus a final sentinel.
    band_offsets: Vec<usize>,
    /// `REGION_C`.
    pub c: f64,
    /// `16 / r^2`; `N <= C * 4^(l/k)`.
    pub big_c: f64,
    /// Smallest `inner_radius / scale` over all regions.
    pub min_inner_ratio: f64,
    /// Largest `outer_radius / scale` over all regions.
    pub max_diameter_ratio: f64,
}

impl AnnulusDecomposition {
    #[allow(non_snake_case)]
    pub fn N(&self) -> usize {
        self.regions.len()
    }

    pub fn inner(&self) -> f64 {
        1.0 + self.r
    }

    pub fn outer(&self) -> f64 {
        1.0 / self.r
    }

    /// Index of a region containing `x`, `None` outside the annulus.
    pub fn locate(&self, x: Complex64) -> Option<usize> {
        let rho = x.norm();
        if rho < self.inner() || rho > self.outer() {
            return None;
        }
        let bands = self.band_offsets.len() - 1;
        let band = (((rho - self.inner()) / self.band_width) as usize).min(bands - 1);
        let first = self.band_offsets[band];
        let count = self.band_offsets[band + 1] - first;
        let mut t = x.arg();
        if t < 0.0 {
            t += TAU;
        }
        let sector = ((t / TAU * count as f64) as usize).min(count - 1);
        // guard against rounding at band and sector edges
        let candidates = [band.wrapping_sub(1), band, band + 1];
        let hit = first + sector;
        if self.regions[hit].contains(x) {
            return Some(hit);
        }
        candidates
            .iter()
            .filter(|b| **b < bands)
            .flat_map(|b| self.band_offsets[*b]..self.band_offsets[*b + 1])
            .find(|i| self.regions[*i].contains(x))
            .or(Some(hit))
    }

    /// Sum of the sector areas; equals the annulus area up to rounding.
    pub fn total_area(&self) -> f64 {
        self.regions
            .iter()
            .map(|g| 0.5 * (g.theta_max - g.theta_min) * (g.rho_max * g.rho_max - g.rho_min * g.rho_min))
            .sum()
    }

    pub fn annulus_area(&self) -> f64 {
        PI * (self.outer() * self.outer() - self.inner() * self.inner())
    }
}

/// Polar decomposition: `n_r` bands of width at most `D/sqrt 2`, each cut
/// into sectors whose outer arc is at most `D/sqrt 2`, `D = 2^(-l/k)`.
pub fn decompose_annulus(r: f64, l: u32, k: u32) -> Result<AnnulusDecomposition> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
    }
    if k == 0 || l < k {
        return Err(invalid("k", format!("need l >= k >= 1, got l = {l}, k = {k}")));
    }
    let (inner, outer) = (1.0 + r, 1.0 / r);
    if inner >= outer {
        return Err(invalid(
            "r",
            format!("degenerate annulus: 1 + r = {inner} >= 1/r = {outer}"),
        ));
    }
    let scale = 2f64.powf(-(l as f64) / k as f64);
    let width = outer - inner;
    if width < 2.0 * REGION_C * scale {
        return Err(invalid(
            "r",
            format!(
                "annulus width {width} cannot hold a disk of radius {}",
                REGION_C * scale
            ),
        ));
    }
    let side = scale / SQRT_2;
    let n_r = (width / side).ceil().max(1.0) as usize;
    let band_width = width / n_r as f64;

    let mut regions = Vec::new();
    let mut band_offsets = Vec::with_capacity(n_r + 1);
    for b in 0..n_r {
        band_offsets.push(regions.len());
        let r0 = inner + band_width * b as f64;
        let r1 = if b + 1 == n_r {
            outer
        } else {
            inner + band_width * (b + 1) as f64
        };
        let n_t = ((TAU * r1 / side).ceil() as usize).max(3);
        let delta = TAU / n_t as f64;
        for s in 0..n_t {
            let t1 = if s + 1 == n_t { TAU } else { delta * (s + 1) as f64 };
            regions.push(Region::sector(r0, r1, delta * s as f64, t1));
        }
    }
    band_offsets.push(regions.len());

    let min_inner_ratio = regions
        .iter()
        .map(|g| g.inner_radius / scale)
        .fold(f64::INFINITY, f64::min);
    let max_diameter_ratio = regions.iter().map(|g| g.outer_radius / scale).fold(0.0, f64::max);
    Ok(AnnulusDecomposition {
        r,
        l,
        k,
        scale,
        regions,
        band_width,
        band_offsets,
        c: REGION_C,
        big_c: 16.0 / (r * r),
        min_inner_ratio,
        max_diameter_ratio,
    })
}
