//! Annulus decomposition, sublevel sets `Omega_{P,l}` and the exceptional
//! families `Q_{l,k}` (sublevel sets that resist covering by `2l` small
//! disks) and `Q_{l,k,i}` (polynomials uniformly small on one region).

mod classify;
mod cover;
mod decomposition;
mod separation;
mod sublevel;

pub use classify::{classify_exceptional, sublevel_inclusion, ExceptionalCount, InclusionCheck, PolyVerdict};
pub use cover::{cover_with_disks, CoverMethod, CoverVerdict};
pub use decomposition::{decompose_annulus, AnnulusDecomposition, Region, REGION_C};
pub use separation::{
    coefficient_gap_check, region_smallness_test, region_sup_ln, separation_constant_ln, separation_sweep,
    sufficient_ln_b, SeparationPair, SeparationSweep,
};
pub use sublevel::{sublevel_set, sublevel_set_with, Enclosure, LogBase, SublevelSet, DEFAULT_SAMPLE_GUARD};

use serde::{Deserialize, Serialize};

use crate::analytic::{theoretical_c_r, RootFinderConfig};
use crate::error::{invalid, Result};

/// Default annulus parameter.
pub const DEFAULT_R: f64 = 0.5;
/// Default disk-radius exponent: disks have radius `2^(-a l/k)`.
pub const DEFAULT_A_EXPONENT: f64 = 4.0;

/// Constants of the covering argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub r: f64,
    /// Disk-radius exponent `a > 1`.
    pub a: f64,
    /// Sublevel base `A`.
    pub base_a: LogBase,
    /// Region-smallness base `B`.
    pub base_b: LogBase,
    /// Large-root constant used for `B`.
    pub c_r: f64,
    /// `r^2 / (16 e^(1/e))`, the constant in `B <= c A^(1/a)`.
    pub c_inclusion: f64,
    /// `16 / r^2`, bounding both the region count and `|Q_{l,k}| / 10^(l/k)`.
    pub big_c: f64,
    /// Lattice step; `None` means a quarter of the disk radius.
    pub resolution: Option<f64>,
    #[serde(default)]
    pub roots: RootFinderConfig,
}

impl CoveringParams {
    /// `B = (2/r)^4 e^(20 C_r)`, `A = max((B/c)^a, 2)`.
    pub fn defaults(r: f64) -> Result<Self> {
        Self::derived(r, DEFAULT_A_EXPONENT)
    }

    /// Default `B` and the smallest `A` allowed by `B <= c A^(1/a)`.
    pub fn derived(r: f64, a: f64) -> Result<Self> {
        Self::with_bases(r, a, None, None)
    }

    /// Explicit bases; a missing `B` takes the default, a missing `A` is
    /// derived from `B`.
    pub fn with_bases(r: f64, a: f64, base_a: Option<LogBase>, base_b: Option<LogBase>) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
        }
        if !(a > 1.0) || !a.is_finite() {
            return Err(invalid("a", format!("must be finite and > 1, got {a}")));
        }
        let c_r = theoretical_c_r(r);
        let base_b = match base_b {
            Some(b) => b,
            None => LogBase::from_ln(4.0 * (2.0 / r).ln() + 20.0 * c_r)?,
        };
        let c_inclusion = r * r / (16.0 * std::f64::consts::E.powf(1.0 / std::f64::consts::E));
        let base_a = match base_a {
            Some(a) => a,
            None => LogBase::from_ln((a * (base_b.ln - c_inclusion.ln())).max(2f64.ln()))?,
        };
        Ok(CoveringParams {
            r,
            a,
            base_a,
            base_b,
            c_r,
            c_inclusion,
            big_c: 16.0 / (r * r),
            resolution: None,
            roots: RootFinderConfig::default(),
        })
    }

    /// Root-finder settings (the seed fixes the initial guesses).
    pub fn with_roots(mut self, cfg: RootFinderConfig) -> Self {
        self.roots = cfg;
        self
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = Some(h);
        self
    }

    /// `2^(-a l/k)`.
    pub fn disk_radius(&self, l: u32, k: u32) -> f64 {
        2f64.powf(-self.a * l as f64 / k as f64)
    }

    pub fn resolution_for(&self, l: u32, k: u32) -> f64 {
        self.resolution.unwrap_or(self.disk_radius(l, k) / 4.0)
    }

    /// `B <= c A^(1/a)`.
    pub fn inclusion_condition(&self) -> bool {
        self.base_b.ln <= self.c_inclusion.ln() + self.base_a.ln / self.a + 1e-12
    }
}
