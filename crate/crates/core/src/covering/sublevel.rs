use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{find_roots, RootFinderConfig};
use crate::error::{invalid, Error, Result};
use crate::family::IntPoly;

/// Default cap on polynomial evaluations per sublevel set.
pub const DEFAULT_SAMPLE_GUARD: f64 = 5e7;

/// A base `A > 1` held as `ln A`; the default constants overflow `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBase {
    pub ln: f64,
}

impl LogBase {
    pub fn new(base: f64) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(invalid("A", format!("base must be finite and > 1, got {base}")));
        }
        Ok(LogBase { ln: base.ln() })
    }

    pub fn from_ln(ln: f64) -> Result<Self> {
        if !(ln > 0.0) || !ln.is_finite() {
            return Err(invalid("A", format!("log of base must be finite and > 0, got {ln}")));
        }
        Ok(LogBase { ln })
    }

    /// `ln(base^(-l))`.
    pub fn ln_threshold(&self, l: u32) -> f64 {
        -(l as f64) * self.ln
    }

    /// `base^(-l)`, possibly underflowing to 0.
    pub fn threshold(&self, l: u32) -> f64 {
        self.ln_threshold(l).exp()
    }

    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

/// Disk known to contain the part of `Omega` near one root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub center: Complex64,
    pub radius: f64,
}

/// Lattice samples of `Omega = {1 + r <= |x| <= 1/r, |P(x)| < A^(-l)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelSet {
    pub p: IntPoly,
    pub base: LogBase,
    pub l: u32,
    pub r: f64,
    pub resolution: f64,
    /// Points `(i h, j h)` of the global lattice lying in `Omega`, sorted.
    pub grid_points: Vec<Complex64>,
    /// `Omega` lies in the union of these disks.
    pub enclosures: Vec<Enclosure>,
    /// Number of lattice points at which `P` was evaluated.
    pub evaluations: usize,
}

impl SublevelSet {
    pub fn is_empty(&self) -> bool {
        self.grid_points.is_empty()
    }

    pub fn max_enclosure_radius(&self) -> f64 {
        self.enclosures.iter().map(|e| e.radius).fold(0.0, f64::max)
    }
}

struct Sampler<'a> {
    coeffs: &'a [f64],
    p: &'a IntPoly,
    ln_eps: f64,
    h: f64,
    inner: f64,
    outer: f64,
    guard: f64,
    evaluations: usize,
    hits: BTreeSet<(i64, i64)>,
}

impl Sampler<'_> {
    fn value(&self, x: Complex64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a)
            .norm()
    }

    fn below(&self, v: f64) -> bool {
        if v == 0.0 {
            return true;
        }
        v.ln() < self.ln_eps
    }

    fn visit(&mut self, e: &Enclosure, i0: i64, i1: i64, j0: i64, j1: i64) -> Result<()> {
        if i0 > i1 || j0 > j1 {
            return Ok(());
        }
        let h = self.h;
        let c = Complex64::new(0.5 * (i0 + i1) as f64 * h, 0.5 * (j0 + j1) as f64 * h);
        let half_diag = 0.5 * h * (((i1 - i0) as f64).hypot((j1 - j0) as f64));
        let rho = c.norm();
        if rho + half_diag < self.inner || rho - half_diag > self.outer {
            return Ok(());
        }
        if (c - e.center).norm() - half_diag > e.radius {
            return Ok(());
        }
        let (v, t) = self.p.taylor_bound(c, half_diag);
        let lower = v - t;
        if lower > 0.0 && !self.below(lower) {
            return Ok(());
        }
        let count = (i1 - i0 + 1) * (j1 - j0 + 1);
        if count <= 16 {
            for i in i0..=i1 {
                for j in j0..=j1 {
                    if self.hits.contains(&(i, j)) {
                        continue;
                    }
                    let x = Complex64::new(i as f64 * h, j as f64 * h);
                    let n = x.norm();
                    if n < self.inner || n > self.outer {
                        continue;
                    }
                    self.evaluations += 1;
                    if self.below(self.value(x)) {
                        self.hits.insert((i, j));
                    }
                }
            }
            if self.evaluations as f64 > self.guard {
                return Err(Error::ResourceLimit {
                    what: "sublevel samples",
                    estimate: self.evaluations as f64,
                    limit: self.guard,
                });
            }
            return Ok(());
        }
        if i1 - i0 >= j1 - j0 {
            let m = i0 + (i1 - i0) / 2;
            self.visit(e, i0, m, j0, j1)?;
            self.visit(e, m + 1, i1, j0, j1)
        } else {
            let m = j0 + (j1 - j0) / 2;
            self.visit(e, i0, i1, j0, m)?;
            self.visit(e, i0, i1, m + 1, j1)
        }
    }
}

/// Samples `Omega` on the lattice `resolution * Z^2`.
///
/// Any `x` with `|P(x)| < eps` lies within `(eps/|a_m|)^(1/m)` of a root, so
/// only disks around the computed roots (widened by their inclusion radii)
/// are searched; inside them, lattice rectangles on which a Taylor bound
/// keeps `|P| >= eps` are skipped. The result equals a full lattice scan.
pub fn sublevel_set(p: &IntPoly, base: LogBase, l: u32, r: f64, resolution: f64) -> Result<SublevelSet> {
    sublevel_set_with(
        p,
        base,
        l,
        r,
        resolution,
        DEFAULT_SAMPLE_GUARD,
        &RootFinderConfig::default(),
    )
}

pub fn sublevel_set_with(
    p: &IntPoly,
    base: LogBase,
    l: u32,
    r: f64,
    resolution: f64,
    guard: f64,
    cfg: &RootFinderConfig,
) -> Result<SublevelSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(invalid("resolution", format!("must be positive, got {resolution}")));
    }
    let (inner, outer) = (1.0 + r, 1.0 / r);
    let ln_eps = base.ln_threshold(l);
    let mut enclosures = Vec::new();
    let degree = p.degree().unwrap_or(0);
    if degree > 0 {
        let roots = find_roots::<f64>(p, cfg)?;
        let lead = p.leading().unwrap().unsigned_abs() as f64;
        let delta = ((ln_eps - lead.ln()) / degree as f64).exp();
        for (z, rad) in roots.roots.iter().zip(&roots.inclusion_radii) {
            let radius = delta + rad + 1e-12 * z.norm().max(1.0);
            let m = z.norm();
            if m + radius < inner || m - radius > outer {
                continue;
            }
            let e = Enclosure { center: *z, radius };
            if !enclosures.contains(&e) {
                enclosures.push(e);
            }
        }
    } else if ln_eps > (p.coeffs()[0].unsigned_abs() as f64).ln() {
        return Err(invalid("A", "constant polynomial below threshold requires A < 1"));
    }

    // rough count of lattice points to visit
    let area: f64 = enclosures
        .iter()
        .map(|e| {
            let s = 2.0 * e.radius.min(outer) + 2.0 * resolution;
            s * s / (resolution * resolution)
        })
        .sum();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| *c as f64).collect();
    let mut s = Sampler {
        coeffs: &coeffs,
        p,
        ln_eps,
        h: resolution,
        inner,
        outer,
        guard,
        evaluations: 0,
        hits: BTreeSet::new(),
    };
    if area > 1e4 * guard {
        return Err(Error::ResourceLimit {
            what: "sublevel lattice",
            estimate: area,
            limit: 1e4 * guard,
        });
    }
    for e in &enclosures {
        let lo = |v: f64| ((v - e.radius).max(-outer) / resolution).floor() as i64;
        let hi = |v: f64| ((v + e.radius).min(outer) / resolution).ceil() as i64;
        s.visit(e, lo(e.center.re), hi(e.center.re), lo(e.center.im), hi(e.center.im))?;
    }
    let grid_points = s
        .hits
        .iter()
        .map(|(i, j)| Complex64::new(*i as f64 * resolution, *j as f64 * resolution))
        .collect();
    Ok(SublevelSet {
        p: p.clone(),
        base,
        l,
        r,
        resolution,
        grid_points,
        enclosures,
        evaluations: s.evaluations,
    })
}
