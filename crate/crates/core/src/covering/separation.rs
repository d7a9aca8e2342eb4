use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decomposition::{decompose_annulus, Region, REGION_C};
use super::sublevel::LogBase;
use super::CoveringParams;
use crate::analytic::find_roots;
use crate::error::{invalid, Result};
use crate::family::{enumerate_family, IntPoly};
use crate::report::BoundReport;

/// Log of an upper bound for `sup |P|` on the region: every point lies
/// within the sample spacing of a sample, where a Taylor majorant applies.
pub fn region_sup_ln(p: &IntPoly, region: &Region, samples: usize) -> f64 {
    if p.is_zero() {
        return f64::NEG_INFINITY;
    }
    let h = region.sample_spacing(samples);
    region
        .sample_points(samples)
        .iter()
        .map(|x| {
            let (v, t) = p.taylor_bound(*x, h);
            v + t
        })
        .fold(0.0, f64::max)
        .ln()
}

/// `|P| <= B^(-l)` on the whole region (sampled, with a Taylor margin).
pub fn region_smallness_test(p: &IntPoly, region: &Region, base_b: LogBase, l: u32, samples: usize) -> bool {
    let threshold = base_b.ln_threshold(l);
    if p.is_zero() {
        return true;
    }
    // cheap rejection at the inscribed-disk centre
    let v = p.eval(region.center).norm();
    if v > 0.0 && v.ln() > threshold {
        return false;
    }
    region_sup_ln(p, region, samples) <= threshold
}

/// `ln C` in `(1/2)(r/2)^m [c/sqrt M]^M >= C^(-l)`, worst case over
/// `m <= 2l`, `M <= sqrt l`.
pub fn separation_constant_ln(r: f64, l: u32) -> f64 {
    let lf = l as f64;
    let m_max = lf.sqrt();
    let per_root = (lf.powf(0.25) / REGION_C).ln().max(0.0);
    (2f64.ln() + 2.0 * lf * (2.0 / r).ln() + m_max * per_root) / lf
}

/// Smallest `ln B` for which the large-coefficient conclusion
/// `exp(k (ln B - ln C)/(C_r ln 2) - 1)` exceeds `e^(10k)`.
pub fn sufficient_ln_b(r: f64, c_r: f64, l: u32, k: u32) -> f64 {
    separation_constant_ln(r, l) + c_r * 2f64.ln() * (10.0 + 1.0 / k as f64)
}

/// Compares `||p - q||_inf` with `e^(10k)` and records the intermediate
/// quantities: `M`, the number of roots of `p - q` beyond `1 + r/2`, and the
/// lower bound `k (ln B - ln C)/ln 2` it must meet.
pub fn coefficient_gap_check(
    p: &IntPoly,
    q: &IntPoly,
    region: &Region,
    base_b: LogBase,
    l: u32,
    k: u32,
    params: &CoveringParams,
) -> Result<BoundReport> {
    if p == q {
        return Err(invalid("q", "p and q must differ"));
    }
    let diff = p.sub(q);
    let measured = diff.max_abs_coeff() as f64;
    let bound = (10.0 * k as f64).exp();
    let roots = find_roots::<f64>(&diff, &params.roots)?;
    let large = roots.roots.iter().filter(|z| z.norm() > 1.0 + params.r / 2.0).count();
    let ln_c = separation_constant_ln(params.r, l);
    let m_lower = k as f64 * (base_b.ln - ln_c) / 2f64.ln();
    let sufficient = sufficient_ln_b(params.r, params.c_r, l, k);
    Ok(BoundReport::exceeds("max |coefficient of p - q|", measured, bound)
        .with_note("large_roots_M", large as f64)
        .with_note("M_lower_bound", m_lower)
        .with_note("ln_C", ln_c)
        .with_note("ln_B", base_b.ln)
        .with_note("ln_B_sufficient", sufficient)
        .with_note("region_inner_radius", region.inner_radius))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationPair {
    pub p: IntPoly,
    pub q: IntPoly,
    pub region: usize,
    pub report: BoundReport,
    /// A failure with `B` below the sufficient threshold.
    pub threshold_exception: bool,
}

/// All pairs sharing some `Q_{l,k,i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationSweep {
    pub l: u32,
    pub k: u32,
    pub ln_b: f64,
    pub ln_b_sufficient: f64,
    pub regions: usize,
    /// Regions whose class contains a nonzero polynomial.
    pub nontrivial_regions: usize,
    /// Largest class size.
    pub max_class: usize,
    pub pairs_checked: usize,
    pub passes: usize,
    pub failures: Vec<SeparationPair>,
    pub threshold_exceptions: usize,
    pub unexplained: usize,
}

/// Groups `P_l` (zero included) into the classes `Q_{l,k,i}` and checks
/// every pair in a common class. A distinct pair is reported once, at the
/// first region where it meets.
pub fn separation_sweep(l: u32, k: u32, params: &CoveringParams, samples: usize) -> Result<SeparationSweep> {
    let d = decompose_annulus(params.r, l, k)?;
    let family: Vec<IntPoly> = enumerate_family(l)?.collect();
    let base_b = params.base_b;
    let classes: Vec<Vec<usize>> = d
        .regions
        .par_iter()
        .map(|g| {
            family
                .iter()
                .enumerate()
                .filter(|(_, p)| region_smallness_test(p, g, base_b, l, samples))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut seen = std::collections::BTreeSet::new();
    let mut pairs = Vec::new();
    for (region, class) in classes.iter().enumerate() {
        for (a, i) in class.iter().enumerate() {
            for j in &class[a + 1..] {
                if seen.insert((*i, *j)) {
                    pairs.push((*i, *j, region));
                }
            }
        }
    }
    let sufficient = sufficient_ln_b(params.r, params.c_r, l, k);
    let checked = pairs
        .par_iter()
        .map(|(i, j, region)| {
            let report = coefficient_gap_check(&family[*i], &family[*j], &d.regions[*region], base_b, l, k, params)?;
            Ok(SeparationPair {
                p: family[*i].clone(),
                q: family[*j].clone(),
                region: *region,
                threshold_exception: !report.pass && base_b.ln < sufficient,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passes = checked.iter().filter(|c| c.report.pass).count();
    let failures: Vec<SeparationPair> = checked.into_iter().filter(|c| !c.report.pass).collect();
    let threshold_exceptions = failures.iter().filter(|c| c.threshold_exception).count();
    Ok(SeparationSweep {
        l,
        k,
        ln_b: base_b.ln,
        ln_b_sufficient: sufficient,
        regions: d.N(),
        nontrivial_regions: classes
            .iter()
            .filter(|c| c.iter().any(|i| !family[*i].is_zero()))
            .count(),
        max_class: classes.iter().map(|c| c.len()).max().unwrap_or(0),
        pairs_checked: pairs.len(),
        passes,
        unexplained: failures.len() - threshold_exceptions,
        threshold_exceptions,
        failures,
    })
}
