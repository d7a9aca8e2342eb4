use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::{cover_with_disks, CoverMethod};
use super::decomposition::decompose_annulus;
use super::separation::region_sup_ln;
use super::sublevel::{sublevel_set_with, DEFAULT_SAMPLE_GUARD};
use super::CoveringParams;
use crate::analytic::find_roots;
use crate::error::{invalid, Result};
use crate::family::{enumerate_family, IntPoly};

/// Covering verdict for one polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyVerdict {
    pub poly: IntPoly,
    pub coverable: bool,
    pub disks: usize,
    pub witness: Option<Complex64>,
    pub near_boundary: bool,
    pub method: Option<CoverMethod>,
}

/// Sweep of `P_l` for `Q_{l,k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalCount {
    pub l: u32,
    pub k: u32,
    pub radius: f64,
    pub resolution: f64,
    pub max_disks: usize,
    /// Nonzero members, in family enumeration order.
    pub members: Vec<IntPoly>,
    /// The zero polynomial's sublevel set is the whole annulus; it is
    /// counted as a member.
    pub zero_is_member: bool,
    pub count_with_zero: usize,
    pub count_without_zero: usize,
    /// `C 10^(l/k)`.
    pub bound: f64,
    pub big_c: f64,
    /// `k > ln l`, where only the zero polynomial may be a member.
    pub k_exceeds_log_l: bool,
    /// Members decided by greedy failure without a separated-sample proof.
    pub near_boundary: usize,
    pub family_size: usize,
    pub verdicts: Vec<PolyVerdict>,
}

impl ExceptionalCount {
    pub fn count_within_bound(&self) -> bool {
        self.count_with_zero as f64 <= self.bound
    }

    pub fn only_zero_when_required(&self) -> bool {
        !self.k_exceeds_log_l || self.members.is_empty()
    }
}

/// Classifies every polynomial of `P_l` by whether its sublevel set can be
/// covered by `2l` disks of radius `2^(-a l/k)`.
pub fn classify_exceptional(l: u32, k: u32, params: &CoveringParams) -> Result<ExceptionalCount> {
    if l == 0 || k == 0 {
        return Err(invalid("l", format!("need l, k >= 1, got l = {l}, k = {k}")));
    }
    let family: Vec<IntPoly> = enumerate_family(l)?.collect();
    let radius = params.disk_radius(l, k);
    let resolution = params.resolution_for(l, k);
    let max_disks = 2 * l as usize;
    let cfg = params.roots;

    let verdicts = family
        .par_iter()
        .map(|p| -> Result<PolyVerdict> {
            if p.is_zero() {
                return Ok(PolyVerdict {
                    poly: p.clone(),
                    coverable: false,
                    disks: max_disks + 1,
                    witness: Some(Complex64::new(1.0 + params.r, 0.0)),
                    near_boundary: false,
                    method: None,
                });
            }
            let s = sublevel_set_with(p, params.base_a, l, params.r, resolution, DEFAULT_SAMPLE_GUARD, &cfg)?;
            let v = cover_with_disks(&s, max_disks, radius);
            Ok(PolyVerdict {
                poly: p.clone(),
                coverable: v.coverable,
                disks: v.disks_used,
                witness: v.witness,
                near_boundary: v.near_boundary,
                method: Some(v.method),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let members: Vec<IntPoly> = verdicts
        .iter()
        .filter(|v| !v.coverable && !v.poly.is_zero())
        .map(|v| v.poly.clone())
        .collect();
    let near_boundary = verdicts.iter().filter(|v| v.near_boundary).count();
    let bound = params.big_c * 10f64.powf(l as f64 / k as f64);
    Ok(ExceptionalCount {
        l,
        k,
        radius,
        resolution,
        max_disks,
        count_with_zero: members.len() + 1,
        count_without_zero: members.len(),
        members,
        zero_is_member: true,
        bound,
        big_c: params.big_c,
        k_exceeds_log_l: k as f64 > (l as f64).ln(),
        near_boundary,
        family_size: family.len(),
        verdicts,
    })
}

/// Whether one member of `Q_{l,k}` is small on the region holding a
/// sublevel point far from all its roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub poly: IntPoly,
    /// Sample of `Omega` farther than the disk radius from every root.
    pub x0: Option<Complex64>,
    pub region: Option<usize>,
    /// Log of an upper bound for `|P|` on the region.
    pub sup_ln: f64,
    /// `-l ln B`.
    pub threshold_ln: f64,
    pub holds: bool,
}

/// Checks `Q_{l,k} ⊂ Q_{l,k,1} ∪ ... ∪ Q_{l,k,N}` member by member, with
/// `B = exp(ln_b)`.
///
/// `ln_b` may be nonpositive: the inclusion argument does not need `B > 1`,
/// and at small `l` every choice with `B > 1` leaves only the zero
/// polynomial in `Q_{l,k}`.
pub fn sublevel_inclusion(
    count: &ExceptionalCount,
    params: &CoveringParams,
    ln_b: f64,
    samples: usize,
) -> Result<Vec<InclusionCheck>> {
    let d = decompose_annulus(params.r, count.l, count.k)?;
    let cfg = params.roots;
    let threshold_ln = -(count.l as f64) * ln_b;
    count
        .members
        .par_iter()
        .map(|p| {
            let s = sublevel_set_with(
                p,
                params.base_a,
                count.l,
                params.r,
                count.resolution,
                DEFAULT_SAMPLE_GUARD,
                &cfg,
            )?;
            let roots = find_roots::<f64>(p, &cfg)?;
            let x0 = s
                .grid_points
                .iter()
                .find(|x| roots.roots.iter().all(|z| (*x - z).norm() > count.radius))
                .copied();
            let region = x0.and_then(|x| d.locate(x));
            let sup_ln = match region {
                Some(i) => region_sup_ln(p, &d.regions[i], samples),
                None => f64::INFINITY,
            };
            Ok(InclusionCheck {
                poly: p.clone(),
                x0,
                region,
                sup_ln,
                threshold_ln,
                holds: sup_ln <= threshold_ln,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::LogBase;

    #[test]
    fn defaults_leave_only_zero() {
        let params = CoveringParams::defaults(0.5).unwrap();
        for (l, k) in [(2, 1), (3, 1), (3, 2), (3, 3)] {
            let c = classify_exceptional(l, k, &params).unwrap();
            assert!(c.members.is_empty(), "{l} {k}");
            assert_eq!(c.count_with_zero, 1);
            assert!(c.count_within_bound());
            assert!(c.only_zero_when_required());
            assert!(c.zero_is_member);
        }
    }

    fn exploratory(eps: f64, l: u32) -> CoveringParams {
        let base = LogBase::from_ln(-eps.ln() / l as f64).unwrap();
        CoveringParams::with_bases(0.5, 2.0, Some(base), None).unwrap()
    }

    #[test]
    fn monotone_in_k() {
        let l = 3;
        let params = exploratory(0.3, l).with_resolution(2f64.powi(-8));
        let mut previous: Option<Vec<IntPoly>> = None;
        for k in 1..=3 {
            let c = classify_exceptional(l, k, &params).unwrap();
            if k == 1 {
                assert!(!c.members.is_empty());
            }
            if let Some(prev) = &previous {
                for m in &c.members {
                    assert!(prev.contains(m), "k = {k}: {m}");
                }
            }
            previous = Some(c.members);
        }
    }

    #[test]
    fn nonvacuous_members_and_inclusion() {
        let l = 3;
        let params = exploratory(0.3, l).with_resolution(2f64.powi(-8));
        let c = classify_exceptional(l, 1, &params).unwrap();
        // regression: fixed by the sweep itself
        assert_eq!(c.count_without_zero, 46);
        assert!(c.count_within_bound());
        assert!(c.members.contains(&IntPoly::new(vec![-2, 1])));
        assert!(c.members.contains(&IntPoly::new(vec![-1, -1, 1])));
        // B = c A^(1/a) is below 1 here; see `sublevel_inclusion`
        let ln_b = params.c_inclusion.ln() + params.base_a.ln / params.a;
        let checks = sublevel_inclusion(&c, &params, ln_b, 12).unwrap();
        assert_eq!(checks.len(), 46);
        for ch in &checks {
            assert!(ch.holds, "{:?}", ch);
            assert!(ch.x0.is_some());
        }
    }
}
