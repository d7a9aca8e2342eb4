use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sublevel::SublevelSet;

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    /// No lattice point lies in `Omega`.
    Empty,
    /// Every root enclosure is no wider than the disk radius, so disks at
    /// the roots cover all of `Omega`, not only the samples.
    RootDisks,
    /// Disks at the roots cover every sample.
    RootSamples,
    /// Greedy covering of the samples.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverVerdict {
    pub coverable: bool,
    pub disks_used: usize,
    pub max_disks: usize,
    pub radius: f64,
    /// Uncovered sample when not coverable.
    pub witness: Option<Complex64>,
    pub centers: Vec<Complex64>,
    pub method: CoverMethod,
    /// Size of a `2 radius`-separated subset of the samples (capped at
    /// `max_disks + 1`); no cover with fewer disks exists.
    pub packing_lower_bound: usize,
    /// The samples alone do not decide the verdict: greedy failed but no
    /// `max_disks + 1` separated samples exist.
    pub near_boundary: bool,
}

/// Covers the samples of `s` with at most `max_disks` disks of `radius`.
///
/// Root-centred disks are tried first; otherwise greedy places a disk on the
/// first uncovered sample and stops once `max_disks + 1` disks are needed.
pub fn cover_with_disks(s: &SublevelSet, max_disks: usize, radius: f64) -> CoverVerdict {
    let mut verdict = CoverVerdict {
        coverable: true,
        disks_used: 0,
        max_disks,
        radius,
        witness: None,
        centers: Vec::new(),
        method: CoverMethod::Empty,
        packing_lower_bound: 0,
        near_boundary: false,
    };
    if s.grid_points.is_empty() {
        return verdict;
    }
    let pts = &s.grid_points;

    if s.enclosures.iter().all(|e| e.radius <= radius) && s.enclosures.len() <= max_disks {
        verdict.disks_used = s.enclosures.len();
        verdict.centers = s.enclosures.iter().map(|e| e.center).collect();
        verdict.method = CoverMethod::RootDisks;
        verdict.packing_lower_bound = 1;
        return verdict;
    }

    let roots: Vec<Complex64> = s.enclosures.iter().map(|e| e.center).collect();
    let mut used = vec![false; roots.len()];
    let all_near_roots = pts
        .iter()
        .all(|x| match roots.iter().position(|z| (x - z).norm() <= radius) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        });
    let root_count = used.iter().filter(|u| **u).count();

    let mut centers: Vec<Complex64> = Vec::new();
    let mut witness = None;
    for x in pts {
        if centers.iter().any(|c| (x - c).norm() <= radius) {
            continue;
        }
        if centers.len() == max_disks {
            witness = Some(*x);
            break;
        }
        centers.push(*x);
    }
    let greedy_ok = witness.is_none();

    let mut packing: Vec<Complex64> = Vec::new();
    for x in pts {
        if packing.iter().all(|c| (x - c).norm() > 2.0 * radius) {
            packing.push(*x);
            if packing.len() > max_disks {
                break;
            }
        }
    }
    verdict.packing_lower_bound = packing.len();

    if all_near_roots && root_count <= max_disks && (!greedy_ok || root_count <= centers.len()) {
        verdict.disks_used = root_count;
        verdict.centers = roots.iter().zip(&used).filter(|(_, u)| **u).map(|(z, _)| *z).collect();
        verdict.method = CoverMethod::RootSamples;
    } else if greedy_ok {
        verdict.disks_used = centers.len();
        verdict.centers = centers;
        verdict.method = CoverMethod::Greedy;
    } else {
        verdict.coverable = false;
        verdict.disks_used = max_disks + 1;
        verdict.centers = centers;
        verdict.witness = witness;
        verdict.method = CoverMethod::Greedy;
        verdict.near_boundary = packing.len() <= max_disks;
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::sublevel::{sublevel_set, Enclosure, LogBase};
    use crate::family::IntPoly;

    fn synthetic(points: Vec<Complex64>) -> SublevelSet {
        SublevelSet {
            p: IntPoly::constant(1),
            base: LogBase::new(2.0).unwrap(),
            l: 1,
            r: 0.5,
            resolution: 0.01,
            grid_points: points,
            enclosures: vec![Enclosure {
                center: Complex64::new(0.0, 0.0),
                radius: 10.0,
            }],
            evaluations: 0,
        }
    }

    fn sound(s: &SublevelSet, v: &CoverVerdict) {
        if v.coverable && v.method != CoverMethod::RootDisks {
            for x in &s.grid_points {
                assert!(v.centers.iter().any(|c| (x - c).norm() <= v.radius), "{x}");
            }
        }
        if v.coverable {
            assert!(v.disks_used <= v.max_disks);
        }
    }

    #[test]
    fn empty_needs_no_disks() {
        let s = synthetic(vec![]);
        let v = cover_with_disks(&s, 4, 0.1);
        assert!(v.coverable);
        assert_eq!(v.disks_used, 0);
    }

    #[test]
    fn small_blob_needs_one_disk() {
        let pts = (0..5).map(|i| Complex64::new(1.8 + 0.01 * i as f64, 0.0)).collect();
        let s = synthetic(pts);
        let v = cover_with_disks(&s, 4, 0.1);
        assert!(v.coverable);
        assert_eq!(v.disks_used, 1);
        sound(&s, &v);
    }

    #[test]
    fn spread_points_fail_with_witness() {
        let pts: Vec<_> = (0..10).map(|i| Complex64::from_polar(1.8, i as f64 * 0.6)).collect();
        let s = synthetic(pts.clone());
        let v = cover_with_disks(&s, 4, 0.1);
        assert!(!v.coverable);
        assert!(!v.near_boundary);
        let w = v.witness.unwrap();
        assert!(v.centers.iter().all(|c| (w - c).norm() > 0.1));
        assert!(pts.contains(&w));
    }

    #[test]
    fn clustered_cube_not_coverable() {
        // (x - 2)^3 with |P| < 1e-3 is the disk |x - 2| < 0.1 (clipped);
        // 2 disks of radius 0.01 cannot cover it
        let p = IntPoly::power_of_linear(2, 3, 1);
        let l = 1;
        let base = LogBase::from_ln(1e-3f64.ln().abs()).unwrap();
        let s = sublevel_set(&p, base, l, 0.5, 0.0025).unwrap();
        let v = cover_with_disks(&s, 2 * l as usize, 0.01);
        assert!(!v.coverable);
        assert!(v.witness.is_some());
        assert_eq!(v.packing_lower_bound, 3);
        // generous radius: certified by the root disk
        let v = cover_with_disks(&s, 2, 0.2);
        assert!(v.coverable);
        assert_eq!(v.method, CoverMethod::RootDisks);
    }

    #[test]
    fn root_and_greedy_covers_are_sound() {
        for c in [vec![-2, 1], vec![1, 1, 0, -1], vec![4, 0, -1], vec![-3, 0, 0, 1, 1]] {
            let p = IntPoly::new(c);
            for eps in [0.2f64, 0.02] {
                let base = LogBase::from_ln(-eps.ln() / 2.0).unwrap();
                let s = sublevel_set(&p, base, 2, 0.5, 0.004).unwrap();
                for radius in [0.016, 0.05, 0.3] {
                    let v = cover_with_disks(&s, 4, radius);
                    sound(&s, &v);
                }
            }
        }
    }
}
