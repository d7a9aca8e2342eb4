//! Roots of integer polynomials and the Jensen-formula inequalities built on
//! them: the large-root count against the coefficient height, and the
//! Mahler measure against the coefficient l1-norm.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::family::IntPoly;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootFinderConfig {
    pub max_iterations: usize,
    /// Seed for the angular offset of the initial guesses.
    pub seed: u64,
    /// Relative reconstruction tolerance used by [`RootSet::reconstruction_error`] checks.
    pub reconstruction_tol: f64,
    /// Absolute residual target.
    pub residual_tol: f64,
}

impl Default for RootFinderConfig {
    fn default() -> Self {
        RootFinderConfig {
            max_iterations: 500,
            seed: 0x5eed,
            reconstruction_tol: 1e-8,
            residual_tol: 1e-10,
        }
    }
}

/// All complex roots of a nonzero integer polynomial, with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet<T> {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<Complex<T>>,
    pub leading: i64,
    /// `max_i |P(z_i)|`.
    pub residual: T,
    /// `deg * |W_i|^(1/mult)` with `W_i` the Weierstrass correction of root
    /// `i` taken over the roots distinct from it.
    pub inclusion_radii: Vec<T>,
    pub iterations: usize,
    pub used_fallback: bool,
}

impl<T: Scalar> RootSet<T> {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn max_inclusion_radius(&self) -> T {
        self.inclusion_radii.iter().fold(T::zero(), |a, b| a.max(*b))
    }

    /// Coefficients (low-to-high) of `leading * prod (x - z_i)`.
    pub fn reconstruct(&self) -> Vec<Complex<T>> {
        let mut c = vec![Complex::new(T::from_i64(self.leading).unwrap(), T::zero())];
        for z in &self.roots {
            let mut next = vec![Complex::new(T::zero(), T::zero()); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] = next[i + 1] + *ci;
                next[i] = next[i] - *ci * z;
            }
            c = next;
        }
        c
    }

    /// Relative l-infinity distance between the reconstructed and the true
    /// coefficients.
    pub fn reconstruction_error(&self, p: &IntPoly) -> T {
        let rec = self.reconstruct();
        let scale = T::from_u64(p.max_abs_coeff()).unwrap();
        rec.iter()
            .enumerate()
            .map(|(i, c)| {
                let exact = T::from_i64(p.coeffs().get(i).copied().unwrap_or(0)).unwrap();
                (*c - Complex::new(exact, T::zero())).norm()
            })
            .fold(T::zero(), |a, b| a.max(b))
            / scale
    }

    /// Mahler measure `|a_m| prod max(1, |z_i|)`.
    pub fn mahler_measure(&self) -> T {
        self.roots
            .iter()
            .fold(T::from_i64(self.leading.abs()).unwrap(), |acc, z| {
                acc * z.norm().max(T::one())
            })
    }
}

fn to_complex<T: Scalar>(p: &IntPoly) -> Vec<Complex<T>> {
    p.coeffs()
        .iter()
        .map(|c| Complex::new(T::from_i64(*c).unwrap(), T::zero()))
        .collect()
}

fn horner<T: Scalar>(c: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut dp = zero;
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + *a;
    }
    (p, dp)
}

fn abs_horner<T: Scalar>(c: &[Complex<T>], t: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, a| acc * t + a.norm())
}

/// Root is as accurate as the working precision allows.
fn backward_stable<T: Scalar>(c: &[Complex<T>], z: Complex<T>) -> bool {
    let (p, _) = horner(c, z);
    let deg = T::from_usize(c.len()).unwrap();
    p.norm() <= T::lit(8.0) * deg * T::epsilon() * abs_horner(c, z.norm())
}

fn aberth_sweep<T: Scalar>(c: &[Complex<T>], z: &mut [Complex<T>]) -> T {
    let mut max_step = T::zero();
    for i in 0..z.len() {
        let (p, dp) = horner(c, z[i]);
        if p.norm() == T::zero() {
            continue;
        }
        let newton = p / dp;
        let repulsion: Complex<T> = (0..z.len())
            .filter(|&j| j != i)
            .map(|j| (z[i] - z[j]).inv())
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
        let step = newton / (Complex::new(T::one(), T::zero()) - newton * repulsion);
        if !step.re.is_finite() || !step.im.is_finite() {
            continue;
        }
        z[i] = z[i] - step;
        max_step = max_step.max(step.norm() / z[i].norm().max(T::one()));
    }
    max_step
}

/// Sweeps until the steps reach rounding level, or until every root is
/// backward stable and the steps have stopped shrinking (clusters of a
/// multiple root never get below `eps^(1/mult)`).
fn aberth_run<T: Scalar>(c: &[Complex<T>], z: &mut [Complex<T>], max_iterations: usize) -> (usize, bool) {
    let mut best = T::infinity();
    let mut stalled = 0;
    for it in 1..=max_iterations {
        let step = aberth_sweep(c, z);
        if step <= T::lit(4.0) * T::epsilon() {
            return (it, true);
        }
        if step < best * T::lit(0.5) {
            best = step;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if stalled >= 10 && z.iter().all(|r| backward_stable(c, *r)) {
            return (it, true);
        }
    }
    (max_iterations, false)
}

fn initial_guesses<T: Scalar>(c: &[Complex<T>], seed: u64) -> Vec<Complex<T>> {
    let d = c.len() - 1;
    let ratio = c[0].norm() / c[d].norm();
    let radius = ratio.powf(T::one() / T::from_usize(d).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.1..0.9);
    let tau = T::PI() + T::PI();
    (0..d)
        .map(|j| {
            let theta = tau * (T::from_usize(j).unwrap() + T::lit(offset)) / T::from_usize(d).unwrap();
            let rad = radius * (T::one() + T::lit(0.01) * T::from_usize(j % 3).unwrap());
            Complex::from_polar(rad, theta)
        })
        .collect()
}

fn companion_eigenvalues<T: Scalar>(c: &[Complex<T>]) -> Vec<Complex<T>> {
    let d = c.len() - 1;
    let lead = c[d].re.to_f64_lossy();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i].re.to_f64_lossy() / lead;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
        .collect()
}

/// Groups roots lying within `1e-2 * max(1, |z|)` of each other and, for
/// each group of size `m >= 2`, replaces it by an `m`-fold root when Newton on
/// `P^(m-1)` started at the group mean lands on a point where `P, ..., P^(m-1)`
/// all vanish to rounding level.
fn merge_multiple_roots<T: Scalar>(p: &IntPoly, z: &mut [Complex<T>]) {
    let n = z.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= T::lit(1e-2) * z[i].norm().max(T::one()) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut derivs = vec![p.clone()];
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| find(&mut group, i) == root).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        while derivs.len() < m {
            let next = derivs.last().unwrap().derivative();
            derivs.push(next);
        }
        let q = to_complex::<T>(&derivs[m - 1]);
        let mut c = members
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &i| a + z[i])
            / T::from_usize(m).unwrap();
        for _ in 0..50 {
            let (v, dv) = horner(&q, c);
            if v.norm() == T::zero() || dv.norm() == T::zero() {
                break;
            }
            let step = v / dv;
            c = c - step;
            if step.norm() <= T::epsilon() * c.norm().max(T::one()) {
                break;
            }
        }
        let ok = derivs[..m].iter().all(|d| {
            let dc = to_complex::<T>(d);
            let (v, _) = horner(&dc, c);
            v.norm() <= T::lit(64.0) * T::from_usize(dc.len()).unwrap() * T::epsilon() * abs_horner(&dc, c.norm())
        });
        if ok {
            for &i in &members {
                z[i] = c;
            }
        }
    }
}

/// Simultaneous Aberth iteration, falling back to companion-matrix
/// eigenvalues (polished by further Aberth sweeps) when it stalls.
pub fn find_roots<T: Scalar>(p: &IntPoly, cfg: &RootFinderConfig) -> Result<RootSet<T>> {
    let leading = p.leading().ok_or(Error::ZeroPolynomial)?;
    let zero_roots = p.coeffs().iter().take_while(|c| **c == 0).count();
    let reduced = IntPoly::new(p.coeffs()[zero_roots..].to_vec());
    let c = to_complex::<T>(&reduced);
    let d = c.len() - 1;

    let mut roots: Vec<Complex<T>> = Vec::with_capacity(d + zero_roots);
    let mut iterations = 0;
    let mut used_fallback = false;
    if d == 1 {
        roots.push(-c[0] / c[1]);
    } else if d > 1 {
        let mut z = initial_guesses(&c, cfg.seed);
        let (it, ok) = aberth_run(&c, &mut z, cfg.max_iterations);
        iterations += it;
        if !ok || z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            used_fallback = true;
            z = companion_eigenvalues(&c);
            let (it, _) = aberth_run(&c, &mut z, cfg.max_iterations);
            iterations += it;
            if !z.iter().all(|r| backward_stable(&c, *r)) {
                return Err(Error::RootsNotConverged {
                    iterations,
                    partial: z.iter().map(|r| (r.re.to_f64_lossy(), r.im.to_f64_lossy())).collect(),
                });
            }
        }
        merge_multiple_roots(&reduced, &mut z);
        roots.extend(z);
    }
    roots.extend(std::iter::repeat(Complex::new(T::zero(), T::zero())).take(zero_roots));
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });

    let full = to_complex::<T>(p);
    let lead_t = T::from_i64(leading).unwrap();
    let n = T::from_usize(roots.len()).unwrap();
    let mut residual = T::zero();
    let mut inclusion_radii = Vec::with_capacity(roots.len());
    for z in roots.iter() {
        let (val, _) = horner(&full, *z);
        residual = residual.max(val.norm());
        // coincident roots (validated multiplicities) share one bound
        let mult = roots.iter().filter(|w| *w == z).count();
        let denom = roots
            .iter()
            .filter(|w| *w != z)
            .fold(Complex::new(lead_t, T::zero()), |acc, w| acc * (*z - *w));
        let w = if val.norm() == T::zero() {
            T::zero()
        } else {
            (val.norm() / denom.norm()).powf(T::one() / T::from_usize(mult).unwrap())
        };
        inclusion_radii.push(n * w);
    }

    Ok(RootSet {
        roots,
        leading,
        residual,
        inclusion_radii,
        iterations,
        used_fallback,
    })
}

/// `C_r = (1 + log(rho/(rho-1))) / log(rho)` with `rho = sqrt(1 + r/2)`.
///
/// Follows from `rho^count <= rho/(rho-1) * max|a_i|`.
pub fn theoretical_c_r(r: f64) -> f64 {
    let rho = (1.0 + r / 2.0).sqrt();
    (1.0 + (rho / (rho - 1.0)).ln()) / rho.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    pub r: f64,
    pub rho: f64,
    /// Roots with `|z| > 1 + r/2`.
    pub large_root_count: usize,
    pub max_coeff: u64,
    /// Smallest constant making the bound hold for this polynomial.
    pub c_r_witness: f64,
    pub c_r: f64,
    pub pass: bool,
    /// `sum |a_i| rho^(i-m)`.
    pub chain_lhs: f64,
    /// `prod_{|z_i| > rho} |z_i| / rho`.
    pub chain_middle: f64,
    /// `rho^large_root_count`.
    pub chain_rhs: f64,
    pub chain_holds: bool,
}

pub const CHAIN_TOLERANCE: f64 = 1e-6;

pub fn jensen_bound_check(p: &IntPoly, r: f64, c_r: f64, cfg: &RootFinderConfig) -> Result<JensenCheck> {
    if r <= 0.0 {
        return Err(invalid("r", "must be positive"));
    }
    let roots = find_roots::<f64>(p, cfg)?;
    Ok(jensen_from_roots(p, &roots, r, c_r))
}

pub fn jensen_from_roots(p: &IntPoly, roots: &RootSet<f64>, r: f64, c_r: f64) -> JensenCheck {
    let rho = (1.0 + r / 2.0).sqrt();
    let threshold = 1.0 + r / 2.0;
    let large_root_count = roots.roots.iter().filter(|z| z.norm() > threshold).count();
    let max_coeff = p.max_abs_coeff();
    let height = (max_coeff as f64).ln() + 1.0;
    let c_r_witness = large_root_count as f64 / height;
    let m = roots.degree() as i32;
    let chain_lhs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a.unsigned_abs() as f64 * rho.powi(i as i32 - m))
        .sum::<f64>();
    let chain_middle = roots
        .roots
        .iter()
        .filter(|z| z.norm() > rho)
        .map(|z| z.norm() / rho)
        .product::<f64>();
    let chain_rhs = rho.powi(large_root_count as i32);
    let slack = 1.0 + CHAIN_TOLERANCE;
    let chain_holds = chain_lhs * slack >= chain_middle && chain_middle * slack >= chain_rhs;
    JensenCheck {
        r,
        rho,
        large_root_count,
        max_coeff,
        c_r_witness,
        c_r,
        pass: large_root_count as f64 <= c_r * height,
        chain_lhs,
        chain_middle,
        chain_rhs,
        chain_holds,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MahlerCheck {
    pub mahler: f64,
    pub l1_norm: u64,
    pub pass: bool,
}

pub const MAHLER_TOLERANCE: f64 = 1e-9;

pub fn mahler_check(p: &IntPoly, l: u32, cfg: &RootFinderConfig) -> Result<MahlerCheck> {
    if !p.in_family(l) {
        return Err(invalid("p", format!("{p} is not in P_{l}")));
    }
    let roots = find_roots::<f64>(p, cfg)?;
    Ok(mahler_from_roots(p, &roots))
}

pub fn mahler_from_roots(p: &IntPoly, roots: &RootSet<f64>) -> MahlerCheck {
    let mahler = roots.mahler_measure();
    let l1_norm = p.l1_norm();
    MahlerCheck {
        mahler,
        l1_norm,
        pass: mahler <= l1_norm as f64 * (1.0 + MAHLER_TOLERANCE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::enumerate_family;

    fn cfg() -> RootFinderConfig {
        RootFinderConfig::default()
    }

    fn sorted_close(got: &[Complex<f64>], want: &[Complex<f64>], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; want.len()];
        for g in got {
            let j = (0..want.len())
                .filter(|j| !used[*j])
                .min_by(|a, b| (want[*a] - g).norm().partial_cmp(&(want[*b] - g).norm()).unwrap())
                .unwrap();
            assert!((want[j] - g).norm() < tol, "{g} vs {}", want[j]);
            used[j] = true;
        }
    }

    #[test]
    fn simple_roots() {
        let r = find_roots::<f64>(&IntPoly::new(vec![-4, 0, 1]), &cfg()).unwrap();
        sorted_close(&r.roots, &[Complex::new(2.0, 0.0), Complex::new(-2.0, 0.0)], 1e-12);
        let r = find_roots::<f64>(&IntPoly::new(vec![1, 0, 1]), &cfg()).unwrap();
        sorted_close(&r.roots, &[Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn plastic_number() {
        // bisection oracle on [1, 2]
        let f = |x: f64| x * x * x - x - 1.0;
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p = IntPoly::new(vec![-1, -1, 0, 1]);
        let r = find_roots::<f64>(&p, &cfg()).unwrap();
        let real = r.roots.iter().find(|z| z.im.abs() < 1e-12).unwrap();
        assert!((real.re - lo).abs() < 1e-12);
        assert!((lo - 1.3247).abs() < 1e-4);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn zero_roots_and_constants() {
        let r = find_roots::<f64>(&IntPoly::new(vec![0, 0, 2]), &cfg()).unwrap();
        assert_eq!(r.roots, vec![Complex::new(0.0, 0.0); 2]);
        let r = find_roots::<f64>(&IntPoly::constant(3), &cfg()).unwrap();
        assert!(r.roots.is_empty());
        assert_eq!(find_roots::<f64>(&IntPoly::zero(), &cfg()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn multiple_roots_reconstruct() {
        for mult in 2..=6 {
            let p = IntPoly::power_of_linear(2, mult, 1);
            let r = find_roots::<f64>(&p, &cfg()).unwrap();
            assert!(r.reconstruction_error(&p) < 1e-8, "mult {mult}");
            assert!(r.roots.iter().all(|z| (z - Complex::new(2.0, 0.0)).norm() < 0.05));
        }
    }

    #[test]
    fn f32_roots() {
        let r = find_roots::<f32>(&IntPoly::new(vec![-4, 0, 1]), &cfg()).unwrap();
        assert!(r.roots.iter().all(|z| (z.norm() - 2.0).abs() < 1e-5));
    }

    #[test]
    fn reconstruction_and_conjugates_on_family() {
        for p in enumerate_family(3).unwrap().filter(|p| !p.is_zero()) {
            let r = find_roots::<f64>(&p, &cfg()).unwrap();
            assert_eq!(r.degree(), p.degree().unwrap());
            assert!(r.reconstruction_error(&p) <= 1e-8, "{p}");
            // closed under conjugation
            let conj: Vec<Complex<f64>> = r.roots.iter().map(|z| z.conj()).collect();
            sorted_close(&r.roots, &conj, 1e-6);
        }
    }

    #[test]
    fn jensen_examples() {
        let p = IntPoly::new(vec![-4, 0, 1]);
        let j = jensen_bound_check(&p, 0.5, theoretical_c_r(0.5), &cfg()).unwrap();
        assert_eq!(j.large_root_count, 2);
        assert_eq!(j.max_coeff, 4);
        assert!((j.c_r_witness - 2.0 / (4f64.ln() + 1.0)).abs() < 1e-15);
        assert!(j.pass && j.chain_holds);

        let j = jensen_bound_check(&IntPoly::constant(1), 0.5, 0.0, &cfg()).unwrap();
        assert_eq!(j.large_root_count, 0);
        assert!(j.pass);

        assert!(jensen_bound_check(&p, 0.0, 1.0, &cfg()).is_err());
    }

    #[test]
    fn jensen_family_sweep() {
        for r in [0.25, 0.5, 1.0] {
            let c_r = theoretical_c_r(r);
            let mut worst: f64 = 0.0;
            for p in enumerate_family(3).unwrap().filter(|p| !p.is_zero()) {
                let j = jensen_bound_check(&p, r, c_r, &cfg()).unwrap();
                assert!(j.chain_holds, "{p} at r = {r}");
                assert!(j.pass);
                worst = worst.max(j.c_r_witness);
            }
            assert!(worst.is_finite() && worst <= c_r);
            // the cruder constant 2 / log(1 + r/2) also covers this family
            assert!(worst <= 2.0 / (1.0 + r / 2.0).ln());
        }
    }

    #[test]
    fn mahler_examples() {
        let m = mahler_check(&IntPoly::new(vec![-2, 1]), 3, &cfg()).unwrap();
        assert!((m.mahler - 2.0).abs() < 1e-12 && m.l1_norm == 3 && m.pass);
        let m = mahler_check(&IntPoly::new(vec![0, 0, 2]), 2, &cfg()).unwrap();
        assert!((m.mahler - 2.0).abs() < 1e-12 && m.l1_norm == 2 && m.pass);
        assert!(mahler_check(&IntPoly::new(vec![-2, 1]), 2, &cfg()).is_err());
    }

    #[test]
    fn mahler_family_sweep() {
        for p in enumerate_family(4).unwrap().filter(|p| !p.is_zero()) {
            assert!(mahler_check(&p, 4, &cfg()).unwrap().pass, "{p}");
        }
    }
}
