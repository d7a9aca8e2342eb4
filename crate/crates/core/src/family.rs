//! The coefficient space `P_l` of integer polynomials with degree at most
//! `2l` and coefficient l1-norm at most `l`, together with lattice-point
//! counting and the nearest-integer quantization used to count
//! well-separated subsets of it.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Largest `l` accepted by [`enumerate_family`] unless overridden.
pub const DEFAULT_FAMILY_CAP: u32 = 7;

/// Integer polynomial `a_0 + a_1 x + ... + a_m x^m`, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl From<Vec<i64>> for IntPoly {
    fn from(v: Vec<i64>) -> Self {
        IntPoly::new(v)
    }
}

impl From<IntPoly> for Vec<i64> {
    fn from(p: IntPoly) -> Self {
        p.coeffs
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            match (i, mag) {
                (0, _) => write!(f, "{sign}{mag}")?,
                (_, 1) => write!(f, "{sign}x^{i}")?,
                _ => write!(f, "{sign}{mag}x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl IntPoly {
    /// Coefficients low-to-high.
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly::default()
    }

    pub fn constant(c: i64) -> Self {
        IntPoly::new(vec![c])
    }

    /// `c * (x - root)^mult` for an integer root.
    pub fn power_of_linear(root: i64, mult: u32, c: i64) -> Self {
        let mut p = IntPoly::constant(c);
        for _ in 0..mult {
            p = p.mul(&IntPoly::new(vec![-root, 1]));
        }
        p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<i64> {
        self.coeffs.last().copied()
    }

    pub fn l1_norm(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn in_family(&self, l: u32) -> bool {
        self.degree().map_or(true, |m| m <= 2 * l as usize) && self.l1_norm() <= l as u64
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0) - other.coeffs.get(i).copied().unwrap_or(0))
            .collect();
        IntPoly::new(v)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut v = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPoly::new(v)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as i64 * c)
                .collect(),
        )
    }

    pub fn eval<T: Scalar>(&self, x: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Complex::new(T::from_i64(*c).unwrap(), T::zero());
        }
        acc
    }

    /// `(|P(s)|, T)` with `T = sum_{j>=1} |P^(j)(s)/j!| h^j + rounding`, so
    /// `| |P(x)| - |P(s)| | <= T` whenever `|x - s| <= h`.
    pub fn taylor_bound(&self, s: Complex<f64>, h: f64) -> (f64, f64) {
        let mut c: Vec<Complex<f64>> = self.coeffs.iter().map(|a| Complex::new(*a as f64, 0.0)).collect();
        if c.is_empty() {
            return (0.0, 0.0);
        }
        // repeated synthetic division gives the Taylor coefficients at s
        let n = c.len();
        for j in 0..n {
            for i in (j..n - 1).rev() {
                let t = c[i + 1] * s;
                c[i] += t;
            }
        }
        let value = c[0].norm();
        let tail = c[1..].iter().rev().fold(0.0, |acc, t| (acc + t.norm()) * h);
        let rounding = 4.0 * n as f64 * f64::EPSILON * self.abs_eval(s.norm() + h);
        (value, tail + rounding)
    }

    /// `sum |a_i| t^i`, a majorant for `|P|` on the circle of radius `t`.
    pub fn abs_eval(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.unsigned_abs() as f64)
    }
}

/// Lazy iterator over `P_l`.
///
/// Magnitude vectors `(|a_0|, ..., |a_2l|)` with sum at most `l` are visited
/// in lexicographic order; for each, all sign patterns of the nonzero
/// entries follow in binary order.
pub struct FamilyIter {
    l: u32,
    mags: Vec<u32>,
    support: Vec<usize>,
    sign_mask: u64,
    done: bool,
}

impl FamilyIter {
    fn new(l: u32) -> Self {
        FamilyIter {
            l,
            mags: vec![0; 2 * l as usize + 1],
            support: Vec::new(),
            sign_mask: 0,
            done: false,
        }
    }

    fn advance_magnitudes(&mut self) -> bool {
        // odometer over the last coordinate first, keeping sum <= l
        let d = self.mags.len();
        let mut sum: u32 = self.mags.iter().sum();
        for i in (0..d).rev() {
            if sum < self.l {
                self.mags[i] += 1;
                self.support = (0..d).filter(|&j| self.mags[j] != 0).collect();
                return true;
            }
            sum -= self.mags[i];
            self.mags[i] = 0;
        }
        false
    }

    fn current(&self) -> IntPoly {
        let mut v: Vec<i64> = self.mags.iter().map(|&m| m as i64).collect();
        for (bit, &j) in self.support.iter().enumerate() {
            if self.sign_mask >> bit & 1 == 1 {
                v[j] = -v[j];
            }
        }
        IntPoly::new(v)
    }
}

impl Iterator for FamilyIter {
    type Item = IntPoly;

    fn next(&mut self) -> Option<IntPoly> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.sign_mask += 1;
        if self.sign_mask >> self.support.len() != 0 {
            self.sign_mask = 0;
            if !self.advance_magnitudes() {
                self.done = true;
            }
        }
        Some(out)
    }
}

pub fn enumerate_family(l: u32) -> Result<FamilyIter> {
    enumerate_family_capped(l, DEFAULT_FAMILY_CAP)
}

pub fn enumerate_family_capped(l: u32, cap: u32) -> Result<FamilyIter> {
    if l > cap {
        return Err(Error::ResourceLimit {
            what: "polynomial family",
            estimate: count_l1_ball(2 * l as usize + 1, l as usize)
                .to_f64()
                .unwrap_or(f64::INFINITY),
            limit: count_l1_ball(2 * cap as usize + 1, cap as usize)
                .to_f64()
                .unwrap_or(f64::INFINITY),
        });
    }
    Ok(FamilyIter::new(l))
}

/// Number of integer vectors of length `dim` with l1-norm at most `radius`.
///
/// Uses `N(d, r) = N(d-1, r) + 2 sum_{j=1..r} N(d-1, r-j)`, `N(0, r) = 1`.
pub fn count_l1_ball(dim: usize, radius: usize) -> BigUint {
    let mut memo = HashMap::new();
    count_rec(dim, radius, &mut memo)
}

fn count_rec(d: usize, r: usize, memo: &mut HashMap<(usize, usize), BigUint>) -> BigUint {
    if d == 0 {
        return BigUint::one();
    }
    if let Some(v) = memo.get(&(d, r)) {
        return v.clone();
    }
    let mut total = count_rec(d - 1, r, memo);
    for j in 1..=r {
        total += count_rec(d - 1, r - j, memo) * 2u32;
    }
    memo.insert((d, r), total.clone());
    total
}

/// The two textbook upper bounds on `|P_l|`: `2^(2l+1) * C(3l, 2l)` and
/// `100^l`.
pub fn family_size_bounds(l: u32) -> (BigUint, BigUint) {
    let l = l as usize;
    let signs = BigUint::one() << (2 * l + 1);
    (signs * binomial(3 * l, 2 * l), BigUint::from(100u32).pow(l as u32))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Nearest integer with halves rounded down: `<y> = ceil(y - 1/2)`.
pub fn nearest_round_half_down(y: f64) -> i64 {
    (y - 0.5).ceil() as i64
}

/// Image of a polynomial under coordinate-wise division by `K = e^(10k)`
/// followed by nearest-integer rounding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizedVector {
    /// `entries[i]` is the image of the coefficient of `x^i`.
    pub entries: Vec<i64>,
    pub k: u32,
}

impl QuantizedVector {
    pub fn scale(&self) -> f64 {
        quantization_scale(self.k)
    }

    pub fn high_to_low(&self) -> Vec<i64> {
        self.entries.iter().rev().copied().collect()
    }

    pub fn l1_norm(&self) -> u64 {
        self.entries.iter().map(|e| e.unsigned_abs()).sum()
    }
}

pub fn quantization_scale(k: u32) -> f64 {
    (10.0 * k as f64).exp()
}

pub fn quantize(p: &IntPoly, l: u32, k: u32) -> Result<QuantizedVector> {
    if !p.in_family(l) {
        return Err(invalid("p", format!("{p} is not in P_{l}")));
    }
    let scale = quantization_scale(k);
    let entries = (0..=2 * l as usize)
        .map(|i| nearest_round_half_down(p.coeffs.get(i).copied().unwrap_or(0) as f64 / scale))
        .collect();
    Ok(QuantizedVector { entries, k })
}

/// Counting bounds for a set of `P_l` on which quantization is injective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizedClassBound {
    pub l: u32,
    pub k: u32,
    /// Radius `floor(2l/K)` of the image l1-ball.
    pub radius: u64,
    /// Exact lattice count of that ball in dimension `2l+1`.
    #[serde(with = "biguint_string")]
    pub exact: BigUint,
    /// `exp(4l/K + 2l log(K+1)/K)`.
    pub closed_form: f64,
    /// `exp(l/(2k))`.
    pub simplified: f64,
}

pub fn quantized_class_bound(l: u32, k: u32) -> Result<QuantizedClassBound> {
    if l < 1 || k < 1 {
        return Err(invalid("l, k", "both must be at least 1"));
    }
    let scale = quantization_scale(k);
    let lf = l as f64;
    let radius = (2.0 * lf / scale).floor() as u64;
    Ok(QuantizedClassBound {
        l,
        k,
        radius,
        exact: count_l1_ball(2 * l as usize + 1, radius as usize),
        closed_form: (4.0 * lf / scale + 2.0 * lf * (scale + 1.0).ln() / scale).exp(),
        simplified: (lf / (2.0 * k as f64)).exp(),
    })
}

/// Big integers travel as decimal strings in JSON.
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
