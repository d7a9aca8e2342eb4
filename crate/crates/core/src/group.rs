//! Elements of the affine group of the complex line generated by
//! `g1 = [[x, 0], [0, 1]]` and `g2 = [[1, 1], [0, 1]]`.
//!
//! Every product of at most `l` generators has the shape
//! `[[x^k, x^-n P(x)], [0, 1]]` with `|k| <= l`, `0 <= n <= l`, integer `P`
//! of degree at most `l + n` and coefficient sum `sum |a_i| <= l`.
//! [`WordForm`] stores that shape exactly; [`AffineElement`] is its numeric
//! value at a concrete `x`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::IntPoly;
use crate::scalar::Scalar;
use crate::GaussianRational;

/// The alphabet `S = {g1, g2, g1^-1, g2^-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    G1,
    G2,
    G1Inv,
    G2Inv,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::G1, Generator::G2, Generator::G1Inv, Generator::G2Inv];

    pub fn inverse(self) -> Generator {
        match self {
            Generator::G1 => Generator::G1Inv,
            Generator::G2 => Generator::G2Inv,
            Generator::G1Inv => Generator::G1,
            Generator::G2Inv => Generator::G2,
        }
    }

    /// Numeric matrix of the generator at parameter `x`.
    pub fn matrix<T: Scalar>(self, x: Complex<T>) -> AffineElement<T> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            Generator::G1 => AffineElement { a: x, b: zero },
            Generator::G1Inv => AffineElement { a: x.inv(), b: zero },
            Generator::G2 => AffineElement { a: one, b: one },
            Generator::G2Inv => AffineElement { a: one, b: -one },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Numeric element `[[a, b], [0, 1]]` of the affine group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineElement<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

impl<T: Scalar> AffineElement<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        if a.is_zero() {
            return Err(crate::error::invalid("a", "dilation entry must be nonzero"));
        }
        Ok(AffineElement { a, b })
    }

    pub fn identity() -> Self {
        AffineElement {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn inverse(&self) -> Self {
        let ainv = self.a.inv();
        AffineElement {
            a: ainv,
            b: -(self.b * ainv),
        }
    }

    /// `max(|a - 1|, |b|)`.
    ///
    /// Any element with `a != 1` and `a = x^k`, `|x| > 1` sits at distance at
    /// least `1 - 1/|x|`, independent of word length.
    pub fn distance_to_identity(&self) -> T {
        let one = Complex::new(T::one(), T::zero());
        (self.a - one).norm().max(self.b.norm())
    }
}

impl<T: Scalar> Mul for AffineElement<T> {
    type Output = AffineElement<T>;

    fn mul(self, rhs: Self) -> Self {
        AffineElement {
            a: self.a * rhs.a,
            b: self.a * rhs.b + self.b,
        }
    }
}

pub fn distance_to_identity<T: Scalar>(g: &AffineElement<T>) -> T {
    g.distance_to_identity()
}

/// Exact element over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAffine {
    pub a: GaussianRational,
    pub b: GaussianRational,
}

impl ExactAffine {
    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// `max(|a - 1|, |b|)` computed from the exact entries, rounded once per
    /// component.
    pub fn distance_to_identity(&self) -> f64 {
        let am1 = &self.a - GaussianRational::one();
        gaussian_norm(&am1).max(gaussian_norm(&self.b))
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn gaussian_norm(z: &GaussianRational) -> f64 {
    rational_to_f64(&z.re).hypot(rational_to_f64(&z.im))
}

/// Exact rational value of a decimal literal such as `-1.25`, `3` or `2.5e-3`.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || crate::error::invalid("x", format!("`{text}` is not a decimal number"));
    let t = text.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exp.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let mut n: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let q = if shift >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(q)
}

/// Convert an `f64` complex number to the exact Gaussian rational it denotes.
pub fn exact_from_f64(x: Complex<f64>) -> Result<GaussianRational> {
    let re = BigRational::from_float(x.re).ok_or_else(|| crate::error::invalid("x", "not finite"))?;
    let im = BigRational::from_float(x.im).ok_or_else(|| crate::error::invalid("x", "not finite"))?;
    Ok(Complex::new(re, im))
}

/// Finite Laurent polynomial `sum c_e x^e` with integer coefficients.
///
/// Stored densely from the lowest nonzero exponent `low`; both ends are
/// trimmed so equal polynomials have equal representations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    low: i32,
    coeffs: Vec<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn monomial(exp: i32, c: i64) -> Self {
        let mut p = LaurentPoly {
            low: exp,
            coeffs: vec![c],
        };
        p.normalize();
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_monomial(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exponent(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i32 - 1)
    }

    pub fn coeff(&self, e: i32) -> i64 {
        let i = e - self.low;
        if i < 0 {
            return 0;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(0)
    }

    /// Nonzero `(exponent, coefficient)` pairs, exponents increasing.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(move |(i, c)| (self.low + i as i32, *c))
    }

    pub fn l1_norm(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Multiply by `x^s`.
    pub fn shifted(&self, s: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly {
            low: self.low + s,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn add_monomial(&mut self, e: i32, c: i64) {
        if c == 0 {
            return;
        }
        if self.is_zero() {
            self.low = e;
            self.coeffs = vec![c];
            return;
        }
        if e < self.low {
            let pad = (self.low - e) as usize;
            let mut v = vec![0; pad];
            v.extend_from_slice(&self.coeffs);
            self.coeffs = v;
            self.low = e;
        }
        let i = (e - self.low) as usize;
        if i >= self.coeffs.len() {
            self.coeffs.resize(i + 1, 0);
        }
        self.coeffs[i] += c;
        self.normalize();
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    /// Split as `x^-n P(x)` with `n >= 0` minimal and `P` an ordinary
    /// polynomial.
    pub fn to_shifted_poly(&self) -> (u32, IntPoly) {
        if self.is_zero() {
            return (0, IntPoly::zero());
        }
        let n = (-self.low).max(0);
        let mut c = vec![0i64; (self.low + n) as usize];
        c.extend_from_slice(&self.coeffs);
        (n as u32, IntPoly::new(c))
    }

    pub fn eval<T: Scalar>(&self, x: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Complex::new(T::from_i64(*c).unwrap(), T::zero());
        }
        acc * x.powi(self.low)
    }

    pub fn eval_exact(&self, x: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + GaussianRational::new(BigRational::from_integer(BigInt::from(*c)), BigRational::zero());
        }
        acc * exact_powi(x, self.low)
    }
}

fn exact_powi(x: &GaussianRational, e: i32) -> GaussianRational {
    let base = if e < 0 { x.inv() } else { x.clone() };
    let mut acc = GaussianRational::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * &base;
    }
    acc
}

/// Exact normal form `(x^k, sum c_e x^e)` of an element of the word ball.
///
/// Equality, ordering and hashing look at `(k, b)` only: two forms with the
/// same entries are the same group element for every `x`. `l` is the word
/// length the form was built with.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "WordFormRepr", into = "WordFormRepr")]
pub struct WordForm {
    pub k: i32,
    pub b: LaurentPoly,
    pub l: u32,
}

impl PartialEq for WordForm {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.b == other.b
    }
}

impl Eq for WordForm {}

impl Hash for WordForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        self.b.hash(state);
    }
}

impl PartialOrd for WordForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WordForm {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.k, &self.b).cmp(&(other.k, &other.b))
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x^{}, ", self.k)?;
        if self.b.is_zero() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.b.terms().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c:+}x^{e}")?;
        }
        write!(f, ")")
    }
}

impl WordForm {
    pub fn identity() -> Self {
        WordForm {
            k: 0,
            b: LaurentPoly::zero(),
            l: 0,
        }
    }

    pub fn new(k: i32, b: LaurentPoly, l: u32) -> Result<Self> {
        let w = WordForm { k, b, l };
        w.check_invariants()?;
        Ok(w)
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.b.is_zero()
    }

    /// Product of the word `s_1 s_2 ... s_m`.
    pub fn from_word(word: &[Generator]) -> Self {
        word.iter()
            .fold(WordForm::identity(), |w, s| w.apply_generator(*s, Side::Right))
    }

    pub fn apply_generator(&self, s: Generator, side: Side) -> Self {
        let (k, b) = match (side, s) {
            (Side::Left, Generator::G1) => (self.k + 1, self.b.shifted(1)),
            (Side::Left, Generator::G1Inv) => (self.k - 1, self.b.shifted(-1)),
            (Side::Left, Generator::G2) => (self.k, with_monomial(&self.b, 0, 1)),
            (Side::Left, Generator::G2Inv) => (self.k, with_monomial(&self.b, 0, -1)),
            (Side::Right, Generator::G1) => (self.k + 1, self.b.clone()),
            (Side::Right, Generator::G1Inv) => (self.k - 1, self.b.clone()),
            (Side::Right, Generator::G2) => (self.k, with_monomial(&self.b, self.k, 1)),
            (Side::Right, Generator::G2Inv) => (self.k, with_monomial(&self.b, self.k, -1)),
        };
        WordForm { k, b, l: self.l + 1 }
    }

    /// Shape constraints for the recorded length bound.
    pub fn check_invariants(&self) -> Result<()> {
        let l = self.l as i64;
        if (self.k as i64).abs() > l {
            return Err(Error::MalformedWordForm(format!(
                "|k| = {} exceeds l = {l}",
                self.k.abs()
            )));
        }
        if let (Some(lo), Some(hi)) = (self.b.min_exponent(), self.b.max_exponent()) {
            if (lo as i64) < -l || (hi as i64) > l {
                return Err(Error::MalformedWordForm(format!(
                    "exponents [{lo}, {hi}] leave the window [-{l}, {l}]"
                )));
            }
        }
        if self.b.l1_norm() > l {
            return Err(Error::MalformedWordForm(format!(
                "coefficient l1 norm {} exceeds l = {l}",
                self.b.l1_norm()
            )));
        }
        Ok(())
    }

    pub fn evaluate<T: Scalar>(&self, x: Complex<T>) -> Result<AffineElement<T>> {
        if x.is_zero() {
            return Err(Error::ZeroParameter);
        }
        Ok(AffineElement {
            a: x.powi(self.k),
            b: self.b.eval(x),
        })
    }

    pub fn evaluate_exact(&self, x: &GaussianRational) -> Result<ExactAffine> {
        if x.is_zero() {
            return Err(Error::ZeroParameter);
        }
        Ok(ExactAffine {
            a: exact_powi(x, self.k),
            b: self.b.eval_exact(x),
        })
    }
}

fn with_monomial(b: &LaurentPoly, e: i32, c: i64) -> LaurentPoly {
    let mut out = b.clone();
    out.add_monomial(e, c);
    out
}

pub fn evaluate<T: Scalar>(w: &WordForm, x: Complex<T>) -> Result<AffineElement<T>> {
    w.evaluate(x)
}

pub fn apply_generator(w: &WordForm, s: Generator, side: Side) -> WordForm {
    w.apply_generator(s, side)
}

#[derive(Serialize, Deserialize)]
struct WordFormRepr {
    k: i32,
    coeffs: Vec<(i32, i64)>,
    l: u32,
}

impl From<WordForm> for WordFormRepr {
    fn from(w: WordForm) -> Self {
        WordFormRepr {
            k: w.k,
            coeffs: w.b.terms().collect(),
            l: w.l,
        }
    }
}

impl TryFrom<WordFormRepr> for WordForm {
    type Error = Error;

    fn try_from(r: WordFormRepr) -> Result<Self> {
        if r.coeffs.windows(2).any(|p| p[0].0 >= p[1].0) {
            return Err(Error::MalformedWordForm("exponents must be strictly increasing".into()));
        }
        if r.coeffs.iter().any(|(_, c)| *c == 0) {
            return Err(Error::MalformedWordForm("zero coefficients are not stored".into()));
        }
        WordForm::new(r.k, LaurentPoly::from_terms(r.coeffs), r.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn decimal_literals_are_exact() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(parse_decimal("1.1").unwrap(), q(11, 10));
        assert_eq!(parse_decimal("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_decimal("2.5e-3").unwrap(), q(1, 400));
        assert_eq!(parse_decimal("+.5E1").unwrap(), q(5, 1));
        assert_eq!(parse_decimal("3.").unwrap(), q(3, 1));
        for bad in ["", ".", "1.2.3", "abc", "1e", "--1", "1e99999"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn evaluate_examples() {
        let id = WordForm::identity().evaluate(c(2.0, 0.0)).unwrap();
        assert_eq!(id, AffineElement::identity());

        let w = WordForm::new(1, LaurentPoly::monomial(0, 1), 1).unwrap();
        let g = w.evaluate(c(3.0, 0.0)).unwrap();
        assert_eq!((g.a, g.b), (c(3.0, 0.0), c(1.0, 0.0)));

        // g1 g2 g1^-1 g2^-1
        let comm = WordForm::from_word(&[Generator::G1, Generator::G2, Generator::G1Inv, Generator::G2Inv]);
        assert_eq!(comm.k, 0);
        assert_eq!(comm.b, LaurentPoly::from_terms([(1, 1), (0, -1)]));
        let g = comm.evaluate(c(1.5, 0.0)).unwrap();
        assert_eq!((g.a, g.b), (c(1.0, 0.0), c(0.5, 0.0)));
    }

    #[test]
    fn evaluate_rejects_zero() {
        assert_eq!(WordForm::identity().evaluate(c(0.0, 0.0)), Err(Error::ZeroParameter));
    }

    #[test]
    fn apply_generator_examples() {
        let w = WordForm::identity().apply_generator(Generator::G2, Side::Left);
        assert_eq!((w.k, w.b.clone()), (0, LaurentPoly::monomial(0, 1)));

        let w = WordForm::new(1, LaurentPoly::monomial(0, 1), 1)
            .unwrap()
            .apply_generator(Generator::G1Inv, Side::Left);
        assert_eq!((w.k, w.b.clone()), (0, LaurentPoly::monomial(-1, 1)));
        assert_eq!(w.evaluate(c(2.0, 0.0)).unwrap().b, c(0.5, 0.0));

        let w = WordForm::new(0, LaurentPoly::monomial(0, 1), 1)
            .unwrap()
            .apply_generator(Generator::G1, Side::Right);
        assert_eq!((w.k, w.b.clone(), w.l), (1, LaurentPoly::monomial(0, 1), 2));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(AffineElement::<f64>::identity().distance_to_identity(), 0.0);
        let g = AffineElement::new(c(1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(g.distance_to_identity(), 0.5);
        let g = AffineElement::new(c(3.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(g.distance_to_identity(), 2.0);
    }

    #[test]
    fn left_then_inverse_restores_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let len = rng.gen_range(0..10);
            let word: Vec<Generator> = (0..len).map(|_| Generator::ALL[rng.gen_range(0..4)]).collect();
            let w = WordForm::from_word(&word);
            for s in Generator::ALL {
                let back = w
                    .apply_generator(s, Side::Left)
                    .apply_generator(s.inverse(), Side::Left);
                assert_eq!(back, w);
                assert_eq!(back.l, w.l + 2);
            }
        }
    }

    #[test]
    fn left_and_right_agree_with_matrices() {
        let x = c(1.3, -0.7);
        let base = WordForm::from_word(&[Generator::G2, Generator::G1Inv, Generator::G2, Generator::G1]);
        let g = base.evaluate(x).unwrap();
        for s in Generator::ALL {
            let left = base.apply_generator(s, Side::Left).evaluate(x).unwrap();
            let right = base.apply_generator(s, Side::Right).evaluate(x).unwrap();
            let lm = s.matrix(x) * g;
            let rm = g * s.matrix(x);
            assert!((left.a - lm.a).norm() < 1e-12 && (left.b - lm.b).norm() < 1e-12);
            assert!((right.a - rm.a).norm() < 1e-12 && (right.b - rm.b).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_evaluation_sees_relations() {
        // x - 2 vanishes at x = 2; {1: 1} and {0: 2} evaluate equal there.
        let x = exact_from_f64(c(2.0, 0.0)).unwrap();
        let p = WordForm::new(0, LaurentPoly::from_terms([(1, 1)]), 1).unwrap();
        let q = WordForm::new(0, LaurentPoly::from_terms([(0, 2)]), 2).unwrap();
        assert_ne!(p, q);
        assert_eq!(p.evaluate_exact(&x).unwrap(), q.evaluate_exact(&x).unwrap());
        let rel = WordForm::new(0, LaurentPoly::from_terms([(0, -2), (1, 1)]), 3).unwrap();
        assert!(rel.evaluate_exact(&x).unwrap().is_identity());
    }

    #[test]
    fn shifted_poly_split() {
        let b = LaurentPoly::from_terms([(-2, 3), (1, -1)]);
        let (n, p) = b.to_shifted_poly();
        assert_eq!(n, 2);
        assert_eq!(p.coeffs(), &[3, 0, 0, -1]);
        let (n, p) = LaurentPoly::from_terms([(2, 1)]).to_shifted_poly();
        assert_eq!((n, p.coeffs()), (0, &[0, 0, 1][..]));
    }

    #[test]
    fn json_shape() {
        let w = WordForm::new(1, LaurentPoly::from_terms([(-1, 2), (1, -1)]), 4).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"k":1,"coeffs":[[-1,2],[1,-1]],"l":4}"#);
        let back: WordForm = serde_json::from_str(&s).unwrap();
        assert_eq!((back.clone(), back.l), (w, 4));
        assert!(serde_json::from_str::<WordForm>(r#"{"k":0,"coeffs":[[1,1],[0,1]],"l":3}"#).is_err());
        assert!(serde_json::from_str::<WordForm>(r#"{"k":5,"coeffs":[],"l":3}"#).is_err());
    }

    #[test]
    fn works_in_f32() {
        let comm = WordForm::from_word(&[Generator::G1, Generator::G2, Generator::G1Inv, Generator::G2Inv]);
        let g = comm.evaluate(Complex::new(1.5f32, 0.0)).unwrap();
        assert!((g.distance_to_identity() - 0.5).abs() < 1e-6);
    }
}
