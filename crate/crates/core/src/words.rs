//! Word balls `W_l`, the gap `d_l(x)` to the identity, the exponent `beta`
//! in `d_l >= |W_l|^-beta`, and the commutative model `m x + n`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{Generator, Side, WordForm};
use crate::scalar::Scalar;
use crate::GaussianRational;

pub const DEFAULT_BALL_CAP: u32 = 12;
pub const DEFAULT_MEMORY_GUARD: usize = 100_000_000;
/// Numeric floor below which a nonidentity form is treated as a possible
/// relation.
pub const RELATION_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallConfig {
    pub cap: u32,
    pub memory_guard: usize,
    pub shards: usize,
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig {
            cap: DEFAULT_BALL_CAP,
            memory_guard: DEFAULT_MEMORY_GUARD,
            shards: 16,
        }
    }
}

/// Number of words of length at most `l`: `(4^(l+1) - 1) / 3`.
pub fn word_count(l: u32) -> f64 {
    (4f64.powi(l as i32 + 1) - 1.0) / 3.0
}

/// The ball `W_l`, stored as spheres: `layers[j]` holds the elements whose
/// shortest word has length exactly `j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    layers: Vec<Vec<WordForm>>,
}

impl Ball {
    pub fn radius(&self) -> u32 {
        self.layers.len() as u32 - 1
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `|W_l|` for `l <= radius`.
    pub fn len_within(&self, l: u32) -> usize {
        self.layers.iter().take(l as usize + 1).map(Vec::len).sum()
    }

    pub fn sphere(&self, j: u32) -> &[WordForm] {
        &self.layers[j as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &WordForm> {
        self.layers.iter().flatten()
    }

    pub fn to_set(&self) -> HashSet<WordForm> {
        self.iter().cloned().collect()
    }
}

fn shard_of(w: &WordForm, shards: usize) -> usize {
    let mut h = DefaultHasher::new();
    w.hash(&mut h);
    (h.finish() % shards as u64) as usize
}

pub fn enumerate_ball(l: u32) -> Result<Ball> {
    enumerate_ball_with(l, &BallConfig::default())
}

/// Breadth-first search by left multiplication. Candidates of each new
/// sphere are bucketed by hash; each bucket is merged into its own shard of
/// the visited set by a single writer.
pub fn enumerate_ball_with(l: u32, cfg: &BallConfig) -> Result<Ball> {
    if l > cfg.cap {
        return Err(Error::ResourceLimit {
            what: "word ball",
            estimate: word_count(l),
            limit: word_count(cfg.cap),
        });
    }
    let shards = cfg.shards.max(1);
    let mut seen: Vec<HashSet<WordForm>> = vec![HashSet::new(); shards];
    let id = WordForm::identity();
    seen[shard_of(&id, shards)].insert(id.clone());
    let mut layers = vec![vec![id]];
    let mut total = 1usize;

    for _ in 0..l {
        let frontier = layers.last().unwrap();
        if total + 4 * frontier.len() > cfg.memory_guard {
            return Err(Error::ResourceLimit {
                what: "word ball",
                estimate: (total + 4 * frontier.len()) as f64,
                limit: cfg.memory_guard as f64,
            });
        }
        let buckets = frontier
            .par_iter()
            .fold(
                || vec![Vec::new(); shards],
                |mut acc: Vec<Vec<WordForm>>, w| {
                    for s in Generator::ALL {
                        let c = w.apply_generator(s, Side::Left);
                        acc[shard_of(&c, shards)].push(c);
                    }
                    acc
                },
            )
            .reduce(
                || vec![Vec::new(); shards],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.extend(y);
                    }
                    a
                },
            );
        let mut next: Vec<WordForm> = seen
            .par_iter_mut()
            .zip(buckets)
            .flat_map_iter(|(set, bucket)| {
                let mut fresh = Vec::new();
                for c in bucket {
                    if !set.contains(&c) {
                        set.insert(c.clone());
                        fresh.push(c);
                    }
                }
                fresh
            })
            .collect();
        next.sort();
        total += next.len();
        layers.push(next);
    }
    Ok(Ball { layers })
}

/// Gap data for one radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSummary<T> {
    pub l: u32,
    pub x: Complex<T>,
    pub distinct_elements: usize,
    pub word_count: f64,
    /// `min d(g, 1)` over nonidentity elements; infinite for `l = 0`.
    pub d_l: T,
    pub argmin_word: Option<WordForm>,
    /// Distinct forms that evaluate to the identity (exact mode) or fall
    /// under the numeric floor (numeric mode).
    pub relations: usize,
    /// Set when numeric mode found forms under the floor; `d_l` is then 0.
    pub possible_relation: bool,
}

/// How to decide that a nonidentity form evaluates to the identity.
#[derive(Clone, Debug)]
pub enum IdentityTest<'a> {
    /// Values under the floor count as relations and force `d_l = 0`.
    Numeric { floor: f64 },
    /// Values under the floor are re-evaluated exactly at this point; exact
    /// identities are excluded, anything else keeps its exact distance.
    Exact { x: &'a GaussianRational, floor: f64 },
}

impl Default for IdentityTest<'_> {
    fn default() -> Self {
        IdentityTest::Numeric { floor: RELATION_FLOOR }
    }
}

#[derive(Clone, Copy)]
enum Verdict<T> {
    Value(T),
    Relation,
    PossibleRelation,
}

fn classify<T: Scalar>(w: &WordForm, x: Complex<T>, test: &IdentityTest<'_>) -> Verdict<T> {
    let d = w.evaluate(x).expect("x checked nonzero").distance_to_identity();
    match test {
        IdentityTest::Numeric { floor } => {
            if d.to_f64_lossy() < *floor {
                Verdict::PossibleRelation
            } else {
                Verdict::Value(d)
            }
        }
        IdentityTest::Exact { x: xe, floor } => {
            if d.to_f64_lossy() >= *floor {
                return Verdict::Value(d);
            }
            let g = w.evaluate_exact(xe).expect("x checked nonzero");
            if g.is_identity() {
                Verdict::Relation
            } else {
                Verdict::Value(T::lit(g.distance_to_identity()))
            }
        }
    }
}

fn check_outside_disk<T: Scalar>(x: Complex<T>) -> Result<()> {
    let r = x.norm();
    if !(r > T::one()) {
        return Err(Error::InsideUnitDisk(r.to_f64_lossy()));
    }
    Ok(())
}

/// `d_l` for every `l` up to the radius of `ball`.
pub fn ball_gaps<T: Scalar>(ball: &Ball, x: Complex<T>, test: &IdentityTest<'_>) -> Result<Vec<BallSummary<T>>> {
    check_outside_disk(x)?;
    let mut best: Option<(T, WordForm)> = None;
    let mut relations = 0usize;
    let mut possible = false;
    let mut out = Vec::with_capacity(ball.layers.len());
    for (j, sphere) in ball.layers.iter().enumerate() {
        let (layer_best, layer_rel, layer_possible) = sphere
            .par_iter()
            .filter(|w| !w.is_identity())
            .map(|w| match classify(w, x, test) {
                Verdict::Value(d) => (Some((d, w)), 0usize, false),
                Verdict::Relation => (None, 1, false),
                Verdict::PossibleRelation => (Some((T::zero(), w)), 1, true),
            })
            .reduce(|| (None, 0, false), |a, b| (min_pair(a.0, b.0), a.1 + b.1, a.2 || b.2));
        relations += layer_rel;
        possible |= layer_possible;
        if let Some((d, w)) = layer_best {
            if best.as_ref().map_or(true, |(bd, bw)| (d, w) < (*bd, bw)) {
                best = Some((d, w.clone()));
            }
        }
        out.push(BallSummary {
            l: j as u32,
            x,
            distinct_elements: ball.len_within(j as u32),
            word_count: word_count(j as u32),
            d_l: best.as_ref().map_or(T::infinity(), |b| b.0),
            argmin_word: best.as_ref().map(|b| b.1.clone()),
            relations,
            possible_relation: possible,
        });
    }
    Ok(out)
}

fn min_pair<'a, T: Scalar>(a: Option<(T, &'a WordForm)>, b: Option<(T, &'a WordForm)>) -> Option<(T, &'a WordForm)> {
    match (a, b) {
        (None, y) => y,
        (x, None) => x,
        (Some(x), Some(y)) => {
            // total order on (value, form) keeps the parallel result deterministic
            if (y.0, y.1) < (x.0, x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

pub fn word_gap<T: Scalar>(x: Complex<T>, l: u32) -> Result<BallSummary<T>> {
    check_outside_disk(x)?;
    let ball = enumerate_ball(l)?;
    Ok(ball_gaps(&ball, x, &IdentityTest::default())?.pop().unwrap())
}

/// [`word_gap`] with exact identity detection at the Gaussian rational `x`.
pub fn word_gap_exact(x: &GaussianRational, l: u32) -> Result<BallSummary<f64>> {
    let xf = gaussian_to_f64(x);
    check_outside_disk(xf)?;
    let ball = enumerate_ball(l)?;
    Ok(ball_gaps(
        &ball,
        xf,
        &IdentityTest::Exact {
            x,
            floor: RELATION_FLOOR,
        },
    )?
    .pop()
    .unwrap())
}

pub fn gaussian_to_f64(x: &GaussianRational) -> Complex<f64> {
    use num_traits::ToPrimitive;
    Complex::new(x.re.to_f64().unwrap_or(f64::NAN), x.im.to_f64().unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport<T> {
    pub x: Complex<T>,
    pub l_max: u32,
    /// Least `beta >= 0` with `d_l >= |W_l|^-beta` for `1 <= l <= l_max`,
    /// counting distinct elements. Infinite when some `d_l = 0`.
    pub beta_estimate: f64,
    /// Same, with `|W_l|` read as the number of words.
    pub beta_words_estimate: f64,
    /// Per-radius exponents (distinct-element convention).
    pub beta_l: Vec<f64>,
    pub per_l: Vec<BallSummary<T>>,
    pub relation_flag: bool,
}

fn beta_of(d: f64, count: f64) -> f64 {
    if d == 0.0 {
        f64::INFINITY
    } else {
        ((1.0 / d).ln() / count.ln()).max(0.0)
    }
}

pub fn beta_profile<T: Scalar>(x: Complex<T>, l_max: u32, test: &IdentityTest<'_>) -> Result<DiophantineReport<T>> {
    let ball = enumerate_ball(l_max)?;
    beta_profile_from_ball(&ball, x, test)
}

pub fn beta_profile_from_ball<T: Scalar>(
    ball: &Ball,
    x: Complex<T>,
    test: &IdentityTest<'_>,
) -> Result<DiophantineReport<T>> {
    let per_l = ball_gaps(ball, x, test)?;
    let mut beta_l = Vec::new();
    let mut beta = 0.0f64;
    let mut beta_words = 0.0f64;
    for s in per_l.iter().skip(1) {
        let d = s.d_l.to_f64_lossy();
        let b = beta_of(d, s.distinct_elements as f64);
        beta_l.push(b);
        beta = beta.max(b);
        beta_words = beta_words.max(beta_of(d, s.word_count));
    }
    let relation_flag = per_l.last().map_or(false, |s| s.possible_relation);
    Ok(DiophantineReport {
        x,
        l_max: ball.radius(),
        beta_estimate: beta,
        beta_words_estimate: beta_words,
        beta_l,
        per_l,
        relation_flag,
    })
}

/// Minimiser of `|m x + n|` over `(m, n) != (0, 0)`, `|m| + |n| <= l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianGap {
    pub value: f64,
    pub m: i64,
    pub n: i64,
}

/// Scans `m = 1..=l` with the two integers nearest to `-m x`; `m < 0` is the
/// mirror image and `m = 0` contributes `|n| >= 1`.
pub fn abelian_gap(x: f64, l: u32) -> Result<AbelianGap> {
    if !(x != 0.0 && x.abs() < 1.0) {
        return Err(invalid("x", "need 0 < |x| < 1"));
    }
    if l == 0 {
        return Err(invalid("l", "the ball of radius 0 has no nonzero element"));
    }
    let l = l as i64;
    let mut best = AbelianGap { value: 1.0, m: 0, n: 1 };
    for m in 1..=l {
        let budget = l - m;
        let y = m as f64 * x;
        for n in [-(y.floor() as i64), -(y.ceil() as i64)] {
            if n.abs() > budget {
                continue;
            }
            let v = (m as f64 * x + n as f64).abs();
            if v < best.value {
                best = AbelianGap { value: v, m, n };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{exact_from_f64, LaurentPoly};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Every word of length exactly `l`, no deduplication.
    fn naive_words(l: u32) -> Vec<WordForm> {
        let mut words = vec![WordForm::identity()];
        for _ in 0..l {
            words = words
                .iter()
                .flat_map(|w| Generator::ALL.map(|s| w.apply_generator(s, Side::Right)))
                .collect();
        }
        words
    }

    #[test]
    fn small_balls() {
        let b0 = enumerate_ball(0).unwrap();
        assert_eq!(b0.len(), 1);
        let b1 = enumerate_ball(1).unwrap();
        assert_eq!(b1.len(), 5);
        let expected: HashSet<WordForm> = [
            WordForm::identity(),
            WordForm::new(1, LaurentPoly::zero(), 1).unwrap(),
            WordForm::new(-1, LaurentPoly::zero(), 1).unwrap(),
            WordForm::new(0, LaurentPoly::monomial(0, 1), 1).unwrap(),
            WordForm::new(0, LaurentPoly::monomial(0, -1), 1).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(b1.to_set(), expected);

        let mut naive: HashSet<WordForm> = HashSet::new();
        for j in 0..=2 {
            naive.extend(naive_words(j));
        }
        assert_eq!(enumerate_ball(2).unwrap().len(), naive.len());
    }

    #[test]
    fn ball_matches_naive_products() {
        let mut naive: HashSet<WordForm> = HashSet::new();
        for l in 0..=6u32 {
            naive.extend(naive_words(l));
            assert_eq!(enumerate_ball(l).unwrap().to_set(), naive, "l = {l}");
        }
    }

    #[test]
    fn balls_nest_and_obey_shape() {
        let big = enumerate_ball(8).unwrap();
        for l in 0..=7u32 {
            let small = enumerate_ball(l).unwrap().to_set();
            let next = enumerate_ball(l + 1).unwrap().to_set();
            assert!(small.is_subset(&next));
            assert!(small.len() as f64 <= word_count(l));
            assert_eq!(big.len_within(l), small.len());
        }
        for j in 0..=8 {
            for w in big.sphere(j) {
                assert_eq!(w.l, j);
                w.check_invariants().unwrap();
            }
        }
    }

    #[test]
    fn ball_cap_and_guard() {
        assert!(matches!(enumerate_ball(13), Err(Error::ResourceLimit { .. })));
        let cfg = BallConfig {
            memory_guard: 100,
            ..BallConfig::default()
        };
        assert!(matches!(enumerate_ball_with(6, &cfg), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn shard_count_does_not_change_ball() {
        let a = enumerate_ball_with(
            6,
            &BallConfig {
                shards: 1,
                ..BallConfig::default()
            },
        )
        .unwrap();
        let b = enumerate_ball_with(
            6,
            &BallConfig {
                shards: 7,
                ..BallConfig::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gap_at_two_radius_one() {
        let s = word_gap(c(2.0, 0.0), 1).unwrap();
        assert_eq!(s.d_l, 0.5);
        assert_eq!(s.argmin_word.unwrap().k, -1);
        assert!(word_gap(c(0.5, 0.5), 1).is_err());
    }

    #[test]
    fn gap_at_two_exact_is_dyadic() {
        let xe = exact_from_f64(c(2.0, 0.0)).unwrap();
        let ball = enumerate_ball(8).unwrap();
        let gaps = ball_gaps(
            &ball,
            c(2.0, 0.0),
            &IdentityTest::Exact {
                x: &xe,
                floor: RELATION_FLOOR,
            },
        )
        .unwrap();
        for s in gaps.iter().skip(1) {
            assert!(s.d_l >= 2f64.powi(-(s.l as i32)), "l = {}", s.l);
        }
        // x - 2 is a relation at x = 2
        assert!(gaps[5].relations > 0 && !gaps[5].possible_relation);
        // numeric mode sees the same relation as a possible one
        let numeric = ball_gaps(&ball, c(2.0, 0.0), &IdentityTest::default()).unwrap();
        assert!(numeric[5].possible_relation && numeric[5].d_l == 0.0);
    }

    #[test]
    fn gap_brute_force_at_one_and_a_half() {
        let x = c(1.5, 0.0);
        let s = word_gap(x, 4).unwrap();
        let mut brute = f64::INFINITY;
        for j in 0..=4 {
            for w in naive_words(j) {
                let d = w.evaluate(x).unwrap().distance_to_identity();
                if d > RELATION_FLOOR {
                    brute = brute.min(d);
                }
            }
        }
        assert_eq!(s.d_l, brute);
    }

    #[test]
    fn gaps_are_monotone() {
        let ball = enumerate_ball(8).unwrap();
        for x in [c(1.5, 0.0), c(1.2, 0.7), c(-2.3, 0.1), c(0.0, 3.0)] {
            let gaps = ball_gaps(&ball, x, &IdentityTest::default()).unwrap();
            for w in gaps.windows(2) {
                assert!(w[1].d_l <= w[0].d_l);
                assert!(w[1].distinct_elements >= w[0].distinct_elements);
            }
        }
    }

    #[test]
    fn beta_profiles() {
        // x - 3 is a relation at x = 3, so only exact mode sees a finite beta
        let xe = exact_from_f64(c(3.0, 0.0)).unwrap();
        let r = beta_profile(
            c(3.0, 0.0),
            8,
            &IdentityTest::Exact {
                x: &xe,
                floor: RELATION_FLOOR,
            },
        )
        .unwrap();
        assert!(r.beta_estimate.is_finite() && r.beta_estimate >= 0.0);
        assert!(!r.relation_flag);
        assert!(r.per_l[6].relations > 0);
        let numeric = beta_profile(c(3.0, 0.0), 8, &IdentityTest::default()).unwrap();
        assert!(numeric.relation_flag && numeric.beta_estimate.is_infinite());

        // golden ratio direction rescaled to modulus 1.2
        let r = beta_profile(c(1.2, 0.0), 6, &IdentityTest::default()).unwrap();
        assert!(r.beta_estimate.is_finite());
        assert!(r.per_l.iter().skip(1).all(|s| s.d_l.is_finite()));
        assert_eq!(r.beta_l.len(), 6);
    }

    #[test]
    fn generic_over_f32() {
        let s = word_gap(Complex::new(2.0f32, 0.0), 2).unwrap();
        assert_eq!(s.d_l, 0.5f32);
    }

    #[test]
    fn abelian_examples() {
        assert_eq!(abelian_gap(0.5, 1).unwrap().value, 0.5);
        assert_eq!(abelian_gap(0.5, 3).unwrap().value, 0.0);
        assert!(abelian_gap(1.5, 3).is_err());
        assert!(abelian_gap(0.5, 0).is_err());
    }

    #[test]
    fn abelian_scan_matches_double_loop() {
        for x in [0.5, 0.3, 1.0 / 2f64.sqrt(), -0.41, 0.999, 0.001] {
            for l in 1..=40i64 {
                let mut brute = f64::INFINITY;
                for m in -l..=l {
                    for n in -(l - m.abs())..=(l - m.abs()) {
                        if (m, n) != (0, 0) {
                            brute = brute.min((m as f64 * x + n as f64).abs());
                        }
                    }
                }
                assert_eq!(abelian_gap(x, l as u32).unwrap().value, brute, "x = {x}, l = {l}");
            }
        }
    }
}
