//! Diophantine behaviour of the pair `g1 = [[x, 0], [0, 1]]`,
//! `g2 = [[1, 1], [0, 1]]` in the affine group of the complex line.
//!
//! The crate enumerates word balls exactly, measures the gap `d_l(x)`
//! between the identity and the nearest nontrivial element of length at
//! most `l`, and checks at desk scale the counting and covering bounds that
//! control how often that gap can be exponentially small.
//!
//! Numeric code is generic over [`Scalar`] (`f32`, `f64`); exact identity
//! detection works over [`GaussianRational`].

pub mod analytic;
pub mod covering;
pub mod dimension;
pub mod error;
pub mod family;
pub mod group;
pub mod report;
pub mod scalar;
pub mod words;

pub use error::{Error, Result};
pub use family::IntPoly;
pub use group::{AffineElement, Generator, LaurentPoly, Side, WordForm};
pub use report::BoundReport;
pub use scalar::Scalar;

/// Gaussian rational `p + q i` with `p, q` arbitrary-precision rationals.
pub type GaussianRational = num_complex::Complex<num_rational::BigRational>;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type Affine64 = AffineElement<f64>;
pub type Affine32 = AffineElement<f32>;
pub type RootSet64 = analytic::RootSet<f64>;
pub type RootSet32 = analytic::RootSet<f32>;
