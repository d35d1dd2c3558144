//! Scalar fields for the algebra coefficients.
//!
//! The same blade engine serves the real and the complexified algebra; the
//! only difference is the coefficient type. [`ClScalar`] is the small closed
//! trait both `f64` and `Complex64` implement.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Runtime tag for the coefficient field, used by serialization and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarField {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Real => write!(f, "R"),
            ScalarField::Complex => write!(f, "C"),
        }
    }
}

/// Coefficient scalar of the algebra: `f64` or `Complex64`.
pub trait ClScalar:
    Copy
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
{
    const FIELD: ScalarField;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Build from real/imaginary parts. `None` if the field cannot hold them
    /// (nonzero imaginary part over the reals).
    fn try_from_parts(re: f64, im: f64) -> Option<Self>;
    fn re(self) -> f64;
    fn im(self) -> f64;
    /// Complex conjugate (identity over the reals).
    fn conj(self) -> Self;
    /// Modulus.
    fn abs(self) -> f64;
    fn abs_sq(self) -> f64;
    /// Multiply by a real factor.
    fn scale(self, k: f64) -> Self;
    fn recip(self) -> Self;
    fn is_finite(self) -> bool;
}

impl ClScalar for f64 {
    const FIELD: ScalarField = ScalarField::Real;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn try_from_parts(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl ClScalar for Complex64 {
    const FIELD: ScalarField = ScalarField::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn try_from_parts(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn recip(self) -> Self {
        self.inv()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
