//! Algebraic traits shared by every layer: rings, the involution, and the
//! scalar fields the signature machinery runs over.
//!
//! Two scalar backends implement [`Scalar`]: the exact cyclotomic field
//! [`CycloNumber`](crate::cyclofield::CycloNumber) and the tolerance-based
//! [`FloatComplex`](crate::cyclofield::FloatComplex). Everything above this
//! module is generic over the backend.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclofield::CycloNumber;
use crate::matrix::Matrix;
use crate::error::{Error, Result};

/// Commutative ring with unit.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

/// Ring involution `x -> x̄`.
pub trait Involution {
    fn conj(&self) -> Self;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i32(v: i32) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_i32())
    }
}

/// Whether the ground field plays the role of ℝ (trivial involution on the
/// real subfield) or ℂ (complex conjugation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlavorKind {
    Real,
    Complex,
}

impl fmt::Display for FlavorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlavorKind::Real => f.write_str("real"),
            FlavorKind::Complex => f.write_str("complex"),
        }
    }
}

/// Arithmetic backend selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact arithmetic in ℚ(ζ_N); `order` is the ambient order used when
    /// searching for roots of unity.
    ExactCyclotomic { order: u64 },
    /// 64-bit complex floats; `|x| < tolerance` counts as zero.
    FloatComplex { tolerance: f64 },
}

pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

/// Ground field description: real or complex flavor, plus backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFlavor {
    pub kind: FlavorKind,
    pub backend: Backend,
}

impl FieldFlavor {
    pub fn new(kind: FlavorKind, backend: Backend) -> Result<Self> {
        if let Backend::FloatComplex { tolerance } = backend {
            if !(tolerance > 0.0 && tolerance.is_finite()) {
                return Err(Error::domain(format!(
                    "float tolerance must be positive, got {tolerance}"
                )));
            }
        }
        if let Backend::ExactCyclotomic { order } = backend {
            if order == 0 {
                return Err(Error::InvalidOrder(0));
            }
        }
        Ok(FieldFlavor { kind, backend })
    }

    pub fn real(order: u64) -> Self {
        FieldFlavor {
            kind: FlavorKind::Real,
            backend: Backend::ExactCyclotomic { order: order.max(1) },
        }
    }

    pub fn complex(order: u64) -> Self {
        FieldFlavor {
            kind: FlavorKind::Complex,
            backend: Backend::ExactCyclotomic { order: order.max(1) },
        }
    }

    pub fn float(kind: FlavorKind, tolerance: f64) -> Result<Self> {
        FieldFlavor::new(kind, Backend::FloatComplex { tolerance })
    }

    pub fn is_real(&self) -> bool {
        self.kind == FlavorKind::Real
    }

    /// Same flavor with the exact ambient order enlarged to include `order`.
    pub fn with_ambient(self, order: u64) -> Self {
        match self.backend {
            Backend::ExactCyclotomic { order: n } => FieldFlavor {
                kind: self.kind,
                backend: Backend::ExactCyclotomic {
                    order: num_integer::lcm(n, order.max(1)),
                },
            },
            Backend::FloatComplex { .. } => self,
        }
    }
}

/// A field with involution, embedded in ℂ, with decidable (exact backend) or
/// tolerance-based (float backend) zero and sign tests.
pub trait Scalar: Ring + Involution + fmt::Display + 'static {
    fn from_i64(n: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    /// Converts an exact cyclotomic number into this backend.
    fn from_cyclo(z: &CycloNumber) -> Self;

    /// `ζ_order^exponent`.
    fn root_of_unity(order: u64, exponent: i64) -> Result<Self>;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Cheap sufficient test for invertibility of a square matrix; `false`
    /// means undecided.
    fn certify_invertible(_m: &Matrix<Self>) -> bool {
        false
    }

    /// Sign of a real element under the embedding `ζ_N -> exp(2πi/N)`.
    fn sign_real(&self) -> Result<Sign>;

    /// Sign of the imaginary part.
    fn imag_sign(&self) -> Sign;

    fn to_c64(&self) -> Complex64;

    /// Heuristic weight for pivot selection; zero iff `is_zero`.
    fn pivot_score(&self) -> f64;

    /// Ambient cyclotomic order of an exact element.
    fn ambient_order(&self) -> Option<u64>;

    /// Candidate unit-circle roots of the polynomial `Σ coeffs[k] t^k`.
    ///
    /// The exact backend enumerates the roots of unity of the ambient order
    /// (joined with the coefficients' own orders); the float backend solves
    /// numerically and keeps roots within tolerance of the unit circle.
    fn unit_circle_candidates(coeffs: &[Self], backend: &Backend) -> Result<Vec<Self>>;

    /// Applies backend parameters (the float tolerance) to a value.
    fn with_backend(self, _backend: &Backend) -> Self {
        self
    }

    fn is_real(&self) -> bool {
        (self.conj() - self.clone()).is_zero()
    }

    fn is_one(&self) -> bool {
        (self.clone() - Self::one()).is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    fn div(&self, other: &Self) -> Result<Self> {
        other
            .inv()
            .map(|i| self.clone() * i)
            .ok_or_else(|| Error::domain("division by zero"))
    }

    /// `x · x̄`, a non-negative real.
    fn norm_sq(&self) -> Self {
        self.clone() * self.conj()
    }

    /// `x + x̄ = 2 Re(x)`.
    fn two_re(&self) -> Self {
        self.clone() + self.conj()
    }

    fn is_on_unit_circle(&self) -> bool {
        self.norm_sq().is_one()
    }

    /// True for the excluded points `ξ = ±1`.
    fn is_plus_minus_one(&self) -> bool {
        self.is_one() || (self.clone() + Self::one()).is_zero()
    }
}
