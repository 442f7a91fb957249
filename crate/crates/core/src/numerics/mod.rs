//! Working-precision scalars, polynomials and dense linear algebra.
//!
//! Every value in a result path is an MPFR float at
//! [`PrecisionContext::mantissa_bits`]. Hardware doubles only appear when
//! choosing step sizes, truncation radii and tolerances.

mod complex;
mod linalg;
mod poly;

pub use complex::Complex;
pub use linalg::{determinant, linear_solve, Matrix, Scalar};
pub use poly::{CPoly, Poly};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Arbitrary-precision real scalar.
pub type Real = Float;

/// Precision and tolerance settings threaded through every computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    pub mantissa_bits: u32,
    /// Target relative accuracy of a single quadrature.
    pub quad_tol: f64,
    /// Tolerance for algebraic identities checked after the fact.
    pub verify_tol: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: 256,
            quad_tol: 1e-30,
            verify_tol: 1e-20,
        }
    }
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32, quad_tol: f64, verify_tol: f64) -> Result<Self> {
        if mantissa_bits < 64 {
            return Err(Error::InvalidInput(format!(
                "mantissa_bits must be at least 64, got {mantissa_bits}"
            )));
        }
        if !(quad_tol > 0.0 && verify_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if quad_tol >= verify_tol {
            return Err(Error::InvalidInput(format!(
                "quad_tol ({quad_tol:e}) must be below verify_tol ({verify_tol:e})"
            )));
        }
        Ok(PrecisionContext {
            mantissa_bits,
            quad_tol,
            verify_tol,
        })
    }

    pub fn with_bits(mantissa_bits: u32) -> Result<Self> {
        let d = PrecisionContext::default();
        PrecisionContext::new(mantissa_bits, d.quad_tol, d.verify_tol)
    }

    #[inline]
    pub fn prec(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn real<T>(&self, v: T) -> Real
    where
        Real: rug::Assign<T>,
    {
        Float::with_val(self.mantissa_bits, v)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.mantissa_bits)
    }

    pub fn one(&self) -> Real {
        Float::with_val(self.mantissa_bits, 1)
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.mantissa_bits, Constant::Pi)
    }

    /// `2^(-k)` at working precision.
    pub fn pow2_neg(&self, k: u32) -> Real {
        self.one() >> k
    }

    /// Parse a decimal string (e.g. `"0.5"`, `"-1e-3"`) at working precision.
    pub fn parse_real(&self, s: &str) -> Result<Real> {
        parse_real(s.trim(), self.mantissa_bits)
    }

    /// Digits emitted when serializing; enough for exact round trips.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits(self.mantissa_bits)
    }

    pub fn format_real(&self, x: &Real) -> String {
        format_real(x, self.decimal_digits())
    }
}

/// `ceil(bits * 0.302) + 2`.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * 0.302).ceil() as usize + 2
}

pub fn format_real(x: &Real, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

pub fn parse_real(s: &str, prec: u32) -> Result<Real> {
    let parsed =
        Float::parse(s).map_err(|e| Error::InvalidInput(format!("cannot parse {s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Integer power by repeated multiplication.
pub fn powi(x: &Real, n: u32) -> Real {
    use rug::ops::Pow;
    Float::with_val(x.prec(), x.pow(n))
}

/// Largest absolute value in a slice (zero when empty).
pub fn max_abs<'a, I>(values: I, prec: u32) -> Real
where
    I: IntoIterator<Item = &'a Real>,
{
    let mut m = Float::new(prec);
    for v in values {
        let a = Float::with_val(prec, v.abs_ref());
        if a > m {
            m = a;
        }
    }
    m
}

/// Sum in a fixed left-to-right pairwise order, independent of thread count.
pub fn pairwise_sum(values: &[Real], prec: u32) -> Real {
    match values.len() {
        0 => Float::new(prec),
        1 => Float::with_val(prec, &values[0]),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a, prec) + pairwise_sum(b, prec)
        }
    }
}

/// `log10(|x|)` as a double, or `-inf` for zero. Used for tolerance bookkeeping.
pub fn log10_abs(x: &Real) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let ln = Float::with_val(64, x.abs_ref()).ln();
    ln.to_f64() / std::f64::consts::LN_10
}
