//! The potential `V` and the weights built from it.

mod table;

pub use table::{CauchyBasis, WeightTable};

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{Complex, Poly, PrecisionContext, Real};
use crate::quadrature::{integrate_interval, QuadraturePlan};

/// Even-degree polynomial potential with positive leading coefficient.
///
/// The scale `N` is folded in at construction, so `coeffs` is `N * V`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    coeffs: Poly,
    scale_n: Real,
    deriv: Poly,
}

impl Potential {
    pub fn new(raw: Poly, scale_n: Real) -> Result<Self> {
        if !(scale_n.is_finite() && scale_n > 0) {
            return Err(Error::InvalidInput("scale N must be positive".into()));
        }
        let d = raw.degree().unwrap_or(0);
        if d < 2 || d % 2 == 1 {
            return Err(Error::IntegrabilityError(format!(
                "potential degree must be even and at least 2, got {d}"
            )));
        }
        if *raw.leading().expect("nonzero") <= 0 {
            return Err(Error::IntegrabilityError(
                "leading coefficient must be positive".into(),
            ));
        }
        let coeffs = raw.scale(&scale_n);
        let deriv = coeffs.derivative();
        Ok(Potential {
            coeffs,
            scale_n,
            deriv,
        })
    }

    pub fn from_f64s(coeffs: &[f64], ctx: &PrecisionContext) -> Result<Self> {
        Potential::new(Poly::from_f64s(coeffs, ctx.prec()), ctx.one())
    }

    /// Parse `"c0,c1,...,cd"` (lowest degree first). Decimal strings are read
    /// at working precision, so `0.1` is not rounded through a double.
    pub fn parse(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|c| ctx.parse_real(c))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty potential".into()));
        }
        Potential::new(Poly::new(coeffs, ctx.prec()), ctx.one())
    }

    pub fn with_scale(&self, scale_n: Real) -> Result<Self> {
        let raw = self
            .coeffs
            .scale(&Float::with_val(self.prec(), self.scale_n.recip_ref()));
        Potential::new(raw, scale_n)
    }

    /// `V + t x^j`.
    pub fn with_added_monomial(&self, j: usize, t: &Real) -> Result<Self> {
        let raw = self
            .coeffs
            .scale(&Float::with_val(self.prec(), self.scale_n.recip_ref()));
        Potential::new(&raw + &Poly::monomial(j, t.clone()), self.scale_n.clone())
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.prec()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.degree().expect("nonzero potential")
    }

    /// Leading coefficient `v_d` of the effective potential.
    pub fn leading(&self) -> &Real {
        self.coeffs.leading().expect("nonzero potential")
    }

    pub fn coeffs(&self) -> &Poly {
        &self.coeffs
    }

    pub fn scale_n(&self) -> &Real {
        &self.scale_n
    }

    pub fn derivative(&self) -> &Poly {
        &self.deriv
    }

    pub fn is_even(&self) -> bool {
        self.coeffs
            .coeffs()
            .iter()
            .enumerate()
            .all(|(i, c)| i % 2 == 0 || c.is_zero())
    }

    pub fn eval(&self, x: &Real) -> Real {
        self.coeffs.eval(x)
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        self.coeffs.eval_complex(z)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    fn deriv_f64(&self, x: f64) -> f64 {
        self.deriv
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    /// Smallest `R` (on a 1/32 grid) with `R^p e^{-V(+-R)} < tol/100` and the
    /// bound decreasing beyond it, doubled.
    pub fn truncation_radius(&self, max_power: usize, tol: f64) -> f64 {
        let target = (tol * 1e-2).ln();
        let p = max_power as f64;
        let mut r: f64 = 1.0;
        loop {
            let lr = r.ln();
            let ok = [r, -r].iter().all(|&x| p * lr - self.eval_f64(x) < target)
                && p / r - self.deriv_f64(r) < 0.0
                && p / r + self.deriv_f64(-r) < 0.0;
            if ok {
                return 2.0 * r;
            }
            r += 1.0 / 32.0;
        }
    }
}

/// `e^{-2V(x)}`.
#[allow(non_snake_case)]
pub fn weight_W(v: &Potential, x: &Real) -> Real {
    (-v.eval(x) * 2u32).exp()
}

/// `d/dy (y^j e^{-V(y)}) e^{V(y)} = j y^{j-1} - y^j V'(y)`, degree `j + d - 1`.
pub fn pi_polynomial(v: &Potential, j: usize) -> Poly {
    let p = v.prec();
    let head = if j == 0 {
        Poly::zero(p)
    } else {
        Poly::monomial(j - 1, Float::with_val(p, j as u32))
    };
    &head - &v.derivative().shift(j)
}

/// `w_n(x) = e^{-V(x)} (int_{-inf}^x - int_x^inf) y^n e^{-V(y)} dy`, by
/// direct quadrature. [`WeightTable`] is the bulk route.
pub fn w_function(v: &Potential, n: usize, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let plan = QuadraturePlan::for_potential(v, n, ctx);
    let p = ctx.prec();
    let f = |y: &Real| -> Real {
        let e = (-v.eval(y)).exp();
        Float::with_val(p, crate::numerics::powi(y, n as u32) * e)
    };
    let lo = Float::with_val(p, -&plan.radius);
    let total: Real = integrate_interval(&f, &lo, &plan.radius, &plan)?;
    // integrate the short side directly, so the difference stays accurate
    let d = if *x <= 0 {
        let left: Real = if *x <= lo {
            Float::new(p)
        } else {
            integrate_interval(&f, &lo, x, &plan)?
        };
        left * 2u32 - total
    } else {
        let right: Real = if *x >= plan.radius {
            Float::new(p)
        } else {
            integrate_interval(&f, x, &plan.radius, &plan)?
        };
        total - right * 2u32
    };
    Ok((-v.eval(x)).exp() * d)
}
