use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use super::{Complex, Real};

/// Dense real polynomial, `coeffs[i]` multiplies `x^i`.
///
/// The highest stored coefficient is nonzero; the zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Real>,
    prec: u32,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Real>, prec: u32) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Poly {
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Poly::monomial(0, Float::with_val(prec, 1))
    }

    /// `c * x^j`.
    pub fn monomial(j: usize, c: Real) -> Self {
        let prec = c.prec();
        let mut coeffs = vec![Float::new(prec); j + 1];
        coeffs[j] = c;
        Poly::new(coeffs, prec)
    }

    /// Convenience constructor from doubles (exact for dyadic rationals).
    pub fn from_f64s(coeffs: &[f64], prec: u32) -> Self {
        Poly::new(
            coeffs.iter().map(|&c| Float::with_val(prec, c)).collect(),
            prec,
        )
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Real> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Real {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Float::new(self.prec))
    }

    pub fn leading(&self) -> Option<&Real> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let mut acc = Complex::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc.re += c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Float::with_val(self.prec, c * i as u32))
            .collect();
        Poly::new(coeffs, self.prec)
    }

    pub fn scale(&self, s: &Real) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| Float::with_val(self.prec, c * s))
                .collect(),
            self.prec,
        )
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Float::new(self.prec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs, self.prec)
    }

    pub fn max_abs_coeff(&self) -> Real {
        super::max_abs(self.coeffs.iter(), self.prec)
    }

    /// Largest coefficient difference, padding the shorter side with zeros.
    pub fn max_coeff_diff(&self, other: &Poly) -> Real {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut m = Float::new(self.prec);
        for i in 0..n {
            let d = Float::with_val(self.prec, self.coeff(i) - other.coeff(i)).abs();
            if d > m {
                m = d;
            }
        }
        m
    }

    pub fn to_complex(&self) -> CPoly {
        CPoly::new(
            self.coeffs.iter().map(Complex::from_real).collect(),
            self.prec,
        )
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(),
            self.prec,
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect(),
            self.prec,
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.prec);
        }
        let mut out = vec![Float::new(self.prec); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Float::with_val(self.prec, a * b);
            }
        }
        Poly::new(out, self.prec)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.prec)
    }
}

/// Dense complex polynomial with the same normalization as [`Poly`].
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex>,
    prec: u32,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex>, prec: u32) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CPoly { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        CPoly {
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Complex {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Complex::zero(self.prec))
    }

    pub fn leading(&self) -> Option<&Complex> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        let mut acc = Complex::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc += c;
        }
        acc
    }

    pub fn scale(&self, s: &Complex) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| c * s).collect(), self.prec)
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new(
            (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect(),
            self.prec,
        )
    }

    pub fn sub(&self, o: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new(
            (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect(),
            self.prec,
        )
    }

    pub fn max_abs_coeff(&self) -> Real {
        let mut m = Float::new(self.prec);
        for c in &self.coeffs {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 192;

    fn r(x: f64) -> Real {
        Float::with_val(P, x)
    }

    #[test]
    fn eval_examples() {
        let p = Poly::from_f64s(&[-0.5, 0.0, 1.0], P);
        assert_eq!(p.eval(&r(0.0)), -0.5);
        let id = Poly::from_f64s(&[0.0, 1.0], P);
        let z = Complex::new(r(3.0), r(4.0));
        assert_eq!(id.eval_complex(&z), z);
        // root of x^2 - 1/2
        let root = Float::with_val(P, 2).sqrt().recip();
        assert!(p.eval(&root).abs() < 1e-55);
    }

    #[test]
    fn derivative_examples() {
        assert!(Poly::from_f64s(&[7.0], P).derivative().is_zero());
        assert_eq!(
            Poly::from_f64s(&[0.0, 0.0, 1.0], P).derivative(),
            Poly::from_f64s(&[0.0, 2.0], P)
        );
        assert_eq!(
            Poly::from_f64s(&[1.0, 1.0, 1.0, 1.0], P).derivative(),
            Poly::from_f64s(&[1.0, 2.0, 3.0], P)
        );
    }

    #[test]
    fn normalization_trims_zero_leading_terms() {
        let p = Poly::from_f64s(&[1.0, 2.0, 0.0, 0.0], P);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::from_f64s(&[0.0], P).degree(), None);
    }

    fn small_poly() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(-20i32..20, 0..7)
    }

    fn to_poly(v: &[i32]) -> Poly {
        Poly::new(v.iter().map(|&c| Float::with_val(P, c)).collect(), P)
    }

    proptest! {
        #[test]
        fn eval_is_additive(a in small_poly(), b in small_poly(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let (p, q) = (to_poly(&a), to_poly(&b));
            let z = Complex::new(r(re), r(im));
            let lhs = (&p + &q).eval_complex(&z);
            let rhs = &p.eval_complex(&z) + &q.eval_complex(&z);
            prop_assert!((&lhs - &rhs).abs() < 1e-45);
        }

        #[test]
        fn derivative_obeys_product_rule(a in small_poly(), b in small_poly()) {
            let (p, q) = (to_poly(&a), to_poly(&b));
            let lhs = (&p * &q).derivative();
            let rhs = &(&p.derivative() * &q) + &(&p * &q.derivative());
            // integer coefficients: the comparison is exact
            prop_assert_eq!(lhs, rhs);
        }
    }
}
