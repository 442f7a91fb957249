//! Polynomial roots (Aberth-Ehrlich), reality and interlacing checks, and
//! root histograms.

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{Complex, Poly, Real};

const MAX_ITER: usize = 500;
/// Extra sweeps after the step criterion is met.
const POLISH: usize = 3;
/// Reality tolerance relative to the largest root modulus.
pub const REALITY_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RootReport {
    pub roots: Vec<Complex>,
    pub max_imag: Real,
    pub sorted_real_parts: Vec<Real>,
    /// `max |p(r)| / max |coeff|` over the roots.
    pub residual: Real,
    pub interlaces_with: Option<bool>,
}

impl RootReport {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn max_modulus(&self) -> Real {
        let p = self.max_imag.prec();
        self.roots
            .iter()
            .fold(Float::new(p), |m, r| m.max(&r.abs()))
    }

    pub fn reality_tol(&self) -> Real {
        self.max_modulus() * REALITY_REL_TOL
    }

    pub fn is_real(&self) -> bool {
        self.max_imag <= self.reality_tol()
    }
}

/// All roots of `p` by simultaneous Aberth-Ehrlich iteration.
///
/// `step_tol` is the relative step size at which the iteration is considered
/// converged; a few further sweeps then bring the roots to working precision.
pub fn roots(poly: &Poly, step_tol: f64) -> Result<RootReport> {
    let n = match poly.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::InvalidInput("root finding needs degree >= 1".into())),
    };
    let p = poly.prec();
    let c: Vec<Complex> = poly.coeffs().iter().map(Complex::from_real).collect();
    let dc: Vec<Complex> = poly
        .derivative()
        .coeffs()
        .iter()
        .map(Complex::from_real)
        .collect();
    let horner = |cs: &[Complex], z: &Complex| {
        let mut acc = Complex::zero(p);
        for a in cs.iter().rev() {
            acc = &(&acc * z) + a;
        }
        acc
    };

    // initial guesses on a circle of radius (|c_0/c_n|)^{1/n}, off the axes
    let lead = Float::with_val(p, poly.coeff(n).abs_ref());
    let c0 = Float::with_val(p, poly.coeff(0).abs_ref());
    let radius = if c0.is_zero() {
        1.0
    } else {
        (c0 / &lead).to_f64().powf(1.0 / n as f64).max(1e-3)
    };
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let r = radius * (1.0 + 0.01 * k as f64 / n as f64);
            Complex::new(
                Float::with_val(p, r * t.cos()),
                Float::with_val(p, r * t.sin()),
            )
        })
        .collect();

    let mut converged_at = None;
    for it in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let f = horner(&c, &z[i]);
            if f.is_zero() {
                continue;
            }
            let ratio = &f / &horner(&dc, &z[i]);
            let mut s = Complex::zero(p);
            for j in 0..n {
                if j != i {
                    s += &(&z[i] - &z[j]).recip();
                }
            }
            let den = &Complex::one(p) - &(&ratio * &s);
            let w = &ratio / &den;
            let scale = z[i].abs().to_f64().max(1.0);
            max_step = max_step.max(w.abs().to_f64() / scale);
            z[i] = &z[i] - &w;
        }
        if !max_step.is_finite() {
            return Err(Error::NoConvergence(it));
        }
        match converged_at {
            None if max_step < step_tol => converged_at = Some(it),
            Some(at) if it >= at + POLISH => break,
            _ => {}
        }
        if it + 1 == MAX_ITER && converged_at.is_none() {
            return Err(Error::NoConvergence(MAX_ITER));
        }
    }

    let cmax = poly.max_abs_coeff();
    let mut residual = Float::new(p);
    for r in &z {
        let v = horner(&c, r).abs() / &cmax;
        if v > residual {
            residual = v;
        }
    }
    let max_imag = z.iter().fold(Float::new(p), |m, r| {
        m.max(&Float::with_val(p, r.im.abs_ref()))
    });
    let mut sorted: Vec<Real> = z.iter().map(|r| r.re.clone()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(RootReport {
        roots: z,
        max_imag,
        sorted_real_parts: sorted,
        residual,
        interlaces_with: None,
    })
}

/// Roots of several polynomials in parallel.
pub fn roots_many(polys: &[Poly], step_tol: f64) -> Result<Vec<RootReport>> {
    polys.par_iter().map(|q| roots(q, step_tol)).collect()
}

/// Whether the real roots of `a` interlace those of `b`, where
/// `deg b - deg a` is 1 or 2.
///
/// Every root of `a` must lie strictly inside a gap `(b_i, b_{i+1})` of
/// consecutive roots of `b`, and no gap may hold two roots of `a`. For a
/// degree difference of 1 this is the usual `b_0 < a_0 < b_1 < .. < b_n`; for
/// a difference of 2 exactly one gap stays empty.
pub fn interlacing(a: &RootReport, b: &RootReport) -> Result<bool> {
    for r in [a, b] {
        if !r.is_real() {
            return Err(Error::NotReal {
                max_imag: r.max_imag.to_f64(),
                tol: r.reality_tol().to_f64(),
            });
        }
    }
    let (na, nb) = (a.degree(), b.degree());
    if !(nb == na + 1 || nb == na + 2) {
        return Err(Error::InvalidInput(format!(
            "interlacing compares degrees n and n+1 or n+2, got {na} and {nb}"
        )));
    }
    let xs = &a.sorted_real_parts;
    let ys = &b.sorted_real_parts;
    let mut last_gap = None;
    for x in xs {
        // gap index g with ys[g] < x < ys[g+1]
        let g = ys.iter().take_while(|y| *y < x).count();
        if g == 0 || g == nb || ys[g] <= *x {
            return Ok(false);
        }
        if last_gap == Some(g) {
            return Ok(false);
        }
        last_gap = Some(g);
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct Bin {
    pub lo: Real,
    pub hi: Real,
    pub mass: Real,
}

/// Normalized histogram of the pooled real parts over `bins` uniform bins
/// on `[min, max]`.
pub fn empirical_distribution(reports: &[RootReport], bins: usize) -> Vec<Bin> {
    let pooled: Vec<&Real> = reports
        .iter()
        .flat_map(|r| r.sorted_real_parts.iter())
        .collect();
    if pooled.is_empty() || bins == 0 {
        return Vec::new();
    }
    let p = pooled[0].prec();
    let lo = pooled.iter().fold(pooled[0].clone(), |m, x| m.min(x));
    let hi = pooled.iter().fold(pooled[0].clone(), |m, x| m.max(x));
    let total = pooled.len() as u32;
    if lo == hi {
        return vec![Bin {
            lo: lo.clone(),
            hi,
            mass: Float::with_val(p, 1),
        }];
    }
    let width = Float::with_val(p, &hi - &lo) / bins as u32;
    let mut counts = vec![0u32; bins];
    for x in &pooled {
        let t = Float::with_val(p, *x - &lo) / &width;
        let idx = (t.to_f64().floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| Bin {
            lo: Float::with_val(p, &lo + Float::with_val(p, &width * i as u32)),
            hi: Float::with_val(p, &lo + Float::with_val(p, &width * (i as u32 + 1))),
            mass: Float::with_val(p, c) / total,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::Beta;
    use crate::numerics::PrecisionContext;
    use crate::potweights::Potential;
    use crate::skewalg::skew_orthogonal_family;
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> Poly {
        Poly::from_f64s(c, 256)
    }

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        Float::with_val(256, a - b).abs() < tol
    }

    #[test]
    fn quadratic_and_cubic() {
        let r = roots(&poly(&[-0.5, 0.0, 1.0]), 1e-20).unwrap();
        let s = Float::with_val(256, 0.5).sqrt();
        assert!(close(&r.sorted_real_parts[0], -s.to_f64(), 1e-15));
        assert!(Float::with_val(256, &r.sorted_real_parts[1] - &s).abs() < 1e-60);
        assert!(r.max_imag < 1e-60);
        let r = roots(&poly(&[0.0, -2.5, 0.0, 1.0]), 1e-20).unwrap();
        let s = Float::with_val(256, 2.5).sqrt();
        assert!(Float::with_val(256, &r.sorted_real_parts[2] - &s).abs() < 1e-60);
        assert!(r.sorted_real_parts[1].clone().abs() < 1e-60);
    }

    #[test]
    fn complex_pair() {
        let r = roots(&poly(&[1.0, 0.0, 1.0]), 1e-20).unwrap();
        assert!(close(&r.max_imag, 1.0, 1e-60));
        assert!(!r.is_real());
        assert!(matches!(interlacing(&r, &r), Err(Error::NotReal { .. })));
    }

    #[test]
    fn hermite_interlacing() {
        let a = roots(&poly(&[-1.0, 0.0, 1.0]), 1e-20).unwrap();
        let b = roots(&poly(&[0.0, -3.0, 0.0, 1.0]), 1e-20).unwrap();
        assert!(interlacing(&a, &b).unwrap());
        assert!(!interlacing(&b, &b).unwrap_or(false));
        assert!(matches!(interlacing(&a, &a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn gaussian_even_family_interlaces() {
        let c = PrecisionContext::default();
        let v = Potential::from_f64s(&[0.0, 0.0, 0.5], &c).unwrap();
        let fam = skew_orthogonal_family(&v, Beta::One, 2, &c).unwrap();
        let a = roots(fam.p(2), 1e-20).unwrap();
        let b = roots(fam.p(4), 1e-20).unwrap();
        assert!(interlacing(&a, &b).unwrap());
    }

    #[test]
    fn histograms() {
        let r = roots(&poly(&[-2.0, 1.0]), 1e-20).unwrap();
        let h = empirical_distribution(&[r], 10);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].mass, 1);
        let r = roots(&poly(&[0.0, 4.0, 0.0, -5.0, 0.0, 1.0]), 1e-20).unwrap();
        let h = empirical_distribution(&[r], 5);
        let total = h.iter().fold(Float::new(256), |s, b| s + &b.mass);
        assert_eq!(total, 1);
        for i in 0..5 {
            assert_eq!(h[i].mass, h[4 - i].mass);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn roots_reproduce_polynomial(c in proptest::collection::vec(-3.0f64..3.0, 2..9)) {
            let mut c = c;
            *c.last_mut().unwrap() = 1.0;
            let q = poly(&c);
            let r = roots(&q, 1e-20).unwrap();
            prop_assert_eq!(r.degree(), c.len() - 1);
            prop_assert!(r.residual < 1e-40, "{}", r.residual);
        }
    }
}
