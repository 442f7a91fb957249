//! The recursion operator `L` of the skew-orthonormal polynomials, the
//! projection `pi`, and a finite-difference check of the Pfaff-lattice flow.
//!
//! With `p^_j = p_j / |h_{j/2}|^{1/2}` the recursion `x p^ = L p^` has
//! `L_ij = 0` for `j > i + 1` and `L_{2k,2k+1} = 1`.
//!
//! Flow convention: for `V = V_0 + t x^j` (weight `e^{-V_0 - t x^j}`) the
//! operator obeys `dL/dt = +[pi(L^j), L]`. The opposite sign belongs to the
//! weight `e^{-V_0 + t x^j}`.

use rug::Float;

use crate::error::{Error, Result};
use crate::moments::{Beta, Moments};
use crate::numerics::{Matrix, Poly, PrecisionContext, Real};
use crate::potweights::Potential;
use crate::skewalg::{skew_family_from_moments, SkewFamily};

/// Truncated recursion matrix.
#[derive(Clone, Debug)]
pub struct LaxL {
    pub matrix: Matrix<Real>,
    /// Rows `0..valid_window` carry their complete expansion inside the
    /// truncated matrix.
    pub valid_window: usize,
}

impl LaxL {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Rows of `[pi(L^j), L]` unaffected by the truncation.
    pub fn flow_window(&self, j: usize) -> usize {
        self.size().saturating_sub(j + 2)
    }

    /// Largest violation of `L_ij = 0 (j > i+1)` and `L_{2k,2k+1} = 1` in the
    /// valid window.
    pub fn band_violation(&self) -> Real {
        let n = self.size();
        let p = self.matrix[(0, 0)].prec();
        let mut worst = Float::new(p);
        for i in 0..self.valid_window {
            for j in i + 2..n {
                let a = Float::with_val(p, self.matrix[(i, j)].abs_ref());
                if a > worst {
                    worst = a;
                }
            }
            if i % 2 == 0 && i + 1 < n {
                let a = Float::with_val(p, &self.matrix[(i, i + 1)] - 1u32).abs();
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }
}

/// `L` of size `family.len() - 2` from the skew-orthonormal family.
pub fn build_lax(family: &SkewFamily) -> Result<LaxL> {
    let n = family.len().saturating_sub(2);
    if n < 2 {
        return Err(Error::InvalidInput(
            "family too short for a recursion matrix".into(),
        ));
    }
    if family.h.iter().any(|h| h.is_zero()) {
        return Err(Error::DegenerateInnerProduct("zero norm h_j".into()));
    }
    let hats: Vec<Poly> = (0..=n).map(|j| family.normalized(j)).collect();
    let p = family.h[0].prec();
    let mut m = Matrix::zeros(n, n, p);
    let x = Poly::monomial(1, Float::with_val(p, 1));
    for i in 0..n {
        let row = expand(&(&x * &hats[i]), &hats);
        for (j, v) in row.into_iter().enumerate().take(n) {
            m[(i, j)] = v;
        }
    }
    Ok(LaxL {
        matrix: m,
        valid_window: n - 1,
    })
}

/// Coefficients of `f` in the triangular basis `basis` (top-down).
fn expand(f: &Poly, basis: &[Poly]) -> Vec<Real> {
    let p = f.prec();
    let deg = f.degree().unwrap_or(0);
    let mut rem = f.clone();
    let mut out = vec![Float::new(p); deg + 1];
    for k in (0..=deg).rev() {
        let lead = basis[k].coeff(k);
        let c = rem.coeff(k) / lead;
        rem = &rem - &basis[k].scale(&c);
        out[k] = c;
    }
    out
}

/// Largest coefficient mismatch of `x p^_i - sum_j L_ij p^_j` over the valid
/// window.
pub fn recursion_residual(lax: &LaxL, family: &SkewFamily) -> Real {
    let n = lax.size();
    let p = lax.matrix[(0, 0)].prec();
    let x = Poly::monomial(1, Float::with_val(p, 1));
    let mut worst = Float::new(p);
    for i in 0..lax.valid_window {
        let mut rhs = Poly::zero(p);
        for j in 0..n {
            rhs = &rhs + &family.normalized(j).scale(&lax.matrix[(i, j)]);
        }
        let d = (&x * &family.normalized(i)).max_coeff_diff(&rhs);
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Block-diagonal `J` with 2x2 blocks `[[0, 1], [-1, 0]]`.
pub fn j_matrix(n: usize, prec: u32) -> Matrix<Real> {
    let mut j = Matrix::zeros(n, n, prec);
    for b in 0..n / 2 {
        j[(2 * b, 2 * b + 1)] = Float::with_val(prec, 1);
        j[(2 * b + 1, 2 * b)] = Float::with_val(prec, -1);
    }
    j
}

/// `pi(M) = M_- - J M_+^T J + (M_0 - J M_0^T J)/2`, with `M_-`, `M_+` the
/// strictly lower and upper 2x2-block parts and `M_0` the diagonal blocks.
pub fn project_pik(m: &Matrix<Real>) -> Matrix<Real> {
    let n = m.rows();
    assert!(
        n.is_multiple_of(2) && m.is_square(),
        "projection needs an even square matrix"
    );
    let p = m[(0, 0)].prec();
    let part = |keep: &dyn Fn(usize, usize) -> bool| {
        Matrix::from_fn(n, n, |i, j| {
            if keep(i / 2, j / 2) {
                m[(i, j)].clone()
            } else {
                Float::new(p)
            }
        })
    };
    let lower = part(&|a, b| a > b);
    let upper = part(&|a, b| a < b);
    let diag = part(&|a, b| a == b);
    let j = j_matrix(n, p);
    let conj = |x: &Matrix<Real>| j.matmul(&x.transpose()).matmul(&j);
    let half = Float::with_val(p, 0.5);
    let d = diag
        .sub(&conj(&diag))
        .map(|v| Float::with_val(p, v * &half));
    lower.sub(&conj(&upper)).add(&d)
}

pub fn commutator(a: &Matrix<Real>, b: &Matrix<Real>) -> Matrix<Real> {
    a.matmul(b).sub(&b.matmul(a))
}

pub fn matrix_power(a: &Matrix<Real>, k: usize) -> Matrix<Real> {
    let p = a[(0, 0)].prec();
    let mut out = Matrix::identity(a.rows(), p);
    for _ in 0..k {
        out = out.matmul(a);
    }
    out
}

fn lax_for(v: &Potential, beta: Beta, k_max: usize, ctx: &PrecisionContext) -> Result<LaxL> {
    let mo = Moments::new(v, 2 * k_max + 2, ctx)?;
    build_lax(&skew_family_from_moments(&mo, beta, k_max)?)
}

/// Outcome of one finite-difference comparison.
#[derive(Clone, Debug)]
pub struct FlowResidual {
    pub t_step: Real,
    /// `max |(L(t) - L(-t))/2t - [pi(L^j), L]|` over the flow window.
    pub residual: Real,
    /// The same against `-[pi(L^j), L]`.
    pub residual_opposite_sign: Real,
    pub rows: usize,
}

/// Compare the central difference of `L` along `V_0 + t x^j` with the flow.
///
/// `window` is the number of leading rows compared; it is clipped to the rows
/// unaffected by truncation.
pub fn flow_check(
    v0: &Potential,
    beta: Beta,
    j: usize,
    t_step: &Real,
    window: usize,
    ctx: &PrecisionContext,
) -> Result<FlowResidual> {
    let base = flow_base(v0, beta, j, window, ctx)?;
    flow_check_from(&base, v0, beta, j, t_step, window, ctx)
}

/// `L(0)` and `[pi(L(0)^j), L(0)]`, shared across step sizes.
#[derive(Clone, Debug)]
pub struct FlowBase {
    pub lax: LaxL,
    pub bracket: Matrix<Real>,
    k_max: usize,
}

fn k_max_for(j: usize, window: usize) -> usize {
    // size n = 2 k_max must satisfy n - j - 2 >= window
    (window + j + 2).div_ceil(2).max(2)
}

pub fn flow_base(
    v0: &Potential,
    beta: Beta,
    j: usize,
    window: usize,
    ctx: &PrecisionContext,
) -> Result<FlowBase> {
    if j % 2 == 1 {
        return Err(Error::IntegrabilityError(format!(
            "odd flow index {j} is not supported"
        )));
    }
    let k_max = k_max_for(j, window);
    let lax = lax_for(v0, beta, k_max, ctx)?;
    let lj = matrix_power(&lax.matrix, j);
    let bracket = commutator(&project_pik(&lj), &lax.matrix);
    Ok(FlowBase {
        lax,
        bracket,
        k_max,
    })
}

pub fn flow_check_from(
    base: &FlowBase,
    v0: &Potential,
    beta: Beta,
    j: usize,
    t_step: &Real,
    window: usize,
    ctx: &PrecisionContext,
) -> Result<FlowResidual> {
    let p = ctx.prec();
    let plus = v0.with_added_monomial(j, t_step)?;
    let minus = v0.with_added_monomial(j, &(-t_step.clone()))?;
    let (lp, lm) = rayon::join(
        || lax_for(&plus, beta, base.k_max, ctx),
        || lax_for(&minus, beta, base.k_max, ctx),
    );
    let (lp, lm) = (lp?, lm?);
    let two_t = Float::with_val(p, t_step * 2u32);
    let rows = window.min(base.lax.flow_window(j));
    let n = base.lax.size();
    let mut res = Float::new(p);
    let mut res_opp = Float::new(p);
    for a in 0..rows {
        for b in 0..n {
            let fd = Float::with_val(p, &lp.matrix[(a, b)] - &lm.matrix[(a, b)]) / &two_t;
            let r1 = Float::with_val(p, &fd - &base.bracket[(a, b)]).abs();
            let r2 = Float::with_val(p, &fd + &base.bracket[(a, b)]).abs();
            if r1 > res {
                res = r1;
            }
            if r2 > res_opp {
                res_opp = r2;
            }
        }
    }
    Ok(FlowResidual {
        t_step: t_step.clone(),
        residual: res,
        residual_opposite_sign: res_opp,
        rows,
    })
}

/// Residuals at `t_0, t_0/2, ...` (`halvings + 1` steps) and the fitted
/// log-log slope.
pub fn flow_convergence(
    v0: &Potential,
    beta: Beta,
    j: usize,
    t0: &Real,
    halvings: usize,
    window: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<FlowResidual>, f64)> {
    let base = flow_base(v0, beta, j, window, ctx)?;
    let mut out = Vec::new();
    let mut t = t0.clone();
    for _ in 0..=halvings {
        out.push(flow_check_from(&base, v0, beta, j, &t, window, ctx)?);
        t /= 2u32;
    }
    let pts: Vec<(f64, f64)> = out
        .iter()
        .map(|r| {
            (
                r.t_step.to_f64().ln(),
                crate::numerics::log10_abs(&r.residual) * std::f64::consts::LN_10,
            )
        })
        .collect();
    Ok((out, least_squares_slope(&pts)))
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
