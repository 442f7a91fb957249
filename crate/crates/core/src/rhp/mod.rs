//! The `(d+1) x (d+1)` Riemann-Hilbert problem for the `beta = 1` skew
//! inner product, its polynomial solutions and numerical verification.
//!
//! Row `r` of `Y` is `(q_r, C(q_r W), C(q_r w_0), .., C(q_r w_{d-2}))` with
//! `W = e^{-2V}`. The jump is `Y_+ = Y_- M` and at infinity
//! `Y = (I + O(1/z)) diag(z^{D_0}, .., z^{D_d})` with
//! `D = (2k [+1], -2k+d-1, -1, .., -1)`.
//!
//! Using `C(f)(z) = -(1/2 pi i) sum_j z^{-j-1} int f x^j`, each row is a
//! square linear system in the coefficients of `q_r`:
//!
//! * `<q, x^j>_2 = 0` for `j <= 2k-d`, except `<q_1, x^{2k-d}>_2 = -2 pi i`;
//! * `int q w_n = 0` for `n <= d-2`, except `int q_r w_{r-2} = -2 pi i`.
//!
//! Row `r >= 2` pairs with `w_{r-2}`: the diagonal entry `Y_rr` is the
//! transform against `w_{r-2}`.

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::moments::{Beta, Moments};
use crate::numerics::{
    determinant, linear_solve, CPoly, Complex, Matrix, Poly, PrecisionContext, Real,
};
use crate::potweights::{pi_polynomial, Potential};
use crate::quadrature::{boundary_deltas, cauchy_pv, extrapolate_to_zero, QuadraturePlan};
use crate::skewalg::{skew_family_from_moments, SkewFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Parity> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::InvalidInput(format!(
                "parity must be even or odd, got {s}"
            ))),
        }
    }
}

/// Problem data. For the odd problem `free_params = [a_k, b_{k,0}, .., b_{k,d-1}]`.
#[derive(Clone, Debug)]
pub struct RHProblem {
    pub potential: Potential,
    pub k: usize,
    pub parity: Parity,
    pub free_params: Vec<Complex>,
}

impl RHProblem {
    pub fn even(v: &Potential, k: usize) -> Self {
        RHProblem {
            potential: v.clone(),
            k,
            parity: Parity::Even,
            free_params: Vec::new(),
        }
    }

    pub fn odd(v: &Potential, k: usize, free_params: Vec<Complex>) -> Self {
        RHProblem {
            potential: v.clone(),
            k,
            parity: Parity::Odd,
            free_params,
        }
    }

    pub fn solve(&self, ctx: &PrecisionContext) -> Result<RHSolution> {
        match self.parity {
            Parity::Even => build_even(&self.potential, self.k, ctx),
            Parity::Odd => build_odd(&self.potential, self.k, &self.free_params, ctx),
        }
    }
}

/// The jump matrix `M(x)`.
#[derive(Clone, Debug)]
pub struct JumpMatrix {
    moments: Moments,
}

impl JumpMatrix {
    pub fn new(moments: &Moments) -> Self {
        JumpMatrix {
            moments: moments.clone(),
        }
    }

    pub fn eval(&self, x: &Real) -> Result<Matrix<Real>> {
        let v = self.moments.potential();
        let d = v.degree();
        let p = self.moments.ctx().prec();
        let mut m = Matrix::identity(d + 1, p);
        m[(0, 1)] = crate::potweights::weight_W(v, x);
        for n in 0..d - 1 {
            m[(0, 2 + n)] = self.moments.table().w_real(n, x)?;
        }
        Ok(m)
    }
}

/// A solution: the first-column polynomials and the tables that evaluate
/// the rest.
#[derive(Clone, Debug)]
pub struct RHSolution {
    pub k: usize,
    pub parity: Parity,
    pub d: usize,
    pub rows: Vec<CPoly>,
    /// Coefficient of `p_{2k-2}` in row 1 as returned by the row solve.
    pub alpha: Complex,
    /// `-4 pi i / <p_{2k-2}, y^{2k-1}>_1`.
    pub alpha_formula: Complex,
    /// `4 pi i / (d v_d <p_{2k-2}, y^{2k-1}>_1)`, from matching the leading
    /// `W`-moment of `alpha p_{2k-2}` against `-2 pi i`.
    pub alpha_closed_form: Complex,
    pub family: SkewFamily,
    moments: Moments,
}

fn two_pi_i(p: u32) -> Complex {
    Complex::new(Float::new(p), Float::with_val(p, Constant::Pi) * 2u32)
}

/// The `2k` condition rows on a polynomial with `ncoef` coefficients:
/// first `<., x^j>_2` for `j = 0..=2k-d`, then `int . w_n` for `n = 0..=d-2`.
fn conditions(mo: &Moments, k: usize, d: usize, ncoef: usize) -> Result<Vec<Vec<Real>>> {
    let mut rows = Vec::with_capacity(2 * k);
    for j in 0..=2 * k - d {
        rows.push(
            (0..ncoef)
                .map(|i| mo.mu(i + j).cloned())
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for n in 0..=d - 2 {
        rows.push(
            (0..ncoef)
                .map(|i| mo.table().wm(n, i).cloned())
                .collect::<Result<Vec<_>>>()?,
        );
    }
    // (2k-d+1) + (d-1) conditions for 2k unknowns
    assert_eq!(rows.len(), 2 * k, "row system is not square");
    Ok(rows)
}

/// Index of the condition normalized to `-2 pi i` for row `r >= 1`.
fn target(k: usize, d: usize, r: usize) -> usize {
    if r == 1 {
        2 * k - d
    } else {
        2 * k - d + 1 + (r - 2)
    }
}

struct Setup {
    d: usize,
    mo: Moments,
    family: SkewFamily,
}

fn setup(v: &Potential, k: usize, odd: bool, ctx: &PrecisionContext) -> Result<Setup> {
    let d = v.degree();
    if k == 0 || 2 * k < d {
        return Err(Error::UnsupportedRegime(format!(
            "k = {k} with d = {d}: the row conditions need 2k >= d and k >= 1"
        )));
    }
    let size = 2 * k + 2 + usize::from(odd);
    let mo = Moments::new(v, size, ctx)?;
    let family = skew_family_from_moments(&mo, Beta::One, k)?;
    Ok(Setup { d, mo, family })
}

fn alphas(s: &Setup, k: usize, p: u32) -> Result<(Complex, Complex)> {
    let g = Poly::monomial(2 * k - 1, Float::with_val(p, 1));
    let denom = s.mo.skew_inner_1(s.family.p(2 * k - 2), &g)?;
    if denom.is_zero() {
        return Err(Error::DegenerateInnerProduct(
            "<p_{2k-2}, y^{2k-1}>_1 vanishes".into(),
        ));
    }
    let four_pi_i = two_pi_i(p).scale(&Float::with_val(p, 2));
    let formula = (-four_pi_i.clone()).scale(&Float::with_val(p, denom.recip_ref()));
    let dv = Float::with_val(p, s.mo.potential().leading() * s.d as u32);
    let closed = four_pi_i.scale(&Float::with_val(p, (denom * dv).recip_ref()));
    Ok((formula, closed))
}

/// Rows `1..=d` of the even problem: solutions of degree `<= 2k-1`.
fn even_lower_rows(s: &Setup, k: usize, p: u32) -> Result<Vec<CPoly>> {
    let a = conditions(&s.mo, k, s.d, 2 * k)?;
    let a = Matrix::from_fn(2 * k, 2 * k, |i, j| a[i][j].clone());
    let scale = -two_pi_i(p);
    (1..=s.d)
        .map(|r| {
            let mut e = vec![Float::new(p); 2 * k];
            e[target(k, s.d, r)] = Float::with_val(p, 1);
            let c = linear_solve(&a, &e)?;
            Ok(CPoly::new(c.iter().map(|x| scale.scale(x)).collect(), p))
        })
        .collect()
}

pub fn build_even(v: &Potential, k: usize, ctx: &PrecisionContext) -> Result<RHSolution> {
    let p = ctx.prec();
    let s = setup(v, k, false, ctx)?;
    let (alpha_formula, alpha_closed_form) = alphas(&s, k, p)?;
    let mut rows = vec![s.family.p(2 * k).to_complex()];
    rows.extend(even_lower_rows(&s, k, p)?);
    let alpha = rows[1].coeff(2 * k - 2);
    Ok(RHSolution {
        k,
        parity: Parity::Even,
        d: s.d,
        rows,
        alpha,
        alpha_formula,
        alpha_closed_form,
        family: s.family,
        moments: s.mo,
    })
}

/// Rows `1..=d` of the odd problem: degree `<= 2k`, the `2k` row conditions
/// plus the gauge `[x^{2k}] q_r = b_{k, r-1}`.
fn odd_lower_rows(s: &Setup, k: usize, b: &[Complex], p: u32) -> Result<Vec<CPoly>> {
    let n = 2 * k + 1;
    let a = conditions(&s.mo, k, s.d, n)?;
    let a: Matrix<Complex> = Matrix::from_fn(n, n, |i, j| {
        if i < 2 * k {
            Complex::from_real(&a[i][j])
        } else if j == 2 * k {
            Complex::one(p)
        } else {
            Complex::zero(p)
        }
    });
    (1..=s.d)
        .map(|r| {
            let mut e = vec![Complex::zero(p); n];
            e[target(k, s.d, r)] = -two_pi_i(p);
            e[2 * k] = b[r - 1].clone();
            Ok(CPoly::new(linear_solve(&a, &e)?, p))
        })
        .collect()
}

pub fn build_odd(
    v: &Potential,
    k: usize,
    free_params: &[Complex],
    ctx: &PrecisionContext,
) -> Result<RHSolution> {
    let p = ctx.prec();
    let s = setup(v, k, true, ctx)?;
    let count = s.d + 1;
    let params: Vec<Complex> = if free_params.is_empty() {
        vec![Complex::zero(p); count]
    } else if free_params.len() == count {
        free_params.to_vec()
    } else {
        return Err(Error::InvalidInput(format!(
            "odd problem has {count} free parameters, got {}",
            free_params.len()
        )));
    };
    let (alpha_formula, alpha_closed_form) = alphas(&s, k, p)?;
    let family = skew_family_from_moments(&s.mo, Beta::One, k)?;
    let lead = family
        .p(2 * k + 1)
        .to_complex()
        .add(&family.p(2 * k).to_complex().scale(&params[0]));
    let mut rows = vec![lead];
    rows.extend(odd_lower_rows(&s, k, &params[1..], p)?);
    // c_{k,0}: coefficient of p_{2k-2} once b_{k,0} p_{2k} is removed
    let rest = rows[1].sub(&family.p(2 * k).to_complex().scale(&params[1]));
    let alpha = rest.coeff(2 * k - 2);
    Ok(RHSolution {
        k,
        parity: Parity::Odd,
        d: s.d,
        rows,
        alpha,
        alpha_formula,
        alpha_closed_form,
        family,
        moments: s.mo,
    })
}

impl RHSolution {
    pub fn size(&self) -> usize {
        self.d + 1
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn jump_matrix(&self) -> JumpMatrix {
        JumpMatrix::new(&self.moments)
    }

    /// `D_j` in `Y ~ (I + O(1/z)) diag(z^{D_j})`.
    pub fn target_exponents(&self) -> Vec<i64> {
        let (k, d) = (self.k as i64, self.d as i64);
        let lead = match self.parity {
            Parity::Even => 2 * k,
            Parity::Odd => 2 * k + 1,
        };
        let mut e = vec![lead, -2 * k + d - 1];
        e.extend(std::iter::repeat_n(-1, self.d - 1));
        e
    }

    /// The same solution with `eps p_{2k}` added to the polynomial of `row`.
    pub fn perturbed(&self, row: usize, eps: &Complex) -> RHSolution {
        let mut out = self.clone();
        let bump = self.family.p(2 * self.k).to_complex().scale(eps);
        out.rows[row] = out.rows[row].add(&bump);
        out
    }

    /// `Y(z)` for `Im z != 0`.
    pub fn eval(&self, z: &Complex) -> Result<Matrix<Complex>> {
        let p = z.prec();
        let n = self.size();
        let deg = self
            .rows
            .iter()
            .filter_map(|r| r.degree())
            .max()
            .unwrap_or(0);
        let basis = self.moments.table().cauchy_basis(z, deg, self.d - 1)?;
        let mut y: Matrix<Complex> = Matrix::zeros(n, n, p);
        for (r, q) in self.rows.iter().enumerate() {
            y[(r, 0)] = q.eval(z);
            let dot = |b: &[Complex]| {
                let mut s = Complex::zero(p);
                for (c, v) in q.coeffs().iter().zip(b) {
                    s += &(c * v);
                }
                s
            };
            y[(r, 1)] = dot(&basis.w2);
            for m in 0..self.d - 1 {
                y[(r, 2 + m)] = dot(&basis.wn[m]);
            }
        }
        Ok(y)
    }

    /// `Y_+(x)` by extrapolating `Y(x + i delta)` to `delta = 0`.
    pub fn boundary_value(&self, x: &Real, upper: bool) -> Result<Matrix<Complex>> {
        let ctx = self.moments.ctx();
        let deltas = boundary_deltas(ctx);
        let n = self.size();
        let samples: Vec<Vec<Complex>> = deltas
            .iter()
            .map(|dl| {
                let im = if upper { dl.clone() } else { -dl.clone() };
                let y = self.eval(&Complex::new(x.clone(), im))?;
                Ok((0..n * n).map(|t| y[(t / n, t % n)].clone()).collect())
            })
            .collect::<Result<_>>()?;
        let v = extrapolate_to_zero(&deltas, &samples);
        Ok(Matrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
    }

    /// `Y_+(x)` from the principal value: `C_+(f) = PV(f)/(2 pi i) + f/2`.
    pub fn boundary_value_pv(&self, x: &Real) -> Result<Matrix<Complex>> {
        let ctx = self.moments.ctx();
        let p = ctx.prec();
        let n = self.size();
        let deg = self
            .rows
            .iter()
            .filter_map(|r| r.degree())
            .max()
            .unwrap_or(0);
        let plan = QuadraturePlan::for_potential(self.moments.potential(), deg, ctx);
        let table = self.moments.table();
        let v = self.moments.potential();
        let weight = |col: usize, t: &Real| -> Real {
            if col == 1 {
                crate::potweights::weight_W(v, t)
            } else {
                table.w_real(col - 2, t).unwrap_or_else(|_| Float::new(p))
            }
        };
        let inv = two_pi_i(p).recip();
        let half = Float::with_val(p, 0.5);
        let mut y: Matrix<Complex> = Matrix::zeros(n, n, p);
        for (r, q) in self.rows.iter().enumerate() {
            let xr = Complex::from_real(x);
            y[(r, 0)] = q.eval(&xr);
            let re: Vec<Real> = q.coeffs().iter().map(|c| c.re.clone()).collect();
            let im: Vec<Real> = q.coeffs().iter().map(|c| c.im.clone()).collect();
            let (qr, qi) = (Poly::new(re, p), Poly::new(im, p));
            for col in 1..n {
                let pr = cauchy_pv(|t: &Real| qr.eval(t) * weight(col, t), x, &plan)?;
                let pi = cauchy_pv(|t: &Real| qi.eval(t) * weight(col, t), x, &plan)?;
                let pv = Complex::new(pr, pi);
                let f = y[(r, 0)].scale(&Float::with_val(p, weight(col, x) * &half));
                y[(r, col)] = &(&pv * &inv) + &f;
            }
        }
        Ok(y)
    }
}

fn max_abs_complex(m: &Matrix<Complex>) -> Real {
    let p = m[(0, 0)].prec();
    let mut worst = Float::new(p);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let a = m[(i, j)].abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst
}

/// `||Y_+(x) - Y_-(x) M(x)||_inf`, boundary values by `delta` extrapolation.
pub fn jump_residual(sol: &RHSolution, x: &Real) -> Result<Real> {
    let (up, down) = rayon::join(
        || sol.boundary_value(x, true),
        || sol.boundary_value(x, false),
    );
    let (up, down) = (up?, down?);
    let m = sol.jump_matrix().eval(x)?;
    let mc: Matrix<Complex> =
        Matrix::from_fn(m.rows(), m.cols(), |i, j| Complex::from_real(&m[(i, j)]));
    Ok(max_abs_complex(&up.sub(&down.matmul(&mc))))
}

/// Jump residuals at several points, evaluated in parallel.
pub fn jump_residuals(sol: &RHSolution, xs: &[Real]) -> Result<Vec<Real>> {
    xs.par_iter().map(|x| jump_residual(sol, x)).collect()
}

/// Fitted growth exponents along the ray `arg z = theta`.
#[derive(Clone, Debug)]
pub struct ExponentFit {
    /// Least-squares slope of `log |Y_ij|` against `log R`.
    pub raw: Vec<Vec<f64>>,
    /// Slope of `log |Y_ij z^{-D_j}|`, i.e. `raw - D_j`.
    pub normalized: Vec<Vec<f64>>,
    pub target: Vec<i64>,
}

impl ExponentFit {
    /// Largest `|normalized_jj|` and largest off-diagonal `normalized_ij + 1`.
    pub fn deviations(&self) -> (f64, f64) {
        let n = self.target.len();
        let mut diag: f64 = 0.0;
        let mut off = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    diag = diag.max(self.normalized[i][j].abs());
                } else {
                    off = off.max(self.normalized[i][j] + 1.0);
                }
            }
        }
        (diag, off)
    }

    /// Diagonal within `tol` of zero, off-diagonal at most `-1 + tol`.
    pub fn matches(&self, tol: f64) -> bool {
        let (diag, off) = self.deviations();
        diag <= tol && off <= tol
    }
}

pub fn asymptotic_exponents(sol: &RHSolution, theta: f64, radii: &[f64]) -> Result<ExponentFit> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    let p = sol.moments.ctx().prec();
    let n = sol.size();
    let values: Vec<Matrix<Complex>> = radii
        .par_iter()
        .map(|r| {
            let z = Complex::new(
                Float::with_val(p, r * theta.cos()),
                Float::with_val(p, r * theta.sin()),
            );
            sol.eval(&z)
        })
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let target = sol.target_exponents();
    let mut raw = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let pts: Vec<(f64, f64)> = values
                .iter()
                .zip(&logs)
                .map(|(y, &lr)| {
                    (
                        lr,
                        crate::numerics::log10_abs(&y[(i, j)].abs()) * std::f64::consts::LN_10,
                    )
                })
                .collect();
            raw[i][j] = if pts.iter().any(|q| !q.1.is_finite()) {
                f64::NEG_INFINITY
            } else {
                crate::pfafflattice::least_squares_slope(&pts)
            };
        }
    }
    let normalized = raw
        .iter()
        .map(|row| {
            row.iter()
                .zip(&target)
                .map(|(s, &t)| s - t as f64)
                .collect()
        })
        .collect();
    Ok(ExponentFit {
        raw,
        normalized,
        target,
    })
}

/// `|<f, pi_{j+d-1}(y)>_1 - 2 <f, x^j>_2|`.
pub fn skew_inner_reduction_residual(mo: &Moments, f: &Poly, j: usize) -> Result<Real> {
    let v = mo.potential();
    let p = mo.ctx().prec();
    let lhs = mo.skew_inner_1(f, &pi_polynomial(v, j))?;
    let rhs = mo.inner_2(f, &Poly::monomial(j, Float::with_val(p, 1)))?;
    Ok((lhs - rhs * 2u32).abs())
}

/// Determinant check at off-axis points.
#[derive(Clone, Debug)]
pub struct DetReport {
    pub residual: Real,
    /// Constant term of `det Y = z + c` (odd problem), zero otherwise.
    pub c_star: Complex,
}

/// Even: `max |det Y - 1|`. Odd: `c*` from the first sample, then
/// `max |det Y(z) - z - c*|` over the rest.
pub fn det_residual(sol: &RHSolution, zs: &[Complex]) -> Result<DetReport> {
    if zs.is_empty() {
        return Err(Error::InvalidInput("no sample points".into()));
    }
    let p = zs[0].prec();
    let dets: Vec<Complex> = zs
        .par_iter()
        .map(|z| sol.eval(z).map(|y| determinant(&y)))
        .collect::<Result<_>>()?;
    let mut worst = Float::new(p);
    let c_star = match sol.parity {
        Parity::Even => {
            for d in &dets {
                let a = (d - &Complex::one(p)).abs();
                if a > worst {
                    worst = a;
                }
            }
            Complex::zero(p)
        }
        Parity::Odd => {
            let c = &dets[0] - &zs[0];
            for (d, z) in dets.iter().zip(zs).skip(1) {
                let a = (&(d - z) - &c).abs();
                if a > worst {
                    worst = a;
                }
            }
            c
        }
    };
    Ok(DetReport {
        residual: worst,
        c_star,
    })
}

/// `max |coeff(q_1 - alpha p_{2k-2} [- b_{k,0} p_{2k}])| / |alpha|`.
pub fn second_row_collapse(sol: &RHSolution, b0: Option<&Complex>) -> Real {
    let p = sol.alpha.prec();
    let mut rest = sol.rows[1].sub(&sol.family.p(2 * sol.k - 2).to_complex().scale(&sol.alpha));
    if let Some(b) = b0 {
        rest = rest.sub(&sol.family.p(2 * sol.k).to_complex().scale(b));
    }
    Float::with_val(p, rest.max_abs_coeff() / sol.alpha.abs())
}

/// `max_r` of the distance from `rows_a[r] - rows_b[r]` to `span{p_{2k}}`,
/// relative to the size of the difference.
pub fn gauge_residual(a: &RHSolution, b: &RHSolution) -> Real {
    let p = a.alpha.prec();
    let p2k = a.family.p(2 * a.k).to_complex();
    let mut worst = Float::new(p);
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let diff = ra.sub(rb);
        let c = diff.coeff(2 * a.k);
        let rest = diff.sub(&p2k.scale(&c));
        let size = Float::with_val(p, diff.max_abs_coeff().max(&Float::with_val(p, 1)));
        let r = rest.max_abs_coeff() / size;
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Orthogonality of `p_{2k}`: `max |<p_{2k}, y^j>_1|` for `j <= d-2` and
/// `max |<p_{2k}, x^j>_2|` for `j <= 2k-d`.
pub fn orthogonality_split(sol: &RHSolution) -> Result<(Real, Real)> {
    let mo = &sol.moments;
    let p = mo.ctx().prec();
    let q = sol.family.p(2 * sol.k);
    let mono = |j: usize| Poly::monomial(j, Float::with_val(p, 1));
    let mut a = Float::new(p);
    for j in 0..=sol.d - 2 {
        a = a.max(&mo.skew_inner_1(q, &mono(j))?.abs());
    }
    let mut b = Float::new(p);
    for j in 0..=2 * sol.k - sol.d {
        b = b.max(&mo.inner_2(q, &mono(j))?.abs());
    }
    Ok((a, b))
}
