//! Skew elimination, Pfaffians and the polynomial families.
//!
//! Skew elimination works on 2x2 pivot blocks in natural order, without
//! exchanges. Applied to the moment matrix it produces a block
//! unit-lower-triangular `C` with `C M C^T = diag(d_j J)`; the rows of `C`
//! are the monic skew-orthogonal polynomials and `d_j = h_j`.

use rug::Float;

use crate::error::{Error, Result};
use crate::moments::{Beta, Moments, SkewMomentMatrix};
use crate::numerics::{Matrix, Poly, PrecisionContext, Real};
use crate::potweights::Potential;

/// `M = L (d_j J) L^T` with `L` block unit-lower-triangular.
#[derive(Clone, Debug)]
pub struct SkewFactorization {
    pub l: Matrix<Real>,
    /// `L^{-1}`; its rows are the monic skew-orthogonal coefficient vectors.
    pub l_inv: Matrix<Real>,
    pub d: Vec<Real>,
}

impl SkewFactorization {
    pub fn size(&self) -> usize {
        self.l.rows()
    }

    /// The block-diagonal middle factor `D^{1/2} J D^{1/2}`, i.e. `d_j J` blockwise.
    pub fn middle(&self) -> Matrix<Real> {
        let n = self.size();
        let p = self.d[0].prec();
        let mut m: Matrix<Real> = Matrix::zeros(n, n, p);
        for (b, d) in self.d.iter().enumerate() {
            m[(2 * b, 2 * b + 1)] = d.clone();
            m[(2 * b + 1, 2 * b)] = -d.clone();
        }
        m
    }

    /// `||M - L D^{1/2} J D^{1/2} L^T||_inf / ||M||_inf`.
    pub fn reconstruction_error(&self, m: &Matrix<Real>) -> Real {
        let r = self.l.matmul(&self.middle()).matmul(&self.l.transpose());
        let err = m.sub(&r).norm_inf();
        err / m.norm_inf()
    }
}

/// Pivot threshold relative to the matrix scale.
fn negligible(a: &Real, scale: &Real) -> bool {
    let bits = a.prec().saturating_sub(16);
    a.clone().abs() <= Float::with_val(a.prec(), scale >> bits)
}

/// Congruence `A <- E A E^T` that clears columns `2b, 2b+1` below the pivot
/// block, mirrored on `c`.
fn eliminate_block(a: &mut Matrix<Real>, c: Option<&mut Matrix<Real>>, b: usize) {
    let n = a.rows();
    let p = a[(0, 0)].prec();
    let (r0, r1) = (2 * b, 2 * b + 1);
    let piv = a[(r0, r1)].clone();
    let mut ops = Vec::new();
    for r in r1 + 1..n {
        // row_r -= alpha row_{2b} + beta row_{2b+1}
        let alpha = Float::with_val(p, &a[(r, r1)] / &piv);
        let beta = -Float::with_val(p, &a[(r, r0)] / &piv);
        ops.push((r, alpha, beta));
    }
    for (r, alpha, beta) in &ops {
        for col in 0..n {
            let t = Float::with_val(p, alpha * &a[(r0, col)])
                + Float::with_val(p, beta * &a[(r1, col)]);
            a[(*r, col)] -= t;
        }
    }
    for (r, alpha, beta) in &ops {
        for row in 0..n {
            let t = Float::with_val(p, alpha * &a[(row, r0)])
                + Float::with_val(p, beta * &a[(row, r1)]);
            a[(row, *r)] -= t;
        }
    }
    if let Some(c) = c {
        for (r, alpha, beta) in &ops {
            for col in 0..c.cols() {
                let t = Float::with_val(p, alpha * &c[(r0, col)])
                    + Float::with_val(p, beta * &c[(r1, col)]);
                c[(*r, col)] -= t;
            }
        }
    }
}

/// Natural-order 2x2 block skew elimination.
pub fn skew_eliminate(m: &SkewMomentMatrix) -> Result<SkewFactorization> {
    skew_eliminate_matrix(&m.entries)
}

pub fn skew_eliminate_matrix(m: &Matrix<Real>) -> Result<SkewFactorization> {
    let n = m.rows();
    if n == 0 || n % 2 == 1 || !m.is_square() {
        return Err(Error::InvalidInput(
            "skew elimination needs an even square matrix".into(),
        ));
    }
    let p = m[(0, 0)].prec();
    let scale = m.max_abs();
    let mut a = m.clone();
    let mut c = Matrix::identity(n, p);
    let mut d = Vec::with_capacity(n / 2);
    for b in 0..n / 2 {
        let piv = a[(2 * b, 2 * b + 1)].clone();
        if piv.is_zero() || negligible(&piv, &scale) {
            return Err(Error::DegenerateInnerProduct(format!(
                "pivot block {b} is singular (|a| = {:e})",
                piv.to_f64().abs()
            )));
        }
        eliminate_block(&mut a, Some(&mut c), b);
        d.push(piv);
    }
    let l = invert_unit_lower(&c);
    Ok(SkewFactorization { l, l_inv: c, d })
}

fn invert_unit_lower(c: &Matrix<Real>) -> Matrix<Real> {
    let n = c.rows();
    let p = c[(0, 0)].prec();
    let mut inv = Matrix::identity(n, p);
    for i in 0..n {
        for j in 0..i {
            let mut s = Float::new(p);
            for k in j..i {
                s += Float::with_val(p, &c[(i, k)] * &inv[(k, j)]);
            }
            inv[(i, j)] = -s;
        }
    }
    inv
}

/// Pfaffian by full-pivot skew elimination; each symmetric index swap flips
/// the sign.
pub fn pfaffian(m: &Matrix<Real>) -> Real {
    let n = m.rows();
    let p = if n > 0 { m[(0, 0)].prec() } else { 64 };
    if n % 2 == 1 {
        return Float::new(p);
    }
    let mut a = m.clone();
    let mut pf = Float::with_val(p, 1);
    for b in 0..n / 2 {
        let (r0, r1) = (2 * b, 2 * b + 1);
        let mut best = (r0, r1);
        let mut best_abs = Float::new(p);
        for i in r0..n {
            for j in i + 1..n {
                let v = Float::with_val(p, a[(i, j)].abs_ref());
                if v > best_abs {
                    best_abs = v;
                    best = (i, j);
                }
            }
        }
        if best_abs.is_zero() {
            return Float::new(p);
        }
        let (i, mut j) = best;
        if i != r0 {
            swap_symmetric(&mut a, r0, i);
            pf = -pf;
            if j == r0 {
                j = i;
            }
        }
        if j != r1 {
            swap_symmetric(&mut a, r1, j);
            pf = -pf;
        }
        pf *= &a[(r0, r1)];
        eliminate_block(&mut a, None, b);
    }
    pf
}

fn swap_symmetric(a: &mut Matrix<Real>, i: usize, j: usize) {
    let n = a.rows();
    for k in 0..n {
        let t = a[(i, k)].clone();
        a[(i, k)] = a[(j, k)].clone();
        a[(j, k)] = t;
    }
    for k in 0..n {
        let t = a[(k, i)].clone();
        a[(k, i)] = a[(k, j)].clone();
        a[(k, j)] = t;
    }
}

/// Monic skew-orthogonal polynomials `p_0 .. p_{2 k_max + 1}` and their norms.
#[derive(Clone, Debug)]
pub struct SkewFamily {
    pub beta: Beta,
    pub polys: Vec<Poly>,
    /// `h_j = <p_{2j}, p_{2j+1}>_beta`, signed.
    pub h: Vec<Real>,
    moments: SkewMomentMatrix,
}

impl SkewFamily {
    pub fn k_max(&self) -> usize {
        self.h.len() - 1
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn p(&self, j: usize) -> &Poly {
        &self.polys[j]
    }

    pub fn moment_matrix(&self) -> &SkewMomentMatrix {
        &self.moments
    }

    /// `sign(h_j)`: `-1` for every `j` under the `sign(x - y)` kernel with
    /// Gaussian weight.
    pub fn sign(&self, j: usize) -> i32 {
        if self.h[j] < 0 {
            -1
        } else {
            1
        }
    }

    /// `p_j / |h_{j/2}|^{1/2}`.
    pub fn normalized(&self, j: usize) -> Poly {
        let s = Float::with_val(self.h[j / 2].prec(), self.h[j / 2].abs_ref())
            .sqrt()
            .recip();
        self.polys[j].scale(&s)
    }

    /// `<p_i, p_j>_beta` from the stored moment matrix.
    pub fn gram(&self) -> Matrix<Real> {
        let n = self.polys.len();
        let c = coefficient_matrix(&self.polys, n);
        c.matmul(&self.moments.entries).matmul(&c.transpose())
    }
}

fn coefficient_matrix(polys: &[Poly], n: usize) -> Matrix<Real> {
    Matrix::from_fn(polys.len(), n, |i, j| polys[i].coeff(j))
}

/// Family for `k = 0..=k_max` from precomputed moments.
pub fn skew_family_from_moments(mo: &Moments, beta: Beta, k_max: usize) -> Result<SkewFamily> {
    let n = 2 * k_max + 2;
    let m = mo.skew_matrix(beta, n)?;
    family_from_matrix(&m)
}

/// Family from an explicit skew moment matrix of even size.
pub fn family_from_matrix(m: &SkewMomentMatrix) -> Result<SkewFamily> {
    let f = skew_eliminate(m)?;
    let n = m.size();
    let p = m.get(0, 0).prec();
    let polys = (0..n)
        .map(|j| {
            let mut coeffs: Vec<Real> = (0..=j).map(|i| f.l_inv[(j, i)].clone()).collect();
            if j % 2 == 1 {
                coeffs[j - 1] = Float::new(p);
            }
            Poly::new(coeffs, p)
        })
        .collect();
    Ok(SkewFamily {
        beta: m.beta,
        polys,
        h: f.d,
        moments: m.clone(),
    })
}

/// Skew-orthogonal family for `V`, `k = 0..=k_max`.
pub fn skew_orthogonal_family(
    v: &Potential,
    beta: Beta,
    k_max: usize,
    ctx: &PrecisionContext,
) -> Result<SkewFamily> {
    let mo = Moments::new(v, 2 * k_max + 2, ctx)?;
    skew_family_from_moments(&mo, beta, k_max)
}

/// Pfaffian of `M[idx, idx]` bordered by a unit vector at border position
/// `pos` (among `idx`) inserted as row/column `at`.
fn bordered_pfaffian(m: &SkewMomentMatrix, idx: &[usize], at: usize, pos: usize) -> Real {
    let k = idx.len() + 1;
    let p = m.get(0, 0).prec();
    // map matrix slot -> Some(moment index) or None for the border
    let slots: Vec<Option<usize>> = (0..k)
        .map(|s| match s.cmp(&at) {
            std::cmp::Ordering::Less => Some(s),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(s - 1),
        })
        .collect();
    let a = Matrix::from_fn(k, k, |r, c| match (slots[r], slots[c]) {
        (Some(i), Some(j)) => m.get(idx[i], idx[j]).clone(),
        (Some(i), None) => Float::with_val(p, (i == pos) as u32),
        (None, Some(j)) => -Float::with_val(p, (j == pos) as u32),
        (None, None) => Float::new(p),
    });
    pfaffian(&a)
}

/// `p_{2j}` and `p_{2j+1}` from bordered Pfaffians of the moment matrix,
/// normalized to be monic.
///
/// `p_{2j}` borders `M[0..=2j]` by `(1, x, .., x^{2j})`; `p_{2j+1}` borders
/// `M` on the indices `0..2j-1, 2j+1` by the matching powers of `x`.
pub fn pfaffian_polynomials(m: &SkewMomentMatrix, j: usize) -> Result<(Poly, Poly)> {
    if 2 * j + 2 > m.size() {
        return Err(Error::MomentRangeExceeded {
            needed: 2 * j + 2,
            available: m.size(),
        });
    }
    let p = m.get(0, 0).prec();
    let even_idx: Vec<usize> = (0..=2 * j).collect();
    let even: Vec<Real> = (0..even_idx.len())
        .map(|pos| bordered_pfaffian(m, &even_idx, even_idx.len(), pos))
        .collect();
    let mut odd_idx: Vec<usize> = (0..2 * j).collect();
    odd_idx.push(2 * j + 1);
    let at = odd_idx.len() - 1;
    let mut odd = vec![Float::new(p); 2 * j + 2];
    for (pos, &power) in odd_idx.iter().enumerate() {
        odd[power] = bordered_pfaffian(m, &odd_idx, at, pos);
    }
    let monic = |coeffs: Vec<Real>| -> Result<Poly> {
        let lead = coeffs.last().cloned().unwrap_or_else(|| Float::new(p));
        if lead.is_zero() {
            return Err(Error::DegenerateInnerProduct(format!(
                "bordered Pfaffian for j = {j} has zero leading coefficient"
            )));
        }
        let inv = Float::with_val(p, lead.recip_ref());
        Ok(Poly::new(coeffs, p).scale(&inv))
    };
    Ok((monic(even)?, monic(odd)?))
}

/// Monic orthogonal polynomials for `e^{-V}` and their norms.
#[derive(Clone, Debug)]
pub struct OrthogonalFamily {
    pub polys: Vec<Poly>,
    pub h: Vec<Real>,
}

/// `P_0 .. P_{n_max}` from `H = R^T R`; column `j` of `R^{-1}` is the
/// orthonormal `P_j / sqrt(h_j)`.
pub fn orthogonal_family(mo: &Moments, n_max: usize) -> Result<OrthogonalFamily> {
    let n = n_max + 1;
    let h = mo.hankel(n)?.entries;
    let p = mo.ctx().prec();
    let mut r: Matrix<Real> = Matrix::zeros(n, n, p);
    for j in 0..n {
        let mut s = h[(j, j)].clone();
        for k in 0..j {
            s -= Float::with_val(p, r[(k, j)].square_ref());
        }
        if s <= 0 {
            return Err(Error::DegenerateInnerProduct(format!(
                "Hankel matrix is not positive definite at order {j}"
            )));
        }
        let rjj = s.sqrt();
        for i in j + 1..n {
            let mut t = h[(j, i)].clone();
            for k in 0..j {
                t -= Float::with_val(p, &r[(k, j)] * &r[(k, i)]);
            }
            r[(j, i)] = t / &rjj;
        }
        r[(j, j)] = rjj;
    }
    // R^{-1} by back substitution, column by column
    let mut inv: Matrix<Real> = Matrix::zeros(n, n, p);
    for j in 0..n {
        inv[(j, j)] = Float::with_val(p, r[(j, j)].recip_ref());
        for i in (0..j).rev() {
            let mut s = Float::new(p);
            for k in i + 1..=j {
                s += Float::with_val(p, &r[(i, k)] * &inv[(k, j)]);
            }
            inv[(i, j)] = -s / &r[(i, i)];
        }
    }
    let mut polys = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for j in 0..n {
        let lead = inv[(j, j)].clone();
        let coeffs: Vec<Real> = (0..=j)
            .map(|i| Float::with_val(p, &inv[(i, j)] / &lead))
            .collect();
        polys.push(Poly::new(coeffs, p));
        norms.push(Float::with_val(p, r[(j, j)].square_ref()));
    }
    Ok(OrthogonalFamily { polys, h: norms })
}

/// `max |G_ij - E_ij| / max |h_j|` with `E` the block form
/// `E_{2j,2j+1} = h_j = -E_{2j+1,2j}`.
pub fn gram_residual(family: &SkewFamily) -> Real {
    let g = family.gram();
    let p = family.h[0].prec();
    let n = g.rows();
    let mut worst = Float::new(p);
    for i in 0..n {
        for j in 0..n {
            let expect = if i % 2 == 0 && j == i + 1 {
                family.h[i / 2].clone()
            } else if j % 2 == 0 && i == j + 1 {
                -family.h[j / 2].clone()
            } else {
                Float::new(p)
            };
            let d = Float::with_val(p, &g[(i, j)] - &expect).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    let hmax = crate::numerics::max_abs(family.h.iter(), p);
    worst / hmax
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 256;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn r(x: f64) -> Real {
        Float::with_val(P, x)
    }

    fn skew_from(upper: &[(usize, usize, f64)], n: usize) -> Matrix<Real> {
        let mut m = Matrix::zeros(n, n, P);
        for &(i, j, v) in upper {
            m[(i, j)] = r(v);
            m[(j, i)] = r(-v);
        }
        m
    }

    fn random_skew(n: usize, seed: u64) -> Matrix<Real> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n, n, P);
        for i in 0..n {
            for j in i + 1..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = r(v);
                m[(j, i)] = r(-v);
            }
        }
        m
    }

    fn gaussian() -> Potential {
        Potential::from_f64s(&[0.0, 0.0, 0.5], &ctx()).unwrap()
    }

    #[test]
    fn two_by_two_is_already_normal_form() {
        let m = skew_from(&[(0, 1, 3.0)], 2);
        let f = skew_eliminate_matrix(&m).unwrap();
        assert_eq!(f.l, Matrix::identity(2, P));
        assert_eq!(f.d, vec![r(3.0)]);
        let zero = skew_from(&[(0, 1, 0.0)], 2);
        assert!(matches!(
            skew_eliminate_matrix(&zero),
            Err(Error::DegenerateInnerProduct(_))
        ));
    }

    #[test]
    fn factorization_reconstructs_random_matrices() {
        for seed in 0..4 {
            let m = random_skew(8, seed);
            let f = skew_eliminate_matrix(&m).unwrap();
            assert!(f.reconstruction_error(&m) < 1e-60);
            for b in 0..4 {
                assert_eq!(f.l[(2 * b, 2 * b + 1)], 0);
                assert_eq!(f.l[(2 * b, 2 * b)], 1);
                assert_eq!(f.l[(2 * b + 1, 2 * b + 1)], 1);
            }
        }
    }

    #[test]
    fn pfaffian_examples() {
        assert_eq!(pfaffian(&skew_from(&[(0, 1, 2.5)], 2)), 2.5);
        let (a12, a13, a14, a23, a24, a34) = (1.5, -2.0, 0.25, 3.0, -1.0, 0.5);
        let m = skew_from(
            &[
                (0, 1, a12),
                (0, 2, a13),
                (0, 3, a14),
                (1, 2, a23),
                (1, 3, a24),
                (2, 3, a34),
            ],
            4,
        );
        let expect = a12 * a34 - a13 * a24 + a14 * a23;
        assert!(Float::with_val(P, pfaffian(&m) - expect).abs() < 1e-60);
        for seed in 0..3 {
            let m = random_skew(6, 100 + seed);
            let pf = pfaffian(&m);
            let det = crate::numerics::determinant(&m);
            let d = Float::with_val(P, pf.square_ref()) - &det;
            assert!(d.abs() < Float::with_val(P, det.abs_ref()) * 1e-60 + 1e-70);
        }
        // a zero pivot forces a row exchange but not a zero Pfaffian
        let m = skew_from(&[(0, 2, 1.0), (1, 3, 1.0)], 4);
        assert_eq!(pfaffian(&m), -1);
    }

    fn skew_of(vals: &[f64], n: usize) -> Matrix<Real> {
        let mut m = Matrix::zeros(n, n, P);
        let mut it = vals.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                m[(i, j)] = r(v);
                m[(j, i)] = r(-v);
            }
        }
        m
    }

    proptest::proptest! {
        #[test]
        fn pfaffian_squares_to_determinant(
            half in 1usize..5,
            vals in proptest::collection::vec(-2.0f64..2.0, 28),
            c in 0.25f64..4.0,
        ) {
            let n = 2 * half;
            let m = skew_of(&vals, n);
            let pf = pfaffian(&m);
            let det = crate::numerics::determinant(&m);
            let sq = Float::with_val(P, pf.square_ref());
            let scale = Float::with_val(P, det.abs_ref()) + 1;
            proptest::prop_assert!(Float::with_val(P, &sq - &det).abs() < scale * 1e-60);
            // Pf(cA) = c^{n/2} Pf(A)
            let cm = m.map(|v| Float::with_val(P, v * c));
            let expect = Float::with_val(P, &pf * crate::numerics::powi(&r(c), half as u32));
            let err = Float::with_val(P, pfaffian(&cm) - &expect).abs();
            proptest::prop_assert!(err < (Float::with_val(P, expect.abs_ref()) + 1) * 1e-60);
        }

        #[test]
        fn elimination_reconstructs(vals in proptest::collection::vec(-2.0f64..2.0, 28)) {
            let m = skew_of(&vals, 8);
            if let Ok(f) = skew_eliminate_matrix(&m) {
                proptest::prop_assert!(f.reconstruction_error(&m) < 1e-50);
            }
        }
    }

    #[test]
    fn gaussian_goe_family() {
        let c = ctx();
        let fam = skew_orthogonal_family(&gaussian(), Beta::One, 2, &c).unwrap();
        assert_eq!(*fam.p(0), Poly::one(P));
        assert!(fam.p(1).max_coeff_diff(&Poly::from_f64s(&[0.0, 1.0], P)) < 1e-70);
        let p2 = Poly::from_f64s(&[-0.5, 0.0, 1.0], P);
        let p3 = Poly::from_f64s(&[0.0, -2.5, 0.0, 1.0], P);
        assert!(fam.p(2).max_coeff_diff(&p2) < 1e-25);
        assert!(fam.p(3).max_coeff_diff(&p3) < 1e-25);
        assert!(fam.p(3).coeff(2).is_zero());
        for j in 0..=2 {
            assert_eq!(fam.sign(j), -1);
        }
        assert!(gram_residual(&fam) < 1e-20);
    }

    #[test]
    fn gse_family_gram_and_parity() {
        let c = ctx();
        let fam = skew_orthogonal_family(&gaussian(), Beta::Four, 4, &c).unwrap();
        assert!(gram_residual(&fam) < 1e-20);
        assert!(fam.h.iter().all(|h| *h > 0));
        for (j, p) in fam.polys.iter().enumerate() {
            for (i, a) in p.coeffs().iter().enumerate() {
                if (i + j) % 2 == 1 {
                    assert!(a.clone().abs() < 1e-25, "p_{j} coefficient {i}");
                }
            }
        }
    }

    #[test]
    fn perturbed_family_is_detected() {
        let c = ctx();
        let mut fam = skew_orthogonal_family(&gaussian(), Beta::One, 2, &c).unwrap();
        let x = Poly::from_f64s(&[0.0, 1.0], P);
        let lower = {
            let mo = Moments::new(&gaussian(), 6, &c).unwrap();
            let v = mo.skew_inner_1(&x, fam.p(1)).unwrap().abs();
            v / crate::numerics::max_abs(fam.h.iter(), P)
        };
        fam.polys[2] = &fam.polys[2] + &x;
        assert!(gram_residual(&fam) >= lower);
        assert!(gram_residual(&fam) > 1e-3);
    }

    #[test]
    fn bordered_pfaffians_match_elimination() {
        let c = ctx();
        let v = Potential::from_f64s(&[0.0, 0.0, 0.5, 0.0, 1.0], &c).unwrap();
        for beta in [Beta::One, Beta::Four] {
            let fam = skew_orthogonal_family(&v, beta, 3, &c).unwrap();
            let (e0, o0) = pfaffian_polynomials(fam.moment_matrix(), 0).unwrap();
            assert_eq!(e0, Poly::one(P));
            assert!(o0.max_coeff_diff(fam.p(1)) < 1e-60);
            for j in 0..=3 {
                let (e, o) = pfaffian_polynomials(fam.moment_matrix(), j).unwrap();
                assert!(e.max_coeff_diff(fam.p(2 * j)) < 1e-20, "even {j}");
                assert!(o.max_coeff_diff(fam.p(2 * j + 1)) < 1e-20, "odd {j}");
            }
        }
    }

    #[test]
    fn hermite_oracle() {
        let c = ctx();
        let mo = Moments::new(&gaussian(), 6, &c).unwrap();
        let fam = orthogonal_family(&mo, 6).unwrap();
        assert_eq!(fam.polys[0], Poly::one(P));
        assert!(fam.polys[1].max_coeff_diff(&Poly::from_f64s(&[0.0, 1.0], P)) < 1e-28);
        assert!(fam.polys[2].max_coeff_diff(&Poly::from_f64s(&[-1.0, 0.0, 1.0], P)) < 1e-28);
        assert!(fam.polys[3].max_coeff_diff(&Poly::from_f64s(&[0.0, -3.0, 0.0, 1.0], P)) < 1e-28);
        // x P_j - P_{j+1} = j P_{j-1} for the probabilists' Hermite family
        let x = Poly::from_f64s(&[0.0, 1.0], P);
        for j in 1..6 {
            let lhs = &(&x * &fam.polys[j]) - &fam.polys[j + 1];
            let rhs = fam.polys[j - 1].scale(&r(j as f64));
            assert!(lhs.max_coeff_diff(&rhs) < 1e-25);
        }
    }
}
