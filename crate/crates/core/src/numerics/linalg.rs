use std::fmt;
use std::ops::{Index, IndexMut};

use rug::Float;

use super::{Complex, Real};
use crate::error::{Error, Result};

/// Field operations needed by the dense solvers.
pub trait Scalar: Clone + Send + Sync + fmt::Debug {
    fn zero_with(prec: u32) -> Self;
    fn one_with(prec: u32) -> Self;
    fn precision(&self) -> u32;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn magnitude(&self) -> Real;
}

impl Scalar for Real {
    fn zero_with(prec: u32) -> Self {
        Float::new(prec)
    }
    fn one_with(prec: u32) -> Self {
        Float::with_val(prec, 1)
    }
    fn precision(&self) -> u32 {
        self.prec()
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn magnitude(&self) -> Real {
        self.clone().abs()
    }
}

impl Scalar for Complex {
    fn zero_with(prec: u32) -> Self {
        Complex::zero(prec)
    }
    fn one_with(prec: u32) -> Self {
        Complex::one(prec)
    }
    fn precision(&self) -> u32 {
        self.prec()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn magnitude(&self) -> Real {
        self.abs()
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero_with(prec); rows * cols],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = T::one_with(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Principal or general submatrix on the given index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    /// Leading `n x n` block.
    pub fn leading(&self, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| self[(i, j)].clone())
    }

    pub fn matmul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matmul");
        let prec = self.data.first().map_or(64, |x| x.precision());
        let mut out: Matrix<T> = Matrix::zeros(self.rows, o.cols, prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.magnitude().is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.mul(&o[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&t);
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&o[(i, j)]))
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&o[(i, j)]))
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero_with(v[0].precision());
                for (a, x) in self.row(i).iter().zip(v) {
                    acc = acc.add(&a.mul(x));
                }
                acc
            })
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> Real {
        let prec = self.data.first().map_or(64, |x| x.precision());
        let mut m = Float::new(prec);
        for x in &self.data {
            let a = x.magnitude();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> Real {
        let prec = self.data.first().map_or(64, |x| x.precision());
        let mut m = Float::new(prec);
        for i in 0..self.rows {
            let mut s = Float::new(prec);
            for x in self.row(i) {
                s += x.magnitude();
            }
            if s > m {
                m = s;
            }
        }
        m
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve `A x = b` by Gaussian elimination with full pivoting.
///
/// A pivot smaller than `max|A| * 2^-(prec - 16)` is treated as zero.
pub fn linear_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::InvalidInput(format!(
            "linear_solve needs a square system, got {}x{} with rhs {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = b[0].precision();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let threshold = a.max_abs() >> (prec.saturating_sub(16));

    for k in 0..n {
        let (mut pi, mut pj) = (k, k);
        let mut best = Float::new(prec);
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].magnitude();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best.is_zero() || best <= threshold {
            return Err(Error::SingularSystem(format!(
                "pivot {k} of {n} has magnitude {:e}",
                best.to_f64()
            )));
        }
        if pi != k {
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(pi, j)].clone();
                m[(pi, j)] = tmp;
            }
            rhs.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                let tmp = m[(i, k)].clone();
                m[(i, k)] = m[(i, pj)].clone();
                m[(i, pj)] = tmp;
            }
            col_perm.swap(k, pj);
        }
        let pivot = m[(k, k)].clone();
        for i in (k + 1)..n {
            let factor = m[(i, k)].div(&pivot);
            if factor.magnitude().is_zero() {
                continue;
            }
            for j in k..n {
                let t = factor.mul(&m[(k, j)]);
                m[(i, j)] = m[(i, j)].sub(&t);
            }
            let t = factor.mul(&rhs[k]);
            rhs[i] = rhs[i].sub(&t);
        }
    }

    let mut y = vec![T::zero_with(prec); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in (k + 1)..n {
            acc = acc.sub(&m[(k, j)].mul(&y[j]));
        }
        y[k] = acc.div(&m[(k, k)]);
    }
    let mut x = vec![T::zero_with(prec); n];
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k].clone();
    }
    Ok(x)
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    assert!(a.is_square());
    let n = a.rows();
    let prec = a.data.first().map_or(64, |x| x.precision());
    let mut m = a.clone();
    let mut det = T::one_with(prec);
    for k in 0..n {
        let mut p = k;
        let mut best = m[(k, k)].magnitude();
        for i in (k + 1)..n {
            let v = m[(i, k)].magnitude();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best.is_zero() {
            return T::zero_with(prec);
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(p, j)].clone();
                m[(p, j)] = tmp;
            }
            det = det.neg();
        }
        let pivot = m[(k, k)].clone();
        det = det.mul(&pivot);
        for i in (k + 1)..n {
            let factor = m[(i, k)].div(&pivot);
            for j in k..n {
                let t = factor.mul(&m[(k, j)]);
                m[(i, j)] = m[(i, j)].sub(&t);
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 256;

    fn r(x: f64) -> Real {
        Float::with_val(P, x)
    }

    fn residual(a: &Matrix<Real>, x: &[Real], b: &[Real]) -> f64 {
        let ax = a.mul_vec(x);
        let mut worst = Float::new(P);
        for (u, v) in ax.iter().zip(b) {
            let d = Float::with_val(P, u - v).abs();
            if d > worst {
                worst = d;
            }
        }
        worst.to_f64()
    }

    #[test]
    fn identity_and_permutation() {
        let id = Matrix::<Real>::identity(3, P);
        let b = vec![r(1.0), r(2.0), r(3.0)];
        assert_eq!(linear_solve(&id, &b).unwrap(), b);

        let swap = Matrix::from_fn(2, 2, |i, j| r(if i != j { 1.0 } else { 0.0 }));
        let x = linear_solve(&swap, &[r(5.0), r(7.0)]).unwrap();
        assert_eq!(x, vec![r(7.0), r(5.0)]);
    }

    #[test]
    fn hilbert_block_recovers_known_solution() {
        let h = Matrix::from_fn(2, 2, |i, j| r(1.0) / r((i + j + 1) as f64));
        let b = h.mul_vec(&[r(1.0), r(1.0)]);
        let x = linear_solve(&h, &b).unwrap();
        for xi in x {
            assert!(Float::with_val(P, xi - 1u32).abs() < 1e-20);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let a = Matrix::from_fn(2, 2, |_, _| r(1.0));
        assert!(matches!(
            linear_solve(&a, &[r(1.0), r(2.0)]),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn random_well_conditioned_systems_up_to_sixty() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[5usize, 20, 60] {
            // diagonally dominant, so well conditioned
            let a = Matrix::from_fn(n, n, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                r(if i == j { v + 2.0 * n as f64 } else { v })
            });
            let b: Vec<Real> = (0..n).map(|_| r(rng.gen_range(-1.0..1.0))).collect();
            let x = linear_solve(&a, &b).unwrap();
            assert!(residual(&a, &x, &b) <= 1e-20);
        }
    }

    #[test]
    fn complex_solve_and_determinant() {
        let c = |re: f64, im: f64| Complex::new(r(re), r(im));
        let a = Matrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 1.0),
            (0, 1) => c(0.0, 2.0),
            (1, 0) => c(3.0, 0.0),
            _ => c(1.0, -1.0),
        });
        // det = (1+i)(1-i) - (2i)(3) = 2 - 6i
        let d = determinant(&a);
        assert!((&d - &c(2.0, -6.0)).abs() < 1e-60);
        let x = linear_solve(&a, &[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let ax = a.mul_vec(&x);
        assert!((&ax[0] - &c(1.0, 0.0)).abs() < 1e-60);
        assert!((&ax[1] - &c(0.0, 1.0)).abs() < 1e-60);
    }
}
