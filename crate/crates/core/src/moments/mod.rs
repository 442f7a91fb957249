//! Skew moment matrices, Hankel matrices and the three inner products.
//!
//! All of them read from one [`WeightTable`], computed once per potential
//! and size and shared behind an `Arc`.

use std::fmt;
use std::sync::Arc;

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Poly, PrecisionContext, Real};
use crate::potweights::{Potential, WeightTable};

/// Which skew inner product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Beta {
    /// Orthogonal ensemble, `eps(x - y)` kernel.
    One,
    /// Symplectic ensemble, `f g' - f' g`.
    Four,
}

impl Beta {
    pub fn from_u32(b: u32) -> Result<Beta> {
        match b {
            1 => Ok(Beta::One),
            4 => Ok(Beta::Four),
            _ => Err(Error::InvalidInput(format!("beta must be 1 or 4, got {b}"))),
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            Beta::One => 1,
            Beta::Four => 4,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

/// `M_ij = <x^i, y^j>_beta`.
#[derive(Clone, Debug)]
pub struct SkewMomentMatrix {
    pub beta: Beta,
    pub entries: Matrix<Real>,
}

impl SkewMomentMatrix {
    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &Real {
        &self.entries[(i, j)]
    }

    /// Leading `n x n` block.
    pub fn leading(&self, n: usize) -> SkewMomentMatrix {
        SkewMomentMatrix {
            beta: self.beta,
            entries: self.entries.leading(n),
        }
    }
}

/// `H_ij = m_{i+j}`.
#[derive(Clone, Debug)]
pub struct HankelMatrix {
    pub entries: Matrix<Real>,
}

/// Moment data for one potential up to a fixed polynomial degree.
#[derive(Clone, Debug)]
pub struct Moments {
    table: Arc<WeightTable>,
}

impl Moments {
    /// Tables for polynomials of degree below `size`.
    pub fn new(v: &Potential, size: usize, ctx: &PrecisionContext) -> Result<Self> {
        Ok(Moments {
            table: Arc::new(WeightTable::build(v, size, ctx)?),
        })
    }

    pub fn from_table(table: Arc<WeightTable>) -> Self {
        Moments { table }
    }

    pub fn table(&self) -> &Arc<WeightTable> {
        &self.table
    }

    pub fn potential(&self) -> &Potential {
        self.table.potential()
    }

    pub fn ctx(&self) -> &PrecisionContext {
        self.table.ctx()
    }

    /// Largest size of skew moment matrix available.
    pub fn size(&self) -> usize {
        self.table.size()
    }

    fn prec(&self) -> u32 {
        self.ctx().prec()
    }

    /// `m_i = int x^i e^{-V}`.
    pub fn m(&self, i: usize) -> Result<&Real> {
        self.table.m(i)
    }

    /// `mu_i = int x^i e^{-2V}`.
    pub fn mu(&self, i: usize) -> Result<&Real> {
        self.table.mu(i)
    }

    /// Entry `M_ij` of the skew moment matrix.
    pub fn skew_entry(&self, beta: Beta, i: usize, j: usize) -> Result<Real> {
        let p = self.prec();
        match beta {
            Beta::One => {
                if i == j {
                    self.table.wm(j, i)?;
                    Ok(Float::new(p))
                } else if i < j {
                    Ok(self.table.wm(j, i)?.clone())
                } else {
                    Ok(-self.table.wm(i, j)?.clone())
                }
            }
            Beta::Four => {
                if i + j == 0 {
                    return Ok(Float::new(p));
                }
                let m = self.m(i + j - 1)?;
                Ok(Float::with_val(p, m * (j as i64 - i as i64)))
            }
        }
    }

    pub fn skew_matrix(&self, beta: Beta, n: usize) -> Result<SkewMomentMatrix> {
        if n > self.size() {
            return Err(Error::MomentRangeExceeded {
                needed: n,
                available: self.size(),
            });
        }
        let p = self.prec();
        let mut entries = Matrix::zeros(n, n, p);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.skew_entry(beta, i, j)?;
                entries[(j, i)] = -v.clone();
                entries[(i, j)] = v;
            }
        }
        Ok(SkewMomentMatrix { beta, entries })
    }

    pub fn hankel(&self, n: usize) -> Result<HankelMatrix> {
        let p = self.prec();
        if n > 0 {
            self.m(2 * n - 2)?;
        }
        let mut entries = Matrix::zeros(n, n, p);
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] = self.m(i + j)?.clone();
            }
        }
        Ok(HankelMatrix { entries })
    }

    fn bilinear(
        &self,
        f: &Poly,
        g: &Poly,
        entry: impl Fn(usize, usize) -> Result<Real>,
    ) -> Result<Real> {
        let mut acc = Float::new(self.prec());
        for (i, a) in f.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.coeffs().iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc += Float::with_val(self.prec(), a * b) * entry(i, j)?;
            }
        }
        Ok(acc)
    }

    /// `<f, g>_1 = int int f(x) g(y) eps(x - y) e^{-V(x) - V(y)}`.
    pub fn skew_inner_1(&self, f: &Poly, g: &Poly) -> Result<Real> {
        self.bilinear(f, g, |i, j| self.skew_entry(Beta::One, i, j))
    }

    /// `<f, g>_2 = int f g e^{-2V}`.
    pub fn inner_2(&self, f: &Poly, g: &Poly) -> Result<Real> {
        self.bilinear(f, g, |i, j| self.mu(i + j).cloned())
    }

    /// `<f, g>_4 = int (f g' - f' g) e^{-V}`.
    pub fn skew_inner_4(&self, f: &Poly, g: &Poly) -> Result<Real> {
        self.bilinear(f, g, |i, j| self.skew_entry(Beta::Four, i, j))
    }

    pub fn skew_inner(&self, beta: Beta, f: &Poly, g: &Poly) -> Result<Real> {
        match beta {
            Beta::One => self.skew_inner_1(f, g),
            Beta::Four => self.skew_inner_4(f, g),
        }
    }

    /// `int f(x) w_n(x) dx`.
    pub fn against_w(&self, f: &Poly, n: usize) -> Result<Real> {
        let mut acc = Float::new(self.prec());
        for (i, a) in f.coeffs().iter().enumerate() {
            acc += Float::with_val(self.prec(), a * self.table.wm(n, i)?);
        }
        Ok(acc)
    }
}

/// Skew moment matrix of size `n` for `V`.
pub fn build_skew_moment_matrix(
    v: &Potential,
    beta: Beta,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<SkewMomentMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "moment matrix size must be at least 2".into(),
        ));
    }
    Moments::new(v, n, ctx)?.skew_matrix(beta, n)
}
