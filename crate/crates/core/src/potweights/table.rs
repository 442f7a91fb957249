use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;

use super::Potential;
use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionContext, Real};
use crate::quadrature::{tanh_sinh, GaussLegendre};

const GL_ORDER: usize = 24;
const MIN_LEVEL: u32 = 5;
const MAX_LEVEL: u32 = 13;
const CHUNK: usize = 32;
/// Pole distance, in local node spacings, below which the trapezoid sum for a
/// Cauchy kernel is corrected by singularity subtraction.
const NEAR_SPACINGS: f64 = 14.0;
/// Longest straight piece used when integrating off the nodes.
const PIECE: f64 = 0.125;

/// Tabulated weights on a tanh-sinh grid over `[-R, R]`.
///
/// Holds `e^{-V}` and `d_n = int_{-inf}^x - int_x^inf` of `y^n e^{-V}` at every
/// node where the integrands are not negligible, for `n < size`, together
/// with the one-dimensional moments
///
/// * `m_i = int x^i e^{-V}` and `mu_i = int x^i e^{-2V}` for `i <= 2 size + 1`,
/// * `int x^i w_n` for `i, n < size`.
///
/// The level is raised until every tabulated moment agrees with its
/// next-coarser-level estimate, and the node-gap integrals behind `d_n` sum
/// to the rule's `m_n`.
#[derive(Clone, Debug)]
pub struct WeightTable {
    potential: Potential,
    ctx: PrecisionContext,
    size: usize,
    radius: Real,
    level: u32,
    gl: GaussLegendre,
    grid_x: Vec<Real>,
    grid_w: Vec<Real>,
    lo: usize,
    ev: Vec<Real>,
    d: Vec<Vec<Real>>,
    gl_total: Vec<Real>,
    m: Vec<Real>,
    mu: Vec<Real>,
    wm: Vec<Vec<Real>>,
}

/// Cauchy transforms of the basis functions `x^i W(x)` and `x^i w_n(x)` at one
/// point `z`.
#[derive(Clone, Debug)]
pub struct CauchyBasis {
    /// `C(x^i W)(z)`.
    pub w2: Vec<Complex>,
    /// `wn[n][i] = C(x^i w_n)(z)`.
    pub wn: Vec<Vec<Complex>>,
}

struct Sums {
    fine: Vec<Real>,
    coarse: Vec<Real>,
    mass: Vec<Real>,
}

impl WeightTable {
    pub fn build(v: &Potential, size: usize, ctx: &PrecisionContext) -> Result<Self> {
        let size = size.max(1);
        let max_power = 2 * size + 1;
        let radius = ctx.real(v.truncation_radius(max_power, ctx.quad_tol));
        let gl = GaussLegendre::new(GL_ORDER, ctx.prec());
        let mut why = String::new();
        for level in MIN_LEVEL..=MAX_LEVEL {
            match WeightTable::at_level(v, size, ctx, &radius, &gl, level) {
                Ok(t) => return Ok(t),
                Err(e) => why = e.to_string(),
            }
        }
        Err(Error::QuadratureFailure(format!(
            "weight table did not converge by level {MAX_LEVEL}: {why}"
        )))
    }

    fn at_level(
        v: &Potential,
        size: usize,
        ctx: &PrecisionContext,
        radius: &Real,
        gl: &GaussLegendre,
        level: u32,
    ) -> Result<Self> {
        let p = ctx.prec();
        let max_power = 2 * size + 1;
        let a = Float::with_val(p, -radius);
        let nodes = tanh_sinh::nodes(&a, radius, level, false);
        let vx: Vec<Real> = nodes.par_iter().map(|n| v.eval(&n.x)).collect();
        let vmin = vx
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .unwrap()
            .clone();
        let cutoff = p as f64 * std::f64::consts::LN_2 + 30.0;
        let negligible = |k: usize| {
            let excess = Float::with_val(64, &vx[k] - &vmin).to_f64();
            let x = nodes[k].x.to_f64().abs();
            excess - max_power as f64 * (1.0 + x).ln() > cutoff
        };
        let lo = (0..nodes.len()).find(|&k| !negligible(k)).unwrap_or(0);
        let hi = (0..nodes.len())
            .rev()
            .find(|&k| !negligible(k))
            .unwrap_or(0);
        if hi <= lo + 2 {
            return Err(Error::QuadratureFailure("grid too coarse".into()));
        }
        let active = lo..=hi;
        let ev: Vec<Real> = vx[active.clone()]
            .par_iter()
            .map(|x| (-x.clone()).exp())
            .collect();
        let xs: Vec<&Real> = nodes[active.clone()].iter().map(|n| &n.x).collect();
        let count = xs.len();

        // y^n e^{-V} over each gap between consecutive active nodes
        let gaps: Vec<Vec<Real>> = (0..count - 1)
            .into_par_iter()
            .map(|k| {
                let mut out = vec![Float::new(p); size];
                for (y, w) in gl.mapped(xs[k], xs[k + 1]) {
                    let mut t = w * (-v.eval(&y)).exp();
                    for o in out.iter_mut() {
                        *o += &t;
                        t *= &y;
                    }
                }
                out
            })
            .collect();
        let mut d = vec![vec![Float::new(p); count]; size];
        let mut gl_total = vec![Float::new(p); size];
        for n in 0..size {
            let mut below = vec![Float::new(p); count];
            for k in 1..count {
                below[k] = Float::with_val(p, &below[k - 1] + &gaps[k - 1][n]);
            }
            let mut above = Float::new(p);
            for k in (0..count).rev() {
                if k + 1 < count {
                    above += &gaps[k][n];
                }
                d[n][k] = Float::with_val(p, &below[k] - &above);
            }
            gl_total[n] = below[count - 1].clone();
        }

        // moments with fine and next-coarser weights
        let nm = max_power + 1;
        let q = 2 * nm + size * size;
        let chunks: Vec<Sums> = (0..count)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|ks| {
                let mut s = Sums {
                    fine: vec![Float::new(p); q],
                    coarse: vec![Float::new(p); q],
                    mass: vec![Float::new(p); q],
                };
                let mut vals = vec![Float::new(p); q];
                for &k in ks {
                    let node = &nodes[lo + k];
                    let x = &node.x;
                    let e1 = &ev[k];
                    let e2 = Float::with_val(p, e1.square_ref());
                    let mut xi = Float::with_val(p, 1);
                    for i in 0..nm {
                        vals[i] = Float::with_val(p, &xi * e1);
                        vals[nm + i] = Float::with_val(p, &xi * &e2);
                        if i < size {
                            for n in 0..size {
                                let t = Float::with_val(p, &vals[i] * &d[n][k]);
                                vals[2 * nm + n * size + i] = t;
                            }
                        }
                        xi *= x;
                    }
                    for j in 0..q {
                        let fw = Float::with_val(p, &vals[j] * &node.weight);
                        s.mass[j] += Float::with_val(p, fw.abs_ref());
                        if node.is_coarse() {
                            s.coarse[j] += Float::with_val(p, &fw * 2u32);
                        }
                        s.fine[j] += fw;
                    }
                }
                s
            })
            .collect();
        let mut tot = Sums {
            fine: vec![Float::new(p); q],
            coarse: vec![Float::new(p); q],
            mass: vec![Float::new(p); q],
        };
        for c in &chunks {
            for j in 0..q {
                tot.fine[j] += &c.fine[j];
                tot.coarse[j] += &c.coarse[j];
                tot.mass[j] += &c.mass[j];
            }
        }
        let tol = ctx.quad_tol;
        for j in 0..q {
            let diff = Float::with_val(p, &tot.fine[j] - &tot.coarse[j]).abs();
            if diff > Float::with_val(p, &tot.mass[j] * tol) {
                return Err(Error::QuadratureFailure(format!(
                    "level {level}: moment {j} changed by {:e} against mass {:e}",
                    diff.to_f64(),
                    tot.mass[j].to_f64()
                )));
            }
        }
        for n in 0..size {
            let diff = Float::with_val(p, &gl_total[n] - &tot.fine[n]).abs();
            if diff > Float::with_val(p, &tot.mass[n] * tol) {
                return Err(Error::QuadratureFailure(format!(
                    "level {level}: gap integrals for n = {n} miss the moment by {:e}",
                    diff.to_f64()
                )));
            }
        }
        let m = tot.fine[..nm].to_vec();
        let mu = tot.fine[nm..2 * nm].to_vec();
        let wm = (0..size)
            .map(|n| tot.fine[2 * nm + n * size..2 * nm + (n + 1) * size].to_vec())
            .collect();
        let (grid_x, grid_w) = nodes.into_iter().map(|n| (n.x, n.weight)).unzip();
        Ok(WeightTable {
            potential: v.clone(),
            ctx: ctx.clone(),
            size,
            radius: radius.clone(),
            level,
            gl: gl.clone(),
            grid_x,
            grid_w,
            lo,
            ev,
            d,
            gl_total,
            m,
            mu,
            wm,
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// Number of `w_n` tabulated.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> &Real {
        &self.radius
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn active_nodes(&self) -> usize {
        self.ev.len()
    }

    /// `int x^i e^{-V}`, `i <= 2 size + 1`.
    pub fn m(&self, i: usize) -> Result<&Real> {
        self.m.get(i).ok_or(Error::MomentRangeExceeded {
            needed: i,
            available: self.m.len(),
        })
    }

    pub fn one_d_moments(&self) -> &[Real] {
        &self.m
    }

    /// `int x^i e^{-2V}`, `i <= 2 size + 1`.
    pub fn mu(&self, i: usize) -> Result<&Real> {
        self.mu.get(i).ok_or(Error::MomentRangeExceeded {
            needed: i,
            available: self.mu.len(),
        })
    }

    /// `int x^i w_n(x) dx` for `i, n < size`.
    pub fn wm(&self, n: usize, i: usize) -> Result<&Real> {
        let avail = self.size;
        self.wm
            .get(n)
            .and_then(|r| r.get(i))
            .ok_or(Error::MomentRangeExceeded {
                needed: n.max(i),
                available: avail,
            })
    }

    fn x(&self, k: usize) -> &Real {
        &self.grid_x[self.lo + k]
    }

    fn weight(&self, k: usize) -> &Real {
        &self.grid_w[self.lo + k]
    }

    /// Active node closest to `x`.
    fn nearest(&self, x: &Real) -> usize {
        let count = self.ev.len();
        let mut lo = 0usize;
        let mut hi = count - 1;
        if x <= self.x(0) {
            return 0;
        }
        if x >= self.x(hi) {
            return hi;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let dl = Float::with_val(64, x - self.x(lo));
        let dh = Float::with_val(64, self.x(hi) - x);
        if dl <= dh {
            lo
        } else {
            hi
        }
    }

    fn spacing_at(&self, k: usize) -> f64 {
        let k = k.min(self.ev.len() - 2);
        Float::with_val(64, self.x(k + 1) - self.x(k)).to_f64()
    }

    /// `int_a^b y^n e^{-V(y)} dy` for all `n < size` along the straight segment.
    fn segment(&self, a: &Complex, b: &Complex) -> Vec<Complex> {
        let p = self.ctx.prec();
        let len = (b - a).abs().to_f64();
        let pieces = ((len / PIECE).ceil() as usize).max(1);
        let step = (b - a).scale(&(Float::with_val(p, 1u32) / pieces as u32));
        let mut out = vec![Complex::zero(p); self.size];
        for j in 0..pieces {
            let s = a + &step.scale(&Float::with_val(p, j as u32));
            let e = &s + &step;
            for (y, w) in self.gl.mapped_complex(&s, &e) {
                let mut t = &w * &(-self.potential.eval_complex(&y)).exp();
                for o in out.iter_mut() {
                    *o += &t;
                    t = &t * &y;
                }
            }
        }
        out
    }

    /// `d_n(z) = (int_{-inf}^z - int_z^inf) y^n e^{-V}`, continued off the axis.
    fn d_complex(&self, z: &Complex) -> Vec<Complex> {
        let k = self.nearest(&z.re);
        let xk = Complex::from_real(self.x(k));
        let seg = self.segment(&xk, z);
        (0..self.size)
            .map(|n| {
                let two = Float::with_val(self.ctx.prec(), 2);
                &Complex::from_real(&self.d[n][k]) + &seg[n].scale(&two)
            })
            .collect()
    }

    /// `int_{-inf}^x y^n e^{-V(y)} dy`.
    pub fn half_integral(&self, n: usize, x: &Real) -> Result<Real> {
        self.check_n(n)?;
        let d = &self.d_complex(&Complex::from_real(x))[n].re;
        Ok((Float::with_val(self.ctx.prec(), d + &self.gl_total[n])) / 2u32)
    }

    /// `w_n(x)` at any real `x`.
    pub fn w_real(&self, n: usize, x: &Real) -> Result<Real> {
        self.check_n(n)?;
        let d = self.d_complex(&Complex::from_real(x)).swap_remove(n).re;
        Ok((-self.potential.eval(x)).exp() * d)
    }

    /// `w_n(z)` for all `n < size`, analytically continued to complex `z`.
    pub fn w_complex(&self, z: &Complex) -> Vec<Complex> {
        let e = (-self.potential.eval_complex(z)).exp();
        self.d_complex(z).iter().map(|d| d * &e).collect()
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n >= self.size {
            return Err(Error::MomentRangeExceeded {
                needed: n,
                available: self.size,
            });
        }
        Ok(())
    }

    /// `C(x^i W)(z)` for `i <= deg` and `C(x^i w_n)(z)` for `n < n_count`.
    ///
    /// Off the axis the node sum is used as is. Within a few node spacings
    /// of the axis the pole is removed first:
    /// `int f/(x-z) = int (f(x) - f(z))/(x-z) + f(z) log((R-z)/(-R-z))`, and the
    /// node rule is applied to the smooth part only.
    pub fn cauchy_basis(&self, z: &Complex, deg: usize, n_count: usize) -> Result<CauchyBasis> {
        if z.im.is_zero() {
            return Err(Error::InvalidInput(
                "Cauchy transform needs Im z != 0".into(),
            ));
        }
        self.check_n(n_count.saturating_sub(1))?;
        let p = self.ctx.prec();
        let width = (deg + 1) * (1 + n_count);
        let count = self.ev.len();
        let partial: Vec<Vec<Complex>> = (0..count)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|ks| {
                let mut acc = vec![Complex::zero(p); width];
                for &k in ks {
                    let x = self.x(k);
                    let c = (&Complex::from_real(x) - z).recip().scale(self.weight(k));
                    let mut a = c.scale(&Float::with_val(p, self.ev[k].square_ref()));
                    let ce = c.scale(&self.ev[k]);
                    let mut b: Vec<Complex> =
                        (0..n_count).map(|n| ce.scale(&self.d[n][k])).collect();
                    for i in 0..=deg {
                        acc[i] += &a;
                        for (n, bn) in b.iter_mut().enumerate() {
                            acc[(deg + 1) * (1 + n) + i] += bn;
                            if i < deg {
                                *bn = bn.scale(x);
                            }
                        }
                        if i < deg {
                            a = a.scale(x);
                        }
                    }
                }
                acc
            })
            .collect();
        let mut acc = vec![Complex::zero(p); width];
        for part in &partial {
            for (s, v) in acc.iter_mut().zip(part) {
                *s += v;
            }
        }

        let k = self.nearest(&z.re);
        let inside = z.re >= *self.x(0) && z.re <= *self.x(count - 1);
        let near = inside && z.im.to_f64().abs() < NEAR_SPACINGS * self.spacing_at(k);
        if near {
            let e = self.kernel_defect(z);
            let w2 = (-self.potential.eval_complex(z).scale(&Float::with_val(p, 2))).exp();
            let wn = self.w_complex(z);
            let mut zi = Complex::one(p);
            for i in 0..=deg {
                let ze = &zi * &e;
                acc[i] += &(&ze * &w2);
                for (n, w) in wn.iter().take(n_count).enumerate() {
                    acc[(deg + 1) * (1 + n) + i] += &(&ze * w);
                }
                zi = &zi * z;
            }
        }

        let two_pi_i = Complex::new(Float::new(p), Float::with_val(p, Constant::Pi) * 2u32);
        let inv = two_pi_i.recip();
        let acc: Vec<Complex> = acc.iter().map(|v| v * &inv).collect();
        Ok(CauchyBasis {
            w2: acc[..=deg].to_vec(),
            wn: (0..n_count)
                .map(|n| acc[(deg + 1) * (1 + n)..(deg + 1) * (2 + n)].to_vec())
                .collect(),
        })
    }

    /// `int_{-R}^{R} dx/(x-z)` minus the full grid's approximation of it.
    fn kernel_defect(&self, z: &Complex) -> Complex {
        let r = Complex::from_real(&self.radius);
        let exact = &(&r - z).ln() - &(&(-r.clone()) - z).ln();
        let p = self.ctx.prec();
        let terms: Vec<Complex> = self
            .grid_x
            .par_chunks(CHUNK * 8)
            .zip(self.grid_w.par_chunks(CHUNK * 8))
            .map(|(xs, ws)| {
                let mut s = Complex::zero(p);
                for (x, w) in xs.iter().zip(ws) {
                    s += &(&Complex::from_real(x) - z).recip().scale(w);
                }
                s
            })
            .collect();
        let mut sum = Complex::zero(p);
        for t in &terms {
            sum += t;
        }
        &exact - &sum
    }
}
