//! Integration over the line and half-lines, Cauchy transforms and their
//! boundary values.
//!
//! Tanh-sinh is the production rule. Composite Gauss-Legendre is kept as an
//! independent second rule for cross-checks. Both refine by level doubling
//! until two successive levels agree relative to the absolute mass
//! `sum |w_k f(x_k)|` of the integrand.

mod gauss_legendre;
pub mod tanh_sinh;

pub use gauss_legendre::GaussLegendre;

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionContext, Real};
use crate::potweights::Potential;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    TanhSinh,
    /// Composite rule; `order` points per panel, panel count doubles per level.
    GaussLegendre {
        order: usize,
    },
}

/// How to integrate over `[-R, R]`.
#[derive(Clone, Debug)]
pub struct QuadraturePlan {
    pub rule: Rule,
    pub radius: Real,
    pub min_level: u32,
    pub max_level: u32,
    pub target_tol: f64,
}

impl QuadraturePlan {
    pub fn new(radius: f64, ctx: &PrecisionContext) -> Self {
        QuadraturePlan {
            rule: Rule::TanhSinh,
            radius: ctx.real(radius),
            min_level: 3,
            max_level: 13,
            target_tol: ctx.quad_tol,
        }
    }

    /// Radius from the potential's tail: the smallest `R` with
    /// `R^p e^{-V(+-R)} < tol/100`, doubled.
    pub fn for_potential(v: &Potential, max_power: usize, ctx: &PrecisionContext) -> Self {
        QuadraturePlan::new(v.truncation_radius(max_power, ctx.quad_tol), ctx)
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        if let Rule::GaussLegendre { .. } = rule {
            self.min_level = 2;
            self.max_level = 11;
        }
        self
    }

    pub fn prec(&self) -> u32 {
        self.radius.prec()
    }
}

/// Values a quadrature can accumulate: scalars and vectors, real or complex.
pub trait QuadValue: Clone + Send + Sync {
    /// Number of real components.
    fn len(&self) -> usize;
    /// `|component i|`.
    fn abs_component(&self, i: usize) -> Real;
    fn scaled(&self, w: &Real) -> Self;
    fn add_assign(&mut self, other: &Self);
    fn diff_component(&self, other: &Self, i: usize) -> Real;
}

impl QuadValue for Real {
    fn len(&self) -> usize {
        1
    }
    fn abs_component(&self, _: usize) -> Real {
        Float::with_val(self.prec(), self.abs_ref())
    }
    fn scaled(&self, w: &Real) -> Self {
        Float::with_val(self.prec(), self * w)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn diff_component(&self, other: &Self, _: usize) -> Real {
        Float::with_val(self.prec(), self - other)
    }
}

impl QuadValue for Complex {
    fn len(&self) -> usize {
        2
    }
    fn abs_component(&self, i: usize) -> Real {
        let c = if i == 0 { &self.re } else { &self.im };
        Float::with_val(self.prec(), c.abs_ref())
    }
    fn scaled(&self, w: &Real) -> Self {
        self.scale(w)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn diff_component(&self, other: &Self, i: usize) -> Real {
        if i == 0 {
            Float::with_val(self.prec(), &self.re - &other.re)
        } else {
            Float::with_val(self.prec(), &self.im - &other.im)
        }
    }
}

impl<T: QuadValue> QuadValue for Vec<T> {
    fn len(&self) -> usize {
        self.iter().map(|v| v.len()).sum()
    }
    fn abs_component(&self, i: usize) -> Real {
        let (j, r) = locate(self, i);
        self[j].abs_component(r)
    }
    fn scaled(&self, w: &Real) -> Self {
        self.iter().map(|v| v.scaled(w)).collect()
    }
    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.add_assign(b);
        }
    }
    fn diff_component(&self, other: &Self, i: usize) -> Real {
        let (j, r) = locate(self, i);
        self[j].diff_component(&other[j], r)
    }
}

fn locate<T: QuadValue>(v: &[T], mut i: usize) -> (usize, usize) {
    for (j, x) in v.iter().enumerate() {
        if i < x.len() {
            return (j, i);
        }
        i -= x.len();
    }
    panic!("component index out of range");
}

struct Accumulator<T> {
    sum: Option<T>,
    mass: Vec<Real>,
}

impl<T: QuadValue> Accumulator<T> {
    fn new() -> Self {
        Accumulator {
            sum: None,
            mass: Vec::new(),
        }
    }

    /// Add weighted samples in their given order.
    fn add(&mut self, weights: &[Real], values: &[T]) {
        for (w, v) in weights.iter().zip(values) {
            let wv = v.scaled(w);
            if self.mass.is_empty() {
                self.mass = (0..wv.len()).map(|_| Float::new(w.prec())).collect();
            }
            for (i, m) in self.mass.iter_mut().enumerate() {
                *m += wv.abs_component(i);
            }
            match &mut self.sum {
                Some(s) => s.add_assign(&wv),
                None => self.sum = Some(wv),
            }
        }
    }

    fn halve(&mut self) {
        let half = Float::with_val(self.mass.first().map_or(64, |m| m.prec()), 0.5);
        if let Some(s) = &mut self.sum {
            *s = s.scaled(&half);
        }
        for m in &mut self.mass {
            *m *= &half;
        }
    }
}

/// Whether `a` and `b` agree componentwise to `tol * mass`.
fn agree<T: QuadValue>(a: &T, b: &T, mass: &[Real], tol: f64) -> bool {
    (0..a.len()).all(|i| {
        let d = a.diff_component(b, i).abs();
        d <= Float::with_val(53, &mass[i] * tol)
    })
}

fn eval_all<T, F>(f: &F, xs: &[Real]) -> Vec<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    xs.par_iter().map(f).collect()
}

/// Integrate `f` over `[a, b]` with the plan's rule and refinement limits.
pub fn integrate_interval<T, F>(f: &F, a: &Real, b: &Real, plan: &QuadraturePlan) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    match plan.rule {
        Rule::TanhSinh => tanh_sinh_interval(f, a, b, plan),
        Rule::GaussLegendre { order } => gauss_legendre_interval(f, a, b, order, plan),
    }
}

fn tanh_sinh_interval<T, F>(f: &F, a: &Real, b: &Real, plan: &QuadraturePlan) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    let mut acc = Accumulator::new();
    let mut prev: Option<T> = None;
    for level in plan.min_level..=plan.max_level {
        let first = level == plan.min_level;
        let nodes = tanh_sinh::nodes(a, b, level, !first);
        let xs: Vec<Real> = nodes.iter().map(|n| n.x.clone()).collect();
        let ws: Vec<Real> = nodes.into_iter().map(|n| n.weight).collect();
        let vals = eval_all(f, &xs);
        if !first {
            acc.halve();
        }
        acc.add(&ws, &vals);
        let cur = acc.sum.clone().expect("tanh-sinh level has nodes");
        if let Some(p) = &prev {
            if level >= plan.min_level + 2 && agree(&cur, p, &acc.mass, plan.target_tol) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::QuadratureFailure(format!(
        "tanh-sinh did not reach {:e} by level {}",
        plan.target_tol, plan.max_level
    )))
}

fn gauss_legendre_interval<T, F>(
    f: &F,
    a: &Real,
    b: &Real,
    order: usize,
    plan: &QuadraturePlan,
) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    let p = plan.prec();
    let gl = GaussLegendre::new(order, p);
    let mut prev: Option<T> = None;
    for level in plan.min_level..=plan.max_level {
        let panels = 1usize << level;
        let width = Float::with_val(p, b - a) / panels as u32;
        let mut xs = Vec::with_capacity(panels * order);
        let mut ws = Vec::with_capacity(panels * order);
        for j in 0..panels {
            let lo = Float::with_val(p, a + Float::with_val(p, &width * j as u32));
            let hi = Float::with_val(p, &lo + &width);
            for (x, w) in gl.mapped(&lo, &hi) {
                xs.push(x);
                ws.push(w);
            }
        }
        let vals = eval_all(f, &xs);
        let mut acc = Accumulator::new();
        acc.add(&ws, &vals);
        let cur = acc.sum.clone().expect("panel has nodes");
        if let Some(prev) = &prev {
            if agree(&cur, prev, &acc.mass, plan.target_tol) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::QuadratureFailure(format!(
        "Gauss-Legendre did not reach {:e} with {} panels",
        plan.target_tol,
        1usize << plan.max_level
    )))
}

/// `int_{-R}^{R} f`.
pub fn integrate_line<T, F>(f: F, plan: &QuadraturePlan) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    let a = Float::with_val(plan.prec(), -&plan.radius);
    integrate_interval(&f, &a, &plan.radius, plan)
}

/// `int_{-inf}^{x} f`, with the lower limit truncated at `-R`.
pub fn integrate_half<T, F>(f: F, x: &Real, plan: &QuadraturePlan) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    let a = Float::with_val(plan.prec(), -&plan.radius);
    let upper = if *x > plan.radius { &plan.radius } else { x };
    if *upper <= a {
        let probe = f(&a);
        return Ok(probe.scaled(&Float::new(plan.prec())));
    }
    integrate_interval(&f, &a, upper, plan)
}

/// Split `[-R, R]` at `c` (when interior) and integrate both pieces.
fn integrate_split<T, F>(f: &F, c: &Real, plan: &QuadraturePlan) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Real) -> T + Sync,
{
    let a = Float::with_val(plan.prec(), -&plan.radius);
    if *c > a && *c < plan.radius {
        let mut left: T = integrate_interval(f, &a, c, plan)?;
        let right: T = integrate_interval(f, c, &plan.radius, plan)?;
        left.add_assign(&right);
        Ok(left)
    } else {
        integrate_interval(f, &a, &plan.radius, plan)
    }
}

/// `C(f)(z) = (1/2 pi i) int f(x) / (x - z) dx` for `Im z != 0`.
pub fn cauchy_transform<F>(f: F, z: &Complex, plan: &QuadraturePlan) -> Result<Complex>
where
    F: Fn(&Real) -> Real + Sync,
{
    let v = cauchy_transform_many(|x| vec![f(x)], z, plan)?;
    Ok(v.into_iter().next().expect("one component"))
}

/// Cauchy transforms of several real functions at once.
pub fn cauchy_transform_many<F>(f: F, z: &Complex, plan: &QuadraturePlan) -> Result<Vec<Complex>>
where
    F: Fn(&Real) -> Vec<Real> + Sync,
{
    if z.im.is_zero() {
        return Err(Error::InvalidInput(
            "Cauchy transform needs Im z != 0".into(),
        ));
    }
    let p = plan.prec();
    let g = |x: &Real| -> Vec<Complex> {
        let k = (&Complex::from_real(x) - z).recip();
        f(x).iter().map(|v| k.scale(v)).collect()
    };
    let raw: Vec<Complex> = integrate_split(&g, &z.re, plan)?;
    let two_pi_i = Complex::new(
        Float::new(p),
        Float::with_val(p, rug::float::Constant::Pi) * 2u32,
    );
    Ok(raw.iter().map(|v| v / &two_pi_i).collect())
}

/// Principal value `PV int_{-R}^{R} f(x) / (x - x0) dx` by subtracting `f(x0)`.
pub fn cauchy_pv<F>(f: F, x0: &Real, plan: &QuadraturePlan) -> Result<Real>
where
    F: Fn(&Real) -> Real + Sync,
{
    let p = plan.prec();
    let r = &plan.radius;
    if x0.clone().abs() >= *r {
        return Err(Error::InvalidInput("x0 must lie inside the window".into()));
    }
    let f0 = f(x0);
    let g = |x: &Real| -> Real {
        let dx = Float::with_val(p, x - x0);
        if dx.is_zero() {
            return Float::new(p);
        }
        (f(x) - &f0) / dx
    };
    let body: Real = integrate_split(&g, x0, plan)?;
    let log = (Float::with_val(p, r - x0) / Float::with_val(p, r + x0)).ln();
    Ok(body + f0 * log)
}

/// Offsets `2^-k`, `k = 10..=20`, used to approach the real axis.
pub fn boundary_deltas(ctx: &PrecisionContext) -> Vec<Real> {
    (10..=20).map(|k| ctx.pow2_neg(k)).collect()
}

/// Neville extrapolation to `delta = 0` of samples `values[i]` taken at
/// `deltas[i]`, componentwise over vectors of complex numbers.
pub fn extrapolate_to_zero(deltas: &[Real], values: &[Vec<Complex>]) -> Vec<Complex> {
    assert_eq!(deltas.len(), values.len());
    assert!(!deltas.is_empty());
    let mut table: Vec<Vec<Complex>> = values.to_vec();
    let n = deltas.len();
    for m in 1..n {
        for i in 0..n - m {
            // P_{i..i+m}(0) = (d_i P_{i+1..} - d_{i+m} P_{i..})/(d_i - d_{i+m})
            let di = &deltas[i];
            let dj = &deltas[i + m];
            let den = Float::with_val(di.prec(), di - dj);
            table[i] = table[i]
                .iter()
                .zip(&table[i + 1])
                .map(|(lo, hi)| {
                    let num = &hi.scale(di) - &lo.scale(dj);
                    num.scale(&Float::with_val(den.prec(), den.recip_ref()))
                })
                .collect();
        }
    }
    table.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Real;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn gauss(x: &Real) -> Real {
        Float::with_val(x.prec(), -Float::with_val(x.prec(), x.square_ref())).exp()
    }

    fn rel(a: &Real, b: &Real) -> f64 {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.abs_ref())).to_f64()
    }

    #[test]
    fn gaussian_line_integrals() {
        let c = ctx();
        let plan = QuadraturePlan::new(12.0, &c);
        let sqrt_pi = c.pi().sqrt();
        let i0: Real = integrate_line(gauss, &plan).unwrap();
        assert!(rel(&i0, &sqrt_pi) < 1e-30);
        let i1: Real = integrate_line(|x| gauss(x) * x, &plan).unwrap();
        assert!(i1.abs() < 1e-60);
        let i2: Real = integrate_line(
            |x| gauss(x) * Float::with_val(x.prec(), x.square_ref()),
            &plan,
        )
        .unwrap();
        assert!(rel(&i2, &(sqrt_pi / 2u32)) < 1e-30);
    }

    #[test]
    fn gauss_legendre_cross_checks_tanh_sinh() {
        let c = ctx();
        let ts = QuadraturePlan::new(12.0, &c);
        let gl = ts.clone().with_rule(Rule::GaussLegendre { order: 24 });
        let f = |x: &Real| {
            let x2 = Float::with_val(x.prec(), x.square_ref());
            (Float::with_val(x.prec(), &x2 * &x2) + 1u32) * gauss(x)
        };
        let a: Real = integrate_line(f, &ts).unwrap();
        let b: Real = integrate_line(f, &gl).unwrap();
        assert!(rel(&a, &b) < 1e-30);
    }

    #[test]
    fn half_line_integrals() {
        let c = ctx();
        let plan = QuadraturePlan::new(14.0, &c);
        let f = |y: &Real| {
            let e = (-Float::with_val(y.prec(), y.square_ref()) / 2u32).exp();
            Float::with_val(y.prec(), y * &e)
        };
        let v: Real = integrate_half(f, &c.zero(), &plan).unwrap();
        assert!(rel(&v, &c.real(-1)) < 1e-30);
        let full: Real = integrate_half(gauss, &c.real(100), &plan).unwrap();
        assert!(rel(&full, &c.pi().sqrt()) < 1e-30);
        let half: Real = integrate_half(gauss, &c.zero(), &plan).unwrap();
        assert!(rel(&half, &(c.pi().sqrt() / 2u32)) < 1e-30);
    }

    #[test]
    fn cauchy_transform_far_field_and_symmetry() {
        let c = ctx();
        let plan = QuadraturePlan::new(12.0, &c);
        // far field: -(1/2 pi i) sum m_j / z^{j+1}, m_{2j} = sqrt(pi) (2j-1)!!/2^j
        let z = Complex::new(c.zero(), c.real(1000));
        let v = cauchy_transform(gauss, &z, &plan).unwrap();
        let m0 = Complex::from_real(&c.pi().sqrt());
        let m2 = m0.scale(&c.real(0.5));
        let m4 = m0.scale(&c.real(0.75));
        let two_pi_i = Complex::new(c.zero(), c.pi() * 2u32);
        let sum = &(&(&m0 / &z) + &(&m2 / &z.powi(3))) + &(&m4 / &z.powi(5));
        let series = &sum / &two_pi_i;
        let expect = -series;
        assert!((&v - &expect).abs() / expect.abs() < 1e-16);
        // on the imaginary axis: even f gives a real transform, odd f an imaginary one
        let z = Complex::new(c.zero(), c.real(0.7));
        let v = cauchy_transform(gauss, &z, &plan).unwrap();
        assert!(v.im.clone().abs() < 1e-60);
        let v = cauchy_transform(|x| gauss(x) * x, &z, &plan).unwrap();
        assert!(v.re.clone().abs() < 1e-60);
        assert!(v.im.clone().abs() > 1e-3);
        let zero = cauchy_transform(|x| Float::new(x.prec()), &z, &plan).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn principal_value_and_plemelj() {
        let c = ctx();
        let plan = QuadraturePlan::new(12.0, &c);
        assert!(cauchy_pv(gauss, &c.zero(), &plan).unwrap().abs() < 1e-60);
        let x0 = c.one();
        let pv = cauchy_pv(gauss, &x0, &plan).unwrap();
        let deltas = boundary_deltas(&c);
        let mut sums = Vec::new();
        let mut diffs = Vec::new();
        for d in &deltas {
            let up = cauchy_transform(gauss, &Complex::new(x0.clone(), d.clone()), &plan).unwrap();
            let dn = cauchy_transform(gauss, &Complex::new(x0.clone(), -d.clone()), &plan).unwrap();
            sums.push(vec![&up + &dn]);
            diffs.push(vec![&up - &dn]);
        }
        // C+ + C- = (1/pi i) PV, C+ - C- = f(x0)
        let s = &extrapolate_to_zero(&deltas, &sums)[0];
        let pi_i = Complex::new(c.zero(), c.pi());
        let expect = &Complex::from_real(&pv) / &pi_i;
        assert!((s - &expect).abs() < 1e-20);
        let jump = &extrapolate_to_zero(&deltas, &diffs)[0];
        assert!((jump - &Complex::from_real(&gauss(&x0))).abs() < 1e-20);
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let c = ctx();
        let ds: Vec<Real> = (1..=5).map(|k| c.pow2_neg(k)).collect();
        let vals: Vec<Vec<Complex>> = ds
            .iter()
            .map(|d| {
                let v = Float::with_val(256, 3u32) + Float::with_val(256, d * 2u32)
                    - Float::with_val(256, d.square_ref()) * 5u32;
                vec![Complex::from_real(&v)]
            })
            .collect();
        let lim = &extrapolate_to_zero(&ds, &vals)[0];
        assert!((lim - &Complex::from_real(&c.real(3))).abs() < 1e-60);
    }
}
