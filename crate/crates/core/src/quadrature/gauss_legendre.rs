use rug::float::Constant;
use rug::Float;

use crate::numerics::{Complex, Real};

/// Gauss-Legendre rule of order `q` on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_q`, started from the Tricomi estimates.
    pub fn new(q: usize, prec: u32) -> Self {
        assert!(q >= 1);
        let work = prec + 32;
        let pi = Float::with_val(work, Constant::Pi);
        let mut nodes = Vec::with_capacity(q);
        let mut weights = Vec::with_capacity(q);
        let tol = Float::with_val(work, 1) >> (prec + 8);
        for i in 0..q {
            let guess = ((i as f64 + 0.75) / (q as f64 + 0.5) * std::f64::consts::PI).cos();
            let mut x = Float::with_val(work, guess);
            // refine the f64 guess with an exact-precision cos for large q
            if q > 60 {
                let theta = Float::with_val(work, &pi * (4 * i + 3) as u32) / (4 * q + 2) as u32;
                x = theta.cos();
            }
            let mut dp = Float::new(work);
            for _ in 0..200 {
                let (p, d) = legendre_with_derivative(q, &x);
                let step = Float::with_val(work, &p / &d);
                x -= &step;
                dp = d;
                if step.abs() < tol {
                    let (_, d) = legendre_with_derivative(q, &x);
                    dp = d;
                    break;
                }
            }
            let one_minus = Float::with_val(work, 1) - Float::with_val(work, x.square_ref());
            let w = Float::with_val(work, 2) / (one_minus * Float::with_val(work, dp.square_ref()));
            nodes.push(Float::with_val(prec, &x));
            weights.push(Float::with_val(prec, &w));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: &Real, b: &Real) -> Vec<(Real, Real)> {
        let p = a.prec();
        let half = Float::with_val(p, b - a) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                (
                    Float::with_val(p, &mid + Float::with_val(p, &half * x)),
                    Float::with_val(p, &half * w),
                )
            })
            .collect()
    }

    /// Nodes and weights on the straight complex segment from `a` to `b`.
    pub fn mapped_complex(&self, a: &Complex, b: &Complex) -> Vec<(Complex, Complex)> {
        let p = a.prec();
        let two = Float::with_val(p, 2);
        let half = (b - a).scale(&Float::with_val(p, two.recip_ref()));
        let mid = (a + b).scale(&Float::with_val(p, two.recip_ref()));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (&mid + &half.scale(x), half.scale(w)))
            .collect()
    }

    pub fn integrate(&self, a: &Real, b: &Real, f: impl Fn(&Real) -> Real) -> Real {
        let mut acc = Float::new(a.prec());
        for (x, w) in self.mapped(a, b) {
            acc += w * f(&x);
        }
        acc
    }
}

fn legendre_with_derivative(q: usize, x: &Real) -> (Real, Real) {
    let p = x.prec();
    let mut p0 = Float::with_val(p, 1);
    let mut p1 = x.clone();
    for n in 1..q {
        // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
        let t =
            Float::with_val(p, x * &p1) * (2 * n + 1) as u32 - Float::with_val(p, &p0 * n as u32);
        let p2 = t / (n + 1) as u32;
        p0 = p1;
        p1 = p2;
    }
    // P'_q = q (x P_q - P_{q-1}) / (x^2 - 1)
    let num = (Float::with_val(p, x * &p1) - &p0) * q as u32;
    let den = Float::with_val(p, x.square_ref()) - 1u32;
    (p1, num / den)
}
