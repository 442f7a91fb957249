use rug::float::Constant;
use rug::Float;

use crate::numerics::Real;

/// One abscissa of a tanh-sinh rule on `[a, b]`.
///
/// `weight` already includes the step `h = 2^-level` and the half-width.
#[derive(Clone, Debug)]
pub struct TsNode {
    pub k: i64,
    pub x: Real,
    pub weight: Real,
}

impl TsNode {
    /// Whether the node also belongs to the next coarser level.
    pub fn is_coarse(&self) -> bool {
        self.k % 2 == 0
    }
}

/// Largest `t` kept: beyond it the node sits closer to an endpoint than
/// `r * 2^(-0.9 * prec)`, where the rule's tail is below working precision.
pub fn t_max(prec: u32) -> f64 {
    let u = (0.9 * prec as f64 + 1.0) * std::f64::consts::LN_2 / 2.0;
    (u * 2.0 / std::f64::consts::PI).asinh()
}

fn node_at(k: i64, level: u32, mid: &Real, half: &Real, pi_2: &Real) -> TsNode {
    let p = mid.prec();
    let h = Float::with_val(p, 1) >> level;
    let t = Float::with_val(p, &h * k);
    let (sh, ch) = t.sinh_cosh(Float::new(p));
    let u = Float::with_val(p, pi_2 * &sh);
    let th = Float::with_val(p, u.tanh_ref());
    let chu = Float::with_val(p, u.cosh_ref());
    let x = Float::with_val(p, mid + Float::with_val(p, half * &th));
    let w = Float::with_val(p, half * pi_2) * ch * h / Float::with_val(p, chu.square_ref());
    TsNode { k, x, weight: w }
}

/// Nodes of level `level` on `[a, b]`, sorted by abscissa.
///
/// With `odd_only` only the nodes new at this level are produced, which is
/// what the nested refinement needs.
pub fn nodes(a: &Real, b: &Real, level: u32, odd_only: bool) -> Vec<TsNode> {
    let p = a.prec();
    let mid = Float::with_val(p, a + b) / 2u32;
    let half = Float::with_val(p, b - a) / 2u32;
    let pi_2 = Float::with_val(p, Constant::Pi) / 2u32;
    let kmax = (t_max(p) * (1u64 << level) as f64).floor() as i64;
    let ks: Vec<i64> = (-kmax..=kmax)
        .filter(|k| !odd_only || k.rem_euclid(2) == 1)
        .collect();
    use rayon::prelude::*;
    ks.par_iter()
        .map(|&k| node_at(k, level, &mid, &half, &pi_2))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_constant_on_interval() {
        let a = Float::with_val(256, -3);
        let b = Float::with_val(256, 5);
        let ns = nodes(&a, &b, 6, false);
        let mut s = Float::new(256);
        for n in &ns {
            s += &n.weight;
        }
        assert!(Float::with_val(256, s - 8u32).abs() < 1e-60);
        assert!(ns.windows(2).all(|w| w[0].x < w[1].x));
        assert!(ns.iter().all(|n| n.x > a && n.x < b));
    }
}
