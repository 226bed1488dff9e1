//! Brute-force maximization of `s(p, q)` on the level set `θ(p, q) = θ`,
//! and the first-order conditions of that problem.
//!
//! The level set is linear in `q`, so it is walked as `q(p)` and searched in
//! one dimension: a grid scan, nested re-scans around the best cell, then a
//! golden-section finish. Nothing here uses the optimality relation
//! `p² q = (1 - p)³` or the gradient, so the results can be compared with
//! both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{entropy_unchecked, local_entropy_s, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub dp: f64,
    pub dq: f64,
}

/// `∂s/∂p` and `∂s/∂q` in expanded form:
/// `(1+p+q)² ∂s/∂p = (1+q)[(2+q) log(1-p) - (1+q) log p + H(q)]`,
/// `(1+p+q)² ∂s/∂q = p[(2+p) log(1-q) - (1+p) log q + H(p)]`.
pub fn s_gradient(params: ModelParams) -> Result<Gradient> {
    params.require_interior("gradient of s")?;
    let (p, q) = (params.p(), params.q());
    let d2 = (1.0 + p + q).powi(2);
    let dp = (1.0 + q) * ((2.0 + q) * (1.0 - p).log2() - (1.0 + q) * p.log2() + entropy_unchecked(q)) / d2;
    let dq = p * ((2.0 + p) * (1.0 - q).log2() - (1.0 + p) * q.log2() + entropy_unchecked(p)) / d2;
    Ok(Gradient { dp, dq })
}

/// The same partials through the odds form
/// `(1+q)[(1+p+q) log((1-p)/p) - H(p) + H(q)]` and
/// `p[(1+p+q) log((1-q)/q) + H(p) - H(q)]`.
pub fn s_gradient_odds_form(params: ModelParams) -> Result<Gradient> {
    params.require_interior("gradient of s")?;
    let (p, q) = (params.p(), params.q());
    let sum = 1.0 + p + q;
    let (hp, hq) = (entropy_unchecked(p), entropy_unchecked(q));
    let dp = (1.0 + q) * (sum * ((1.0 - p) / p).log2() - hp + hq) / (sum * sum);
    let dq = p * (sum * ((1.0 - q) / q).log2() + hp - hq) / (sum * sum);
    Ok(Gradient { dp, dq })
}

/// `∇s ∥ ∇g` for `g = θ(1+p+q) - 2p(1-q)` after eliminating the multiplier:
/// `(2+p)[(2+q) log(1-p) - (1+q) log p + H(q)] + (1-q)[(2+p) log(1-q) - (1+p) log q + H(p)]`.
pub fn lagrange_residual(params: ModelParams) -> Result<f64> {
    params.require_interior("Lagrange condition")?;
    let (p, q) = (params.p(), params.q());
    let a = (2.0 + q) * (1.0 - p).log2() - (1.0 + q) * p.log2() + entropy_unchecked(q);
    let b = (2.0 + p) * (1.0 - q).log2() - (1.0 + p) * q.log2() + entropy_unchecked(p);
    Ok((2.0 + p) * a + (1.0 - q) * b)
}

/// The collected form `3 log(1-p) - 2 log p - log q` of the Lagrange condition.
pub fn reduced_lagrange_residual(params: ModelParams) -> Result<f64> {
    params.require_interior("Lagrange condition")?;
    let (p, q) = (params.p(), params.q());
    Ok(3.0 * (1.0 - p).log2() - 2.0 * p.log2() - q.log2())
}

/// `q` solving `θ(1 + p + q) = 2p(1 - q)`; `None` outside `(0, 1)`.
pub fn level_set_q(theta: f64, p: f64) -> Option<f64> {
    let q = (2.0 * p - theta * (1.0 + p)) / (theta + 2.0 * p);
    (q > 0.0 && q < 1.0).then_some(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub params: ModelParams,
    pub value: f64,
    /// Smallest and largest grid `p` with a feasible `q`.
    pub feasible: (f64, f64),
}

fn objective(theta: f64, p: f64) -> Option<f64> {
    let q = level_set_q(theta, p)?;
    Some(local_entropy_s(ModelParams::new(p, q).ok()?))
}

/// Best grid node of `points` equally spaced interior nodes of `[lo, hi]`.
fn scan(theta: f64, lo: f64, hi: f64, points: usize) -> Option<(f64, f64, f64, f64)> {
    let step = (hi - lo) / (points + 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 1..=points {
        let p = lo + step * j as f64;
        if let Some(v) = objective(theta, p) {
            range = (range.0.min(p), range.1.max(p));
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((p, v));
            }
        }
    }
    best.map(|(p, _)| (p, step, range.0, range.1))
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Maximizes `s` over `{θ(p, q) = theta}` by scanning `grid_size` values of
/// `p`, re-scanning `refine_rounds` times around the best cell, and finishing
/// with golden section.
pub fn oracle_max_s(theta: f64, grid_size: usize, refine_rounds: usize) -> Result<OracleResult> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("oracle needs theta in (0, 1), got {theta}")));
    }
    if grid_size < 100 {
        return Err(Error::InvalidArgument(format!("grid_size must be >= 100, got {grid_size}")));
    }
    let (mut best, mut step, f_lo, f_hi) =
        scan(theta, 0.0, 1.0, grid_size).ok_or(Error::Infeasible { theta, lo: 0.0, hi: 1.0 })?;

    for _ in 0..refine_rounds {
        let (lo, hi) = ((best - step).max(0.0), (best + step).min(1.0));
        match scan(theta, lo, hi, grid_size) {
            Some((p, s, _, _)) => {
                best = p;
                step = s;
            }
            None => break,
        }
    }

    let (lo, hi) = ((best - step).max(0.0), (best + step).min(1.0));
    let f = |p: f64| objective(theta, p).unwrap_or(f64::NEG_INFINITY);
    let p = golden_section_max(f, lo, hi, 1e-14);
    let p = if f(p) >= f(best) { p } else { best };
    let q = level_set_q(theta, p).ok_or(Error::Infeasible { theta, lo, hi })?;
    let params = ModelParams::new(p, q)?;
    Ok(OracleResult { params, value: local_entropy_s(params), feasible: (f_lo, f_hi) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(p: f64, q: f64) -> ModelParams {
        ModelParams::new(p, q).unwrap()
    }

    #[test]
    fn gradient_vanishes_at_fair_coin() {
        let g = s_gradient(mp(0.5, 0.5)).unwrap();
        assert_eq!((g.dp, g.dq), (0.0, 0.0));
        let h = s_gradient_odds_form(mp(0.5, 0.5)).unwrap();
        assert_eq!((h.dp, h.dq), (0.0, 0.0));
        assert!(s_gradient(mp(0.0, 0.5)).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = 1e-6;
        for &(p, q) in &[(0.2, 0.7), (0.6, 0.1), (0.45, 0.9)] {
            let g = s_gradient(mp(p, q)).unwrap();
            let fd_p = (local_entropy_s(mp(p + h, q)) - local_entropy_s(mp(p - h, q))) / (2.0 * h);
            let fd_q = (local_entropy_s(mp(p, q + h)) - local_entropy_s(mp(p, q - h))) / (2.0 * h);
            assert!((g.dp - fd_p).abs() < 1e-6);
            assert!((g.dq - fd_q).abs() < 1e-6);
        }
    }

    #[test]
    fn level_set_is_exact() {
        let theta = 0.3;
        let p = 0.6;
        let q = level_set_q(theta, p).unwrap();
        assert!((theta * (1.0 + p + q) - 2.0 * p * (1.0 - q)).abs() < 1e-15);
        // below θ/(2-θ) there is no feasible q
        assert!(level_set_q(theta, 0.9 * theta / (2.0 - theta)).is_none());
    }

    #[test]
    fn oracle_at_fair_coin() {
        let r = oracle_max_s(0.25, 1000, 2).unwrap();
        assert!((r.params.p() - 0.5).abs() < 1e-6);
        assert!((r.params.q() - 0.5).abs() < 1e-6);
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!(reduced_lagrange_residual(r.params).unwrap().abs() < 1e-5);
        assert!(lagrange_residual(r.params).unwrap().abs() < 1e-5);
    }

    #[test]
    fn oracle_against_frozen_values() {
        // 40-digit mpmath values of the constrained maximum
        for (theta, dim) in [(0.1, 0.954_257_902_883_734_2), (0.6, 0.831_918_999_990_901)] {
            let r = oracle_max_s(theta, 1000, 2).unwrap();
            assert!((r.value - dim).abs() < 1e-9, "theta {theta}: {}", r.value);
        }
    }

    #[test]
    fn oracle_rejects_bad_input() {
        assert!(oracle_max_s(0.0, 1000, 1).is_err());
        assert!(oracle_max_s(1.0, 1000, 1).is_err());
        assert!(oracle_max_s(0.5, 10, 1).is_err());
    }
}
