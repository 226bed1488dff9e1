//! Dimension spectrum for the averages of `(x_k + β)(x_{2k} + γ)`.
//!
//! The spectrum is parametrized by the transition probability `q`. For fixed
//! `(β, γ, q)` the transition probability `p` solves
//!
//! ```text
//! log(1-p) - log(1-q) = (1+2β+γ) logit(q) + (2+2β+γ) logit(p)
//! ```
//!
//! and the initial probability `p0` of a 0 is given by
//! `logit(1 - p0) = β logit(q) + (1+β) logit(p)`. Both are handled in
//! natural-log form. `p` is searched through its logit `u`, where
//! `log(1-p) = -softplus(u)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root::all_roots;
use crate::solver::SolveOptions;

/// Logit search window. Above 36, `1 - p` rounds to zero; below, `p` itself is
/// stored and stays a normal float down to about `e^-700`.
const LOGIT_LO: f64 = -700.0;
const LOGIT_HI: f64 = 36.0;
const SCAN_CELLS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralOptions {
    pub solve: SolveOptions,
    /// Accepted range `[-bound, bound]` for β and γ.
    pub param_bound: f64,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self { solve: SolveOptions::default(), param_bound: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralPoint {
    pub beta: f64,
    pub gamma: f64,
    pub q: f64,
    pub p: f64,
    pub p0: f64,
    pub theta: f64,
    pub dim: f64,
    /// Whether θ lies between the smallest and largest value of `(i+β)(j+γ)`, `i, j ∈ {0, 1}`.
    pub theta_in_range: bool,
}

fn logit(x: f64) -> f64 {
    x.ln() - (1.0 - x).ln()
}

fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Exponents `(1+2β+γ, 2+2β+γ)` of the first implicit equation.
fn exponents(beta: f64, gamma: f64) -> (f64, f64) {
    (1.0 + 2.0 * beta + gamma, 2.0 + 2.0 * beta + gamma)
}

/// Residuals of both implicit equations at a point, natural-log form.
pub fn implicit_residuals(point: &GeneralPoint) -> (f64, f64) {
    let GeneralPoint { beta, gamma, q, p, p0, .. } = *point;
    let (a, b) = exponents(beta, gamma);
    let first = (1.0 - p).ln() - (1.0 - q).ln() - a * logit(q) - b * logit(p);
    let second = ((1.0 - p0) / p0).ln() - beta * logit(q) - (1.0 + beta) * logit(p);
    (first, second)
}

/// `θ = βγ + [(1+β+γ-q)(1+p-p0) + β(p0(p+q) - q)] / (1+p+q)`.
pub fn general_theta(beta: f64, gamma: f64, p: f64, q: f64, p0: f64) -> f64 {
    beta * gamma + ((1.0 + beta + gamma - q) * (1.0 + p - p0) + beta * (p0 * (p + q) - q)) / (1.0 + p + q)
}

/// `-(1/2) log2[p0 (1-p)] - (θ/2) log2[(1-q)(1-p)/(qp)]`.
pub fn general_dim(theta: f64, p: f64, q: f64, p0: f64) -> f64 {
    let ratio = (1.0 - q).log2() + (1.0 - p).log2() - q.log2() - p.log2();
    -0.5 * (p0.log2() + (1.0 - p).log2()) - 0.5 * theta * ratio
}

fn theta_bounds(beta: f64, gamma: f64) -> (f64, f64) {
    let vals = [beta * gamma, beta * (1.0 + gamma), (1.0 + beta) * gamma, (1.0 + beta) * (1.0 + gamma)];
    vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn check_params(beta: f64, gamma: f64, opts: &GeneralOptions) -> Result<()> {
    opts.solve.validate()?;
    for (name, v) in [("beta", beta), ("gamma", gamma)] {
        if v.is_nan() || v.abs() > opts.param_bound {
            return Err(Error::InvalidArgument(format!("{name} = {v} outside [-{b}, {b}]", b = opts.param_bound)));
        }
    }
    Ok(())
}

/// Solves the implicit system at transition probability `q`.
pub fn solve_general(beta: f64, gamma: f64, q: f64, opts: &GeneralOptions) -> Result<GeneralPoint> {
    check_params(beta, gamma, opts)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Boundary { what: "general spectrum (q must be in (0, 1))", p: f64::NAN, q });
    }
    let (a, b) = exponents(beta, gamma);
    let c = (1.0 - q).ln() + a * logit(q);
    let g = |u: f64| -softplus(u) - b * u - c;

    let roots = all_roots(g, LOGIT_LO, LOGIT_HI, SCAN_CELLS, opts.solve.tolerance, opts.solve.max_iterations)?;
    let u = match roots.as_slice() {
        [u] => *u,
        [] => return Err(Error::Bracket { lo: LOGIT_LO, hi: LOGIT_HI, f_lo: g(LOGIT_LO), f_hi: g(LOGIT_HI) }),
        _ => {
            return Err(Error::MultipleRoots {
                context: format!("logit(p) at beta = {beta}, gamma = {gamma}, q = {q}"),
                count: roots.len(),
                roots,
            })
        }
    };
    let p = sigmoid(u);
    let odds_not_p0 = beta * logit(q) + (1.0 + beta) * logit(p);
    let p0 = sigmoid(-odds_not_p0);
    let theta = general_theta(beta, gamma, p, q, p0);
    let dim = general_dim(theta, p, q, p0);
    let (lo, hi) = theta_bounds(beta, gamma);
    Ok(GeneralPoint { beta, gamma, q, p, p0, theta, dim, theta_in_range: theta >= lo && theta <= hi })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSweep {
    /// Solved points sorted by θ.
    pub points: Vec<GeneralPoint>,
    /// Grid values of `q` with no unique solution.
    pub skipped: usize,
}

/// Solves at `q = i / (n_points + 1)`, `i = 1..=n_points`.
pub fn general_sweep(beta: f64, gamma: f64, n_points: usize, opts: &GeneralOptions) -> Result<GeneralSweep> {
    check_params(beta, gamma, opts)?;
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {n_points}")));
    }
    let results: Vec<Result<GeneralPoint>> = (1..=n_points)
        .into_par_iter()
        .map(|i| solve_general(beta, gamma, i as f64 / (n_points + 1) as f64, opts))
        .collect();
    let mut points: Vec<GeneralPoint> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let skipped = n_points - points.len();
    if points.is_empty() {
        return Err(Error::EmptySweep { beta, gamma, skipped });
    }
    points.sort_by(|x, y| x.theta.total_cmp(&y.theta));
    Ok(GeneralSweep { points, skipped })
}
