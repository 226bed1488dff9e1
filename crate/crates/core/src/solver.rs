//! Inversion of the frequency map on the optimality curve `p² q = (1 - p)³`.
//!
//! Along the curve `q(p) = (1 - p)³ / p²`, which stays in `[0, 1]` exactly for
//! `p ∈ [p*, 1]` with `p*² = (1 - p*)³`, the frequency `θ(p)` runs from 0 to 1.
//! Given θ the solver bisects `θ(p) - θ` on that interval.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{check_unit, entropy_h, spectrum_value_f, ModelParams};
use crate::root::{all_roots, bisect};

/// Grid used when the monotone bracket has to be abandoned.
const FALLBACK_CELLS: usize = 10_000;
/// Grid used for the one-time monotonicity check of θ(p).
const MONOTONE_CHECK_POINTS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_iterations: 200 }
    }
}

impl SolveOptions {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        let opts = Self { tolerance, max_iterations };
        opts.validate()?;
        Ok(opts)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Which closed-form endpoint, if any, a solution was dispatched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// θ = 0: `(p*, 1)`.
    Zero,
    /// θ = 1: the limit `p → 1, q → 0`, reported as `(1, 0)`.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub params: ModelParams,
    pub endpoint: Option<Endpoint>,
}

/// One point on the dimension curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub theta: f64,
    pub params: ModelParams,
    pub dim: f64,
    pub eggleston: f64,
}

/// `q` on the optimality curve.
pub fn curve_q(p: f64) -> f64 {
    let r = 1.0 - p;
    r * r * r / (p * p)
}

/// θ as a function of `p` along the optimality curve.
pub fn curve_theta(p: f64) -> f64 {
    let q = curve_q(p);
    2.0 * p * (1.0 - q) / (1.0 + p + q)
}

/// The root `p* ∈ (0, 1)` of `p² = (1 - p)³`, computed once per process.
pub fn p_star() -> f64 {
    static P_STAR: OnceLock<f64> = OnceLock::new();
    *P_STAR.get_or_init(|| {
        bisect(|p| p * p - (1.0 - p).powi(3), 0.0, 1.0, 0.0, 2_000).expect("p^2 - (1-p)^3 changes sign on [0, 1]")
    })
}

/// Whether θ(p) is strictly increasing on a coarse grid over `(p*, 1)`.
pub fn curve_is_monotone() -> bool {
    static MONOTONE: OnceLock<bool> = OnceLock::new();
    *MONOTONE.get_or_init(|| strictly_increasing_on_grid(MONOTONE_CHECK_POINTS))
}

/// Checks θ(p) on `points` interior grid points of `(p*, 1)`.
pub fn strictly_increasing_on_grid(points: usize) -> bool {
    let lo = p_star();
    let step = (1.0 - lo) / (points + 1) as f64;
    let mut prev = f64::NEG_INFINITY;
    for i in 1..=points {
        let t = curve_theta(lo + step * i as f64);
        if t <= prev {
            return false;
        }
        prev = t;
    }
    true
}

fn params_on_curve(p: f64) -> Result<ModelParams> {
    ModelParams::new(p, curve_q(p).clamp(0.0, 1.0))
}

/// Finds `(p, q)` with `p² q = (1 - p)³` and `θ(p, q) = theta`.
pub fn solve_params_for_theta(theta: f64, opts: SolveOptions) -> Result<Solution> {
    check_unit("theta", theta)?;
    opts.validate()?;
    if theta == 0.0 {
        return Ok(Solution { params: ModelParams::new(p_star(), 1.0)?, endpoint: Some(Endpoint::Zero) });
    }
    if theta == 1.0 {
        return Ok(Solution { params: ModelParams::new(1.0, 0.0)?, endpoint: Some(Endpoint::One) });
    }

    let residual = |p: f64| curve_theta(p) - theta;
    let p = if curve_is_monotone() {
        bisect(residual, p_star(), 1.0, opts.tolerance, opts.max_iterations)?
    } else {
        let roots = all_roots(residual, p_star(), 1.0, FALLBACK_CELLS, opts.tolerance, opts.max_iterations)?;
        match roots.as_slice() {
            [p] => *p,
            [] => return Err(Error::Bracket { lo: p_star(), hi: 1.0, f_lo: residual(p_star()), f_hi: residual(1.0) }),
            _ => return Err(Error::MultipleRoots { context: format!("theta = {theta}"), count: roots.len(), roots }),
        }
    };
    Ok(Solution { params: params_on_curve(p)?, endpoint: None })
}

/// Hausdorff dimension of the level set of the pair frequency at `theta`.
pub fn dimension(theta: f64, opts: SolveOptions) -> Result<f64> {
    let sol = solve_params_for_theta(theta, opts)?;
    match sol.endpoint {
        Some(Endpoint::Zero) => Ok(-(1.0 - sol.params.p()).log2()),
        Some(Endpoint::One) => Ok(0.0),
        None => spectrum_value_f(theta, sol.params),
    }
}

/// Classical single-average spectrum `H(θ)` used as a baseline curve.
pub fn eggleston_dimension(theta: f64) -> Result<f64> {
    entropy_h(theta)
}

/// Solves one grid point. Endpoint θ values report their closed-form parameters.
pub fn spectrum_point(theta: f64, opts: SolveOptions) -> Result<SpectrumPoint> {
    let wrap = |e: Error| Error::AtTheta { theta, source: Box::new(e) };
    let sol = solve_params_for_theta(theta, opts).map_err(wrap)?;
    let dim = dimension(theta, opts).map_err(wrap)?;
    Ok(SpectrumPoint { theta, params: sol.params, dim, eggleston: entropy_h(theta).map_err(wrap)? })
}

/// Uniform θ grid over `[theta_min, theta_max]`, endpoints included.
pub fn theta_grid(n_points: usize, theta_min: f64, theta_max: f64) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {n_points}")));
    }
    check_unit("theta_min", theta_min)?;
    check_unit("theta_max", theta_max)?;
    if theta_min >= theta_max {
        return Err(Error::InvalidArgument(format!("empty range [{theta_min}, {theta_max}]")));
    }
    let last = n_points - 1;
    let span = theta_max - theta_min;
    Ok((0..n_points).map(|i| if i == last { theta_max } else { theta_min + span * i as f64 / last as f64 }).collect())
}

/// Solves every point of a uniform θ grid; the first failing point aborts the sweep.
pub fn sweep_spectrum(
    n_points: usize,
    theta_min: f64,
    theta_max: f64,
    opts: SolveOptions,
) -> Result<Vec<SpectrumPoint>> {
    opts.validate()?;
    theta_grid(n_points, theta_min, theta_max)?.into_par_iter().map(|t| spectrum_point(t, opts)).collect()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values keep every printed digit
mod tests {
    use super::*;
    use crate::formulas::{constraint_residual, theta_of};

    const P_STAR: f64 = 0.430_159_709_001_946_73;
    const DIM_ZERO: f64 = 0.811_370_462_751_649_1;

    #[test]
    fn p_star_matches_oracle() {
        assert!((p_star() - P_STAR).abs() < 1e-15);
        assert!((p_star().powi(2) - (1.0 - p_star()).powi(3)).abs() < 1e-14);
    }

    #[test]
    fn fair_coin_point() {
        let sol = solve_params_for_theta(0.25, SolveOptions::default()).unwrap();
        assert!((sol.params.p() - 0.5).abs() < 1e-10);
        assert!((sol.params.q() - 0.5).abs() < 1e-10);
        assert_eq!(sol.endpoint, None);
        assert!((theta_of(sol.params) - 0.25).abs() < 1e-12);
        assert!((dimension(0.25, SolveOptions::default()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn endpoints() {
        let opts = SolveOptions::default();
        let zero = solve_params_for_theta(0.0, opts).unwrap();
        assert_eq!(zero.endpoint, Some(Endpoint::Zero));
        assert_eq!(zero.params.q(), 1.0);
        assert!((dimension(0.0, opts).unwrap() - DIM_ZERO).abs() < 1e-12);
        assert_eq!(dimension(1.0, opts).unwrap(), 0.0);
        assert_eq!(solve_params_for_theta(1.0, opts).unwrap().endpoint, Some(Endpoint::One));
    }

    #[test]
    fn known_interior_points() {
        // (θ, p, q, dim) from a 40-digit mpmath bisection.
        let table = [
            (0.1, 0.458_123_340_769_214_88, 0.758_117_454_607_770_84, 0.954_257_902_883_734_2),
            (0.5, 0.579_108_960_976_745_91, 0.222_325_085_614_084_2, 0.911_954_191_949_212_4),
            (0.95, 0.907_309_015_730_559_54, 0.000_967_390_969_259_519_43, 0.238_893_310_844_665_94),
        ];
        for (theta, p, q, dim) in table {
            let sol = solve_params_for_theta(theta, SolveOptions::default()).unwrap();
            assert!((sol.params.p() - p).abs() < 1e-10, "p at {theta}");
            assert!((sol.params.q() - q).abs() < 1e-10, "q at {theta}");
            assert!(constraint_residual(sol.params).abs() < 1e-15);
            assert!((dimension(theta, SolveOptions::default()).unwrap() - dim).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let opts = SolveOptions::default();
        assert!(matches!(solve_params_for_theta(1.2, opts), Err(Error::Domain { .. })));
        assert!(SolveOptions::new(0.0, 10).is_err());
        assert!(SolveOptions::new(1e-10, 0).is_err());
        let stingy = SolveOptions { tolerance: 1e-300, max_iterations: 3 };
        assert!(matches!(solve_params_for_theta(0.3, stingy), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn sweep_three_points() {
        let pts = sweep_spectrum(3, 0.0, 1.0, SolveOptions::default()).unwrap();
        let thetas: Vec<f64> = pts.iter().map(|p| p.theta).collect();
        assert_eq!(thetas, vec![0.0, 0.5, 1.0]);
        assert!((pts[0].dim - DIM_ZERO).abs() < 1e-12);
        assert!((pts[1].dim - 0.911_954_191_949_212_4).abs() < 1e-10);
        assert_eq!(pts[2].dim, 0.0);
        assert_eq!(pts[1].eggleston, 1.0);
    }

    #[test]
    fn sweep_contains_fair_coin() {
        let pts = sweep_spectrum(5, 0.0, 1.0, SolveOptions::default()).unwrap();
        assert_eq!(pts[1].theta, 0.25);
        assert!((pts[1].dim - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_empty_range() {
        assert!(matches!(sweep_spectrum(2, 0.25, 0.25, SolveOptions::default()), Err(Error::InvalidArgument(_))));
        assert!(sweep_spectrum(1, 0.0, 1.0, SolveOptions::default()).is_err());
    }

    #[test]
    fn sweep_names_failing_theta() {
        let stingy = SolveOptions { tolerance: 1e-300, max_iterations: 3 };
        match sweep_spectrum(3, 0.0, 1.0, stingy) {
            Err(Error::AtTheta { theta, .. }) => assert_eq!(theta, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eggleston_alias() {
        assert_eq!(eggleston_dimension(0.5).unwrap(), 1.0);
        assert_eq!(eggleston_dimension(0.0).unwrap(), 0.0);
        assert!((eggleston_dimension(0.25).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-15);
        assert!(eggleston_dimension(-0.5).is_err());
    }
}
