//! Property suites run by `pairspec verify`. Each check records the largest
//! residual it saw next to the threshold it was held to.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{
    constraint_residual, local_entropy_s, log_ratio, spectrum_value_f, theta_of, ModelParams, IDENTITY_TOL,
};
use crate::general::{general_sweep, implicit_residuals, solve_general, GeneralOptions};
use crate::measure::{equ2_residual, pmu_cylinder_closed, pmu_cylinder_direct, BitWord};
use crate::oracle::{oracle_max_s, reduced_lagrange_residual, s_gradient};
use crate::solver::{curve_q, dimension, p_star, SolveOptions};

const SUITE_SEED: u64 = 0x7e57_0000_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Measure,
    Identity,
    Oracle,
    General,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measure" => Ok(Self::Measure),
            "identity" => Ok(Self::Identity),
            "oracle" => Ok(Self::Oracle),
            "general" => Ok(Self::General),
            "all" => Ok(Self::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Measure => "measure",
            Self::Identity => "identity",
            Self::Oracle => "oracle",
            Self::General => "general",
            Self::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, max_residual: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), max_residual, threshold, passed: max_residual < threshold }
    }

    fn at_most(name: &str, max_residual: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), max_residual, threshold, passed: max_residual <= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(suite: Suite) -> Result<Vec<SuiteReport>> {
    Ok(match suite {
        Suite::Measure => vec![measure_suite()?],
        Suite::Identity => vec![identity_suite()?],
        Suite::Oracle => vec![oracle_suite()?],
        Suite::General => vec![general_suite()?],
        Suite::All => vec![measure_suite()?, identity_suite()?, oracle_suite()?, general_suite()?],
    })
}

/// Interior parameter pairs drawn uniformly from `[0.05, 0.95]²`.
pub fn random_interior_params(count: usize, seed: u64) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| ModelParams::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)).expect("in range"))
        .collect()
}

/// Points `(p, q(p))` of the optimality curve with `p` uniform in `(p*, 1)`.
pub fn random_curve_params(count: usize, seed: u64) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = p_star();
    (0..count)
        .filter_map(|_| {
            let p = rng.random_range(lo..1.0);
            let q = curve_q(p);
            (q > 0.0 && q < 1.0).then(|| ModelParams::new(p, q).expect("in range"))
        })
        .collect()
}

/// Sum, additivity and closed-versus-direct agreement over every word of
/// length at most `max_len`.
pub fn measure_suite_sized(max_len: usize, param_count: usize) -> Result<SuiteReport> {
    let params = random_interior_params(param_count, SUITE_SEED);
    let mut total_err = 0.0f64;
    let mut additivity_err = 0.0f64;
    let mut closed_err = 0.0f64;
    for &pr in &params {
        for n in 1..=max_len {
            let mut total = 0.0;
            for idx in 0..(1u64 << n) {
                let u = BitWord::from_index(n, idx);
                let direct = pmu_cylinder_direct(&u, pr)?;
                total += direct;
                if n < max_len {
                    let split = pmu_cylinder_direct(&u.extended(0), pr)? + pmu_cylinder_direct(&u.extended(1), pr)?;
                    additivity_err = additivity_err.max((split - direct).abs());
                }
                if n % 2 == 0 {
                    let closed = pmu_cylinder_closed(&u, pr)?;
                    closed_err = closed_err.max((closed - direct).abs() / direct);
                }
            }
            total_err = total_err.max((total - 1.0).abs());
        }
    }
    Ok(SuiteReport {
        suite: "measure".into(),
        checks: vec![
            Check::at_most("total mass = 1", total_err, 1e-12),
            Check::at_most("additivity", additivity_err, 1e-12),
            Check::at_most("closed form = direct (relative)", closed_err, 1e-12),
        ],
    })
}

fn measure_suite() -> Result<SuiteReport> {
    measure_suite_sized(12, 20)
}

fn identity_suite() -> Result<SuiteReport> {
    let mut spectrum_err = 0.0f64;
    for pr in random_curve_params(1000, SUITE_SEED) {
        let f = spectrum_value_f(theta_of(pr), pr)?;
        spectrum_err = spectrum_err.max((f - local_entropy_s(pr)).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 1);
    let mut curve = random_curve_params(9, SUITE_SEED ^ 2);
    curve.push(ModelParams::new(0.5, 0.5)?);
    let mut expansion_err = 0.0f64;
    for pr in curve {
        for _ in 0..1000 {
            let n = 2 * rng.random_range(1..=256usize);
            let word = BitWord::new((0..n).map(|_| rng.random_range(0..=1u8)).collect())?;
            expansion_err = expansion_err.max(equ2_residual(&word, pr)?.abs());
        }
    }
    Ok(SuiteReport {
        suite: "identity".into(),
        checks: vec![
            Check::below("f(theta) = s(p, q) on the curve", spectrum_err, IDENTITY_TOL),
            Check::at_most("count-expansion residual on the curve", expansion_err, 1e-12),
        ],
    })
}

/// θ = 0.05, 0.10, ..., 0.95.
pub fn oracle_theta_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

fn oracle_suite() -> Result<SuiteReport> {
    let opts = SolveOptions::default();
    let mut value_err = 0.0f64;
    let mut constraint_err = 0.0f64;
    let mut lagrange_err = 0.0f64;
    let mut sign_ok = true;
    for theta in oracle_theta_grid() {
        let r = oracle_max_s(theta, 10_000, 3)?;
        value_err = value_err.max((r.value - dimension(theta, opts)?).abs());
        constraint_err = constraint_err.max(constraint_residual(r.params).abs());
        lagrange_err = lagrange_err.max(reduced_lagrange_residual(r.params)?.abs());
        let sol = crate::solver::solve_params_for_theta(theta, opts)?;
        let lr = log_ratio(sol.params)?;
        let expected = theta - 0.25;
        sign_ok &= if expected == 0.0 {
            lr.abs() < IDENTITY_TOL
        } else {
            lr.signum() == expected.signum() && lr.abs() >= IDENTITY_TOL
        };
    }

    let h = 1e-6;
    let mut grad_err = 0.0f64;
    for pr in random_interior_params(1000, SUITE_SEED ^ 3) {
        let g = s_gradient(pr)?;
        let (p, q) = (pr.p(), pr.q());
        let s = |p: f64, q: f64| local_entropy_s(ModelParams::new(p, q).expect("interior"));
        let fd_p = (s(p + h, q) - s(p - h, q)) / (2.0 * h);
        let fd_q = (s(p, q + h) - s(p, q - h)) / (2.0 * h);
        grad_err = grad_err.max(gradient_error(g.dp, fd_p)).max(gradient_error(g.dq, fd_q));
    }

    Ok(SuiteReport {
        suite: "oracle".into(),
        checks: vec![
            Check::below("|oracle - dimension|", value_err, 1e-6),
            Check::below("oracle maximizer on p^2 q = (1-p)^3", constraint_err, 1e-5),
            Check::below("reduced Lagrange condition", lagrange_err, 1e-4),
            Check::below("gradient vs central differences", grad_err, 1e-5),
            Check::below("sign(log ratio) = sign(theta - 1/4)", if sign_ok { 0.0 } else { 1.0 }, 0.5),
        ],
    })
}

/// `|analytic - numeric| / max(|analytic|, 1)`.
pub fn gradient_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1.0)
}

fn general_suite() -> Result<SuiteReport> {
    let opts = GeneralOptions::default();
    let mut reduction_err = 0.0f64;
    let mut residual = 0.0f64;
    for i in 1..=50 {
        let q = i as f64 / 51.0;
        let pt = solve_general(0.0, 0.0, q, &opts)?;
        reduction_err = reduction_err.max((pt.dim - dimension(pt.theta, opts.solve)?).abs());
        let (r1, r2) = implicit_residuals(&pt);
        residual = residual.max(r1.abs()).max(r2.abs());
    }
    for &(beta, gamma) in &[(0.5, -0.25), (-0.5, 1.0), (1.0, 1.0)] {
        for pt in general_sweep(beta, gamma, 50, &opts)?.points {
            let (r1, r2) = implicit_residuals(&pt);
            residual = residual.max(r1.abs()).max(r2.abs());
        }
    }
    let sweep = general_sweep(0.0, 0.0, 101, &opts)?;
    // sorted by θ, so monotone θ(q) means q comes out increasing or decreasing
    let qs: Vec<f64> = sweep.points.iter().map(|p| p.q).collect();
    let monotone = qs.windows(2).all(|w| w[0] > w[1]) || qs.windows(2).all(|w| w[0] < w[1]);
    Ok(SuiteReport {
        suite: "general".into(),
        checks: vec![
            Check::below("beta = gamma = 0 reduces to the main spectrum", reduction_err, 1e-8),
            Check::below("implicit-equation residuals (log form)", residual, 1e-10),
            Check::below("theta monotone in q at beta = gamma = 0", if monotone { 0.0 } else { 1.0 }, 0.5),
        ],
    })
}
