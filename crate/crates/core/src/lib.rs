//! Dimension spectrum of the pair frequency `(1/n) Σ x_k x_{2k}` on binary
//! sequences.
//!
//! The level set `A_θ` of sequences whose pair frequency tends to θ has
//! Hausdorff dimension
//!
//! ```text
//! f(θ) = -log2(1 - p) - (θ/2) log2[(1 - q)(1 - p) / (q p)],
//! p² q = (1 - p)³,   θ = 2p(1 - q) / (1 + p + q).
//! ```
//!
//! The parameters `(p, q)` describe a two-state Markov measure `μ`; copies of
//! `μ` laid along the progressions `{i, 2i, 4i, ...}` (`i` odd) give the
//! multiplicative measure `P_μ` that realizes the dimension.
//!
//! - [`formulas`]: entropy, `s(p, q)`, `θ(p, q)`, `f(θ)`.
//! - [`solver`]: θ ↦ `(p, q)` and the spectrum sweep.
//! - [`measure`]: cylinder masses, word counts, sampling from `P_μ`.
//! - [`lab`]: Monte Carlo checks of the almost-sure limits.
//! - [`oracle`]: brute-force constrained maximization of `s`.
//! - [`general`]: averages of `(x_k + β)(x_{2k} + γ)`.
//! - [`verify`]: property suites behind `pairspec verify`.

pub mod error;
pub mod formulas;
pub mod general;
pub mod lab;
pub mod measure;
pub mod oracle;
pub mod root;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use formulas::{
    constraint_residual, entropy_h, local_entropy_s, log_ratio, spectrum_value_f, theta_of, xi, ModelParams,
    IDENTITY_TOL,
};
pub use general::{general_sweep, solve_general, GeneralOptions, GeneralPoint, GeneralSweep};
pub use lab::{experiment_alpha, experiment_local_dimension, experiment_pair_frequency, ExperimentReport};
pub use measure::{
    equ2_residual, markov_cylinder, pmu_cylinder_closed, pmu_cylinder_direct, sample_pmu, word_stats, BitWord,
    WordStats,
};
pub use oracle::{oracle_max_s, s_gradient};
pub use solver::{
    dimension, eggleston_dimension, solve_params_for_theta, sweep_spectrum, Endpoint, Solution, SolveOptions,
    SpectrumPoint,
};
