use thiserror::Error;

/// Errors produced by the spectrum, measure and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("{what} is singular at the boundary (p = {p}, q = {q})")]
    Boundary { what: &'static str, p: f64, q: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("{count} distinct roots found for {context}; refusing to pick one")]
    MultipleRoots { context: String, count: usize, roots: Vec<f64> },

    #[error("failed at theta = {theta}: {source}")]
    AtTheta {
        theta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no feasible point for theta = {theta}: scanned p in [{lo}, {hi}]")]
    Infeasible { theta: f64, lo: f64, hi: f64 },

    #[error("no solvable point in sweep over q for beta = {beta}, gamma = {gamma} ({skipped} skipped)")]
    EmptySweep { beta: f64, gamma: f64, skipped: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
