//! Closed-form scalar quantities: binary entropy, the local entropy `s(p, q)`
//! of the multiplicative Markov measure, the frequency map `θ(p, q)`, and the
//! spectrum value `f(θ)`.
//!
//! All logarithms are base 2. Entropy-like sums use the convention
//! `0 · log 0 = 0`. Expressions that genuinely diverge at the boundary of
//! the unit square return [`Error::Boundary`] instead of an infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for floating-point identities between two algebraic routes.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Parameters of the Markov measure with initial vector `(1 - p, p)` and
/// transition matrix `[[1 - p, p], [q, 1 - q]]`.
///
/// `p` is the probability of a 1 from state 0 (and of an initial 1), `q` the
/// probability of the transition 1 → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    p: f64,
    q: f64,
}

impl ModelParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// True iff both parameters lie in the open interval (0, 1).
    pub fn is_interior(&self) -> bool {
        self.p > 0.0 && self.p < 1.0 && self.q > 0.0 && self.q < 1.0
    }

    /// Initial distribution `(P[x_1 = 0], P[x_1 = 1])`.
    pub fn initial(&self) -> [f64; 2] {
        [1.0 - self.p, self.p]
    }

    /// Transition matrix, row = current symbol.
    pub fn transition(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p, self.p], [self.q, 1.0 - self.q]]
    }

    pub(crate) fn require_interior(&self, what: &'static str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::Boundary { what, p: self.p, q: self.q })
        }
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { name, value })
    }
}

/// `-t log2 t`, zero at t = 0.
#[inline]
pub(crate) fn neg_xlog2(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        -t * t.log2()
    }
}

/// Binary entropy on an argument already known to be in [0, 1].
///
/// Evaluated on `min(t, 1 - t)` so that `H(t)` and `H(1 - t)` share one
/// code path whenever `1 - t` is exact.
#[inline]
pub(crate) fn entropy_unchecked(t: f64) -> f64 {
    let m = t.min(1.0 - t);
    neg_xlog2(m) + neg_xlog2(1.0 - m)
}

/// Binary entropy `H(t) = -t log2 t - (1 - t) log2 (1 - t)`.
pub fn entropy_h(t: f64) -> Result<f64> {
    check_unit("t", t)?;
    Ok(entropy_unchecked(t))
}

/// Limiting density of 1s, `ξ = 2p / (1 + p + q)`.
pub fn xi(params: ModelParams) -> f64 {
    let ModelParams { p, q } = params;
    if p == 0.0 {
        return 0.0;
    }
    2.0 * p / (1.0 + p + q)
}

/// Limiting frequency of the pattern `x_k = x_{2k} = 1`, `θ = ξ (1 - q)`.
pub fn theta_of(params: ModelParams) -> f64 {
    xi(params) * (1.0 - params.q)
}

/// Almost-sure local entropy of the multiplicative measure,
/// `s(p, q) = ((1 + q) H(p) + p H(q)) / (1 + p + q)`.
pub fn local_entropy_s(params: ModelParams) -> f64 {
    let ModelParams { p, q } = params;
    ((1.0 + q) * entropy_unchecked(p) + p * entropy_unchecked(q)) / (1.0 + p + q)
}

/// `log2[(1 - q)(1 - p) / (q p)]`. Negative exactly when the constrained
/// parameters correspond to θ < 1/4.
pub fn log_ratio(params: ModelParams) -> Result<f64> {
    params.require_interior("log ratio")?;
    let ModelParams { p, q } = params;
    Ok((1.0 - q).log2() + (1.0 - p).log2() - q.log2() - p.log2())
}

/// `f(θ) = -log2(1 - p) - (θ / 2) log2[(1 - q)(1 - p) / (q p)]`.
pub fn spectrum_value_f(theta: f64, params: ModelParams) -> Result<f64> {
    params.require_interior("spectrum value")?;
    let ratio = log_ratio(params)?;
    Ok(-(1.0 - params.p).log2() - 0.5 * theta * ratio)
}

/// Signed residual `p² q - (1 - p)³` of the optimality relation.
pub fn constraint_residual(params: ModelParams) -> f64 {
    let ModelParams { p, q } = params;
    let r = 1.0 - p;
    p * p * q - r * r * r
}
