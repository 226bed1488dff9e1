//! The Markov measure `μ` on binary words and the multiplicative measure
//! `P_μ` built from it.
//!
//! `P_μ` draws an independent copy of `μ` along every geometric progression
//! `J(i) = {i, 2i, 4i, ...}` with `i` odd. A cylinder `[u]` of length `n`
//! therefore has mass `∏_{i ≤ n odd} μ[u restricted to J(i)]`. For even `n` the
//! product collapses to counts of 1s at odd positions and of the pairs
//! `(x_k, x_{2k})`, `k ≤ n/2`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::ModelParams;

/// Words longer than this are evaluated as sums of logarithms.
pub const LOG_SPACE_THRESHOLD: usize = 64;

/// A finite word over {0, 1}. Positions are 1-based in the accessors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    bits: Vec<u8>,
}

impl BitWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("symbol {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    /// The `n`-letter word whose letters are the bits of `index`, most
    /// significant first.
    pub fn from_index(n: usize, index: u64) -> Self {
        debug_assert!(n <= 64);
        let bits = (0..n).map(|j| ((index >> (n - 1 - j)) & 1) as u8).collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Symbol at 1-based position `k`.
    pub fn get(&self, k: usize) -> u8 {
        self.bits[k - 1]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    /// This word with `symbol` appended.
    pub fn extended(&self, symbol: u8) -> Self {
        let mut bits = self.bits.clone();
        bits.push(symbol & 1);
        Self { bits }
    }

    /// Symbols along `J(i) = {i, 2i, 4i, ...}` inside the word.
    pub fn chain(&self, i: usize) -> impl Iterator<Item = u8> + '_ {
        std::iter::successors(Some(i), |&k| k.checked_mul(2))
            .take_while(move |&k| k <= self.len())
            .map(move |k| self.get(k))
    }

    /// Density of 1s in `(m/2, m]`; `None` unless `m` is even, positive and
    /// at most the word length.
    pub fn alpha(&self, m: usize) -> Option<f64> {
        if m == 0 || !m.is_multiple_of(2) || m > self.len() {
            return None;
        }
        let ones = self.bits[m / 2..m].iter().filter(|&&b| b == 1).count();
        Some(ones as f64 / (m / 2) as f64)
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!("invalid symbol {other:?} in word"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

/// Counts that depend on the first half `x_1 .. x_{n/2}` of an even-length word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfStats {
    /// `N_1(x_1^{n/2})`.
    pub n1_half: usize,
    pub n00: usize,
    pub n01: usize,
    pub n10: usize,
    pub n11: usize,
    /// Density of 1s in `(n/2, n]`.
    pub alpha_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordStats {
    pub n: usize,
    pub n1_total: usize,
    pub n1_odd: usize,
    /// Present only for even `n`.
    pub half: Option<HalfStats>,
    /// Average of `x_k x_{2k}` over `k ≤ ⌊n/2⌋` (0 for `n < 2`).
    pub pair_freq: f64,
}

pub fn word_stats(word: &BitWord) -> WordStats {
    let n = word.len();
    let bits = word.as_slice();
    let n1_total = bits.iter().filter(|&&b| b == 1).count();
    let n1_odd = bits.iter().step_by(2).filter(|&&b| b == 1).count();

    let m = n / 2;
    let mut pairs = [[0usize; 2]; 2];
    for k in 1..=m {
        pairs[word.get(k) as usize][word.get(2 * k) as usize] += 1;
    }
    let pair_freq = if m == 0 { 0.0 } else { pairs[1][1] as f64 / m as f64 };

    let half = (n.is_multiple_of(2) && n > 0).then(|| HalfStats {
        n1_half: bits[..m].iter().filter(|&&b| b == 1).count(),
        n00: pairs[0][0],
        n01: pairs[0][1],
        n10: pairs[1][0],
        n11: pairs[1][1],
        alpha_n: word.alpha(n).unwrap_or(0.0),
    });
    WordStats { n, n1_total, n1_odd, half, pair_freq }
}

fn require_nonempty(word: &BitWord) -> Result<()> {
    if word.is_empty() {
        Err(Error::InvalidArgument("cylinder of the empty word".into()))
    } else {
        Ok(())
    }
}

fn require_even(word: &BitWord) -> Result<usize> {
    let n = word.len();
    if n == 0 || !n.is_multiple_of(2) {
        Err(Error::InvalidArgument(format!("closed form needs a positive even length, got {n}")))
    } else {
        Ok(n / 2)
    }
}

/// Probability of each symbol of a Markov path, in order.
fn step_probs<'a>(symbols: impl Iterator<Item = u8> + 'a, params: ModelParams) -> impl Iterator<Item = f64> + 'a {
    let init = params.initial();
    let trans = params.transition();
    let mut prev: Option<u8> = None;
    symbols.map(move |s| {
        let pr = match prev {
            None => init[s as usize],
            Some(a) => trans[a as usize][s as usize],
        };
        prev = Some(s);
        pr
    })
}

fn chain_factor(symbols: impl Iterator<Item = u8>, params: ModelParams, log_space: bool) -> f64 {
    if log_space {
        step_probs(symbols, params).map(f64::log2).sum()
    } else {
        step_probs(symbols, params).product()
    }
}

/// `μ[w]` for the Markov measure with initial vector `(1 - p, p)`.
pub fn markov_cylinder(word: &BitWord, params: ModelParams) -> Result<f64> {
    require_nonempty(word)?;
    let log_space = word.len() > LOG_SPACE_THRESHOLD;
    let v = chain_factor(word.as_slice().iter().copied(), params, log_space);
    Ok(if log_space { v.exp2() } else { v })
}

/// `log2 P_μ[w]` as a sum over the progressions `J(i)`.
pub fn log2_pmu_direct(word: &BitWord, params: ModelParams) -> Result<f64> {
    require_nonempty(word)?;
    Ok((1..=word.len()).step_by(2).map(|i| chain_factor(word.chain(i), params, true)).sum())
}

/// `P_μ[w]` straight from the product over `J(i)`, `i` odd.
pub fn pmu_cylinder_direct(word: &BitWord, params: ModelParams) -> Result<f64> {
    require_nonempty(word)?;
    if word.len() > LOG_SPACE_THRESHOLD {
        return Ok(log2_pmu_direct(word, params)?.exp2());
    }
    Ok((1..=word.len()).step_by(2).map(|i| chain_factor(word.chain(i), params, false)).product())
}

/// `count · log2(prob)` with `0 · log2 0 = 0`.
fn count_log2(count: usize, prob: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * prob.log2()
    }
}

/// Exponents of `p, 1 - p, q, 1 - q` in the closed form of `P_μ[w]`.
fn closed_exponents(word: &BitWord) -> Result<[usize; 4]> {
    let half_len = require_even(word)?;
    let stats = word_stats(word);
    let h = stats.half.expect("even length");
    Ok([stats.n1_odd + h.n01, half_len - stats.n1_odd + h.n00, h.n10, h.n11])
}

/// `log2 P_μ[w]` from the count formula (even length only).
pub fn log2_pmu_closed(word: &BitWord, params: ModelParams) -> Result<f64> {
    let [e_p, e_np, e_q, e_nq] = closed_exponents(word)?;
    let (p, q) = (params.p(), params.q());
    Ok(count_log2(e_p, p) + count_log2(e_np, 1.0 - p) + count_log2(e_q, q) + count_log2(e_nq, 1.0 - q))
}

/// `P_μ[w] = p^{N1,odd} (1-p)^{n/2 - N1,odd} (1-p)^{N00} p^{N01} q^{N10} (1-q)^{N11}`,
/// pair counts taken over `x_1 .. x_{n/2}`. Even length only.
pub fn pmu_cylinder_closed(word: &BitWord, params: ModelParams) -> Result<f64> {
    if word.len() > LOG_SPACE_THRESHOLD {
        return Ok(log2_pmu_closed(word, params)?.exp2());
    }
    let [e_p, e_np, e_q, e_nq] = closed_exponents(word)?;
    let (p, q) = (params.p(), params.q());
    Ok(p.powi(e_p as i32) * (1.0 - p).powi(e_np as i32) * q.powi(e_q as i32) * (1.0 - q).powi(e_nq as i32))
}

/// `-log2 P_μ[x_1^n] / n` minus the count expansion
/// `-log2(1-p) - (N11/n) log2[(1-q)(1-p)/(qp)] + (N1(x_1^n)/n - N1(x_1^{n/2})/(n/2)) log2((1-p)/p)`.
///
/// Vanishes whenever `p² q = (1 - p)³`: on that curve
/// `P_μ[x_1^n] = (1-p)^n [(1-q)(1-p)/(qp)]^{N11} (p/(1-p))^{N1(x_1^n) - 2 N1(x_1^{n/2})}`.
pub fn equ2_residual(word: &BitWord, params: ModelParams) -> Result<f64> {
    params.require_interior("identity residual")?;
    require_even(word)?;
    let (p, q) = (params.p(), params.q());
    let n = word.len() as f64;
    let stats = word_stats(word);
    let h = stats.half.expect("even length");

    let lhs = -log2_pmu_closed(word, params)? / n;
    let ratio = (1.0 - q).log2() + (1.0 - p).log2() - q.log2() - p.log2();
    let inv_odds = (1.0 - p).log2() - p.log2();
    let rhs = -(1.0 - p).log2() - (h.n11 as f64 / n) * ratio
        + (stats.n1_total as f64 / n - h.n1_half as f64 / (n / 2.0)) * inv_odds;
    Ok(lhs - rhs)
}

/// Seed of trial `trial` in an experiment seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

/// Draws a word of length `n` from `P_μ`.
///
/// Each progression `J(i)` consumes its own ChaCha8 stream (key from `seed`,
/// stream id `i`), so the word does not depend on the order chains are built.
pub fn sample_pmu(n: usize, params: ModelParams, seed: u64) -> Result<BitWord> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample length must be >= 1".into()));
    }
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    let (p, q) = (params.p(), params.q());
    // P[next = 1 | current]
    let one_after = [p, 1.0 - q];
    let mut bits = vec![0u8; n];
    for i in (1..=n).step_by(2) {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(i as u64);
        let mut prob_one = p;
        let mut k = i;
        while k <= n {
            let s = u8::from(rng.random::<f64>() < prob_one);
            bits[k - 1] = s;
            prob_one = one_after[s as usize];
            k *= 2;
        }
    }
    Ok(BitWord { bits })
}
