//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign.
///
/// Stops when `|f(mid)| <= tol` or when the bracket can no longer be split
/// in binary64 (the root is then pinned to machine precision).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        residual = f_mid.abs();
        if residual <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// Sign-change brackets of `f` on a uniform grid of `cells` cells over `[lo, hi]`.
///
/// Grid nodes where `f` vanishes exactly are returned as degenerate brackets.
pub fn scan_brackets<F>(f: F, lo: f64, hi: f64, cells: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let step = (hi - lo) / cells as f64;
    let node = |i: usize| if i == cells { hi } else { lo + step * i as f64 };
    let mut out = Vec::new();
    let mut a = lo;
    let mut f_a = f(a);
    if f_a == 0.0 {
        out.push((a, a));
    }
    for i in 1..=cells {
        let b = node(i);
        let f_b = f(b);
        if f_b == 0.0 {
            out.push((b, b));
        } else if f_a != 0.0 && f_a.signum() != f_b.signum() && !f_a.is_nan() && !f_b.is_nan() {
            out.push((a, b));
        }
        a = b;
        f_a = f_b;
    }
    out
}

/// All roots of `f` found from the sign changes of a `cells`-cell scan.
pub fn all_roots<F>(f: F, lo: f64, hi: f64, cells: usize, tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    scan_brackets(&f, lo, hi, cells)
        .into_iter()
        .map(|(a, b)| if a == b { Ok(a) } else { bisect(&f, a, b, tol, max_iter) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bisect_reports_bracket() {
        let err = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).unwrap_err();
        match err {
            Error::Bracket { lo, hi, f_lo, f_hi } => {
                assert_eq!((lo, hi), (-1.0, 1.0));
                assert_eq!((f_lo, f_hi), (2.0, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bisect_no_convergence() {
        let err = bisect(|x| x - 0.3, 0.0, 1.0, 1e-30, 5).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 5, .. }));
    }

    #[test]
    fn scan_finds_every_root() {
        let roots = all_roots(|x| (x - 0.2) * (x - 0.5) * (x - 0.8), 0.0, 1.0, 97, 1e-14, 200).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.2, 0.5, 0.8]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_exact_node_root() {
        let brackets = scan_brackets(|x| x - 0.5, 0.0, 1.0, 4);
        assert_eq!(brackets, vec![(0.5, 0.5)]);
    }
}
