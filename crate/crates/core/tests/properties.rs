//! Invariants of the closed-form quantities, the solver and the measure.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairspec::measure::{log2_pmu_closed, log2_pmu_direct};
use pairspec::solver::{curve_q, p_star, strictly_increasing_on_grid};
use pairspec::verify::random_interior_params;
use pairspec::*;

fn on_curve(p: f64) -> ModelParams {
    ModelParams::new(p, curve_q(p)).unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> BitWord {
    BitWord::new((0..n).map(|_| rng.random_range(0..=1u8)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn entropy_symmetric_and_bounded(t in 0.5f64..=1.0) {
        // 1 - t is exact on [1/2, 1], so the mirror image is hit exactly
        let h = entropy_h(t).unwrap();
        prop_assert_eq!(h, entropy_h(1.0 - t).unwrap());
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn entropy_nearly_symmetric_everywhere(t in 0.0f64..=1.0) {
        let h = entropy_h(t).unwrap();
        prop_assert!((h - entropy_h(1.0 - t).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn theta_is_xi_times_one_minus_q(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let pr = ModelParams::new(p, q).unwrap();
        prop_assert_eq!(theta_of(pr), xi(pr) * (1.0 - q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn spectrum_value_equals_local_entropy_on_curve(u in 0.0f64..1.0) {
        let p = p_star() + (1.0 - p_star()) * u;
        let q = curve_q(p);
        prop_assume!(q > 0.0 && q < 1.0);
        let pr = ModelParams::new(p, q).unwrap();
        let f = spectrum_value_f(theta_of(pr), pr).unwrap();
        prop_assert!((f - local_entropy_s(pr)).abs() < IDENTITY_TOL);
    }

    #[test]
    fn log_ratio_sign_matches_theta_side(u in 0.0f64..1.0) {
        let p = p_star() + (1.0 - p_star()) * u;
        let q = curve_q(p);
        prop_assume!(q > 0.0 && q < 1.0 && (p - 0.5).abs() > 1e-9);
        let pr = ModelParams::new(p, q).unwrap();
        let lr = log_ratio(pr).unwrap();
        prop_assert_eq!(lr < 0.0, theta_of(pr) < 0.25);
    }

    #[test]
    fn count_identity_on_curve(u in 0.0f64..1.0, seed in any::<u64>(), half in 1usize..200) {
        let p = p_star() + (1.0 - p_star()) * u;
        let q = curve_q(p);
        prop_assume!(q > 0.0 && q < 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, 2 * half);
        prop_assert!(equ2_residual(&w, on_curve(p)).unwrap().abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn solver_round_trip(theta in 0.001f64..0.999) {
        let sol = solve_params_for_theta(theta, SolveOptions::default()).unwrap();
        prop_assert!((theta_of(sol.params) - theta).abs() < 1e-10);
        prop_assert!(constraint_residual(sol.params).abs() < 1e-10);
    }
}

#[test]
fn fair_coin_residuals_vanish_for_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let fair = ModelParams::new(0.5, 0.5).unwrap();
    for _ in 0..1000 {
        let n = 2 * rng.random_range(1..=100usize);
        assert!(equ2_residual(&random_word(&mut rng, n), fair).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn theta_strictly_increasing_along_curve() {
    assert!(strictly_increasing_on_grid(10_000));
}

#[test]
fn spectrum_peaks_at_one_quarter() {
    let pts = sweep_spectrum(401, 0.0, 1.0, SolveOptions::default()).unwrap();
    assert!(pts.iter().all(|p| p.dim <= 1.0 + 1e-12 && p.dim >= 0.0));
    let best = pts.iter().max_by(|a, b| a.dim.total_cmp(&b.dim)).unwrap();
    assert_eq!(best.theta, 0.25);
    assert!((best.dim - 1.0).abs() < 1e-12);
}

#[test]
fn dimension_continuous_at_zero() {
    let opts = SolveOptions::default();
    let gap = (dimension(1e-6, opts).unwrap() - dimension(0.0, opts).unwrap()).abs();
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn mass_sums_to_one_and_is_additive() {
    for pr in random_interior_params(20, 101) {
        for n in 1..=12usize {
            let mut total = 0.0;
            for idx in 0..(1u64 << n) {
                let u = BitWord::from_index(n, idx);
                let m = pmu_cylinder_direct(&u, pr).unwrap();
                total += m;
                if n < 12 {
                    let split = pmu_cylinder_direct(&u.extended(0), pr).unwrap()
                        + pmu_cylinder_direct(&u.extended(1), pr).unwrap();
                    assert!((split - m).abs() <= 1e-12);
                }
            }
            assert!((total - 1.0).abs() <= 1e-12, "n = {n}: {total}");
        }
    }
}

#[test]
fn closed_form_matches_direct() {
    let params = random_interior_params(20, 202);
    for &pr in &params {
        for n in (2..=12).step_by(2) {
            for idx in 0..(1u64 << n) {
                let u = BitWord::from_index(n, idx);
                let d = pmu_cylinder_direct(&u, pr).unwrap();
                assert!((pmu_cylinder_closed(&u, pr).unwrap() - d).abs() <= 1e-12 * d);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for &pr in &params {
        for n in [14, 16, 100, 1000] {
            for _ in 0..50 {
                let u = random_word(&mut rng, n);
                if n <= 16 {
                    let d = pmu_cylinder_direct(&u, pr).unwrap();
                    assert!((pmu_cylinder_closed(&u, pr).unwrap() - d).abs() <= 1e-12 * d);
                }
                let (a, b) = (log2_pmu_closed(&u, pr).unwrap(), log2_pmu_direct(&u, pr).unwrap());
                assert!((a - b).abs() <= 1e-12 * a.abs());
            }
        }
    }
}

#[test]
fn markov_cylinder_is_a_probability_measure() {
    for pr in random_interior_params(5, 404) {
        for n in 1..=10 {
            let total: f64 = (0..(1u64 << n)).map(|i| markov_cylinder(&BitWord::from_index(n, i), pr).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn word_stats_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..10_000 {
        let n = 2 * rng.random_range(1..=64usize);
        let w = random_word(&mut rng, n);
        let s = word_stats(&w);
        let h = s.half.unwrap();
        assert_eq!(h.n00 + h.n01 + h.n10 + h.n11, n / 2);
        assert_eq!(h.n10 + h.n11, h.n1_half);
        assert_eq!(s.n1_odd, s.n1_total - h.n01 - h.n11);
        assert!((0.0..=1.0).contains(&h.alpha_n));
        assert_eq!(s.pair_freq, h.n11 as f64 / (n / 2) as f64);
    }
}

/// Empirical frequencies of every length-4 prefix against the exact masses.
fn prefix_frequencies_match(pr: ModelParams, seed: u64) {
    let samples = 100_000u64;
    let mut counts = [0u64; 16];
    for t in 0..samples {
        let w = sample_pmu(16, pr, seed ^ t).unwrap();
        let idx = w.as_slice()[..4].iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        counts[idx] += 1;
    }
    for (idx, &c) in counts.iter().enumerate() {
        let exact = pmu_cylinder_direct(&BitWord::from_index(4, idx as u64), pr).unwrap();
        let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
        let freq = c as f64 / samples as f64;
        assert!((freq - exact).abs() < 4.0 * sigma, "prefix {idx:04b}: {freq} vs {exact}");
    }
}

#[test]
fn sampled_prefixes_follow_the_measure() {
    prefix_frequencies_match(ModelParams::new(0.5, 0.5).unwrap(), 0x1111);
    prefix_frequencies_match(ModelParams::new(0.3, 0.8).unwrap(), 0x2222);
}
