#![allow(clippy::excessive_precision)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use proptest::prelude::*;

use coalesce_core::closed_form::*;

// High-precision reference values computed independently (50-digit
// arithmetic; the limits by quadrature of the summed bipartite density).
const X_OF_2: f64 = 0.406_375_739_959_959_907_677;
const GIANT_OF_2: f64 = 0.796_812_130_020_020_046;
const T_GEL_1_2: f64 = 0.231_960_952_986_534_434_744;
const BIPARTITE_PARTIAL_2_400: f64 = 2.883_092_219_239_078_203_47;
const LIMIT_GAMMA_2: f64 = 2.883_098_642_778_9;
const LIMIT_GAMMA_HALF: f64 = 2.883_098_642_723;
const LIMIT_GAMMA_1_5: f64 = 2.563_343_071_5;
const LIMIT_GAMMA_5: f64 = 5.510_709_345_4;

#[test]
fn x_and_giant_fraction_match_reference() {
    assert!((x_of_t(2.0).unwrap() - X_OF_2).abs() < 1e-14);
    assert!((giant_fraction(2.0).unwrap() - GIANT_OF_2).abs() < 1e-14);
}

#[test]
fn cross_gelation_matches_reference() {
    let t = gelation_time(&GelationKernel::Cross {
        alpha: 1.0,
        beta: 2.0,
    })
    .unwrap();
    assert!((t - T_GEL_1_2).abs() < 1e-14);
    let swapped = gelation_time(&GelationKernel::Cross {
        alpha: 2.0,
        beta: 1.0,
    })
    .unwrap();
    assert_eq!(t, swapped);
}

#[test]
fn first_moment_after_gelation() {
    let s = first_moment_series(2.0, 1e-12).unwrap();
    assert!((s.value - X_OF_2 / 2.0).abs() < 1e-11);
    let at_one = first_moment_series(1.0, 5e-10).unwrap();
    assert!((at_one.value - 1.0).abs() < 5e-10, "{at_one:?}");
}

/// Bipartite series term `(n-1)!/(i1! i2!) γ^{i1} i1^{i2-1} i2^{i1-1} / (i1 + γ i2)^n`
/// in exact arithmetic for integer γ.
fn exact_term(gamma: u32, i1: u32, i2: u32) -> BigRational {
    let n = i1 + i2;
    let fact = |k: u32| (1..=k).fold(BigInt::one(), |a, j| a * BigInt::from(j));
    let num = fact(n - 1)
        * Pow::pow(BigInt::from(gamma), i1)
        * Pow::pow(BigInt::from(i1), i2 - 1)
        * Pow::pow(BigInt::from(i2), i1 - 1);
    let den = fact(i1) * fact(i2) * Pow::pow(BigInt::from(i1 + gamma * i2), n);
    BigRational::new(num, den)
}

#[test]
fn bipartite_partial_sum_matches_exact_rationals() {
    let max = 40;
    let mut acc = BigRational::new(BigInt::from(5), BigInt::from(2));
    for n in 2..=max {
        for i1 in 1..n {
            acc += exact_term(2, i1, n - i1);
        }
    }
    let exact = acc.to_f64().unwrap();
    let fast = bipartite_partial_sum(2.0, max as usize).unwrap();
    assert!((fast - exact).abs() < 1e-13, "{fast} vs {exact}");
}

#[test]
fn bipartite_partial_sum_matches_reference() {
    let fast = bipartite_partial_sum(2.0, 400).unwrap();
    assert!((fast - BIPARTITE_PARTIAL_2_400).abs() < 1e-12);
}

#[test]
fn bipartite_limits_match_quadrature() {
    for (gamma, reference, tol) in [
        (2.0, LIMIT_GAMMA_2, 1e-9),
        (0.5, LIMIT_GAMMA_HALF, 1e-9),
        (1.5, LIMIT_GAMMA_1_5, 1e-9),
        (5.0, LIMIT_GAMMA_5, 1e-9),
    ] {
        let s = mst_limit_bipartite(gamma, 1e-11).unwrap();
        assert!(
            (s.value - reference).abs() < tol,
            "gamma {gamma}: {} vs {reference}",
            s.value
        );
    }
}

#[test]
fn limit_tolerances_are_self_consistent() {
    let coarse = mst_limit_bipartite(3.0, 1e-6).unwrap();
    let fine = mst_limit_bipartite(3.0, 1e-12).unwrap();
    assert!((coarse.value - fine.value).abs() <= 1e-6);
    assert!(fine.terms_used > coarse.terms_used);
}

#[test]
fn bipartite_limit_reports_budget_exhaustion() {
    assert!(matches!(
        mst_limit_bipartite_with_budget(2.0, 1e-15, 100),
        Err(coalesce_core::Error::Convergence(_))
    ));
}

/// Composite Simpson rule on `[0, upper]`.
fn simpson(f: impl Fn(f64) -> f64, upper: f64, panels: usize) -> f64 {
    let h = upper / panels as f64;
    let mut acc = f(0.0) + f(upper);
    for i in 1..panels {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn time_integral_of_zeta_k_is_inverse_cube() {
    for k in 1..=8u64 {
        let integral = simpson(|t| zeta_k(k, t).unwrap(), 80.0, 40_000);
        let expected = 1.0 / (k as f64).powi(3);
        assert!((integral - expected).abs() < 1e-10, "k = {k}: {integral}");
    }
}

#[test]
fn recursion_and_closed_form_agree_beyond_acceptance_range() {
    let table = s_recursive(26).unwrap();
    for i1 in 0..=26u32 {
        for i2 in 0..=(26 - i1) {
            if i1 + i2 > 0 {
                assert_eq!(
                    table.get(i1 as usize, i2 as usize),
                    Some(&s_closed(i1, i2).unwrap())
                );
            }
        }
    }
    assert!(table.get(20, 7).is_none());
    assert!(table.anti_diagonal_sum(27).is_none());
    assert!(!table.anti_diagonal_sum(26).unwrap().is_zero());
}

proptest! {
    #[test]
    fn x_solves_its_defining_equation(t in 1.0001f64..40.0) {
        let x = x_of_t(t).unwrap();
        prop_assert!(x > 0.0 && x < 1.0);
        let lhs = x.ln() - x;
        let rhs = t.ln() - t;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn zeta_bi_swaps_with_parameters(i1 in 0u64..30, i2 in 0u64..30,
                                     t in 0.0f64..6.0, a in 0.1f64..4.0, b in 0.1f64..4.0) {
        prop_assume!(i1 + i2 > 0);
        let p = BipartiteParams::new(a, b).unwrap();
        let q = BipartiteParams::new(b, a).unwrap();
        let x = zeta_bi(i1, i2, t, &p).unwrap();
        let y = zeta_bi(i2, i1, t, &q).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
    }

    #[test]
    fn zeta_bi_on_unit_params_sums_to_zeta_k(n in 2u64..25, t in 0.05f64..0.95) {
        // With α = β = 1 the anti-diagonal sum equals 2 n^{n-2} t^{n-1} e^{-nt}/n! = 2 ζ_n(t).
        let p = BipartiteParams::new(1.0, 1.0).unwrap();
        let total: f64 = (0..=n).map(|i| zeta_bi(i, n - i, t, &p).unwrap()).sum();
        let expected = 2.0 * zeta_k(n, t).unwrap();
        prop_assert!((total - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn gelation_root_is_smallest_root(a in 0.2f64..5.0, b in 0.2f64..5.0) {
        let t = gelation_time(&GelationKernel::Cross { alpha: a, beta: b }).unwrap();
        prop_assert!(gelation_residual(a, b, t).abs() <= 1e-12);
        prop_assert!(t <= 1.0 / a.min(b) * (1.0 + 1e-15));
        // residual is negative just below the root
        if a != b {
            prop_assert!(gelation_residual(a, b, t * (1.0 - 1e-6)) < 0.0);
        }
    }

    #[test]
    fn limit_is_symmetric_in_gamma(g in 0.2f64..6.0) {
        let a = mst_limit_bipartite(g, 1e-9).unwrap();
        let b = mst_limit_bipartite(1.0 / g, 1e-9).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-12);
    }
}
