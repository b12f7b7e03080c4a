//! Small numerical helpers shared by the closed-form and simulation code.

/// Pairwise (cascade) summation. Rounding error grows as O(log n) rather
/// than O(n) for naive accumulation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Natural log of `k!`.
pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// Table of `ln k!` for `k = 0..=max`, built by cumulative summation.
pub(crate) fn ln_factorial_table(max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max + 1);
    table.push(0.0);
    let mut acc = 0.0f64;
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Estimate of `Σ_{k ≥ a} k^{-s}` for `s > 1` and integer `a ≥ 1`, returned
/// as `(estimate, error_bound)`.
///
/// The first few terms are summed directly and the rest comes from the
/// Euler–Maclaurin formula through the B6 correction. For `f(x) = x^{-s}`
/// every derivative has fixed sign, so the first omitted correction bounds
/// the remainder.
pub fn power_tail(s: f64, a: u64) -> (f64, f64) {
    debug_assert!(s > 1.0 && a >= 1);
    const DIRECT: u64 = 16;
    let mut head = 0.0;
    let mut k = a;
    while k < DIRECT {
        head += (k as f64).powf(-s);
        k += 1;
    }
    let x = k as f64;
    // Rising factorials (s)_m for m = 1, 3, 5, 7.
    let r1 = s;
    let r3 = r1 * (s + 1.0) * (s + 2.0);
    let r5 = r3 * (s + 3.0) * (s + 4.0);
    let r7 = r5 * (s + 5.0) * (s + 6.0);
    let integral = x.powf(1.0 - s) / (s - 1.0);
    let half = 0.5 * x.powf(-s);
    let c2 = (1.0 / 6.0) / 2.0 * r1 * x.powf(-s - 1.0);
    let c4 = (-1.0 / 30.0) / 24.0 * r3 * x.powf(-s - 3.0);
    let c6 = (1.0 / 42.0) / 720.0 * r5 * x.powf(-s - 5.0);
    let c8 = (1.0 / 30.0) / 40320.0 * r7 * x.powf(-s - 7.0);
    let estimate = head + integral + half + c2 + c4 + c6;
    let bound = c8.abs() + 4.0 * f64::EPSILON * estimate.abs();
    (estimate, bound)
}

/// Bisection for an increasing sign change: requires `f(lo) < 0 ≤ f(hi)`.
/// Runs until the bracket can no longer be split in floating point or its
/// width drops below `abs_tol`; returns the upper end of the final bracket.
pub(crate) fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    abs_tol: f64,
) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= abs_tol {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
