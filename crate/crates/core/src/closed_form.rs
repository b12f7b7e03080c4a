//! Closed-form solutions of the reduced Smoluchowski systems, the
//! Erdős–Rényi small-root function `x(t)`, the bipartite tree-count
//! coefficients `S_{i1,i2}`, the limiting MST series and gelation times.
//!
//! Every factorial/power ratio is evaluated in log space; the coefficients
//! `i1^{i2-1} i2^{i1-1} / (i1! i2!)` overflow `f64` somewhere past order 150.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{domain, Error, Result};
use crate::numerics::{bisect_increasing, ln_factorial, ln_factorial_table, power_tail};

/// A numerically evaluated infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the contribution of the omitted terms.
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Partition proportions `α`, `β` of the complete bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl BipartiteParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return domain(format!(
                "alpha and beta must be positive, got ({alpha}, {beta})"
            ));
        }
        Ok(Self {
            alpha,
            beta,
            gamma: alpha / beta,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `γ = α/β`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Kernel selector for [`gelation_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GelationKernel {
    Multiplicative,
    Cross { alpha: f64, beta: f64 },
}

/// Exact table of `S_{i1,i2}` for `i1 + i2 ≤ max_order`.
#[derive(Debug, Clone)]
pub struct STable {
    max_order: usize,
    // entries[i1][i2], defined for i1 + i2 <= max_order
    entries: Vec<Vec<BigRational>>,
}

impl STable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn get(&self, i1: usize, i2: usize) -> Option<&BigRational> {
        if i1 + i2 > self.max_order {
            return None;
        }
        self.entries.get(i1).and_then(|row| row.get(i2))
    }

    /// `Σ_{i1+i2=n} S_{i1,i2}`.
    pub fn anti_diagonal_sum(&self, n: usize) -> Option<BigRational> {
        if n > self.max_order {
            return None;
        }
        Some((0..=n).map(|i1| self.entries[i1][n - i1].clone()).sum())
    }
}

/// `ζ_k(t) = k^{k-2} t^{k-1} e^{-kt} / k!`, the solution of the reduced
/// multiplicative system started from monodisperse initial data.
pub fn zeta_k(k: u64, t: f64) -> Result<f64> {
    if k < 1 {
        return domain("zeta_k requires k >= 1");
    }
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("zeta_k requires t >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(if k == 1 { 1.0 } else { 0.0 });
    }
    let kf = k as f64;
    let log = (kf - 2.0) * kf.ln() + (kf - 1.0) * t.ln() - kf * t - ln_factorial(k);
    Ok(log.exp())
}

/// Smallest positive root of `x e^{-x} = t e^{-t}`. Equals `t` on `(0, 1]`.
pub fn x_of_t(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("x(t) requires t > 0, got {t}"));
    }
    if t <= 1.0 {
        return Ok(t);
    }
    // Solve in u = ln x on (-inf, 0): u - e^u = ln t - t, increasing in u.
    let target = t.ln() - t;
    let g = |u: f64| u - u.exp() - target;
    let lo = target - 1.0;
    let u = bisect_increasing(g, lo, 0.0, 0.0);
    Ok(u.exp())
}

/// Asymptotic mass fraction of the giant component, `g(t) = 1 - x(t)/t`.
pub fn giant_fraction(t: f64) -> Result<f64> {
    let x = x_of_t(t)?;
    if t <= 1.0 {
        return Ok(0.0);
    }
    Ok(1.0 - x / t)
}

/// `S_{i1,i2} = i1^{i2-1} i2^{i1-1} / (i1! i2!)` with `S_{i,0} = S_{0,i} = δ_{1,i}`.
pub fn s_closed(i1: u32, i2: u32) -> Result<BigRational> {
    if i1 == 0 && i2 == 0 {
        return domain("S is undefined at (0, 0)");
    }
    if i1 == 0 || i2 == 0 {
        let i = i1.max(i2);
        return Ok(if i == 1 {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let num: BigInt = Pow::pow(BigInt::from(i1), i2 - 1) * Pow::pow(BigInt::from(i2), i1 - 1);
    let den = factorial(i1) * factorial(i2);
    Ok(BigRational::new(num, den))
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Fill `S_{i1,i2}` for `i1 + i2 ≤ max_order` from the quadratic recursion
/// `(i1+i2-1) S_i = ½ Σ_{ℓ+k=i} (ℓ1 k2 + ℓ2 k1) S_ℓ S_k`
/// in exact rational arithmetic. Splits with `ℓ = 0` or `k = 0` are excluded.
pub fn s_recursive(max_order: usize) -> Result<STable> {
    if max_order < 1 {
        return domain("s_recursive requires max_order >= 1");
    }
    let mut entries: Vec<Vec<BigRational>> = (0..=max_order)
        .map(|i1| vec![BigRational::zero(); max_order - i1 + 1])
        .collect();
    entries[1][0] = BigRational::one();
    entries[0][1] = BigRational::one();

    for order in 2..=max_order {
        for i1 in 0..=order {
            let i2 = order - i1;
            let mut acc = BigRational::zero();
            for l1 in 0..=i1 {
                for l2 in 0..=i2 {
                    let (k1, k2) = (i1 - l1, i2 - l2);
                    if (l1 == 0 && l2 == 0) || (k1 == 0 && k2 == 0) {
                        continue;
                    }
                    let weight = l1 * k2 + l2 * k1;
                    if weight == 0 {
                        continue;
                    }
                    let (sl, sk) = (&entries[l1][l2], &entries[k1][k2]);
                    if sl.is_zero() || sk.is_zero() {
                        continue;
                    }
                    acc += BigRational::from_integer(BigInt::from(weight)) * sl * sk;
                }
            }
            let denom = BigRational::from_integer(BigInt::from(2 * (order - 1)));
            entries[i1][i2] = acc / denom;
        }
    }
    Ok(STable { max_order, entries })
}

/// `ζ_{i1,i2}(t) = S_{i1,i2} α^{i1} β^{i2} e^{-(β i1 + α i2) t} t^{i1+i2-1}`.
pub fn zeta_bi(i1: u64, i2: u64, t: f64, params: &BipartiteParams) -> Result<f64> {
    if i1 == 0 && i2 == 0 {
        return domain("zeta_bi is undefined at (0, 0)");
    }
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("zeta_bi requires t >= 0, got {t}"));
    }
    let ln_s = match (i1, i2) {
        (1, 0) | (0, 1) => 0.0,
        (_, 0) | (0, _) => return Ok(0.0),
        _ => {
            let (a, b) = (i1 as f64, i2 as f64);
            (b - 1.0) * a.ln() + (a - 1.0) * b.ln() - ln_factorial(i1) - ln_factorial(i2)
        }
    };
    let order = i1 + i2;
    if t == 0.0 {
        return Ok(match (i1, i2) {
            (1, 0) => params.alpha,
            (0, 1) => params.beta,
            _ => 0.0,
        });
    }
    let (a, b) = (i1 as f64, i2 as f64);
    let log = ln_s + a * params.alpha.ln() + b * params.beta.ln()
        - (params.beta * a + params.alpha * b) * t
        + (order as f64 - 1.0) * t.ln();
    Ok(log.exp())
}

/// First moment `Σ_k k ζ_k(t)`, which equals `x(t)/t`.
///
/// The terms behave like `r^k / (t √(2π) k^{3/2})` with `r = t e^{1-t} ≤ 1`;
/// the Stirling lower bound on `k!` turns that into an upper bound on the tail,
/// and at `t = 1` the upper Robbins bound brackets it from below as well.
pub fn first_moment_series(t: f64, tol: f64) -> Result<SeriesValue> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("first moment requires t > 0, got {t}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    const MAX_TERMS: u64 = 50_000_000;
    let ln_r = t.ln() + 1.0 - t;
    let r = ln_r.exp().min(1.0);
    let scale = 1.0 / (t * (2.0 * std::f64::consts::PI).sqrt());
    let mut terms = Vec::new();
    let mut k = 0u64;
    loop {
        k += 1;
        let kf = k as f64;
        let log = (kf - 1.0) * kf.ln() + (kf - 1.0) * t.ln() - kf * t - ln_factorial(k);
        terms.push(log.exp());
        if !k.is_multiple_of(64) {
            continue;
        }
        let (h, h_err) = power_tail(1.5, k + 1);
        let upper = r.powf(kf + 1.0) * scale * (h + h_err);
        let (estimate, bound) = if r >= 1.0 {
            let lower = (-1.0 / (12.0 * (kf + 1.0))).exp() * scale * (h - h_err);
            (0.5 * (upper + lower), 0.5 * (upper - lower))
        } else {
            (0.5 * upper, 0.5 * upper)
        };
        if bound <= tol {
            terms.reverse();
            let partial = crate::numerics::pairwise_sum(&terms);
            return Ok(SeriesValue {
                value: partial + estimate,
                tail_bound: bound,
                terms_used: k as usize,
            });
        }
        if k >= MAX_TERMS {
            return Err(Error::Convergence(format!(
                "first moment at t = {t} did not reach {tol:e} within {MAX_TERMS} terms"
            )));
        }
    }
}

/// Partial sum `Σ_{k ≤ terms} 1/k³` of the complete-graph limit series.
pub fn complete_partial_sum(terms: u64) -> f64 {
    (1..=terms).rev().map(|k| (k as f64).powi(-3)).sum()
}

/// Limiting mean MST length on `K_n`: `Σ_k ∫ζ_k = Σ_k 1/k³ = ζ(3)`, to 1e-12.
pub fn mst_limit_complete() -> SeriesValue {
    mst_limit_complete_with_tol(1e-12).expect("default tolerance is reachable")
}

pub fn mst_limit_complete_with_tol(tol: f64) -> Result<SeriesValue> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let mut terms = 64u64;
    loop {
        let (tail, err) = power_tail(3.0, terms + 1);
        if err <= tol || terms >= 1 << 20 {
            if err > tol {
                return Err(Error::Convergence(format!(
                    "zeta(3) tail bound {err:e} above {tol:e}"
                )));
            }
            return Ok(SeriesValue {
                value: complete_partial_sum(terms) + tail,
                tail_bound: err,
                terms_used: terms as usize,
            });
        }
        terms *= 2;
    }
}

/// Leading constant `C(γ)` in the anti-diagonal asymptotics
/// `Σ_{i1+i2=n} T(i1,i2) ~ C(γ)/n³` of the bipartite limit series.
///
/// Laplace's method at the peak `i1/n → x* = √γ/(1+√γ)` of the Stirling
/// exponent gives `C = (x*(1-x*))^{-3/2} |f''(x*)|^{-1/2}`. `C(1) = 2`.
pub fn bipartite_leading_constant(gamma: f64) -> f64 {
    let sg = gamma.sqrt();
    let x = sg / (1.0 + sg);
    let p = x * (1.0 - x);
    let d = x + gamma * (1.0 - x);
    let f2 = -4.0 / p - (1.0 - 2.0 * x).powi(2) / (p * p) + (1.0 - gamma).powi(2) / (d * d);
    1.0 / (p.powf(1.5) * (-f2).sqrt())
}

pub const DEFAULT_MAX_DIAGONAL: usize = 20_000;
const MIN_DIAGONAL: usize = 64;

/// Sum of the anti-diagonal `i1 + i2 = n` (both indices ≥ 1) of the
/// bipartite limit series, given a table of `ln k!` covering `n`.
fn bipartite_diagonal(gamma: f64, n: usize, ln_fact: &[f64], buf: &mut Vec<f64>) -> f64 {
    let ln_gamma = gamma.ln();
    let nf = n as f64;
    buf.clear();
    for i1 in 1..n {
        let i2 = n - i1;
        let (a, b) = (i1 as f64, i2 as f64);
        let log = ln_fact[n - 1] - ln_fact[i1] - ln_fact[i2]
            + a * ln_gamma
            + (b - 1.0) * a.ln()
            + (a - 1.0) * b.ln()
            - nf * (a + gamma * b).ln();
        buf.push(log.exp());
    }
    crate::numerics::pairwise_sum(buf)
}

/// `γ + 1/γ + Σ_{2 ≤ i1+i2 ≤ max_diagonal}` of the bipartite series, no tail.
pub fn bipartite_partial_sum(gamma: f64, max_diagonal: usize) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    let ln_fact = ln_factorial_table(max_diagonal.max(1));
    let mut buf = Vec::new();
    let mut diagonals: Vec<f64> = (2..=max_diagonal)
        .map(|n| bipartite_diagonal(gamma, n, &ln_fact, &mut buf))
        .collect();
    diagonals.reverse();
    Ok(gamma + 1.0 / gamma + crate::numerics::pairwise_sum(&diagonals))
}

/// Limiting mean MST length on `K_{α[n], β[n]}` as a function of `γ = α/β`:
///
/// `γ + 1/γ + Σ_{i1,i2 ≥ 1} (i1+i2-1)!/(i1! i2!) · γ^{i1} i1^{i2-1} i2^{i1-1} / (i1 + γ i2)^{i1+i2}`.
///
/// Summed along anti-diagonals `n = i1 + i2`. The omitted tail is
/// `C(γ) Σ_{n>N} n^{-3}` to leading order; the bound is twice the largest
/// recent deviation of `n³ D_n` from `C(γ)` times that power sum.
pub fn mst_limit_bipartite(gamma: f64, tol: f64) -> Result<SeriesValue> {
    mst_limit_bipartite_with_budget(gamma, tol, DEFAULT_MAX_DIAGONAL)
}

pub fn mst_limit_bipartite_with_budget(
    gamma: f64,
    tol: f64,
    max_diagonal: usize,
) -> Result<SeriesValue> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let lead = bipartite_leading_constant(gamma);
    let mut ln_fact = ln_factorial_table(1024.min(max_diagonal.max(2)));
    let mut buf = Vec::new();
    // diagonals[n] for n >= 2; indices 0 and 1 unused
    let mut diagonals = vec![0.0, 0.0];
    let mut gaps = vec![0.0, 0.0];
    let mut terms = 2usize;

    for n in 2..=max_diagonal {
        if n >= ln_fact.len() {
            ln_fact = ln_factorial_table((2 * n).min(max_diagonal));
        }
        let d = bipartite_diagonal(gamma, n, &ln_fact, &mut buf);
        terms += n - 1;
        diagonals.push(d);
        let nf = n as f64;
        gaps.push((nf * nf * nf * d - lead).abs());

        if n < MIN_DIAGONAL {
            continue;
        }
        let window_gap = gaps[n / 2 + 1..=n].iter().cloned().fold(0.0, f64::max);
        let (h, h_err) = power_tail(3.0, n as u64 + 1);
        let bound = 2.0 * window_gap * h + lead * h_err;
        if bound <= tol {
            let mut tail: Vec<f64> = diagonals[2..].to_vec();
            tail.reverse();
            let value = gamma + 1.0 / gamma + crate::numerics::pairwise_sum(&tail) + lead * h;
            return Ok(SeriesValue {
                value,
                tail_bound: bound,
                terms_used: terms,
            });
        }
    }
    Err(Error::Convergence(format!(
        "bipartite limit at gamma = {gamma} did not reach {tol:e} within {max_diagonal} anti-diagonals"
    )))
}

/// `1 - (α∧β) t + ln((α∨β) t)`; its smallest positive root is the cross
/// kernel gelation time.
pub fn gelation_residual(alpha: f64, beta: f64, t: f64) -> f64 {
    let (lo, hi) = (alpha.min(beta), alpha.max(beta));
    1.0 - lo * t + (hi * t).ln()
}

/// Gelation time: 1 for the multiplicative kernel; for the cross kernel the
/// smallest positive root of [`gelation_residual`], found by bisection on
/// `(0, 1/(α∧β)]`.
pub fn gelation_time(kernel: &GelationKernel) -> Result<f64> {
    match *kernel {
        GelationKernel::Multiplicative => Ok(1.0),
        GelationKernel::Cross { alpha, beta } => {
            let params = BipartiteParams::new(alpha, beta)?;
            let (lo_rate, hi_rate) = (params.alpha.min(params.beta), params.alpha.max(params.beta));
            let upper = 1.0 / lo_rate;
            if alpha == beta {
                // tangential double root
                return Ok(upper);
            }
            let lower = (-2.0f64).exp() / hi_rate;
            let root = bisect_increasing(|t| gelation_residual(alpha, beta, t), lower, upper, 0.0);
            Ok(root)
        }
    }
}
