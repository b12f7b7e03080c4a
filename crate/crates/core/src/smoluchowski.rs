//! Truncated reduced Smoluchowski systems for the multiplicative (1-D) and
//! cross-multiplicative (2-D) kernels, with RK4 and Dormand–Prince RK45
//! integrators.
//!
//! Mergers that would produce a mass outside the tracked range simply leave
//! the state. Both systems are lower triangular in the mass order, so the
//! tracked components are unaffected by the cut-off.

use crate::closed_form::BipartiteParams;
use crate::error::{domain, Error, Result};

/// `ζ_1..ζ_K` of the reduced multiplicative system.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensity1D {
    values: Vec<f64>,
    time: f64,
}

impl TruncatedDensity1D {
    /// Monodisperse initial data `ζ_k(0) = δ_{1,k}`.
    pub fn monodisperse(truncation: usize) -> Result<Self> {
        let mut values = vec![0.0; truncation];
        if truncation == 0 {
            return domain("truncation must be >= 1");
        }
        values[0] = 1.0;
        Ok(Self { values, time: 0.0 })
    }

    /// `values[k-1] = ζ_k`.
    pub fn from_values(values: Vec<f64>, time: f64) -> Result<Self> {
        if values.is_empty() {
            return domain("truncation must be >= 1");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(time >= 0.0) {
            return domain("densities must be finite and nonnegative");
        }
        Ok(Self { values, time })
    }

    pub fn truncation(&self) -> usize {
        self.values.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ζ_k`, zero outside `1..=K`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.values.get(k - 1).copied().unwrap_or(0.0)
    }
}

/// Rectangular `(i1, i2)` array with the two singleton boundary entries.
/// Entries `(i, 0)` and `(0, i)` for `i ≥ 2` are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    k1: usize,
    k2: usize,
    left_singleton: f64,
    right_singleton: f64,
    // row-major over 1..=k1, 1..=k2
    interior: Vec<f64>,
}

impl DensityGrid {
    fn zeros(k1: usize, k2: usize) -> Self {
        Self {
            k1,
            k2,
            left_singleton: 0.0,
            right_singleton: 0.0,
            interior: vec![0.0; k1 * k2],
        }
    }

    fn from_packed(k1: usize, k2: usize, packed: &[f64]) -> Self {
        Self {
            k1,
            k2,
            left_singleton: packed[0],
            right_singleton: packed[1],
            interior: packed[2..].to_vec(),
        }
    }

    fn packed(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 + self.interior.len());
        out.push(self.left_singleton);
        out.push(self.right_singleton);
        out.extend_from_slice(&self.interior);
        out
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.k1, self.k2)
    }

    /// Entry at `(i1, i2)`; zero for `(0, 0)`, the empty boundary and
    /// anything beyond the truncation box.
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        match (i1, i2) {
            (1, 0) => self.left_singleton,
            (0, 1) => self.right_singleton,
            (_, 0) | (0, _) => 0.0,
            _ if i1 > self.k1 || i2 > self.k2 => 0.0,
            _ => self.interior[(i1 - 1) * self.k2 + (i2 - 1)],
        }
    }

    /// Iterate over every tracked `((i1, i2), value)`, boundary first.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let boundary = [
            ((1, 0), self.left_singleton),
            ((0, 1), self.right_singleton),
        ];
        boundary.into_iter().chain(
            self.interior
                .iter()
                .enumerate()
                .map(move |(idx, &v)| ((idx / self.k2 + 1, idx % self.k2 + 1), v)),
        )
    }
}

/// Density of the reduced cross-multiplicative system.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensity2D {
    grid: DensityGrid,
    params: BipartiteParams,
    time: f64,
}

impl TruncatedDensity2D {
    /// `ζ_{1,0}(0) = α`, `ζ_{0,1}(0) = β`, everything else zero.
    pub fn initial(k1: usize, k2: usize, params: BipartiteParams) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return domain("truncations must be >= 1");
        }
        let mut grid = DensityGrid::zeros(k1, k2);
        grid.left_singleton = params.alpha();
        grid.right_singleton = params.beta();
        Ok(Self {
            grid,
            params,
            time: 0.0,
        })
    }

    /// Build a state from a function of `(i1, i2)` evaluated on the boundary
    /// singletons and the interior box.
    pub fn from_fn(
        k1: usize,
        k2: usize,
        params: BipartiteParams,
        time: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut state = Self::initial(k1, k2, params)?;
        state.grid.left_singleton = f(1, 0);
        state.grid.right_singleton = f(0, 1);
        for i1 in 1..=k1 {
            for i2 in 1..=k2 {
                state.grid.interior[(i1 - 1) * k2 + (i2 - 1)] = f(i1, i2);
            }
        }
        if state
            .grid
            .packed()
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return domain("densities must be finite and nonnegative");
        }
        state.time = time;
        Ok(state)
    }

    pub fn grid(&self) -> &DensityGrid {
        &self.grid
    }

    pub fn params(&self) -> &BipartiteParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.grid.get(i1, i2)
    }
}

/// `dζ_k/dt = -k ζ_k + ½ Σ_{j=1}^{k-1} j (k-j) ζ_j ζ_{k-j}`.
pub fn rhs_mono(state: &TruncatedDensity1D) -> Vec<f64> {
    let mut out = vec![0.0; state.values.len()];
    mono_rhs_packed(&state.values, &mut out);
    out
}

fn mono_rhs_packed(z: &[f64], out: &mut [f64]) {
    for k in 1..=z.len() {
        let mut gain = 0.0;
        for j in 1..k {
            gain += (j * (k - j)) as f64 * z[j - 1] * z[k - j - 1];
        }
        out[k - 1] = -(k as f64) * z[k - 1] + 0.5 * gain;
    }
}

/// `dζ_i/dt = -(β i1 + α i2) ζ_i + ½ Σ_{ℓ+k=i} (ℓ1 k2 + ℓ2 k1) ζ_ℓ ζ_k`,
/// boundary singletons included in the convolution.
pub fn rhs_bi(state: &TruncatedDensity2D) -> DensityGrid {
    let (k1, k2) = state.grid.dims();
    let packed = state.grid.packed();
    let mut out = vec![0.0; packed.len()];
    bi_rhs_packed(
        k1,
        k2,
        state.params.alpha(),
        state.params.beta(),
        &packed,
        &mut out,
    );
    DensityGrid::from_packed(k1, k2, &out)
}

fn bi_rhs_packed(k1: usize, k2: usize, alpha: f64, beta: f64, z: &[f64], out: &mut [f64]) {
    let at = |i1: usize, i2: usize| -> f64 {
        match (i1, i2) {
            (1, 0) => z[0],
            (0, 1) => z[1],
            (_, 0) | (0, _) => 0.0,
            _ => z[2 + (i1 - 1) * k2 + (i2 - 1)],
        }
    };
    out[0] = -beta * z[0];
    out[1] = -alpha * z[1];
    for i1 in 1..=k1 {
        for i2 in 1..=k2 {
            let mut gain = 0.0;
            for l1 in 0..=i1 {
                for l2 in 0..=i2 {
                    let (m1, m2) = (i1 - l1, i2 - l2);
                    if (l1 == 0 && l2 == 0) || (m1 == 0 && m2 == 0) {
                        continue;
                    }
                    let w = l1 * m2 + l2 * m1;
                    if w == 0 {
                        continue;
                    }
                    gain += w as f64 * at(l1, l2) * at(m1, m2);
                }
            }
            let idx = 2 + (i1 - 1) * k2 + (i2 - 1);
            out[idx] = -(beta * i1 as f64 + alpha * i2 as f64) * z[idx] + 0.5 * gain;
        }
    }
}

/// State types that can be advanced by [`integrate`].
pub trait ReducedSystem: Clone {
    fn time(&self) -> f64;
    fn pack(&self) -> Vec<f64>;
    fn unpack(&self, values: &[f64], time: f64) -> Self;
    fn derivative(&self, values: &[f64], out: &mut [f64]);
}

impl ReducedSystem for TruncatedDensity1D {
    fn time(&self) -> f64 {
        self.time
    }

    fn pack(&self) -> Vec<f64> {
        self.values.clone()
    }

    fn unpack(&self, values: &[f64], time: f64) -> Self {
        Self {
            values: values.to_vec(),
            time,
        }
    }

    fn derivative(&self, values: &[f64], out: &mut [f64]) {
        mono_rhs_packed(values, out);
    }
}

impl ReducedSystem for TruncatedDensity2D {
    fn time(&self) -> f64 {
        self.time
    }

    fn pack(&self) -> Vec<f64> {
        self.grid.packed()
    }

    fn unpack(&self, values: &[f64], time: f64) -> Self {
        let (k1, k2) = self.grid.dims();
        Self {
            grid: DensityGrid::from_packed(k1, k2, values),
            params: self.params,
            time,
        }
    }

    fn derivative(&self, values: &[f64], out: &mut [f64]) {
        let (k1, k2) = self.grid.dims();
        bi_rhs_packed(k1, k2, self.params.alpha(), self.params.beta(), values, out);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4Fixed {
        step: f64,
    },
    Rk45Adaptive {
        abs_tol: f64,
        rel_tol: f64,
        initial_step: f64,
        min_step: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_end: f64,
}

impl IntegratorConfig {
    pub fn adaptive(t_end: f64) -> Self {
        Self {
            method: Method::Rk45Adaptive {
                abs_tol: 1e-9,
                rel_tol: 1e-8,
                initial_step: 1e-3,
                min_step: 1e-12,
            },
            t_end,
        }
    }

    pub fn rk4(step: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4Fixed { step },
            t_end,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Rk4Fixed { step } => step > 0.0,
            Method::Rk45Adaptive {
                abs_tol,
                rel_tol,
                initial_step,
                min_step,
            } => abs_tol > 0.0 && rel_tol >= 0.0 && initial_step > 0.0 && min_step > 0.0,
        };
        if !ok || !self.t_end.is_finite() {
            return domain("integrator steps and tolerances must be positive");
        }
        Ok(())
    }
}

/// Integrate `initial` and return its states at each of `sample_times`.
/// Negative components produced by roundoff are clamped to zero after every
/// accepted step.
pub fn integrate<S: ReducedSystem>(
    initial: &S,
    config: &IntegratorConfig,
    sample_times: &[f64],
) -> Result<Vec<S>> {
    config.validate()?;
    let t0 = initial.time();
    if config.t_end < t0 {
        return domain("t_end precedes the initial time");
    }
    if sample_times.windows(2).any(|w| !(w[1] >= w[0]))
        || sample_times
            .iter()
            .any(|&s| !(s >= t0 && s <= config.t_end))
    {
        return domain("sample times must be nondecreasing and inside [t0, t_end]");
    }

    let mut y = initial.pack();
    let mut t = t0;
    let mut work = Workspace::new(y.len());
    let mut h = match config.method {
        Method::Rk4Fixed { step } => step,
        Method::Rk45Adaptive { initial_step, .. } => initial_step,
    };
    let mut out = Vec::with_capacity(sample_times.len());
    for &target in sample_times {
        while t < target {
            match config.method {
                Method::Rk4Fixed { step } => {
                    let dt = step.min(target - t);
                    rk4_step(initial, &mut y, dt, &mut work);
                    t = if dt == target - t { target } else { t + dt };
                }
                Method::Rk45Adaptive {
                    abs_tol,
                    rel_tol,
                    min_step,
                    ..
                } => {
                    let dt = h.min(target - t);
                    let err = dopri_step(initial, &y, dt, &mut work, abs_tol, rel_tol);
                    if err <= 1.0 {
                        std::mem::swap(&mut y, &mut work.y_new);
                        t = if dt == target - t { target } else { t + dt };
                    }
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    // Shortened final steps should not shrink the next one.
                    if err > 1.0 || dt == h {
                        h = dt * factor;
                    }
                    if h < min_step {
                        return Err(Error::StepUnderflow { t, step: h });
                    }
                }
            }
            for v in y.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        out.push(initial.unpack(&y, target));
    }
    Ok(out)
}

struct Workspace {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }
}

fn rk4_step<S: ReducedSystem>(sys: &S, y: &mut [f64], h: f64, w: &mut Workspace) {
    let n = y.len();
    let [k1, k2, k3, k4, ..] = &mut w.k;
    sys.derivative(y, k1);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    sys.derivative(&w.tmp, k2);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    sys.derivative(&w.tmp, k3);
    for i in 0..n {
        w.tmp[i] = y[i] + h * k3[i];
    }
    sys.derivative(&w.tmp, k4);
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step; the candidate goes into `w.y_new` and the
/// scaled RMS error estimate is returned.
fn dopri_step<S: ReducedSystem>(
    sys: &S,
    y: &[f64],
    h: f64,
    w: &mut Workspace,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    let n = y.len();
    sys.derivative(y, &mut w.k[0]);
    for stage in 1..7 {
        for (i, (out, &yi)) in w.tmp.iter_mut().zip(y).enumerate() {
            let mut acc = 0.0;
            for (j, a) in A[stage - 1].iter().enumerate().take(stage) {
                acc += a * w.k[j][i];
            }
            *out = yi + h * acc;
        }
        sys.derivative(&w.tmp, &mut w.k[stage]);
    }
    // The last stage input is the fifth-order solution.
    w.y_new.copy_from_slice(&w.tmp);
    let mut sum = 0.0;
    for (i, (&yi, &yn)) in y.iter().zip(&w.y_new).enumerate() {
        let mut err = 0.0;
        for (j, e) in E.iter().enumerate() {
            err += e * w.k[j][i];
        }
        err *= h;
        let scale = abs_tol + rel_tol * yi.abs().max(yn.abs());
        sum += (err / scale).powi(2);
    }
    (sum / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonoMoments {
    /// `Σ k ζ_k`
    pub mass: f64,
    /// `Σ k² ζ_k`
    pub second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiMoments {
    /// `Σ i1 ζ_{i1,i2}`
    pub left_mass: f64,
    /// `Σ i2 ζ_{i1,i2}`
    pub right_mass: f64,
    /// `Σ (i1 + i2)² ζ_{i1,i2}`
    pub second: f64,
}

pub fn moments_mono(state: &TruncatedDensity1D) -> MonoMoments {
    let mut mass = 0.0;
    let mut second = 0.0;
    for (idx, &z) in state.values.iter().enumerate() {
        let k = (idx + 1) as f64;
        mass += k * z;
        second += k * k * z;
    }
    MonoMoments { mass, second }
}

pub fn moments_bi(state: &TruncatedDensity2D) -> BiMoments {
    let mut m = BiMoments {
        left_mass: 0.0,
        right_mass: 0.0,
        second: 0.0,
    };
    for ((i1, i2), z) in state.grid.iter() {
        m.left_mass += i1 as f64 * z;
        m.right_mass += i2 as f64 * z;
        m.second += ((i1 + i2) as f64).powi(2) * z;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{x_of_t, zeta_bi, zeta_k};

    fn closed_mono(k_max: usize, t: f64) -> TruncatedDensity1D {
        let v = (1..=k_max).map(|k| zeta_k(k as u64, t).unwrap()).collect();
        TruncatedDensity1D::from_values(v, t).unwrap()
    }

    // Five-point central difference of the analytic solution.
    fn fd(f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let h = 1e-3;
        (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn mono_rhs_at_monodisperse_start() {
        let s = TruncatedDensity1D::monodisperse(5).unwrap();
        let d = rhs_mono(&s);
        assert_eq!(d[0], -1.0);
        assert_eq!(d[1], 0.5);
        assert_eq!(&d[2..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn mono_rhs_matches_derivative_of_closed_form() {
        let s = closed_mono(30, 0.5);
        let d = rhs_mono(&s);
        for k in 1..=30u64 {
            let exact = fd(|t| zeta_k(k, t).unwrap(), 0.5);
            assert!((d[k as usize - 1] - exact).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn bi_rhs_at_initial_state() {
        let p = BipartiteParams::new(2.0, 3.0).unwrap();
        let s = TruncatedDensity2D::initial(4, 4, p).unwrap();
        let d = rhs_bi(&s);
        assert_eq!(d.get(1, 1), 2.0 * 3.0);
        assert_eq!(d.get(1, 0), -3.0 * 2.0);
        assert_eq!(d.get(0, 1), -2.0 * 3.0);
        assert_eq!(d.get(2, 1), 0.0);
    }

    #[test]
    fn bi_rhs_matches_derivative_of_closed_form() {
        let p = BipartiteParams::new(1.3, 0.7).unwrap();
        let t0 = 0.5;
        let s = TruncatedDensity2D::from_fn(6, 6, p, t0, |i1, i2| {
            zeta_bi(i1 as u64, i2 as u64, t0, &p).unwrap()
        })
        .unwrap();
        let d = rhs_bi(&s);
        for ((i1, i2), v) in d.iter() {
            let exact = fd(|t| zeta_bi(i1 as u64, i2 as u64, t, &p).unwrap(), t0);
            assert!((v - exact).abs() < 1e-9, "({i1},{i2}): {v} vs {exact}");
        }
    }

    #[test]
    fn integrate_mono_hits_closed_form() {
        let s = TruncatedDensity1D::monodisperse(20).unwrap();
        let out = integrate(&s, &IntegratorConfig::adaptive(1.0), &[1.0]).unwrap();
        let z2 = out[0].get(2);
        assert!((z2 - (-2.0f64).exp() / 2.0).abs() < 1e-7);
    }

    #[test]
    fn integrate_bi_hits_closed_form() {
        let p = BipartiteParams::new(1.0, 1.0).unwrap();
        let s = TruncatedDensity2D::initial(10, 10, p).unwrap();
        let out = integrate(&s, &IntegratorConfig::adaptive(1.0), &[1.0]).unwrap();
        assert!((out[0].get(1, 1) - (-2.0f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn zero_length_integration_is_identity() {
        let s = TruncatedDensity1D::monodisperse(8).unwrap();
        let out = integrate(&s, &IntegratorConfig::adaptive(0.0), &[0.0]).unwrap();
        assert_eq!(out[0], s);
        let p = BipartiteParams::new(1.0, 2.0).unwrap();
        let b = TruncatedDensity2D::initial(3, 3, p).unwrap();
        let out = integrate(&b, &IntegratorConfig::rk4(0.01, 0.0), &[0.0]).unwrap();
        assert_eq!(out[0], b);
    }

    #[test]
    fn rk4_fixed_agrees_with_adaptive() {
        let s = TruncatedDensity1D::monodisperse(10).unwrap();
        let a = integrate(&s, &IntegratorConfig::adaptive(2.0), &[2.0]).unwrap();
        let b = integrate(&s, &IntegratorConfig::rk4(1e-3, 2.0), &[2.0]).unwrap();
        for k in 1..=10 {
            assert!((a[0].get(k) - b[0].get(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_time_validation() {
        let s = TruncatedDensity1D::monodisperse(4).unwrap();
        let cfg = IntegratorConfig::adaptive(1.0);
        assert!(integrate(&s, &cfg, &[0.5, 0.2]).is_err());
        assert!(integrate(&s, &cfg, &[2.0]).is_err());
        let bad = IntegratorConfig::rk4(0.0, 1.0);
        assert!(integrate(&s, &bad, &[0.5]).is_err());
    }

    #[test]
    fn step_underflow_is_reported() {
        let s = TruncatedDensity1D::monodisperse(4).unwrap();
        let cfg = IntegratorConfig {
            method: Method::Rk45Adaptive {
                abs_tol: 1e-300,
                rel_tol: 0.0,
                initial_step: 0.5,
                min_step: 0.1,
            },
            t_end: 1.0,
        };
        assert!(matches!(
            integrate(&s, &cfg, &[1.0]),
            Err(Error::StepUnderflow { .. })
        ));
    }

    #[test]
    fn moments_examples() {
        let s = TruncatedDensity1D::monodisperse(3).unwrap();
        assert_eq!(moments_mono(&s).mass, 1.0);
        let p = BipartiteParams::new(1.0, 2.0).unwrap();
        let b = TruncatedDensity2D::initial(3, 3, p).unwrap();
        let m = moments_bi(&b);
        assert_eq!((m.left_mass, m.right_mass), (1.0, 2.0));
        assert_eq!(m.second, 3.0);

        let s = TruncatedDensity1D::monodisperse(200).unwrap();
        let out = integrate(&s, &IntegratorConfig::adaptive(2.0), &[2.0]).unwrap();
        let mass = moments_mono(&out[0]).mass;
        assert!((mass - x_of_t(2.0).unwrap() / 2.0).abs() < 2e-3);
    }
}
