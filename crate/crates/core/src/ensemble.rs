//! Random spin parameters (Haar angles, Hilbert–Schmidt eigenvalues,
//! uniform couplings), seeded Monte Carlo averages, time averages and the
//! figure pipelines built on them.
//!
//! Every random draw comes from a counter-based stream keyed by
//! `(master seed, domain, sample index)`, and every reduction is a pairwise
//! sum over index order, so results do not depend on thread scheduling.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::config::RunConfig;
use crate::error::{invalid, Result};
use crate::spin_model::{
    decoherence_magnitude, lln_exponents, macrofraction_fidelity, short_time_exponents, SpinParams,
};

/// Relative change allowed when the quadrature grid is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleMeasure {
    Haar,
    Fixed { alpha: f64, beta: f64, gamma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaMeasure {
    HilbertSchmidt,
    Fixed { value: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingMeasure {
    Uniform { low: f64, high: f64 },
    Fixed { value: f64 },
}

/// Distribution of one environment spin's parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSpec {
    pub angles: AngleMeasure,
    pub lambda: LambdaMeasure,
    pub coupling: CouplingMeasure,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        Self {
            angles: AngleMeasure::Haar,
            lambda: LambdaMeasure::HilbertSchmidt,
            coupling: CouplingMeasure::Uniform { low: 0.0, high: 1.0 },
        }
    }
}

impl MeasureSpec {
    pub fn fixed(p: &SpinParams) -> Self {
        Self {
            angles: AngleMeasure::Fixed {
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma_euler,
            },
            lambda: LambdaMeasure::Fixed { value: p.lambda },
            coupling: CouplingMeasure::Fixed { value: p.g },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let AngleMeasure::Fixed { alpha, beta, gamma } = self.angles {
            SpinParams::new(alpha, beta, gamma, 0.5, 0.0).map_err(|_| {
                invalid(
                    "measure.angles",
                    format!("fixed angles ({alpha}, {beta}, {gamma}) out of range"),
                )
            })?;
        }
        if let LambdaMeasure::Fixed { value } = self.lambda {
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid("measure.lambda", format!("{value} outside [0, 1]")));
            }
        }
        match self.coupling {
            CouplingMeasure::Uniform { low, high } => {
                if !(low < high && low.is_finite() && high.is_finite()) {
                    return Err(invalid(
                        "measure.coupling",
                        format!("need low < high, got [{low}, {high}]"),
                    ));
                }
            }
            CouplingMeasure::Fixed { value } => {
                if !value.is_finite() {
                    return Err(invalid("measure.coupling", "fixed coupling must be finite"));
                }
            }
        }
        Ok(())
    }

    /// `E[g²]` of the coupling distribution.
    pub fn g2bar(&self) -> f64 {
        match self.coupling {
            CouplingMeasure::Uniform { low, high } => (low * low + low * high + high * high) / 3.0,
            CouplingMeasure::Fixed { value } => value * value,
        }
    }
}

/// Independent RNG stream families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamDomain {
    MeanSuccess,
    Fig1,
    Fig2,
    Exponents,
    Discrimination,
    Oracle,
    Moments,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            Self::MeanSuccess => 1,
            Self::Fig1 => 2,
            Self::Fig2 => 3,
            Self::Exponents => 4,
            Self::Discrimination => 5,
            Self::Oracle => 6,
            Self::Moments => 7,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// RNG for sample `index` of `domain` under `seed`.
pub fn stream_rng(seed: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(domain.tag()));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Like [`stream_rng`] with an extra sub-key (e.g. a grid node or a size).
pub fn keyed_stream_rng(seed: u64, domain: StreamDomain, key: u64, index: u64) -> ChaCha8Rng {
    stream_rng(splitmix64(seed ^ splitmix64(key.wrapping_add(0xA5A5))), domain, index)
}

/// Haar polar angle: density `sin β / 2` on `[0, π]`.
pub fn sample_haar_beta(rng: &mut impl Rng) -> f64 {
    (1.0 - 2.0 * rng.gen::<f64>()).clamp(-1.0, 1.0).acos()
}

/// Hilbert–Schmidt qubit eigenvalue: density `3(2λ−1)²` on `[0, 1]`, by
/// inverting the CDF `((2λ−1)³ + 1)/2`.
pub fn sample_hs_lambda(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    (0.5 * ((2.0 * u - 1.0).cbrt() + 1.0)).clamp(0.0, 1.0)
}

pub fn sample_coupling(measure: &CouplingMeasure, rng: &mut impl Rng) -> f64 {
    match *measure {
        CouplingMeasure::Uniform { low, high } => low + (high - low) * rng.gen::<f64>(),
        CouplingMeasure::Fixed { value } => value,
    }
}

/// One draw of spin parameters.
pub fn sample_spin(measure: &MeasureSpec, rng: &mut impl Rng) -> SpinParams {
    let (alpha, beta, gamma_euler) = match measure.angles {
        AngleMeasure::Haar => {
            let alpha = TAU * rng.gen::<f64>();
            let beta = sample_haar_beta(rng);
            let gamma = TAU * rng.gen::<f64>();
            (alpha, beta, gamma)
        }
        AngleMeasure::Fixed { alpha, beta, gamma } => (alpha, beta, gamma),
    };
    let lambda = match measure.lambda {
        LambdaMeasure::HilbertSchmidt => sample_hs_lambda(rng),
        LambdaMeasure::Fixed { value } => value,
    };
    let g = sample_coupling(&measure.coupling, rng);
    SpinParams {
        alpha,
        beta,
        gamma_euler,
        lambda,
        g,
    }
}

pub fn sample_spins(measure: &MeasureSpec, count: usize, rng: &mut impl Rng) -> Vec<SpinParams> {
    (0..count).map(|_| sample_spin(measure, rng)).collect()
}

/// Pairwise (tree) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Trapezoidal integral of equally spaced samples.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner = pairwise_sum(&values[1..n - 1]);
    dt * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// `(1/τ) ∫₀^τ f(t) dt` by the trapezoidal rule on `grid_points` nodes.
pub fn time_average(curve_fn: impl Fn(f64) -> f64 + Sync, tau: f64, grid_points: usize) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("{tau} must be positive")));
    }
    if grid_points < 2 {
        return Err(invalid("grid_points", "need at least 2 nodes"));
    }
    let dt = tau / (grid_points - 1) as f64;
    let values: Vec<f64> = (0..grid_points).map(|k| curve_fn(k as f64 * dt)).collect();
    Ok(trapezoid(&values, dt) / tau)
}

/// Time average with the doubling gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatedAverage {
    /// Value on the doubled grid.
    pub value: f64,
    /// Value on the requested grid.
    pub coarse: f64,
    pub relative_change: f64,
    pub converged: bool,
}

fn gate(fine: f64, coarse: f64) -> GatedAverage {
    let scale = fine.abs().max(coarse.abs());
    let relative_change = if scale == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / scale
    };
    GatedAverage {
        value: fine,
        coarse,
        relative_change,
        converged: relative_change < CONVERGENCE_TOL || (fine - coarse).abs() < 1e-12,
    }
}

/// Averages on `grid_points` and on the doubled grid (`2·grid_points − 1`
/// nodes, sharing every other node) and reports the relative change.
pub fn time_average_gated(curve_fn: impl Fn(f64) -> f64, tau: f64, grid_points: usize) -> Result<GatedAverage> {
    if !(tau > 0.0) || grid_points < 2 {
        return Err(invalid("tau", "need tau > 0 and at least 2 nodes"));
    }
    let fine_points = 2 * grid_points - 1;
    let dt = tau / (fine_points - 1) as f64;
    let fine: Vec<f64> = (0..fine_points).map(|k| curve_fn(k as f64 * dt)).collect();
    Ok(gated_from_fine(&fine, tau))
}

fn gated_from_fine(fine: &[f64], tau: f64) -> GatedAverage {
    let dt = tau / (fine.len() - 1) as f64;
    let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();
    gate(trapezoid(fine, dt) / tau, trapezoid(&coarse, 2.0 * dt) / tau)
}

/// Mean curve with standard errors over Monte Carlo draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageCurve {
    pub abscissa: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
}

impl AverageCurve {
    /// Builds the curve from per-draw rows (`rows[sample][point]`).
    pub fn from_rows(abscissa: Vec<f64>, rows: &[Vec<f64>]) -> Self {
        let points = abscissa.len();
        let mut mean = Vec::with_capacity(points);
        let mut stderr = Vec::with_capacity(points);
        let mut column = vec![0.0; rows.len()];
        for k in 0..points {
            for (c, row) in column.iter_mut().zip(rows) {
                *c = row[k];
            }
            let (m, s) = mean_and_stderr(&column);
            mean.push(m);
            stderr.push(s);
        }
        Self {
            abscissa,
            mean,
            stderr,
            samples: rows.len(),
        }
    }
}

/// Evaluates the time averages of `B(t)` and `|γ(t)|` on the fine grid
/// `k·dt` with per-spin rotation recurrences for `(cos g t, sin g t)`.
fn fig1_node_averages(
    observed: &[SpinParams],
    unobserved: &[SpinParams],
    tau: f64,
    points: usize,
) -> (GatedAverage, GatedAverage) {
    const RESYNC: usize = 256;
    let fine_points = 2 * points - 1;
    let dt = tau / (fine_points - 1) as f64;

    let prep = |spins: &[SpinParams]| -> Vec<(f64, f64, f64, f64)> {
        // (cos g dt, sin g dt, coefficient, g)
        spins
            .iter()
            .map(|p| {
                let (s, c) = (p.g * dt).sin_cos();
                (c, s, 0.0, p.g)
            })
            .collect()
    };
    let mut obs = prep(observed);
    for (o, p) in obs.iter_mut().zip(observed) {
        o.2 = (p.polarization() * p.beta.sin()).powi(2);
    }
    let mut unobs = prep(unobserved);
    for (u, p) in unobs.iter_mut().zip(unobserved) {
        u.2 = (p.polarization() * p.beta.cos()).powi(2);
    }
    let mut obs_state: Vec<(f64, f64)> = vec![(1.0, 0.0); obs.len()];
    let mut unobs_state: Vec<(f64, f64)> = vec![(1.0, 0.0); unobs.len()];

    let mut b_vals = Vec::with_capacity(fine_points);
    let mut g_vals = Vec::with_capacity(fine_points);
    for k in 0..fine_points {
        if k % RESYNC == 0 {
            let t = k as f64 * dt;
            for (st, o) in obs_state.iter_mut().zip(&obs) {
                let (s, c) = (o.3 * t).sin_cos();
                *st = (c, s);
            }
            for (st, u) in unobs_state.iter_mut().zip(&unobs) {
                let (s, c) = (u.3 * t).sin_cos();
                *st = (c, s);
            }
        }
        // B = Π √(1 − x sin²), |γ| = Π √(cos² + c² sin²); products of squares
        // are accumulated in log space once they get small.
        let mut b_log = 0.0;
        let mut b_prod = 1.0;
        for ((c, s), o) in obs_state.iter().zip(&obs) {
            let _ = c;
            b_prod *= (1.0 - o.2 * s * s).max(0.0);
            if b_prod < 1e-200 {
                b_log += b_prod.ln();
                b_prod = 1.0;
            }
        }
        let mut g_log = 0.0;
        let mut g_prod = 1.0;
        for ((c, s), u) in unobs_state.iter().zip(&unobs) {
            g_prod *= c * c + u.2 * s * s;
            if g_prod < 1e-200 {
                g_log += g_prod.ln();
                g_prod = 1.0;
            }
        }
        b_vals.push((0.5 * (b_log + b_prod.ln())).exp());
        g_vals.push(if unobs.is_empty() {
            1.0
        } else {
            (0.5 * (g_log + g_prod.ln())).exp()
        });

        for (st, o) in obs_state.iter_mut().zip(&obs) {
            *st = (st.0 * o.0 - st.1 * o.1, st.1 * o.0 + st.0 * o.1);
        }
        for (st, u) in unobs_state.iter_mut().zip(&unobs) {
            *st = (st.0 * u.0 - st.1 * u.1, st.1 * u.0 + st.0 * u.1);
        }
    }
    (gated_from_fine(&b_vals, tau), gated_from_fine(&g_vals, tau))
}

/// One node of the time-averaged surfaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub lambda_plus: f64,
    pub beta: f64,
    pub mean_b: f64,
    pub mean_abs_gamma: f64,
    pub stderr_b: f64,
    pub stderr_gamma: f64,
    /// Largest relative change under grid doubling over all realizations.
    pub worst_relative_change: f64,
    pub converged: bool,
}

/// Time-averaged `⟨B⟩` and `⟨|γ|⟩` over a `(λ₊, β)` grid. All spins of a node
/// share `(λ₊, β)`; couplings are drawn afresh for each realization. The
/// observed macrofraction has `N_m` spins and `(1−f)N` spins are discarded.
pub fn fig1_surface(config: &RunConfig, lambda_grid: &[f64], beta_grid: &[f64]) -> Result<Vec<Fig1Row>> {
    if lambda_grid.is_empty() || beta_grid.is_empty() {
        return Err(invalid("fig1", "grids must be nonempty"));
    }
    let n_m = config.environment.macrofraction_size;
    let n_un = config.environment.unobserved();
    let tau = config.average.tau;
    let points = config.average.points;
    let reals = config.fig1.realizations;
    let nodes: Vec<(usize, f64, f64)> = lambda_grid
        .iter()
        .flat_map(|&l| beta_grid.iter().map(move |&b| (l, b)))
        .enumerate()
        .map(|(i, (l, b))| (i, l, b))
        .collect();

    nodes
        .par_iter()
        .map(|&(node, lambda, beta)| {
            let mut bs = Vec::with_capacity(reals);
            let mut gs = Vec::with_capacity(reals);
            let mut worst: f64 = 0.0;
            let mut converged = true;
            for r in 0..reals {
                let mut rng = keyed_stream_rng(config.seed, StreamDomain::Fig1, node as u64, r as u64);
                let mut draw = |count: usize| -> Vec<SpinParams> {
                    (0..count)
                        .map(|_| SpinParams {
                            alpha: 0.0,
                            beta,
                            gamma_euler: 0.0,
                            lambda,
                            g: sample_coupling(&config.measure.coupling, &mut rng),
                        })
                        .collect()
                };
                let observed = draw(n_m);
                let unobserved = draw(n_un);
                let (b, g) = fig1_node_averages(&observed, &unobserved, tau, points);
                worst = worst.max(b.relative_change).max(g.relative_change);
                converged &= b.converged && g.converged;
                bs.push(b.value);
                gs.push(g.value);
            }
            let (mean_b, stderr_b) = mean_and_stderr(&bs);
            let (mean_abs_gamma, stderr_gamma) = mean_and_stderr(&gs);
            Ok(Fig1Row {
                lambda_plus: lambda,
                beta,
                mean_b,
                mean_abs_gamma,
                stderr_b,
                stderr_gamma,
                worst_relative_change: worst,
                converged,
            })
        })
        .collect()
}

/// Evenly spaced grid over `[lo, hi]` with exact endpoints.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        n => (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default surface grids: `λ₊ ∈ [1/2, 1]`, `β ∈ [0, π]`.
pub fn fig1_default_grids(config: &RunConfig) -> (Vec<f64>, Vec<f64>) {
    (
        linspace(0.5, 1.0, config.fig1.lambda_points),
        linspace(0.0, PI, config.fig1.beta_points),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Curve {
    pub n: usize,
    pub curve: AverageCurve,
}

/// Monte Carlo mean of the pessimistic-qubit bound `|γ(t)| + B(t)` with `n`
/// unobserved spins and one observed macrofraction of `n` spins.
pub fn fig2_curves(n_values: &[usize], config: &RunConfig) -> Result<Vec<Fig2Curve>> {
    if n_values.is_empty() {
        return Err(invalid("fig2.n_values", "need at least one size"));
    }
    let times = config.time.values();
    n_values
        .iter()
        .map(|&n| {
            let rows: Vec<Vec<f64>> = (0..config.samples as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng = keyed_stream_rng(config.seed, StreamDomain::Fig2, n as u64, k);
                    let unobserved = sample_spins(&config.measure, n, &mut rng);
                    let observed = sample_spins(&config.measure, n, &mut rng);
                    times
                        .iter()
                        .map(|&t| decoherence_magnitude(&unobserved, t) + macrofraction_fidelity(&observed, t))
                        .collect()
                })
                .collect();
            Ok(Fig2Curve {
                n,
                curve: AverageCurve::from_rows(times.clone(), &rows),
            })
        })
        .collect()
}

/// Monte Carlo exponents against their short-time forms at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub t: f64,
    pub kappa_mc: f64,
    pub chi_mc: f64,
    pub kappa_stderr: f64,
    pub chi_stderr: f64,
    pub kappa_short: f64,
    pub chi_short: f64,
}

/// Means of `(κ_j, χ_j)` over draws of `measure` versus `((2/5) ḡ² t², (4/5) ḡ² t²)`.
/// The same parameter draws are reused at every time.
pub fn exponent_check(measure: &MeasureSpec, t_grid: &[f64], samples: usize, seed: u64) -> Result<Vec<ExponentRow>> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    measure.validate()?;
    let draws: Vec<SpinParams> = (0..samples as u64)
        .into_par_iter()
        .map(|k| sample_spin(measure, &mut stream_rng(seed, StreamDomain::Exponents, k)))
        .collect();
    let g2bar = measure.g2bar();
    Ok(t_grid
        .iter()
        .map(|&t| {
            let (ks, cs): (Vec<f64>, Vec<f64>) = draws.iter().map(|p| lln_exponents(p, t)).unzip();
            let (kappa_mc, kappa_stderr) = mean_and_stderr(&ks);
            let (chi_mc, chi_stderr) = mean_and_stderr(&cs);
            let (kappa_short, chi_short) = short_time_exponents(g2bar, t);
            ExponentRow {
                t,
                kappa_mc,
                chi_mc,
                kappa_stderr,
                chi_stderr,
                kappa_short,
                chi_short,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_measure_is_verbatim() {
        let p = SpinParams::new(0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        let m = MeasureSpec::fixed(&p);
        let mut rng = stream_rng(1, StreamDomain::Moments, 0);
        assert_eq!(sample_spin(&m, &mut rng), p);
    }

    #[test]
    fn samples_are_in_range() {
        let m = MeasureSpec::default();
        let mut rng = stream_rng(3, StreamDomain::Moments, 0);
        for _ in 0..10_000 {
            sample_spin(&m, &mut rng).validate().unwrap();
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(9, StreamDomain::Fig2, 4).gen();
        let b: f64 = stream_rng(9, StreamDomain::Fig2, 4).gen();
        let c: f64 = stream_rng(9, StreamDomain::Fig2, 5).gen();
        let d: f64 = stream_rng(9, StreamDomain::Fig1, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn g2bar_values() {
        assert!((MeasureSpec::default().g2bar() - 1.0 / 3.0).abs() < 1e-15);
        let m = MeasureSpec {
            coupling: CouplingMeasure::Fixed { value: 2.0 },
            ..MeasureSpec::default()
        };
        assert_eq!(m.g2bar(), 4.0);
    }

    #[test]
    fn time_average_examples() {
        assert_eq!(time_average(|_| 1.0, 3.0, 17).unwrap(), 1.0);
        let v = time_average(|t: f64| t.cos().abs(), 20.0 * PI, 200_001).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-6);
        let gated = time_average_gated(|t: f64| t.cos().abs(), 20.0 * PI, 200_001).unwrap();
        assert!(gated.converged);
        assert!(time_average(|_| 1.0, 0.0, 10).is_err());
        assert!(time_average(|_| 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn maximally_mixed_spins_never_orthogonalize() {
        let p = SpinParams::new(0.0, 1.0, 0.0, 0.5, 0.7).unwrap();
        let v = time_average(|t| macrofraction_fidelity(&[p; 10], t), 50.0, 1001).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let spins: Vec<SpinParams> = (0..40)
            .map(|k| SpinParams::new(0.0, 1.1, 0.0, 0.85, 0.02 * (k + 1) as f64).unwrap())
            .collect();
        let (b, g) = fig1_node_averages(&spins[..20], &spins[20..], 50.0, 2001);
        let direct_b = time_average(|t| macrofraction_fidelity(&spins[..20], t), 50.0, 4001).unwrap();
        let direct_g = time_average(|t| decoherence_magnitude(&spins[20..], t), 50.0, 4001).unwrap();
        assert!((b.value - direct_b).abs() < 1e-12);
        assert!((g.value - direct_g).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_is_exact_on_small_integers() {
        let v: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        let (m, s) = mean_and_stderr(&[2.0, 2.0, 2.0]);
        assert_eq!((m, s), (2.0, 0.0));
    }
}
