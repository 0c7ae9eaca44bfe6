//! Two-state discrimination: Helstrom measurements (general and the
//! closed form for one environment spin), the majority-vote measurement on a
//! macrofraction, and the Chernoff / Kolmogorov / Fuchs bounds around it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densmat::{hermitian_eigensystem, tensor_all, ComplexMatrix, DensityMatrix, C64};
use crate::ensemble::{mean_and_stderr, sample_spin, stream_rng, MeasureSpec, StreamDomain};
use crate::error::{invalid, Error, Result};
use crate::spin_model::{delta, SpinParams};

/// Eigenvalues of `ρ₊ − ρ₋` at or below this count as non-positive.
pub const HELSTROM_TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorPair {
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
}

impl ProjectorPair {
    pub fn swapped(&self) -> Self {
        Self {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    pub fn as_vec(&self) -> Vec<ComplexMatrix> {
        vec![self.plus.clone(), self.minus.clone()]
    }
}

/// Helstrom measurement: `P₊` projects on the strictly positive eigenspace
/// of `ρ₊ − ρ₋`. Identical states give `P₊ = 0`.
pub fn helstrom_pair(rho_plus: &DensityMatrix, rho_minus: &DensityMatrix) -> Result<ProjectorPair> {
    weighted_helstrom_pair(1.0, rho_plus, 1.0, rho_minus)
}

/// Helstrom measurement for priors `(w₊, w₋)`: the positive eigenspace of
/// `w₊ρ₊ − w₋ρ₋`.
pub fn weighted_helstrom_pair(
    w_plus: f64,
    rho_plus: &DensityMatrix,
    w_minus: f64,
    rho_minus: &DensityMatrix,
) -> Result<ProjectorPair> {
    if rho_plus.dim() != rho_minus.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_plus.dim(),
            got: rho_minus.dim(),
        });
    }
    if !(w_plus >= 0.0 && w_minus >= 0.0) {
        return Err(invalid("priors", "weights must be nonnegative"));
    }
    let diff = rho_plus
        .matrix()
        .scale_real(w_plus)
        .sub(&rho_minus.matrix().scale_real(w_minus));
    let spec = hermitian_eigensystem(&diff)?;
    let plus = spec.apply(|x| if x > HELSTROM_TIE_TOL { 1.0 } else { 0.0 });
    let minus = ComplexMatrix::identity(rho_plus.dim()).sub(&plus);
    Ok(ProjectorPair { plus, minus })
}

/// `(1/2)(Tr[ρ₋ P₊] + Tr[ρ₊ P₋])`.
pub fn equal_prior_error(pair: &ProjectorPair, rho_plus: &DensityMatrix, rho_minus: &DensityMatrix) -> f64 {
    let wrong_minus = rho_minus.matrix().matmul(&pair.plus).trace().re;
    let wrong_plus = rho_plus.matrix().matmul(&pair.minus).trace().re;
    0.5 * (wrong_minus + wrong_plus)
}

/// Closed-form Helstrom projectors of one spin; `degenerate` marks the
/// `δ = 0` / `sin(g t) = 0` case where the canonical `diag(1, 0)` is used.
#[derive(Clone, Debug, PartialEq)]
pub struct HelstromSpin {
    pub pair: ProjectorPair,
    pub degenerate: bool,
}

/// `P± = [[1/2, ±sgn(sin g t) iδ/(2|δ|)], [∓sgn(sin g t) iδ*/(2|δ|), 1/2]]`.
pub fn helstrom_spin_analytic(p: &SpinParams, t: f64) -> HelstromSpin {
    let d = delta(p);
    let s = (p.g * t).sin();
    if 2.0 * d.norm() * s.abs() <= HELSTROM_TIE_TOL {
        let plus = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let minus = ComplexMatrix::from_diag(&[0.0, 1.0]);
        return HelstromSpin {
            pair: ProjectorPair { plus, minus },
            degenerate: true,
        };
    }
    let u = C64::i() * d / d.norm() * s.signum() * 0.5;
    let half = C64::new(0.5, 0.0);
    let plus = ComplexMatrix::from_rows(&[vec![half, u], vec![u.conj(), half]]);
    let minus = ComplexMatrix::from_rows(&[vec![half, -u], vec![-u.conj(), half]]);
    HelstromSpin {
        pair: ProjectorPair { plus, minus },
        degenerate: false,
    }
}

/// Helstrom success probability of one spin, `1/2 + |δ| |sin(g t)|`.
pub fn local_success_probability(p: &SpinParams, t: f64) -> f64 {
    0.5 + delta(p).norm() * (p.g * t).sin().abs()
}

/// Monte Carlo estimate of the mean local success probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub p_bar: f64,
    /// `p̄ − 1/2`.
    pub s_bar: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Averages [`local_success_probability`] over i.i.d. draws of `measure`.
/// Deterministic in `seed` regardless of thread count.
pub fn mean_success(measure: &MeasureSpec, t: f64, samples: usize, seed: u64) -> Result<SuccessEstimate> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    measure.validate()?;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, StreamDomain::MeanSuccess, k);
            local_success_probability(&sample_spin(measure, &mut rng), t)
        })
        .collect();
    let (p_bar, std_err) = mean_and_stderr(&values);
    Ok(SuccessEstimate {
        p_bar,
        s_bar: (p_bar - 0.5).max(0.0),
        std_err,
        samples,
    })
}

/// Natural log of the binomial coefficient C(n, k).
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|m| ((n - k + m) as f64).ln() - (m as f64).ln()).sum()
}

/// `ln Σ_{k∈range} C(n,k) p^k (1−p)^{n−k}`, evaluated with incremental
/// log terms and a log-sum-exp.
fn ln_binomial_mass(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    let mut log_c = ln_choose(n, lo);
    let mut terms = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        terms.push(log_c + k as f64 * lp + (n - k) as f64 * lq);
        if k < hi {
            log_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
        }
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Probability that a strict majority of `n_m` Bernoulli(`p`) trials
/// succeed; ties count as failure.
pub fn majority_success(n_m: u64, p: f64) -> Result<f64> {
    if n_m == 0 {
        return Err(invalid("n_m", "need at least one trial"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p_bar", format!("{p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.5 {
        // symmetric case: exactly 1/2 for odd n, minus half the tie mass for even n
        return Ok(if n_m % 2 == 1 {
            0.5
        } else {
            let tie = (ln_choose(n_m, n_m / 2) - n_m as f64 * std::f64::consts::LN_2).exp();
            0.5 * (1.0 - tie)
        });
    }
    let threshold = n_m / 2 + 1;
    let value = if p > 0.5 {
        // complement keeps full relative precision of the small lower tail
        -ln_binomial_mass(n_m, p, 0, threshold - 1).exp_m1()
    } else {
        ln_binomial_mass(n_m, p, threshold, n_m).exp()
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Strict-majority probability for independent trials with individual
/// success probabilities (Poisson-binomial), by O(n²) convolution.
pub fn majority_success_heterogeneous(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(invalid("probs", "need at least one trial"));
    }
    if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid("probs", format!("{bad} outside [0, 1]")));
    }
    let n = probs.len();
    let mut dist = vec![0.0; n + 1];
    dist[0] = 1.0;
    for (m, &p) in probs.iter().enumerate() {
        for k in (0..=m + 1).rev() {
            let stay = dist[k] * (1.0 - p);
            let step = if k > 0 { dist[k - 1] * p } else { 0.0 };
            dist[k] = stay + step;
        }
    }
    let total: f64 = dist[n / 2 + 1..].iter().sum();
    Ok(total.clamp(0.0, 1.0))
}

/// `1 − exp(−N_m S̄² / 2)`.
pub fn chernoff_bound(n_m: u64, s_bar: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&s_bar) {
        return Err(invalid("s_bar", format!("{s_bar} outside [0, 1/2]")));
    }
    Ok(-(-0.5 * n_m as f64 * s_bar * s_bar).exp_m1())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovFuchs {
    /// `|2p̃ − 1|`.
    pub k: f64,
    /// `1 − B²/2`.
    pub fuchs_limit: f64,
    pub ok: bool,
}

pub fn kolmogorov_fuchs(p_tilde: f64, b_mac: f64) -> Result<KolmogorovFuchs> {
    if !(0.0..=1.0).contains(&p_tilde) {
        return Err(invalid("p_tilde", format!("{p_tilde} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&b_mac) {
        return Err(invalid("b_mac", format!("{b_mac} outside [0, 1]")));
    }
    let k = (2.0 * p_tilde - 1.0).abs();
    let fuchs_limit = 1.0 - 0.5 * b_mac * b_mac;
    Ok(KolmogorovFuchs {
        k,
        fuchs_limit,
        ok: k <= fuchs_limit + 1e-9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorityStats {
    pub n_m: u64,
    pub p_bar: f64,
    pub s_bar: f64,
    pub p_tilde_exact: f64,
    pub chernoff_lb: f64,
}

/// Majority-vote statistics for i.i.d. trials with mean success `p_bar ≥ 1/2`.
pub fn majority_stats(n_m: u64, p_bar: f64) -> Result<MajorityStats> {
    let s_bar = (p_bar - 0.5).max(0.0);
    Ok(MajorityStats {
        n_m,
        p_bar,
        s_bar,
        p_tilde_exact: majority_success(n_m, p_bar)?,
        chernoff_lb: chernoff_bound(n_m, s_bar.min(0.5))?,
    })
}

/// Majority measurement on a macrofraction built from per-spin projector
/// pairs: `P₊ = Σ_{s with more '+' than '−'} ⊗_j P_{s_j}`, `P₋ = 1 − P₊`.
pub fn majority_projectors(locals: &[ProjectorPair]) -> Result<ProjectorPair> {
    let m = locals.len();
    if m == 0 {
        return Err(invalid("locals", "need at least one spin"));
    }
    if m > 12 {
        return Err(invalid(
            "locals",
            format!("{m} spins exceed the dense enumeration limit 12"),
        ));
    }
    let dim: usize = locals.iter().map(|p| p.plus.dim()).product();
    let mut plus = ComplexMatrix::zeros(dim);
    for mask in 0u32..(1u32 << m) {
        let ones = mask.count_ones() as usize;
        if 2 * ones <= m {
            continue;
        }
        let factors: Vec<&ComplexMatrix> = (0..m)
            .map(|j| {
                if mask >> (m - 1 - j) & 1 == 1 {
                    &locals[j].plus
                } else {
                    &locals[j].minus
                }
            })
            .collect();
        plus = plus.add(&tensor_all(factors));
    }
    let minus = ComplexMatrix::identity(dim).sub(&plus);
    Ok(ProjectorPair { plus, minus })
}
