//! Model-independent spectrum-broadcast-structure (SBS) machinery.
//!
//! Given a central state in its pointer basis, the branch states of every
//! observed environment and a projective measurement per environment, this
//! module builds the ideal SBS state the measurement induces and evaluates
//! the bounds on its distance to the actual reduced state: the collective
//! decoherence factor Γ, the cumulative discrimination errors, the
//! fidelity-based bound η and the mutual-information bound F.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::densmat::{partial_trace, tensor_all, von_neumann_entropy, ComplexMatrix, DensityMatrix, C64};
use crate::error::{invalid, Error, Result};

/// Projector idempotence / completeness tolerance.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Largest ε for which the mutual-information bound applies.
pub const COR2_THRESHOLD: f64 = 0.25;

/// Symmetric table indexed by unordered pointer pairs `(i, j)`, `i != j`.
pub type PairMap = BTreeMap<(usize, usize), f64>;

fn pair_lookup(map: &PairMap, i: usize, j: usize) -> Result<f64> {
    map.get(&(i, j))
        .or_else(|| map.get(&(j, i)))
        .copied()
        .ok_or(Error::MissingPair { i, j })
}

/// Central-system state in the pointer basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralState {
    rho: DensityMatrix,
}

impl CentralState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        let sum: f64 = (0..rho.dim()).map(|i| rho.matrix()[(i, i)].re).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadTrace { trace: sum });
        }
        Ok(Self { rho })
    }

    /// Assembles `σ_i` on the diagonal and `σ_ij` (upper triangle, `i < j`)
    /// off the diagonal.
    pub fn from_parts(sigma: &[f64], offdiag: &BTreeMap<(usize, usize), C64>) -> Result<Self> {
        let d = sigma.len();
        if d < 2 {
            return Err(invalid("sigma", "central dimension must be at least 2"));
        }
        if sigma.iter().any(|&s| !(s >= 0.0)) {
            return Err(invalid("sigma", "weights must be nonnegative"));
        }
        let mut m = ComplexMatrix::from_diag(sigma);
        for (&(i, j), &z) in offdiag {
            if i == j || i >= d || j >= d {
                return Err(invalid("offdiag", format!("bad index pair ({i}, {j})")));
            }
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        Self::new(DensityMatrix::new(m)?)
    }

    /// Qubit with `σ₊ = p_plus` and coherence `σ₊₋`.
    pub fn qubit(p_plus: f64, coherence: C64) -> Result<Self> {
        let mut off = BTreeMap::new();
        off.insert((0, 1), coherence);
        Self::from_parts(&[p_plus, 1.0 - p_plus], &off)
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.rho.matrix()[(i, i)].re
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.sigma(i)).collect()
    }

    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.rho.matrix()[(i, j)]
    }

    pub fn density_matrix(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Shannon entropy of the pointer weights, `H_S`, in bits.
    pub fn pointer_entropy(&self) -> f64 {
        shannon_entropy(&self.sigmas())
    }
}

/// Branch states of the observed environments and decoherence magnitudes
/// of the discarded ones.
#[derive(Clone, Debug)]
pub struct BranchEnsemble {
    /// `branches[k][i]` is `ρ_i^(k)`.
    pub branches: Vec<Vec<DensityMatrix>>,
    /// `Π_k |γ_ij^(k)|` over the unobserved environments, per pair.
    pub gamma_mags: PairMap,
}

impl BranchEnsemble {
    pub fn new(branches: Vec<Vec<DensityMatrix>>, gamma_mags: PairMap, d_s: usize) -> Result<Self> {
        for (k, env) in branches.iter().enumerate() {
            if env.len() != d_s {
                return Err(invalid(
                    "branches",
                    format!("environment {k} has {} branch states, expected {d_s}", env.len()),
                ));
            }
            if env.iter().any(|r| r.dim() != env[0].dim()) {
                return Err(invalid("branches", format!("environment {k} mixes dimensions")));
            }
        }
        for i in 0..d_s {
            for j in 0..d_s {
                if i != j {
                    let g = pair_lookup(&gamma_mags, i, j)?;
                    if !(0.0..=1.0 + 1e-12).contains(&g) {
                        return Err(invalid("gamma_mags", format!("|γ_{i}{j}| = {g} outside [0, 1]")));
                    }
                }
            }
        }
        Ok(Self { branches, gamma_mags })
    }

    pub fn num_envs(&self) -> usize {
        self.branches.len()
    }

    pub fn env_dims(&self) -> Vec<usize> {
        self.branches.iter().map(|b| b[0].dim()).collect()
    }

    /// Pairwise branch fidelities per environment.
    pub fn pair_fidelities(&self) -> Result<Vec<PairMap>> {
        self.branches
            .iter()
            .map(|env| {
                let mut map = PairMap::new();
                for i in 0..env.len() {
                    for j in i + 1..env.len() {
                        map.insert((i, j), crate::densmat::fidelity(&env[i], &env[j])?);
                    }
                }
                Ok(map)
            })
            .collect()
    }
}

/// Complete set of orthogonal projectors for each observed environment.
#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    pub per_env: Vec<Vec<ComplexMatrix>>,
}

impl ProjectorFamily {
    pub fn new(per_env: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        for set in &per_env {
            validate_projector_set(set)?;
        }
        Ok(Self { per_env })
    }
}

/// Checks `P² = P`, `P = P†`, `Σ P = 1` and `P_i P_j = 0`.
pub fn validate_projector_set(set: &[ComplexMatrix]) -> Result<()> {
    let Some(first) = set.first() else {
        return Err(Error::IncompleteProjectors("empty set".into()));
    };
    let dim = first.dim();
    let mut sum = ComplexMatrix::zeros(dim);
    for (i, p) in set.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        let herm = p.hermitian_asymmetry();
        let idem = p.matmul(p).max_abs_diff(p);
        if herm > PROJECTOR_TOL || idem > PROJECTOR_TOL {
            return Err(Error::IncompleteProjectors(format!(
                "element {i} is not an orthogonal projector (asymmetry {herm:e}, idempotence {idem:e})"
            )));
        }
        sum = sum.add(p);
    }
    let completeness = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if completeness > PROJECTOR_TOL {
        return Err(Error::IncompleteProjectors(format!(
            "projectors sum to identity only within {completeness:e}"
        )));
    }
    Ok(())
}

/// Γ = Σ_{i≠j} |σ_ij| Π_k |γ_ij^(k)|.
pub fn collective_gamma(central: &CentralState, gamma_mags: &PairMap) -> Result<f64> {
    let d = central.dim();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += central.coherence(i, j).norm() * pair_lookup(gamma_mags, i, j)?;
            }
        }
    }
    Ok(total)
}

/// `p_E = Σ_i p_i Tr[ρ_i (1 − P_i)]`.
pub fn discrimination_error(weights: &[f64], states: &[DensityMatrix], projectors: &[ComplexMatrix]) -> Result<f64> {
    if weights.len() != states.len() || states.len() != projectors.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: projectors.len().min(states.len()),
        });
    }
    validate_projector_set(projectors)?;
    let mut err = 0.0;
    for ((&w, rho), p) in weights.iter().zip(states).zip(projectors) {
        if rho.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                got: rho.dim(),
            });
        }
        let success = rho.matrix().matmul(p).trace().re;
        err += w * (1.0 - success);
    }
    Ok(err.clamp(0.0, 1.0))
}

/// Ideal SBS state induced by a measurement family.
#[derive(Clone, Debug)]
pub struct SbsState {
    /// `p_i ∝ σ_i r_i`.
    pub weights: Vec<f64>,
    /// `states[k][i] = P ρ_i^(k) P / p_i^(k)`; `None` where `p_i^(k) = 0`.
    pub states: Vec<Vec<Option<DensityMatrix>>>,
    /// `Σ_j σ_j r_j`.
    pub eta_norm: f64,
    /// `r_i = Π_k p_i^(k)`.
    pub success: Vec<f64>,
}

impl SbsState {
    /// `Σ_i p_i |i><i| ⊗ ⊗_k ρ̃_i^(k)`.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let d = self.weights.len();
        let env_dims: Vec<usize> = self
            .states
            .iter()
            .map(|env| env.iter().flatten().next().map_or(1, |r| r.dim()))
            .collect();
        let env_dim: usize = env_dims.iter().product();
        let mut out = ComplexMatrix::zeros(d * env_dim);
        for i in 0..d {
            let w = self.weights[i];
            if w == 0.0 {
                continue;
            }
            let factors: Vec<&ComplexMatrix> = self
                .states
                .iter()
                .map(|env| env[i].as_ref().expect("weighted branch has a state").matrix())
                .collect();
            let block = if factors.is_empty() {
                ComplexMatrix::identity(1)
            } else {
                tensor_all(factors)
            };
            for a in 0..env_dim {
                for b in 0..env_dim {
                    out[(i * env_dim + a, i * env_dim + b)] = block[(a, b)] * w;
                }
            }
        }
        DensityMatrix::assume_valid(out)
    }
}

/// Builds the SBS state by cutting coherences and projecting each branch.
pub fn build_sbs(central: &CentralState, branches: &BranchEnsemble, projectors: &ProjectorFamily) -> Result<SbsState> {
    let d = central.dim();
    if projectors.per_env.len() != branches.num_envs() {
        return Err(Error::DimensionMismatch {
            expected: branches.num_envs(),
            got: projectors.per_env.len(),
        });
    }
    let mut success = vec![1.0; d];
    let mut states = Vec::with_capacity(branches.num_envs());
    for (env, set) in branches.branches.iter().zip(&projectors.per_env) {
        if set.len() != d {
            return Err(Error::IncompleteProjectors(format!(
                "{} projectors for {d} pointer states",
                set.len()
            )));
        }
        let mut env_states = Vec::with_capacity(d);
        for i in 0..d {
            let p = &set[i];
            if p.dim() != env[i].dim() {
                return Err(Error::DimensionMismatch {
                    expected: env[i].dim(),
                    got: p.dim(),
                });
            }
            let projected = p.matmul(env[i].matrix()).matmul(p).hermitian_part();
            let pk = projected.trace().re.max(0.0);
            success[i] *= pk;
            env_states.push(if pk > 0.0 {
                Some(DensityMatrix::assume_valid(projected.scale_real(1.0 / pk)))
            } else {
                None
            });
        }
        states.push(env_states);
    }
    let eta_norm: f64 = (0..d).map(|i| central.sigma(i) * success[i]).sum();
    if eta_norm <= 0.0 {
        return Err(Error::DegenerateSbs);
    }
    let weights = (0..d).map(|i| central.sigma(i) * success[i] / eta_norm).collect();
    Ok(SbsState {
        weights,
        states,
        eta_norm,
        success,
    })
}

/// `Γ + Σ_k p_E^(k)`.
pub fn prop1_bound(gamma: f64, pe_list: &[f64]) -> f64 {
    gamma + pe_list.iter().sum::<f64>()
}

/// `Σ_{i≠j} √(p_i p_j) B(ρ_i, ρ_j)`.
pub fn barnum_knill_bound(weights: &[f64], pairwise_fidelities: &PairMap) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..weights.len() {
        for j in 0..weights.len() {
            if i != j {
                total += (weights[i] * weights[j]).sqrt() * pair_lookup(pairwise_fidelities, i, j)?;
            }
        }
    }
    Ok(total)
}

/// `η = Γ + Σ_{i≠j} √(σ_i σ_j) Σ_k B[ρ_i^(k), ρ_j^(k)]`.
pub fn cor1_eta(central: &CentralState, gamma: f64, per_env_pair_fidelities: &[PairMap]) -> Result<f64> {
    let sigma = central.sigmas();
    let mut total = gamma;
    for env in per_env_pair_fidelities {
        total += barnum_knill_bound(&sigma, env)?;
    }
    Ok(total)
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid("x", format!("{x} outside [0, 1]")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// F(x) with its applicability flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor2Bound {
    pub bound: f64,
    /// `x ≤ 1/4`.
    pub valid: bool,
}

/// `F(x) = 4h(2x) + 2h(x) + 10 x log₂ d_S`.
///
/// `h(2x)` is only defined for `x ≤ 1/2`; beyond that the bound is
/// reported as `+inf` and marked invalid.
pub fn cor2_bound(x: f64, d_s: usize) -> Result<Cor2Bound> {
    if !(x >= 0.0) {
        return Err(invalid("eps_or_eta", format!("{x} must be nonnegative")));
    }
    if d_s < 2 {
        return Err(invalid("d_s", "central dimension must be at least 2"));
    }
    let valid = x <= COR2_THRESHOLD;
    if x > 0.5 {
        return Ok(Cor2Bound {
            bound: f64::INFINITY,
            valid,
        });
    }
    let bound = 4.0 * binary_entropy(2.0 * x)? + 2.0 * binary_entropy(x)? + 10.0 * x * (d_s as f64).log2();
    Ok(Cor2Bound { bound, valid })
}

/// `I = S(ρ_S) + S(ρ_E) − S(ρ)` in bits, with `system_mask` selecting the
/// factors of the first party.
pub fn mutual_information(rho: &DensityMatrix, factor_dims: &[usize], system_mask: &[bool]) -> Result<f64> {
    if system_mask.len() != factor_dims.len() {
        return Err(Error::DimensionMismatch {
            expected: factor_dims.len(),
            got: system_mask.len(),
        });
    }
    if system_mask.iter().all(|&m| m) || !system_mask.iter().any(|&m| m) {
        return Err(invalid("system_mask", "both parties must be nonempty"));
    }
    let other: Vec<bool> = system_mask.iter().map(|&m| !m).collect();
    let rho_s = partial_trace(rho, factor_dims, system_mask)?;
    let rho_e = partial_trace(rho, factor_dims, &other)?;
    Ok(von_neumann_entropy(&rho_s) + von_neumann_entropy(&rho_e) - von_neumann_entropy(rho))
}

/// Equal-prior error of discriminating two states at trace norm distance
/// `trace_dist = ‖ρ − σ‖₁`: `(1/2)(1 − trace_dist/2)`.
pub fn fifty_fifty_error(trace_dist: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&trace_dist) {
        return Err(invalid("trace_dist", format!("{trace_dist} outside [0, 2]")));
    }
    Ok(0.5 * (1.0 - 0.5 * trace_dist))
}

/// Momentary diagnostics at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: f64,
    pub gamma: f64,
    /// `p_E^(k)` per observed environment under the chosen measurement.
    pub pe: Vec<f64>,
    pub prop1_bound: f64,
    pub eta_cor1: f64,
    /// `F(ε)` when the exact ε is available, else `F(η)`.
    pub f_bound: Option<Cor2Bound>,
    pub epsilon_exact: Option<f64>,
    pub fifty_fifty_error: Option<f64>,
}
