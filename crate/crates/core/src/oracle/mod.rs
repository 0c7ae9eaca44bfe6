//! Brute-force simulator for small instances: a central qudit coupled to a
//! handful of environment qubits through `A ⊗ Σ_k B_k`, evolved with
//! explicitly exponentiated matrices. Used to certify the closed forms of
//! [`crate::spin_model`] and every inequality of [`crate::sbs`].

pub mod suite;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::densmat::{
    hermitian_eigensystem, partial_trace, tensor_all, trace_distance, ComplexMatrix, DensityMatrix, C64,
};
use crate::discrimination::{helstrom_pair, majority_projectors, weighted_helstrom_pair, ProjectorPair};
use crate::ensemble::{sample_spin, MeasureSpec};
use crate::error::{invalid, Error, Result};
use crate::sbs::{
    build_sbs, collective_gamma, cor1_eta, cor2_bound, discrimination_error, mutual_information, prop1_bound,
    shannon_entropy, BoundReport, BranchEnsemble, CentralState, Cor2Bound, PairMap, ProjectorFamily, SbsState,
};
use crate::spin_model::{
    cross_branch_state, decoherence_factor, initial_spin_state, EnvironmentSpec, MacrofractionSpec, SpinParams,
};

/// Largest joint dimension `d_S · 2^N` the simulator accepts.
pub const DIMENSION_CAP: usize = 4096;

/// Gram-matrix eigenvalue below which branch states count as linearly
/// dependent for the square-root measurement.
const SRM_GRAM_TOL: f64 = 1e-6;

/// `exp(i t H)` through the eigendecomposition of `H`.
pub fn exp_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eigensystem(h)?;
    let d = h.dim();
    let phases = ComplexMatrix::from_fn(d, |r, c| {
        if r == c {
            C64::from_polar(1.0, t * spec.values[r])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(phases.conjugate_by(&spec.vectors))
}

/// Pointer eigenvalues `a_i` of the central observable. Each environment
/// qubit couples through `B_k = g_k σ_z / 2` and evolves in branch `i` with
/// `U_i^(k)(t) = exp(+i a_i B_k t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub pointer_values: Vec<f64>,
}

impl InteractionSpec {
    pub fn new(pointer_values: Vec<f64>) -> Result<Self> {
        if pointer_values.len() < 2 {
            return Err(invalid("pointer_values", "need at least two pointer states"));
        }
        if pointer_values.iter().any(|a| !a.is_finite()) {
            return Err(invalid("pointer_values", "eigenvalues must be finite"));
        }
        Ok(Self { pointer_values })
    }

    /// Central qubit with `A = σ_z`.
    pub fn qubit() -> Self {
        Self {
            pointer_values: vec![1.0, -1.0],
        }
    }

    pub fn d_s(&self) -> usize {
        self.pointer_values.len()
    }

    pub fn coupling_operator(g: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[0.5 * g, -0.5 * g])
    }

    pub fn branch_unitary(&self, i: usize, g: f64, t: f64) -> Result<ComplexMatrix> {
        let h = Self::coupling_operator(g).scale_real(self.pointer_values[i]);
        exp_i(&h, t)
    }
}

/// Initial states of all spins (observed macrofractions first, in order,
/// then the unobserved ones) and their branch unitaries.
struct Dynamics {
    rho0: Vec<ComplexMatrix>,
    /// `unitaries[k][i]`.
    unitaries: Vec<Vec<ComplexMatrix>>,
}

impl Dynamics {
    fn new(env: &EnvironmentSpec, inter: &InteractionSpec, t: f64) -> Result<Self> {
        let spins = all_spins(env);
        let rho0 = spins.iter().map(|p| initial_spin_state(p).into_matrix()).collect();
        let unitaries = spins
            .iter()
            .map(|p| (0..inter.d_s()).map(|i| inter.branch_unitary(i, p.g, t)).collect())
            .collect::<Result<_>>()?;
        Ok(Self { rho0, unitaries })
    }

    /// `U_i ρ U_j†` of spin `k`.
    fn cross(&self, k: usize, i: usize, j: usize) -> ComplexMatrix {
        self.unitaries[k][i]
            .matmul(&self.rho0[k])
            .matmul(&self.unitaries[k][j].adjoint())
    }
}

fn all_spins(env: &EnvironmentSpec) -> Vec<SpinParams> {
    env.observed
        .iter()
        .flat_map(|m| m.spins.iter().copied())
        .chain(env.unobserved.iter().copied())
        .collect()
}

fn check_dims(central: &CentralState, env: &EnvironmentSpec, inter: &InteractionSpec) -> Result<usize> {
    if central.dim() != inter.d_s() {
        return Err(Error::DimensionMismatch {
            expected: inter.d_s(),
            got: central.dim(),
        });
    }
    let n = env.total_spins();
    let dim = if n < 40 { central.dim() << n } else { usize::MAX };
    if dim > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DIMENSION_CAP,
        });
    }
    Ok(dim)
}

/// Block-diagonal-in-pointer assembly `Σ_ij σ_ij |i⟩⟨j| ⊗ blocks(i, j)`.
fn assemble(
    central: &CentralState,
    env_dim: usize,
    mut block: impl FnMut(usize, usize) -> ComplexMatrix,
) -> ComplexMatrix {
    let d = central.dim();
    let rho_s = central.density_matrix().matrix();
    let mut out = ComplexMatrix::zeros(d * env_dim);
    for i in 0..d {
        for j in 0..d {
            let s = rho_s[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            let b = block(i, j);
            for a in 0..env_dim {
                for c in 0..env_dim {
                    out[(i * env_dim + a, j * env_dim + c)] = s * b[(a, c)];
                }
            }
        }
    }
    out
}

/// `U ρ(0) U†` with `U = Σ_i |i⟩⟨i| ⊗ ⊗_k U_i^(k)(t)`, assembled blockwise
/// (the unitary is block diagonal in the pointer index).
pub fn full_joint_state(
    central: &CentralState,
    env: &EnvironmentSpec,
    inter: &InteractionSpec,
    t: f64,
) -> Result<DensityMatrix> {
    DensityMatrix::new(joint_matrix(central, env, inter, t)?)
}

/// Unvalidated joint state; positivity holds by construction.
fn joint_matrix(
    central: &CentralState,
    env: &EnvironmentSpec,
    inter: &InteractionSpec,
    t: f64,
) -> Result<ComplexMatrix> {
    check_dims(central, env, inter)?;
    let dynamics = Dynamics::new(env, inter, t)?;
    let n = env.total_spins();
    let joint = assemble(central, 1 << n, |i, j| {
        let factors: Vec<ComplexMatrix> = (0..n).map(|k| dynamics.cross(k, i, j)).collect();
        tensor_all(factors.iter())
    });
    Ok(joint.hermitian_part())
}

/// The same state by forming the full joint unitary and conjugating the
/// initial product state. Cubic in the joint dimension; for cross-checks.
pub fn full_joint_state_literal(
    central: &CentralState,
    env: &EnvironmentSpec,
    inter: &InteractionSpec,
    t: f64,
) -> Result<DensityMatrix> {
    let dim = check_dims(central, env, inter)?;
    let dynamics = Dynamics::new(env, inter, t)?;
    let n = env.total_spins();
    let d = central.dim();
    let env_dim = 1 << n;
    let mut u = ComplexMatrix::zeros(dim);
    for i in 0..d {
        let factors: Vec<&ComplexMatrix> = dynamics.unitaries.iter().map(|us| &us[i]).collect();
        let ui = if factors.is_empty() {
            ComplexMatrix::identity(1)
        } else {
            tensor_all(factors)
        };
        for a in 0..env_dim {
            for c in 0..env_dim {
                u[(i * env_dim + a, i * env_dim + c)] = ui[(a, c)];
            }
        }
    }
    let rho0 = tensor_all(std::iter::once(central.density_matrix().matrix()).chain(dynamics.rho0.iter()));
    DensityMatrix::new(rho0.conjugate_by(&u).hermitian_part())
}

/// Factor dimensions `[d_S, 2, …, 2]` of the joint state.
pub fn joint_factor_dims(d_s: usize, env: &EnvironmentSpec) -> Vec<usize> {
    std::iter::once(d_s)
        .chain(std::iter::repeat_n(2, env.total_spins()))
        .collect()
}

/// Factor dimensions `[d_S, dim(M_1), …]` of the reduced state, one factor
/// per observed macrofraction.
pub fn reduced_factor_dims(d_s: usize, env: &EnvironmentSpec) -> Vec<usize> {
    std::iter::once(d_s)
        .chain(env.observed.iter().map(|m| 1usize << m.len()))
        .collect()
}

/// Traces out the unobserved spins.
pub fn reduced_state_exact(joint: &DensityMatrix, d_s: usize, env: &EnvironmentSpec) -> Result<DensityMatrix> {
    let dims = joint_factor_dims(d_s, env);
    let expected: usize = dims.iter().product();
    if joint.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: joint.dim(),
        });
    }
    let n_obs = env.observed_spins();
    let keep: Vec<bool> = (0..dims.len()).map(|k| k <= n_obs).collect();
    partial_trace(joint, &dims, &keep)
}

/// Closed-form reduced state: `σ_ij Π_unobs γ_ij^(k) ⊗_obs U_i ρ U_j†`,
/// with the per-spin blocks and factors taken from [`crate::spin_model`].
pub fn analytic_reduced_state(
    central: &CentralState,
    env: &EnvironmentSpec,
    inter: &InteractionSpec,
    t: f64,
) -> Result<DensityMatrix> {
    check_dims(central, env, inter)?;
    let a = &inter.pointer_values;
    let observed: Vec<SpinParams> = env.observed.iter().flat_map(|m| m.spins.iter().copied()).collect();
    let gamma = |i: usize, j: usize| -> C64 {
        if i == j {
            C64::new(1.0, 0.0)
        } else if a[i] == 1.0 && a[j] == -1.0 {
            decoherence_factor(&env.unobserved, t)
        } else if a[i] == -1.0 && a[j] == 1.0 {
            decoherence_factor(&env.unobserved, t).conj()
        } else {
            env.unobserved
                .iter()
                .map(|p| cross_branch_state(p, t, a[i], a[j]).trace())
                .fold(C64::new(1.0, 0.0), |acc, z| acc * z)
        }
    };
    let m = assemble(central, 1 << observed.len(), |i, j| {
        let blocks: Vec<ComplexMatrix> = observed.iter().map(|p| cross_branch_state(p, t, a[i], a[j])).collect();
        let g = gamma(i, j);
        if blocks.is_empty() {
            ComplexMatrix::identity(1).scale(g)
        } else {
            tensor_all(blocks.iter()).scale(g)
        }
    });
    DensityMatrix::new(m.hermitian_part())
}

/// `(1/2) ‖ϱ − ϱ_SBS‖₁`.
pub fn exact_epsilon(reduced: &DensityMatrix, sbs: &SbsState) -> Result<f64> {
    trace_distance(reduced, &sbs.to_density_matrix())
}

/// Outcome of the mutual-information test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoCheck {
    pub mutual_info: f64,
    pub h_s: f64,
    pub gap: f64,
    pub f_bound: Cor2Bound,
    /// `gap ≤ F + 1e-9`, or vacuously true when the bound does not apply.
    pub ok: bool,
}

/// `|I_{S:fM} − H[σ]|` against `F(x)` where `x` is the distance to SBS
/// (ε or η). `factor_dims[0]` is the central factor.
pub fn exact_mutual_info_check(
    reduced: &DensityMatrix,
    central: &CentralState,
    factor_dims: &[usize],
    x: f64,
) -> Result<MutualInfoCheck> {
    if factor_dims.first() != Some(&central.dim()) {
        return Err(invalid("factor_dims", "first factor must be the central system"));
    }
    let mask: Vec<bool> = (0..factor_dims.len()).map(|k| k == 0).collect();
    let mutual_info = mutual_information(reduced, factor_dims, &mask)?;
    let h_s = shannon_entropy(&central.sigmas());
    let gap = (mutual_info - h_s).abs();
    let f_bound = cor2_bound(x, central.dim())?;
    Ok(MutualInfoCheck {
        mutual_info,
        h_s,
        gap,
        f_bound,
        ok: !f_bound.valid || gap <= f_bound.bound + 1e-9,
    })
}

/// One small instance: central state, environment layout and time.
#[derive(Clone, Debug)]
pub struct OracleInstance {
    pub central: CentralState,
    pub env: EnvironmentSpec,
    pub inter: InteractionSpec,
    pub t: f64,
}

/// Exact quantities of an instance.
#[derive(Clone, Debug)]
pub struct ExactInstance {
    /// Central system plus observed macrofractions.
    pub reduced: DensityMatrix,
    pub factor_dims: Vec<usize>,
    pub branches: BranchEnsemble,
    /// Single-spin branch states `local[k][s][i]` of spin `s` of observed
    /// macrofraction `k`.
    pub local: Vec<Vec<Vec<DensityMatrix>>>,
}

pub fn solve_instance(inst: &OracleInstance) -> Result<ExactInstance> {
    let d = inst.inter.d_s();
    let joint = joint_matrix(&inst.central, &inst.env, &inst.inter, inst.t)?;
    let dims = joint_factor_dims(d, &inst.env);
    let keep: Vec<bool> = (0..dims.len()).map(|k| k <= inst.env.observed_spins()).collect();
    let reduced = DensityMatrix::new(crate::densmat::partial_trace_matrix(&joint, &dims, &keep)?)?;
    let dynamics = Dynamics::new(&inst.env, &inst.inter, inst.t)?;

    let mut local = Vec::with_capacity(inst.env.observed.len());
    let mut k = 0;
    for m in &inst.env.observed {
        let mut spins = Vec::with_capacity(m.len());
        for _ in 0..m.len() {
            spins.push(
                (0..d)
                    .map(|i| DensityMatrix::new(dynamics.cross(k, i, i).hermitian_part()))
                    .collect::<Result<Vec<_>>>()?,
            );
            k += 1;
        }
        local.push(spins);
    }
    let branches: Vec<Vec<DensityMatrix>> = local
        .iter()
        .map(|spins| {
            (0..d)
                .map(|i| DensityMatrix::new(tensor_all(spins.iter().map(|s| s[i].matrix()))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut gamma_mags = PairMap::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let g = (k..k + inst.env.unobserved.len())
                .map(|s| dynamics.cross(s, i, j).trace())
                .fold(C64::new(1.0, 0.0), |acc, z| acc * z);
            gamma_mags.insert((i, j), g.norm().min(1.0));
        }
    }
    Ok(ExactInstance {
        reduced,
        factor_dims: reduced_factor_dims(d, &inst.env),
        branches: BranchEnsemble::new(branches, gamma_mags, d)?,
        local,
    })
}

/// Measurement families used as witnesses or adversaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Prior-weighted Helstrom measurement per macrofraction (qubit centre).
    Helstrom,
    /// Helstrom with the outcomes exchanged.
    Swapped,
    /// Random orthonormal basis with randomly assigned outcomes.
    Random,
    /// Majority vote of local equal-prior Helstrom outcomes (qubit centre).
    Majority,
    /// Square-root (pretty good) measurement; projective when the branch
    /// states are pure and linearly independent.
    SquareRoot,
}

fn random_unitary(dim: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    let mut h = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        h[(r, r)] = C64::new(rng.gen_range(-3.0..3.0), 0.0);
        for c in (r + 1)..dim {
            let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            h[(r, c)] = z;
            h[(c, r)] = z.conj();
        }
    }
    exp_i(&h, 1.0)
}

fn random_projectors(dim: usize, d_s: usize, rng: &mut impl Rng) -> Result<Vec<ComplexMatrix>> {
    let u = random_unitary(dim, rng)?;
    let mut sets = vec![ComplexMatrix::zeros(dim); d_s];
    for col in 0..dim {
        let v: Vec<C64> = (0..dim).map(|r| u[(r, col)]).collect();
        let target = rng.gen_range(0..d_s);
        sets[target] = sets[target].add(&ComplexMatrix::outer(&v));
    }
    Ok(sets)
}

/// Square-root measurement `M_i = S^{-1/2} σ_i ρ_i S^{-1/2}` on the support
/// of `S = Σ σ_i ρ_i`, the complement added to the first outcome. Only
/// accepted when every `M_i` is a projector.
fn square_root_projectors(weights: &[f64], states: &[DensityMatrix]) -> Result<Vec<ComplexMatrix>> {
    let dim = states[0].dim();
    let mut s = ComplexMatrix::zeros(dim);
    for (&w, rho) in weights.iter().zip(states) {
        s = s.add(&rho.matrix().scale_real(w));
    }
    let spec = hermitian_eigensystem(&s)?;
    let inv_sqrt = spec.apply(|x| if x > SRM_GRAM_TOL { 1.0 / x.sqrt() } else { 0.0 });
    let support = spec.apply(|x| if x > SRM_GRAM_TOL { 1.0 } else { 0.0 });
    let mut sets: Vec<ComplexMatrix> = weights
        .iter()
        .zip(states)
        .map(|(&w, rho)| {
            inv_sqrt
                .matmul(&rho.matrix().scale_real(w))
                .matmul(&inv_sqrt)
                .hermitian_part()
        })
        .collect();
    sets[0] = sets[0].add(&ComplexMatrix::identity(dim).sub(&support));
    for p in &sets {
        if p.matmul(p).max_abs_diff(p) > 1e-9 {
            return Err(Error::IncompleteProjectors(
                "square-root measurement is not projective for these branch states".into(),
            ));
        }
    }
    Ok(sets)
}

/// Projector family of the given kind for every observed macrofraction.
pub fn projector_family(
    kind: FamilyKind,
    inst: &OracleInstance,
    exact: &ExactInstance,
    rng: &mut impl Rng,
) -> Result<ProjectorFamily> {
    let sigma = inst.central.sigmas();
    let d = sigma.len();
    let qubit_only = |name: &str| -> Result<()> {
        if d != 2 {
            return Err(invalid("family", format!("{name} needs a qubit centre")));
        }
        Ok(())
    };
    let per_env = exact
        .branches
        .branches
        .iter()
        .zip(&exact.local)
        .map(|(states, local)| -> Result<Vec<ComplexMatrix>> {
            match kind {
                FamilyKind::Helstrom | FamilyKind::Swapped => {
                    qubit_only("Helstrom")?;
                    let pair = weighted_helstrom_pair(sigma[0], &states[0], sigma[1], &states[1])?;
                    Ok(if kind == FamilyKind::Swapped {
                        pair.swapped().as_vec()
                    } else {
                        pair.as_vec()
                    })
                }
                FamilyKind::Random => random_projectors(states[0].dim(), d, rng),
                FamilyKind::Majority => {
                    qubit_only("majority")?;
                    let locals: Vec<ProjectorPair> = local
                        .iter()
                        .map(|s| helstrom_pair(&s[0], &s[1]))
                        .collect::<Result<_>>()?;
                    Ok(majority_projectors(&locals)?.as_vec())
                }
                FamilyKind::SquareRoot => square_root_projectors(&sigma, states),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectorFamily::new(per_env)
}

/// Full diagnostics of one instance under one measurement family.
#[derive(Clone, Debug)]
pub struct InstanceReport {
    pub report: BoundReport,
    pub sbs: SbsState,
    pub epsilon: f64,
    /// Barnum–Knill bound per macrofraction with priors σ.
    pub barnum_knill: Vec<f64>,
}

pub fn bound_report(inst: &OracleInstance, exact: &ExactInstance, family: &ProjectorFamily) -> Result<InstanceReport> {
    let sigma = inst.central.sigmas();
    let gamma = collective_gamma(&inst.central, &exact.branches.gamma_mags)?;
    let pe = exact
        .branches
        .branches
        .iter()
        .zip(&family.per_env)
        .map(|(states, set)| discrimination_error(&sigma, states, set))
        .collect::<Result<Vec<_>>>()?;
    let fidelities = exact.branches.pair_fidelities()?;
    let eta = cor1_eta(&inst.central, gamma, &fidelities)?;
    let barnum_knill = fidelities
        .iter()
        .map(|f| crate::sbs::barnum_knill_bound(&sigma, f))
        .collect::<Result<Vec<_>>>()?;
    let sbs = build_sbs(&inst.central, &exact.branches, family)?;
    let epsilon = exact_epsilon(&exact.reduced, &sbs)?;
    let report = BoundReport {
        t: inst.t,
        gamma,
        prop1_bound: prop1_bound(gamma, &pe),
        pe,
        eta_cor1: eta,
        f_bound: Some(cor2_bound(epsilon, sigma.len())?),
        epsilon_exact: Some(epsilon),
        fifty_fifty_error: Some(crate::sbs::fifty_fifty_error((2.0 * epsilon).min(2.0))?),
    };
    Ok(InstanceReport {
        report,
        sbs,
        epsilon,
        barnum_knill,
    })
}

/// Pointer populations from a flat Dirichlet draw.
pub fn random_populations(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|x| x / total).collect()
}

/// Central state `(1−c) diag(σ) + c |v⟩⟨v|` with `v_i = √σ_i e^{iφ_i}`,
/// i.e. `σ_ij = c √(σ_i σ_j) e^{i(φ_i − φ_j)}` with `c` uniform on `[0, 1]`.
pub fn random_central(d: usize, rng: &mut impl Rng) -> Result<CentralState> {
    let sigma = random_populations(d, rng);
    let c: f64 = rng.gen();
    let phases: Vec<f64> = (0..d).map(|_| TAU * rng.gen::<f64>()).collect();
    let mut off = BTreeMap::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                off.insert(
                    (i, j),
                    C64::from_polar(c * (sigma[i] * sigma[j]).sqrt(), phases[i] - phases[j]),
                );
            }
        }
    }
    CentralState::from_parts(&sigma, &off)
}

/// Random instance: spins from `measure`, observed spins split into
/// macrofractions of the given sizes, `t` uniform on `[0, t_max]`.
pub fn random_instance(
    inter: &InteractionSpec,
    layout: &[usize],
    unobserved: usize,
    measure: &MeasureSpec,
    t_max: f64,
    rng: &mut impl Rng,
) -> Result<OracleInstance> {
    let central = random_central(inter.d_s(), rng)?;
    let observed = layout
        .iter()
        .map(|&size| MacrofractionSpec::new((0..size).map(|_| sample_spin(measure, rng)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let unobserved = (0..unobserved).map(|_| sample_spin(measure, rng)).collect();
    Ok(OracleInstance {
        central,
        env: EnvironmentSpec::new(observed, unobserved)?,
        inter: inter.clone(),
        t: t_max * rng.gen::<f64>(),
    })
}
