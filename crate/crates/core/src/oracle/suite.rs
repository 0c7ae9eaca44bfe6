//! Randomized verification suites. Each returns pass/fail counts and the
//! worst margin (bound minus value, or tolerance minus deviation for
//! equalities); a negative margin is a failure.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    bound_report, exact_mutual_info_check, projector_family, random_instance, solve_instance, FamilyKind,
    InteractionSpec, OracleInstance,
};
use crate::densmat::{fidelity, trace_norm, DensityMatrix};
use crate::discrimination::{
    chernoff_bound, equal_prior_error, helstrom_pair, helstrom_spin_analytic, kolmogorov_fuchs,
    local_success_probability, majority_success, majority_success_heterogeneous, ProjectorPair,
};
use crate::ensemble::{
    keyed_stream_rng, sample_spin, sample_spins, stream_rng, LambdaMeasure, MeasureSpec, StreamDomain,
};
use crate::error::Result;
use crate::sbs::{barnum_knill_bound, PairMap, COR2_THRESHOLD};
use crate::spin_model::{initial_spin_state, macrofraction_fidelity, spin_decoherence_factor, spin_fidelity};

use super::random_projectors;

/// Slack allowed on every inequality.
pub const INEQUALITY_SLACK: f64 = 1e-9;
pub const CONVENTION_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-12;
pub const HELSTROM_TOL: f64 = 1e-10;
pub const SUCCESS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    /// Instances where the check did not apply (e.g. ε > 1/4).
    pub skipped: usize,
    pub worst_margin: f64,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            checks: 0,
            failures: 0,
            skipped: 0,
            worst_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64) {
        self.checks += 1;
        if !(margin >= 0.0) {
            self.failures += 1;
        }
        // NaN margins count as failures and poison the worst margin
        self.worst_margin = if margin.is_nan() {
            f64::NAN
        } else {
            self.worst_margin.min(margin)
        };
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn merge(&mut self, other: &Self) {
        self.checks += other.checks;
        self.failures += other.failures;
        self.skipped += other.skipped;
        self.worst_margin = if self.worst_margin.is_nan() || other.worst_margin.is_nan() {
            f64::NAN
        } else {
            self.worst_margin.min(other.worst_margin)
        };
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Merges per-item results into suites, in name order of first appearance.
fn collect(names: &[&str], items: Vec<Vec<SuiteResult>>) -> Vec<SuiteResult> {
    let mut out: Vec<SuiteResult> = names.iter().map(|n| SuiteResult::new(n)).collect();
    for item in items {
        for r in item {
            let slot = out.iter_mut().find(|s| s.name == r.name).expect("known suite name");
            slot.merge(&r);
        }
    }
    out
}

fn blank(names: &[&str]) -> Vec<SuiteResult> {
    names.iter().map(|n| SuiteResult::new(n)).collect()
}

/// Oracle `Tr[U₊ρU₋†]` and branch fidelity against the closed forms, plus
/// purity conservation, on random `(SpinParams, t)` with `t ∈ [0, 4π]`.
pub fn convention_suite(draws: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    const NAMES: [&str; 3] = ["convention_gamma", "convention_fidelity", "purity_conservation"];
    let inter = InteractionSpec::qubit();
    let items = (0..draws as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<SuiteResult>> {
            let mut rng = keyed_stream_rng(seed, StreamDomain::Oracle, 1, k);
            let p = sample_spin(&MeasureSpec::default(), &mut rng);
            let t = 2.0 * TAU * rng.gen::<f64>();
            let rho = initial_spin_state(&p);
            let up = inter.branch_unitary(0, p.g, t)?;
            let um = inter.branch_unitary(1, p.g, t)?;
            let cross = up.matmul(rho.matrix()).matmul(&um.adjoint()).trace();
            let plus = DensityMatrix::new(rho.matrix().conjugate_by(&up).hermitian_part())?;
            let minus = DensityMatrix::new(rho.matrix().conjugate_by(&um).hermitian_part())?;
            let fid = fidelity(&plus, &minus)?;

            let mut res = blank(&NAMES);
            res[0].record(CONVENTION_TOL - (cross - spin_decoherence_factor(&p, t)).norm());
            res[1].record(CONVENTION_TOL - (fid - spin_fidelity(&p, t)).abs());
            let purity = rho.purity();
            res[2].record(PURITY_TOL - (plus.purity() - purity).abs().max((minus.purity() - purity).abs()));
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(&NAMES, items))
}

/// Ways to split `observed` spins into macrofractions, cycled over instances.
pub fn layouts(observed: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![observed]];
    if observed >= 2 {
        out.push(vec![observed / 2, observed - observed / 2]);
        out.push(vec![1; observed]);
    }
    out.dedup();
    out
}

fn fixed_families(
    rng: &mut impl Rng,
    inst: &OracleInstance,
    exact: &super::ExactInstance,
    kinds: &[FamilyKind],
) -> Result<Vec<(FamilyKind, crate::sbs::ProjectorFamily)>> {
    kinds
        .iter()
        .map(|&k| Ok((k, projector_family(k, inst, exact, rng)?)))
        .collect()
}

/// `Γ + 2 Σ_k √p_E^(k)`: the projection bound with the gentle-measurement
/// estimate `‖ρ − PρP‖₁ ≤ 2√Tr[ρ(1−P)]` in place of `Tr[ρ(1−P)]`, which is
/// only exact when `P` commutes with `ρ`.
pub fn gentle_bound(report: &crate::sbs::BoundReport) -> f64 {
    report.gamma + 2.0 * report.pe.iter().map(|p| p.sqrt()).sum::<f64>()
}

/// Linear projection bound (Helstrom, swapped, random and majority families),
/// the η bound with the Helstrom witness, the mutual-information gap where `ε ≤ 1/4`,
/// Barnum–Knill per macrofraction and validity of the SBS state, on random
/// qubit-centre instances with `t ∈ [0, 2π]`.
pub fn inequality_suite(instances: usize, observed: usize, unobserved: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    const NAMES: [&str; 9] = [
        "prop1_helstrom",
        "prop1_adversarial",
        "prop1_majority",
        "gentle_projection_bound",
        "cor1_helstrom",
        "cor2",
        "barnum_knill",
        "sbs_valid",
        "bound_report_consistent",
    ];
    let inter = InteractionSpec::qubit();
    let shapes = layouts(observed);
    let items = (0..instances as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<SuiteResult>> {
            let mut rng = keyed_stream_rng(seed, StreamDomain::Oracle, 2, k);
            let layout = &shapes[k as usize % shapes.len()];
            let inst = random_instance(&inter, layout, unobserved, &MeasureSpec::default(), TAU, &mut rng)?;
            let exact = solve_instance(&inst)?;
            let mut res = blank(&NAMES);
            let families = fixed_families(
                &mut rng,
                &inst,
                &exact,
                &[
                    FamilyKind::Helstrom,
                    FamilyKind::Swapped,
                    FamilyKind::Random,
                    FamilyKind::Majority,
                ],
            )?;
            for (kind, family) in &families {
                let rep = match bound_report(&inst, &exact, family) {
                    Ok(r) => r,
                    // all r_i = 0: no SBS state for this family
                    Err(crate::error::Error::DegenerateSbs) => {
                        res[1].skip();
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let margin = rep.report.prop1_bound + INEQUALITY_SLACK - rep.epsilon;
                let slot = match kind {
                    FamilyKind::Helstrom => 0,
                    FamilyKind::Majority => 2,
                    _ => 1,
                };
                res[slot].record(margin);
                res[3].record(gentle_bound(&rep.report) + INEQUALITY_SLACK - rep.epsilon);
                let sbs_ok = DensityMatrix::new(rep.sbs.to_density_matrix().into_matrix()).is_ok()
                    && (rep.sbs.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12;
                res[7].record(if sbs_ok { 0.0 } else { -1.0 });
                let sum_pe: f64 = rep.report.pe.iter().sum();
                res[8].record(if rep.report.prop1_bound == rep.report.gamma + sum_pe {
                    0.0
                } else {
                    -1.0
                });

                if *kind == FamilyKind::Helstrom {
                    res[4].record(rep.report.eta_cor1 + INEQUALITY_SLACK - rep.epsilon);
                    for (pe, bk) in rep.report.pe.iter().zip(&rep.barnum_knill) {
                        res[6].record(bk + INEQUALITY_SLACK - pe);
                    }
                    if rep.epsilon <= COR2_THRESHOLD {
                        let mi =
                            exact_mutual_info_check(&exact.reduced, &inst.central, &exact.factor_dims, rep.epsilon)?;
                        res[5].record(mi.f_bound.bound + INEQUALITY_SLACK - mi.gap);
                    } else {
                        res[5].skip();
                    }
                }
            }
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(&NAMES, items))
}

/// Qutrit centre with pointer values `(1, 0, −1)`: pure observed spins so
/// the square-root measurement is projective; the projection bound with it and
/// with random families, the η bound and Barnum–Knill with the square-root
/// witness, the mutual-information gap where `ε ≤ 1/4`.
pub fn qutrit_suite(instances: usize, unobserved: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    const NAMES: [&str; 6] = [
        "qutrit_prop1",
        "qutrit_cor1",
        "qutrit_barnum_knill",
        "qutrit_cor2",
        "qutrit_reduced_match",
        "qutrit_gentle_projection_bound",
    ];
    let inter = InteractionSpec::new(vec![1.0, 0.0, -1.0])?;
    let pure = MeasureSpec {
        lambda: LambdaMeasure::Fixed { value: 1.0 },
        ..MeasureSpec::default()
    };
    let shapes = [vec![2], vec![3]];
    let items = (0..instances as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<SuiteResult>> {
            let mut rng = keyed_stream_rng(seed, StreamDomain::Oracle, 3, k);
            let layout = &shapes[k as usize % shapes.len()];
            let mut inst = random_instance(&inter, layout, 0, &pure, TAU, &mut rng)?;
            let unobs = sample_spins(&MeasureSpec::default(), unobserved, &mut rng);
            inst.env = crate::spin_model::EnvironmentSpec::new(inst.env.observed.clone(), unobs)?;
            let exact = solve_instance(&inst)?;
            let mut res = blank(&NAMES);

            let analytic = super::analytic_reduced_state(&inst.central, &inst.env, &inter, inst.t)?;
            res[4].record(1e-10 - analytic.matrix().max_abs_diff(exact.reduced.matrix()));

            let family = projector_family(FamilyKind::Random, &inst, &exact, &mut rng)?;
            match bound_report(&inst, &exact, &family) {
                Ok(rep) => {
                    res[0].record(rep.report.prop1_bound + INEQUALITY_SLACK - rep.epsilon);
                    res[5].record(gentle_bound(&rep.report) + INEQUALITY_SLACK - rep.epsilon);
                }
                Err(crate::error::Error::DegenerateSbs) => res[0].skip(),
                Err(e) => return Err(e),
            }
            match projector_family(FamilyKind::SquareRoot, &inst, &exact, &mut rng) {
                Ok(family) => {
                    let rep = bound_report(&inst, &exact, &family)?;
                    res[0].record(rep.report.prop1_bound + INEQUALITY_SLACK - rep.epsilon);
                    res[5].record(gentle_bound(&rep.report) + INEQUALITY_SLACK - rep.epsilon);
                    res[1].record(rep.report.eta_cor1 + INEQUALITY_SLACK - rep.epsilon);
                    for (pe, bk) in rep.report.pe.iter().zip(&rep.barnum_knill) {
                        res[2].record(bk + INEQUALITY_SLACK - pe);
                    }
                    if rep.epsilon <= COR2_THRESHOLD {
                        let mi =
                            exact_mutual_info_check(&exact.reduced, &inst.central, &exact.factor_dims, rep.epsilon)?;
                        res[3].record(mi.f_bound.bound + INEQUALITY_SLACK - mi.gap);
                    } else {
                        res[3].skip();
                    }
                }
                Err(_) => {
                    res[1].skip();
                    res[2].skip();
                    res[3].skip();
                }
            }
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(&NAMES, items))
}

fn random_qubit_state(rng: &mut impl Rng) -> DensityMatrix {
    initial_spin_state(&sample_spin(&MeasureSpec::default(), rng))
}

/// Helstrom error against `(1/2)(1 − ‖ρ₊ − ρ₋‖₁/2)`, optimality against
/// random projective pairs, Barnum–Knill at equal priors, and the closed
/// form success probability against explicit traces with the analytic
/// projectors on oracle-evolved states.
pub fn helstrom_suite(pairs: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    const NAMES: [&str; 4] = [
        "helstrom_trace_norm",
        "helstrom_optimality",
        "helstrom_barnum_knill",
        "spin_success_formula",
    ];
    let inter = InteractionSpec::qubit();
    let items = (0..pairs as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<SuiteResult>> {
            let mut rng = keyed_stream_rng(seed, StreamDomain::Oracle, 4, k);
            let a = random_qubit_state(&mut rng);
            let b = random_qubit_state(&mut rng);
            let pair = helstrom_pair(&a, &b)?;
            let err = equal_prior_error(&pair, &a, &b);
            let tn = trace_norm(&a.matrix().sub(b.matrix()));
            let mut res = blank(&NAMES);
            res[0].record(HELSTROM_TOL - (err - 0.5 * (1.0 - 0.5 * tn)).abs());
            for _ in 0..4 {
                let sets = random_projectors(2, 2, &mut rng)?;
                let other = ProjectorPair {
                    plus: sets[0].clone(),
                    minus: sets[1].clone(),
                };
                res[1].record(equal_prior_error(&other, &a, &b) - err + 1e-12);
            }
            let mut fid = PairMap::new();
            fid.insert((0, 1), fidelity(&a, &b)?);
            res[2].record(barnum_knill_bound(&[0.5, 0.5], &fid)? + INEQUALITY_SLACK - err);

            let p = sample_spin(&MeasureSpec::default(), &mut rng);
            let t = TAU * rng.gen::<f64>();
            let rho = initial_spin_state(&p);
            let plus = rho.matrix().conjugate_by(&inter.branch_unitary(0, p.g, t)?);
            let minus = rho.matrix().conjugate_by(&inter.branch_unitary(1, p.g, t)?);
            let proj = helstrom_spin_analytic(&p, t).pair;
            let explicit = 0.5 * (plus.matmul(&proj.plus).trace().re + minus.matmul(&proj.minus).trace().re);
            res[3].record(SUCCESS_TOL - (explicit - local_success_probability(&p, t)).abs());
            Ok(res)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(&NAMES, items))
}

pub const CHERNOFF_SIZES: [u64; 3] = [11, 101, 1001];
pub const CHERNOFF_ADVANTAGES: [f64; 9] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

/// Exact majority tail against the Chernoff bound on a fixed grid, and the
/// symmetric point `majority(3, 1/2) = 1/2`.
pub fn chernoff_suite() -> Result<Vec<SuiteResult>> {
    let mut grid = SuiteResult::new("chernoff_vs_exact");
    for &n in &CHERNOFF_SIZES {
        for &s in &CHERNOFF_ADVANTAGES {
            grid.record(majority_success(n, 0.5 + s)? - chernoff_bound(n, s)?);
        }
    }
    let mut sym = SuiteResult::new("majority_symmetric");
    sym.record(if majority_success(3, 0.5)? == 0.5 { 0.0 } else { -1.0 });
    Ok(vec![grid, sym])
}

/// `|2p̃ − 1| ≤ 1 − B²/2` for the majority of local Helstrom outcomes on
/// random spin-model macrofractions, `t ∈ [0, 2π]`.
pub fn kolmogorov_fuchs_suite(instances: usize, n_m: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let items = (0..instances as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<SuiteResult>> {
            let mut rng = stream_rng(seed ^ 0x4B46, StreamDomain::Oracle, k);
            let spins = sample_spins(&MeasureSpec::default(), n_m, &mut rng);
            let t = TAU * rng.gen::<f64>();
            let probs: Vec<f64> = spins.iter().map(|p| local_success_probability(p, t).min(1.0)).collect();
            let p_tilde = majority_success_heterogeneous(&probs)?;
            let kf = kolmogorov_fuchs(p_tilde, macrofraction_fidelity(&spins, t).clamp(0.0, 1.0))?;
            let mut r = SuiteResult::new("kolmogorov_fuchs");
            r.record(kf.fuchs_limit + INEQUALITY_SLACK - kf.k);
            Ok(vec![r])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(&["kolmogorov_fuchs"], items))
}

/// All suites with their sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub total_checks: usize,
    pub total_failures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.total_failures == 0 && self.suites.iter().all(|s| s.checks > 0)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Sizes of the verification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifySizes {
    pub convention_draws: usize,
    pub instances: usize,
    pub observed: usize,
    pub unobserved: usize,
    pub helstrom_pairs: usize,
    pub kf_instances: usize,
    pub kf_size: usize,
    pub qutrit_instances: usize,
}

impl Default for VerifySizes {
    fn default() -> Self {
        Self {
            convention_draws: 1000,
            instances: 200,
            observed: 3,
            unobserved: 3,
            helstrom_pairs: 1000,
            kf_instances: 500,
            kf_size: 51,
            qutrit_instances: 60,
        }
    }
}

pub fn run_all(sizes: &VerifySizes, seed: u64) -> Result<VerifyReport> {
    let mut suites = convention_suite(sizes.convention_draws, seed)?;
    suites.extend(inequality_suite(
        sizes.instances,
        sizes.observed,
        sizes.unobserved,
        seed,
    )?);
    suites.extend(qutrit_suite(sizes.qutrit_instances, sizes.unobserved.min(3), seed)?);
    suites.extend(helstrom_suite(sizes.helstrom_pairs, seed)?);
    suites.extend(chernoff_suite()?);
    suites.extend(kolmogorov_fuchs_suite(sizes.kf_instances, sizes.kf_size, seed)?);
    let total_checks = suites.iter().map(|s| s.checks).sum();
    let total_failures = suites.iter().map(|s| s.failures).sum();
    Ok(VerifyReport {
        seed,
        suites,
        total_checks,
        total_failures,
    })
}
