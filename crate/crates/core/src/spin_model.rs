//! Closed-form dynamics of a central spin coupled to a bath of environment
//! qubits through `σ_z ⊗ Σ_j g_j σ_z^(j)`.
//!
//! # Phase convention
//!
//! A central pointer state with eigenvalue `s = ±1` drives environment spin
//! `j` with the branch unitary
//!
//! ```text
//! U_s(t) = exp(+i s g_j t σ_z / 2) = diag(e^{+i s g_j t/2}, e^{-i s g_j t/2})
//! ```
//!
//! Under this convention the decoherence factor `Tr[U₊ ρ U₋†]` is exactly
//! `cos(g t) + i(2λ−1) cos β sin(g t)` and the branch-state fidelity is
//! `√(1 − (2λ−1)² sin²β sin²(g t))`. The branch states carry off-diagonals
//! `e^{±i g t} δ`, so the Helstrom success probability is
//! `1/2 + |δ| |sin(g t)|`. Every closed form in this crate uses the same
//! phase `g t`; the brute-force simulator in [`crate::oracle`] certifies it.

use serde::{Deserialize, Serialize};

use crate::densmat::{ComplexMatrix, DensityMatrix, C64};
use crate::error::{invalid, Result};

/// Above this many spins products are accumulated in log space.
pub const LOG_SPACE_THRESHOLD: usize = 64;

/// Initial state and coupling of one environment spin.
///
/// The state is `R(α, β, γ) diag(λ, 1−λ) R†` with `R` the Euler rotation
/// below; `g` is the coupling constant (inverse time units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_euler: f64,
    pub lambda: f64,
    pub g: f64,
}

impl SpinParams {
    pub fn new(alpha: f64, beta: f64, gamma_euler: f64, lambda: f64, g: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma_euler,
            lambda,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        use std::f64::consts::{PI, TAU};
        let check = |name: &'static str, v: f64, lo: f64, hi: f64, hi_open: bool| {
            let ok = v.is_finite() && v >= lo && if hi_open { v < hi } else { v <= hi };
            if ok {
                Ok(())
            } else {
                let bracket = if hi_open { ")" } else { "]" };
                Err(invalid(name, format!("{v} outside [{lo}, {hi}{bracket}")))
            }
        };
        check("alpha", self.alpha, 0.0, TAU, true)?;
        check("beta", self.beta, 0.0, PI, false)?;
        check("gamma_euler", self.gamma_euler, 0.0, TAU, true)?;
        check("lambda", self.lambda, 0.0, 1.0, false)?;
        if !self.g.is_finite() {
            return Err(invalid("g", "coupling must be finite"));
        }
        Ok(())
    }

    /// `(2λ − 1)`, the Bloch-vector length of the initial state.
    #[inline]
    pub fn polarization(&self) -> f64 {
        2.0 * self.lambda - 1.0
    }
}

/// A group of environment spins read out jointly by one observer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacrofractionSpec {
    pub spins: Vec<SpinParams>,
}

impl MacrofractionSpec {
    pub fn new(spins: Vec<SpinParams>) -> Result<Self> {
        if spins.is_empty() {
            return Err(invalid("spins", "a macrofraction needs at least one spin"));
        }
        for s in &spins {
            s.validate()?;
        }
        Ok(Self { spins })
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }
}

/// Observed macrofractions plus the discarded remainder of the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub observed: Vec<MacrofractionSpec>,
    pub unobserved: Vec<SpinParams>,
}

impl EnvironmentSpec {
    pub fn new(observed: Vec<MacrofractionSpec>, unobserved: Vec<SpinParams>) -> Result<Self> {
        for m in &observed {
            if m.is_empty() {
                return Err(invalid("observed", "empty macrofraction"));
            }
        }
        for s in &unobserved {
            s.validate()?;
        }
        let env = Self { observed, unobserved };
        if env.total_spins() == 0 {
            return Err(invalid("environment", "no spins at all"));
        }
        Ok(env)
    }

    pub fn observed_spins(&self) -> usize {
        self.observed.iter().map(|m| m.len()).sum()
    }

    /// `N`.
    pub fn total_spins(&self) -> usize {
        self.observed_spins() + self.unobserved.len()
    }

    /// `f`, the observed fraction of spins.
    pub fn observed_fraction(&self) -> f64 {
        self.observed_spins() as f64 / self.total_spins() as f64
    }
}

/// Euler rotation `R(α, β, γ)`.
pub fn euler_rotation(p: &SpinParams) -> ComplexMatrix {
    let (sb, cb) = (0.5 * p.beta).sin_cos();
    let e = |phi: f64| C64::from_polar(1.0, phi);
    let (a, g) = (p.alpha, p.gamma_euler);
    ComplexMatrix::from_rows(&[
        vec![e(-0.5 * (a + g)) * cb, -e(-0.5 * (a - g)) * sb],
        vec![e(0.5 * (a - g)) * sb, e(0.5 * (a + g)) * cb],
    ])
}

/// `R diag(λ, 1−λ) R†`.
pub fn initial_spin_state(p: &SpinParams) -> DensityMatrix {
    let r = euler_rotation(p);
    let d = ComplexMatrix::from_diag(&[p.lambda, 1.0 - p.lambda]);
    DensityMatrix::assume_valid(d.conjugate_by(&r).hermitian_part())
}

/// Off-diagonal element of the initial state, `(1/2) sin β e^{−iα} (2λ−1)`.
pub fn delta(p: &SpinParams) -> C64 {
    C64::from_polar(0.5 * p.beta.sin() * p.polarization(), -p.alpha)
}

/// Pointer-basis population `π = (1/2)[1 + (2λ−1) cos β]`; conserved in time.
pub fn pointer_population(p: &SpinParams) -> f64 {
    0.5 * (1.0 + p.polarization() * p.beta.cos())
}

/// Branch unitary for central pointer eigenvalue `a` (±1 for a qubit).
pub fn branch_unitary(a: f64, g: f64, t: f64) -> ComplexMatrix {
    let phi = 0.5 * a * g * t;
    ComplexMatrix::from_rows(&[
        vec![C64::from_polar(1.0, phi), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::from_polar(1.0, -phi)],
    ])
}

/// `U_{a_i}(t) ρ(0) U_{a_j}(t)†` in closed form.
pub fn cross_branch_state(p: &SpinParams, t: f64, a_i: f64, a_j: f64) -> ComplexMatrix {
    let pi = pointer_population(p);
    let d = delta(p);
    let half = 0.5 * p.g * t;
    let diff = C64::from_polar(1.0, half * (a_i - a_j));
    let sum = C64::from_polar(1.0, half * (a_i + a_j));
    ComplexMatrix::from_rows(&[
        vec![diff * pi, sum * d],
        vec![sum.conj() * d.conj(), diff.conj() * (1.0 - pi)],
    ])
}

/// `(ρ₊(t), ρ₋(t))`: diagonal `(π, 1−π)`, off-diagonal `e^{±i g t} δ`.
pub fn evolved_branch_states(p: &SpinParams, t: f64) -> (DensityMatrix, DensityMatrix) {
    (
        DensityMatrix::assume_valid(cross_branch_state(p, t, 1.0, 1.0)),
        DensityMatrix::assume_valid(cross_branch_state(p, t, -1.0, -1.0)),
    )
}

/// Per-spin decoherence factor `cos(g t) + i(2λ−1) cos β sin(g t)`.
pub fn spin_decoherence_factor(p: &SpinParams, t: f64) -> C64 {
    let (s, c) = (p.g * t).sin_cos();
    C64::new(c, p.polarization() * p.beta.cos() * s)
}

/// `ln|γ|` and `arg γ` (unwrapped sum of per-spin phases).
///
/// `ln|γ|` is `-inf` when some factor vanishes exactly.
pub fn log_decoherence_factor(spins: &[SpinParams], t: f64) -> (f64, f64) {
    let mut log_abs = 0.0;
    let mut phase = 0.0;
    for p in spins {
        let z = spin_decoherence_factor(p, t);
        log_abs += 0.5 * z.norm_sqr().ln();
        phase += z.arg();
    }
    (log_abs, phase)
}

/// Collective decoherence factor `γ(t) = Π_j [cos(g_j t) + i(2λ_j−1) cos β_j sin(g_j t)]`.
pub fn decoherence_factor(spins: &[SpinParams], t: f64) -> C64 {
    if spins.len() <= LOG_SPACE_THRESHOLD {
        decoherence_factor_direct(spins, t)
    } else {
        let (log_abs, phase) = log_decoherence_factor(spins, t);
        C64::from_polar(log_abs.exp(), phase)
    }
}

/// Plain running product, no underflow protection.
pub fn decoherence_factor_direct(spins: &[SpinParams], t: f64) -> C64 {
    spins
        .iter()
        .map(|p| spin_decoherence_factor(p, t))
        .fold(C64::new(1.0, 0.0), |acc, z| acc * z)
}

/// `|γ(t)|`, accumulated in log space for large sets.
pub fn decoherence_magnitude(spins: &[SpinParams], t: f64) -> f64 {
    if spins.len() <= LOG_SPACE_THRESHOLD {
        decoherence_factor_direct(spins, t).norm()
    } else {
        log_decoherence_factor(spins, t).0.exp()
    }
}

/// `1 − (2λ−1)² sin²β sin²(g t)`, the squared per-spin fidelity.
fn spin_fidelity_sq(p: &SpinParams, t: f64) -> f64 {
    let s = p.beta.sin() * (p.g * t).sin();
    (1.0 - p.polarization().powi(2) * s * s).max(0.0)
}

/// Fidelity of one spin's branch pair, `√(1 − (2λ−1)² sin²β sin²(g t))`.
pub fn spin_fidelity(p: &SpinParams, t: f64) -> f64 {
    spin_fidelity_sq(p, t).sqrt()
}

/// Same quantity through the trace/determinant of
/// `M = √D R† U₋² R D R† U₊² R √D`: `B = √(Tr M + 2√det M)`.
pub fn spin_fidelity_trace_det(p: &SpinParams, t: f64) -> f64 {
    let lam = p.lambda;
    let s = p.beta.sin() * (p.g * t).sin();
    let tr = lam * lam + (1.0 - lam) * (1.0 - lam) - p.polarization().powi(2) * s * s;
    let det = (lam * (1.0 - lam)).powi(2);
    (tr + 2.0 * det.sqrt()).max(0.0).sqrt()
}

/// `ln B` for a set of spins.
pub fn log_macrofraction_fidelity(spins: &[SpinParams], t: f64) -> f64 {
    spins.iter().map(|p| 0.5 * spin_fidelity_sq(p, t).ln()).sum()
}

/// Macrofraction fidelity `B(t) = Π_j √(1 − (2λ_j−1)² sin²β_j sin²(g_j t))`.
pub fn macrofraction_fidelity(spins: &[SpinParams], t: f64) -> f64 {
    if spins.len() <= LOG_SPACE_THRESHOLD {
        spins.iter().map(|p| spin_fidelity(p, t)).product()
    } else {
        log_macrofraction_fidelity(spins, t).exp()
    }
}

/// Per-spin exponents `(κ_j, χ_j)` with `B = exp(−Σκ/2)` and `|γ|² = exp(−Σχ)`.
///
/// An exact zero of the log argument yields `+inf`.
pub fn lln_exponents(p: &SpinParams, t: f64) -> (f64, f64) {
    let s2 = (p.g * t).sin().powi(2);
    let pol2 = p.polarization().powi(2);
    let kappa_arg = 1.0 - pol2 * p.beta.sin().powi(2) * s2;
    let chi_arg = 1.0 + s2 * (-1.0 + pol2 * p.beta.cos().powi(2));
    let neg_log = |x: f64| {
        if x <= 0.0 {
            f64::INFINITY
        } else {
            // -ln x is >= 0 analytically; rounding can push it to -0 or -1e-17
            (-x.ln()).max(0.0)
        }
    };
    (neg_log(kappa_arg), neg_log(chi_arg))
}

/// Short-time ensemble exponents `((2/5) ḡ² t², (4/5) ḡ² t²)`.
pub fn short_time_exponents(g2bar: f64, t: f64) -> (f64, f64) {
    let x = g2bar * t * t;
    (0.4 * x, 0.8 * x)
}

/// Orthogonalization and decoherence times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub t_b: f64,
    pub t_d: f64,
    /// `(t_B / t_D)²`.
    pub ratio_sq: f64,
}

/// `t_B = √(5 ln N_m / (ḡ² N_m))`, `t_D = √(5 ln N_m / (4 ḡ² (1−f) N))`.
pub fn time_scales(n_total: usize, n_m: usize, f: f64, g2bar: f64) -> Result<TimeScales> {
    if n_m < 2 {
        return Err(invalid(
            "n_m",
            format!("macrofraction size {n_m} < 2 (ln N_m must be positive)"),
        ));
    }
    if n_total == 0 {
        return Err(invalid("n_total", "environment size must be positive"));
    }
    if !(0.0..1.0).contains(&f) {
        return Err(invalid("f", format!("{f} outside [0, 1)")));
    }
    if !(g2bar > 0.0 && g2bar.is_finite()) {
        return Err(invalid("g2bar", format!("{g2bar} must be positive")));
    }
    let ln_nm = (n_m as f64).ln();
    let t_b = (5.0 * ln_nm / (g2bar * n_m as f64)).sqrt();
    let t_d = (5.0 * ln_nm / (4.0 * g2bar * (1.0 - f) * n_total as f64)).sqrt();
    Ok(TimeScales {
        t_b,
        t_d,
        ratio_sq: (t_b / t_d).powi(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::fidelity;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn sp(alpha: f64, beta: f64, gamma: f64, lambda: f64, g: f64) -> SpinParams {
        SpinParams::new(alpha, beta, gamma, lambda, g).unwrap()
    }

    #[test]
    fn initial_state_examples() {
        let up = initial_spin_state(&sp(0.3, 0.0, 1.1, 1.0, 1.0));
        assert!(up.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[1.0, 0.0])) < 1e-15);

        let mixed = initial_spin_state(&sp(1.0, 2.0, 3.0, 0.5, 1.0));
        assert!(mixed.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);

        let plus = initial_spin_state(&sp(0.0, FRAC_PI_2, 0.0, 1.0, 1.0));
        let expect = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(plus.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn delta_is_the_initial_off_diagonal() {
        let p = sp(0.7, 1.2, 2.9, 0.8, 0.4);
        let rho = initial_spin_state(&p);
        assert!((rho.matrix()[(0, 1)] - delta(&p)).norm() < 1e-15);
        assert!((rho.matrix()[(0, 0)].re - pointer_population(&p)).abs() < 1e-15);
        // coincides with the (1/2) sin β [e^{-iα} λ − e^{iγ}(1−λ)] form when α + γ = 0
        let q = sp(0.0, 1.2, 0.0, 0.8, 0.4);
        let alt =
            0.5 * q.beta.sin() * (C64::from_polar(q.lambda, -q.alpha) - C64::from_polar(1.0 - q.lambda, q.gamma_euler));
        assert!((alt - delta(&q)).norm() < 1e-15);
    }

    #[test]
    fn branch_state_examples() {
        let p = sp(0.4, 1.0, 0.2, 0.9, 1.3);
        let (a, b) = evolved_branch_states(&p, 0.0);
        let init = initial_spin_state(&p);
        assert!(a.matrix().max_abs_diff(init.matrix()) < 1e-15);
        assert!(b.matrix().max_abs_diff(init.matrix()) < 1e-15);

        let frozen = sp(0.0, 0.0, 0.0, 1.0, 2.0);
        for t in [0.1, 1.0, 7.3] {
            let (a, b) = evolved_branch_states(&frozen, t);
            let up = ComplexMatrix::from_diag(&[1.0, 0.0]);
            assert!(a.matrix().max_abs_diff(&up) < 1e-15);
            assert!(b.matrix().max_abs_diff(&up) < 1e-15);
        }

        // pure equatorial state: branches stay pure and are exact unitary conjugates
        let eq = sp(0.0, FRAC_PI_2, 0.0, 1.0, 1.0);
        assert!((delta(&eq) - C64::new(0.5, 0.0)).norm() < 1e-15);
        for t in [0.3, 1.7] {
            let (a, b) = evolved_branch_states(&eq, t);
            assert!((a.purity() - 1.0).abs() < 1e-12);
            let rho0 = initial_spin_state(&eq);
            let up = rho0.matrix().conjugate_by(&branch_unitary(1.0, 1.0, t));
            let dn = rho0.matrix().conjugate_by(&branch_unitary(-1.0, 1.0, t));
            assert!(a.matrix().max_abs_diff(&up) < 1e-12);
            assert!(b.matrix().max_abs_diff(&dn) < 1e-12);
        }
    }

    #[test]
    fn decoherence_factor_examples() {
        let p = sp(0.1, 0.5, 0.2, 0.3, 0.9);
        assert_eq!(decoherence_factor(&[p], 0.0), C64::new(1.0, 0.0));

        let up = sp(0.0, 0.0, 0.0, 1.0, 1.0);
        for t in [0.2, 1.0, 3.0] {
            let z = decoherence_factor(&[up], t);
            assert!((z - C64::from_polar(1.0, t)).norm() < 1e-15);
        }

        let q = sp(0.0, FRAC_PI_3, 0.0, 0.75, 1.0);
        let z = decoherence_factor(&[q], FRAC_PI_4);
        let oracle = initial_spin_state(&q)
            .matrix()
            .matmul(&branch_unitary(-1.0, 1.0, FRAC_PI_4).adjoint());
        let oracle = branch_unitary(1.0, 1.0, FRAC_PI_4).matmul(&oracle).trace();
        assert!((z - oracle).norm() < 1e-15);
        assert!((z.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((z.im - 0.25 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn log_space_matches_direct_product() {
        let spins: Vec<SpinParams> = (0..200)
            .map(|k| sp(0.01 * k as f64, 0.3 + 0.01 * k as f64, 0.0, 0.9, 0.2 + 0.003 * k as f64))
            .collect();
        for t in [0.05, 0.3, 1.0] {
            let direct = decoherence_factor_direct(&spins, t);
            let logged = decoherence_factor(&spins, t);
            assert!((direct - logged).norm() <= 1e-12 * direct.norm());
            let bd: f64 = spins.iter().map(|p| spin_fidelity(p, t)).product();
            let bl = macrofraction_fidelity(&spins, t);
            assert!((bd - bl).abs() <= 1e-12 * bd);
        }
    }

    #[test]
    fn fidelity_examples_and_routes() {
        let p = sp(0.0, 1.0, 0.0, 0.3, 1.0);
        assert_eq!(macrofraction_fidelity(&[p], 0.0), 1.0);

        let eq = sp(0.0, FRAC_PI_2, 0.0, 1.0, 1.0);
        assert!(macrofraction_fidelity(&[eq], FRAC_PI_2) < 1e-15);

        let q = sp(0.0, FRAC_PI_3, 0.0, 0.75, 1.0);
        let b = macrofraction_fidelity(&[q], FRAC_PI_4);
        assert!((b - (1.0f64 - 0.25 * 0.75 * 0.5).sqrt()).abs() < 1e-15);
        assert!((b - 0.951_971_638_232_0).abs() < 1e-9);
        assert!((spin_fidelity_trace_det(&q, FRAC_PI_4) - b).abs() < 1e-12);
        let (a, m) = evolved_branch_states(&q, FRAC_PI_4);
        assert!((fidelity(&a, &m).unwrap() - b).abs() < 1e-9);
    }

    #[test]
    fn exponent_examples() {
        let p = sp(0.2, 1.0, 0.3, 0.8, 0.7);
        assert_eq!(lln_exponents(&p, 0.0), (0.0, 0.0));
        let mixed = sp(0.2, 1.0, 0.3, 0.5, 0.7);
        for t in [0.3, 2.0, 11.0] {
            assert_eq!(lln_exponents(&mixed, t).0, 0.0);
        }
        let q = sp(0.0, FRAC_PI_3, 0.0, 0.75, 1.0);
        let (kappa, _) = lln_exponents(&q, FRAC_PI_4);
        assert!((kappa + 0.90625f64.ln()).abs() < 1e-15);
        assert!((kappa - 0.098440).abs() < 1e-6);

        // log divergence is reported as +inf
        let eq = sp(0.0, FRAC_PI_2, 0.0, 1.0, 1.0);
        assert_eq!(lln_exponents(&eq, FRAC_PI_2).0, f64::INFINITY);
    }

    #[test]
    fn exponents_reproduce_products() {
        let spins: Vec<SpinParams> = (0..10)
            .map(|k| {
                sp(
                    0.3 * k as f64,
                    0.1 + 0.25 * k as f64,
                    0.5,
                    0.05 + 0.09 * k as f64,
                    0.1 * (k + 1) as f64,
                )
            })
            .collect();
        for t in [0.1, 0.9, 4.0] {
            let (sk, sc): (f64, f64) = spins
                .iter()
                .map(|p| lln_exponents(p, t))
                .fold((0.0, 0.0), |(a, b), (k, c)| (a + k, b + c));
            assert!(((-sk / 2.0).exp() - macrofraction_fidelity(&spins, t)).abs() < 1e-10);
            assert!(((-sc).exp() - decoherence_factor(&spins, t).norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn short_time_examples() {
        assert_eq!(short_time_exponents(1.0, 0.0), (0.0, 0.0));
        let (k, c) = short_time_exponents(1.0 / 3.0, 0.1);
        assert!((k - 0.001_333_333_333_333_333).abs() < 1e-17);
        assert!((c - 0.002_666_666_666_666_667).abs() < 1e-17);
    }

    #[test]
    fn time_scale_examples() {
        let ts = time_scales(200, 100, 0.5, 1.0 / 3.0).unwrap();
        assert!((ts.ratio_sq - 4.0).abs() < 1e-12);
        let expect = (5.0 * 100f64.ln() * 3.0 / 100.0).sqrt();
        assert!((ts.t_b - expect).abs() < 1e-15);
        assert!((ts.t_b - 0.8312).abs() < 1e-4);
        // short-time form reaches B = 1/N_m at t_B
        let (kbar, _) = short_time_exponents(1.0 / 3.0, ts.t_b);
        assert!(((-100.0 * kbar / 2.0).exp() - 0.01).abs() < 1e-12);

        let full = time_scales(300, 50, 0.0, 0.5).unwrap();
        let expect_d = (5.0 * 50f64.ln() / (4.0 * 0.5 * 300.0)).sqrt();
        assert!((full.t_d - expect_d).abs() < 1e-15);

        assert!(time_scales(10, 1, 0.5, 1.0).is_err());
        assert!(time_scales(10, 5, 1.0, 1.0).is_err());
        assert!(time_scales(10, 5, 0.5, 0.0).is_err());
    }

    #[test]
    fn single_spin_periodicity() {
        let p = sp(1.0, 0.8, 2.0, 0.85, 1.7);
        let period = 2.0 * PI / p.g;
        for t in [0.2, 1.1, 3.4] {
            assert!((decoherence_factor(&[p], t) - decoherence_factor(&[p], t + period)).norm() < 1e-10);
            assert!((spin_fidelity(&p, t) - spin_fidelity(&p, t + period)).abs() < 1e-10);
        }
    }

    #[test]
    fn param_validation() {
        assert!(SpinParams::new(-0.1, 0.0, 0.0, 0.5, 1.0).is_err());
        assert!(SpinParams::new(0.0, 3.5, 0.0, 0.5, 1.0).is_err());
        assert!(SpinParams::new(0.0, 0.0, 0.0, 1.5, 1.0).is_err());
        assert!(SpinParams::new(0.0, 0.0, 0.0, 0.5, f64::NAN).is_err());
        assert!(MacrofractionSpec::new(vec![]).is_err());
        let s = sp(0.0, 0.0, 0.0, 0.5, 1.0);
        let env = EnvironmentSpec::new(vec![MacrofractionSpec::new(vec![s; 3]).unwrap()], vec![s; 5]).unwrap();
        assert_eq!(env.total_spins(), 8);
        assert!((env.observed_fraction() - 0.375).abs() < 1e-15);
    }
}
