use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sbs_monitor::densmat::{
    fidelity, partial_trace, tensor, trace_distance, von_neumann_entropy, ComplexMatrix, DensityMatrix,
};
use sbs_monitor::discrimination::{majority_success, majority_success_heterogeneous};
use sbs_monitor::sbs::cor2_bound;
use sbs_monitor::spin_model::{
    decoherence_factor, decoherence_factor_direct, evolved_branch_states, macrofraction_fidelity, spin_fidelity,
    spin_fidelity_trace_det, SpinParams,
};

fn spin() -> impl Strategy<Value = SpinParams> {
    (0.0..TAU, 0.0..=PI, 0.0..TAU, 0.0..=1.0, 0.0..=1.0).prop_map(|(alpha, beta, gamma_euler, lambda, g)| SpinParams {
        alpha,
        beta,
        gamma_euler,
        lambda,
        g,
    })
}

/// `A A† / Tr` from a complex Gaussian-ish matrix.
fn state(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let a = ComplexMatrix::from_vec(dim, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap();
        let m = a.matmul(&a.adjoint());
        let tr = m.trace().re.max(1e-12);
        DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in state(3), b in state(3)) {
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-9);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fab));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fuchs_van_de_graaf(a in state(4), b in state(4)) {
        let f = fidelity(&a, &b).unwrap();
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(1.0 - f <= d + 1e-9);
        prop_assert!(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn partial_traces_compose(a in state(2), b in state(3), c in state(2)) {
        let abc = a.tensor(&b).tensor(&c);
        let dims = [2, 3, 2];
        let once = partial_trace(&abc, &dims, &[true, false, false]).unwrap();
        let ab = partial_trace(&abc, &dims, &[true, true, false]).unwrap();
        let twice = partial_trace(&ab, &[2, 3], &[true, false]).unwrap();
        prop_assert!(once.matrix().max_abs_diff(twice.matrix()) < 1e-12);
        prop_assert!(once.matrix().max_abs_diff(a.matrix()) < 1e-12);
        let bc = partial_trace(&abc, &dims, &[false, true, true]).unwrap();
        prop_assert!(bc.matrix().max_abs_diff(&tensor(b.matrix(), c.matrix())) < 1e-12);
    }

    #[test]
    fn entropy_is_additive_on_products(a in state(2), b in state(3)) {
        let joint = von_neumann_entropy(&a.tensor(&b));
        prop_assert!((joint - von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-8);
    }

    #[test]
    fn spin_fidelity_forms_agree(p in spin(), t in 0.0..20.0f64) {
        let (plus, minus) = evolved_branch_states(&p, t);
        let exact = fidelity(&plus, &minus).unwrap();
        prop_assert!((exact - spin_fidelity(&p, t)).abs() < 1e-7);
        prop_assert!((spin_fidelity(&p, t) - spin_fidelity_trace_det(&p, t)).abs() < 1e-7);
    }

    #[test]
    fn decoherence_paths_agree(spins in prop::collection::vec(spin(), 1..40), t in 0.0..20.0f64) {
        let fast = decoherence_factor(&spins, t);
        let direct = decoherence_factor_direct(&spins, t);
        prop_assert!((fast - direct).norm() < 1e-10);
        prop_assert!(fast.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn macrofraction_fidelity_is_a_product(spins in prop::collection::vec(spin(), 1..120), t in 0.0..20.0f64) {
        let b = macrofraction_fidelity(&spins, t);
        prop_assert!((0.0..=1.0).contains(&b));
        let split = spins.len() / 2;
        let prod = macrofraction_fidelity(&spins[..split], t) * macrofraction_fidelity(&spins[split..], t);
        prop_assert!((b - prod).abs() <= 1e-12 + 1e-9 * b);
    }

    #[test]
    fn unpolarized_spins_keep_unit_fidelity(mut spins in prop::collection::vec(spin(), 1..30), t in 0.0..20.0f64) {
        for p in &mut spins {
            p.lambda = 0.5;
        }
        prop_assert!((macrofraction_fidelity(&spins, t) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cor2_bound_is_monotone(x in 0.0..0.249f64, dx in 1e-4..1e-3f64) {
        let lo = cor2_bound(x, 2).unwrap();
        let hi = cor2_bound(x + dx, 2).unwrap();
        prop_assert!(lo.valid && hi.bound > lo.bound);
    }

    #[test]
    fn majority_grows_with_size(p in 0.51..0.99f64, k in 0u64..50) {
        let n = 2 * k + 1;
        prop_assert!(majority_success(n + 2, p).unwrap() >= majority_success(n, p).unwrap() - 1e-12);
    }

    #[test]
    fn heterogeneous_majority_reduces_to_binomial(p in 0.0..=1.0f64, k in 0usize..30) {
        let n = 2 * k + 1;
        let het = majority_success_heterogeneous(&vec![p; n]).unwrap();
        prop_assert!((het - majority_success(n as u64, p).unwrap()).abs() < 1e-10);
    }
}
