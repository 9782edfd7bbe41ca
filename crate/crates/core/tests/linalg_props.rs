//! Linear-algebra invariants checked on random operators.

mod common;

use common::*;
use faer::{c64, Mat};
use mfgs_core::engine::{compute_gibbs, compute_mfgs};
use mfgs_core::linalg::*;
use mfgs_core::models::cluster_coupling_operator;
use proptest::prelude::*;

fn dense(h: &HermitianOperator) -> Mat<c64> {
    h.mat().to_owned()
}

/// `Tr_E` by the index formula on a dense matrix.
fn partial_trace_oracle(m: &Mat<c64>, d: usize, n: usize) -> Mat<c64> {
    Mat::from_fn(d, d, |a, b| (0..n).map(|k| m[(a * n + k, b * n + k)]).sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..40, complex in any::<bool>()) {
        let h = random_hermitian(n, &mut rng(seed), complex);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruction_residual(&h) <= 1e-12 * n as f64);
        prop_assert!(e.orthonormality_residual() <= 1e-12 * n as f64);
        prop_assert!(e.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn boltzmann_semigroup(seed in any::<u64>(), n in 1usize..20, b1 in 0.1f64..4.0, b2 in 0.1f64..4.0) {
        let h = random_hermitian(n, &mut rng(seed), true);
        let k1 = boltzmann_exp(&h, b1).unwrap();
        let k2 = boltzmann_exp(&h, b2).unwrap();
        let k12 = boltzmann_exp(&h, b1 + b2).unwrap();
        prop_assert!((k1.log_prefactor + k2.log_prefactor - k12.log_prefactor).abs() < 1e-12);
        let prod = k1.kernel.mat() * k2.kernel.mat();
        prop_assert!(max_diff(&prod, k12.kernel.mat()) < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), d in 1usize..=6, n in 1usize..=8) {
        let mut r = rng(seed);
        let rs = random_density(d, &mut r);
        let re = random_density(n, &mut r);
        let joint = kron(&rs, &re);
        let red = partial_trace_env(&joint, CompositeDims::new(d, n)).unwrap();
        prop_assert!(red.max_abs_diff(&rs) < 1e-13);
    }

    #[test]
    fn partial_trace_matches_index_formula(seed in any::<u64>(), d in 1usize..=5, n in 1usize..=7) {
        let h = random_hermitian(d * n, &mut rng(seed), true);
        let red = partial_trace_env(&h, CompositeDims::new(d, n)).unwrap();
        prop_assert!(max_diff(&partial_trace_oracle(&dense(&h), d, n), red.mat()) < 1e-13);
    }

    #[test]
    fn reduced_gibbs_two_routes(seed in any::<u64>(), d in 1usize..=4, n in 1usize..=8, beta in 0.05f64..8.0) {
        let h = random_hermitian(d * n, &mut rng(seed), true);
        let dims = CompositeDims::new(d, n);
        let fast = compute_mfgs(&h, dims, beta).unwrap();
        let full = compute_gibbs(&h, beta).unwrap();
        let slow = partial_trace_env(full.op(), dims).unwrap();
        prop_assert!(fast.op().max_abs_diff(&slow) < 1e-12);
        prop_assert!((fast.op().trace() - 1.0).abs() < 1e-13);
        prop_assert!(hermitian_eigenvalues(fast.op()).unwrap()[0] > -1e-13);
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let a = DensityMatrix::new(random_density(n, &mut r)).unwrap();
        let b = DensityMatrix::new(random_density(n, &mut r)).unwrap();
        let c = DensityMatrix::new(random_density(n, &mut r)).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-14);
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-14).contains(&ab));
        let via_c = trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap();
        prop_assert!(ab <= via_c + 1e-13);
    }

    #[test]
    fn trace_distance_of_commuting_states(p in proptest::collection::vec(0.01f64..1.0, 2..8), seed in any::<u64>()) {
        let mut r = rng(seed);
        let q: Vec<f64> = p.iter().map(|_| rand::Rng::random_range(&mut r, 0.01..1.0)).collect();
        let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
        let pn: Vec<f64> = p.iter().map(|x| x / sp).collect();
        let qn: Vec<f64> = q.iter().map(|x| x / sq).collect();
        let expect = 0.5 * pn.iter().zip(&qn).map(|(a, b)| (a - b).abs()).sum::<f64>();
        let u = random_unitary(p.len(), &mut r);
        let a = DensityMatrix::new(HermitianOperator::diag(&pn).conjugated_by(u.as_ref()).unwrap()).unwrap();
        let b = DensityMatrix::new(HermitianOperator::diag(&qn).conjugated_by(u.as_ref()).unwrap()).unwrap();
        prop_assert!((trace_distance(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn block_projection_is_idempotent(seed in any::<u64>(), n in 2usize..=7, k in 1usize..=4) {
        let mut r = rng(seed);
        // spectrum with k distinct values, repeated
        let vals: Vec<f64> = (0..n).map(|i| (i % k) as f64).collect();
        let u = random_unitary(n, &mut r);
        let a = HermitianOperator::diag(&vals).conjugated_by(u.as_ref()).unwrap();
        let fam = cluster_coupling_operator(&a, 1e-8).unwrap();
        prop_assert_eq!(fam.len(), k.min(n));
        let rho = random_density(n, &mut r);
        let once = project_block_diagonal(&rho, &fam).unwrap();
        let twice = project_block_diagonal(&once, &fam).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-13);
        prop_assert!((once.trace() - rho.trace()).abs() < 1e-13);
        prop_assert!(once.commutator_norm(&a) < 1e-12);
    }
}

#[test]
fn eig_residual_at_dimension_600() {
    let h = random_hermitian(600, &mut rng(600), true);
    let e = hermitian_eig(&h).unwrap();
    assert!(e.reconstruction_residual(&h) <= 1e-10);
    assert!(e.orthonormality_residual() <= 1e-10);
}

#[test]
fn bell_state_reduces_to_maximally_mixed() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [s, 0.0, 0.0, s];
    let rho = HermitianOperator::from_rows(
        &(0..4)
            .map(|i| (0..4).map(|j| psi[i] * psi[j]).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let red = partial_trace_env(&rho, CompositeDims::new(2, 2)).unwrap();
    assert!(red.max_abs_diff(&HermitianOperator::diag(&[0.5, 0.5])) < 1e-15);
}

#[test]
fn gibbs_of_diagonal_hamiltonian() {
    let e = [0.0f64, 0.7, 2.0];
    let beta = 1.3f64;
    let z: f64 = e.iter().map(|x| (-beta * x).exp()).sum();
    let g = compute_gibbs(&HermitianOperator::diag(&e), beta).unwrap();
    for (p, x) in g.populations().iter().zip(e) {
        assert!((p - (-beta * x).exp() / z).abs() < 1e-15);
    }
}

#[test]
fn gibbs_survives_huge_energies() {
    let g = compute_gibbs(&HermitianOperator::diag(&[1e5, 1e5 + 1.0]), 50.0).unwrap();
    let p = g.populations();
    assert!(p.iter().all(|x| x.is_finite()));
    assert!((p[1] / p[0] - (-50.0f64).exp()).abs() < 1e-30);
}

#[test]
fn trace_distance_of_orthogonal_pure_states() {
    let a = DensityMatrix::new(HermitianOperator::diag(&[1.0, 0.0])).unwrap();
    let b = DensityMatrix::new(HermitianOperator::diag(&[0.0, 1.0])).unwrap();
    assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn invalid_inputs_rejected() {
    let h = HermitianOperator::diag(&[0.0, 1.0]);
    assert!(boltzmann_exp(&h, 0.0).is_err());
    assert!(boltzmann_exp(&h, f64::NAN).is_err());
    assert!(partial_trace_env(&h, CompositeDims::new(3, 1)).is_err());
    let nonherm = Mat::from_fn(2, 2, |i, j| c64::new((i + 2 * j) as f64, 0.0));
    assert!(HermitianOperator::from_mat(nonherm).is_err());
}
