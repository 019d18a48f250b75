mod common;

use common::{expectation, hermitian_lambda_max, jacobi_eigenvalues, majorana_dense};
use qapprox::fermion::{
    covariance_of, eliminate_linear_fermionic, gaussian_statevector, paired_gaussian_state,
    random_majorana_hamiltonian, random_pure_gaussian, random_slater, richardson, to_majorana, wick_energy,
    CovarianceMatrix, MajoranaHamiltonian,
};
use qapprox::gaussian::{
    approximate_fermion, assemble, extract_state, feasible_from_eigenvector, random_feasible, round,
    solve_relaxation, FermionConfig, Target,
};
use qapprox::linalg::{eigh_hermitian, operator_norm, DenseHermitian, RMat, RealSymmetric};
use qapprox::rng;
use qapprox::sdp::SolverOptions;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn richardson_quartic(n_pairs: usize) -> MajoranaHamiltonian {
    let h = to_majorana(&richardson(n_pairs).unwrap()).unwrap().traceless();
    eliminate_linear_fermionic(&h).unwrap()
}

/// Quartic part of `h` without shift.
fn quartic_only(h: &MajoranaHamiltonian) -> MajoranaHamiltonian {
    let terms: Vec<([usize; 4], f64)> = h.quartic().iter().map(|(k, v)| (*k, *v)).collect();
    MajoranaHamiltonian::from_terms(h.n_modes(), &[], &terms, 0.0).unwrap()
}

#[test]
fn zero_hamiltonian_has_zero_form() {
    let h = MajoranaHamiltonian::zero(3).unwrap();
    for target in [Target::Gaussian, Target::Slater] {
        let p = assemble(&h, target).unwrap();
        assert_eq!(p.compressed_form().matrix().amax(), 0.0);
        let x = random_feasible(&p, &mut rng::seeded(50));
        assert_eq!(p.value(&x), 0.0);
    }
}

#[test]
fn objective_matches_dense_expectation() {
    let mut r = rng::seeded(51);
    let h = random_majorana_hamiltonian(3, 0.8, false, &mut r).unwrap();
    let dense = majorana_dense(&quartic_only(&h));
    let p = assemble(&h, Target::Gaussian).unwrap();
    for _ in 0..20 {
        let x = covariance_of(&random_pure_gaussian(3, &mut r));
        let psi = gaussian_statevector(&x).unwrap();
        assert!((p.value(x.matrix()) - expectation(&dense, &psi).re).abs() < 1e-9);
    }
    let ps = assemble(&h, Target::Slater).unwrap();
    for k in 0..=3 {
        let s = random_slater(3, k, &mut r);
        let psi = s.statevector().unwrap();
        assert!((ps.value(s.covariance().matrix()) - expectation(&dense, &psi).re).abs() < 1e-9);
    }
    for _ in 0..20 {
        let x = random_feasible(&p, &mut r);
        assert!(operator_norm(&x) <= 1.0 + 1e-12);
        let cov = CovarianceMatrix::from_matrix(x.clone()).unwrap();
        assert!((p.value(&x) - (wick_energy(&h, &cov).unwrap() - h.shift())).abs() < 1e-9);
    }
}

#[test]
fn paired_value_on_richardson() {
    let h = to_majorana(&richardson(2).unwrap()).unwrap();
    let x = covariance_of(&paired_gaussian_state(2).unwrap());
    assert!((wick_energy(&h, &x).unwrap() - 1.5).abs() < 1e-12);
    let hp = eliminate_linear_fermionic(&h).unwrap();
    let p = assemble(&hp, Target::Gaussian).unwrap();
    let mut full = RMat::zeros(10, 10);
    full.view_mut((0, 0), (8, 8)).copy_from(x.matrix());
    full[(8, 9)] = 1.0;
    full[(9, 8)] = -1.0;
    assert!((p.value(&full) + h.shift() - 1.5).abs() < 1e-9);
}

#[test]
fn relaxation_dominates_feasible_points() {
    let hp = richardson_quartic(2);
    let p = assemble(&hp, Target::Gaussian).unwrap();
    let sol = solve_relaxation(&p, &opts()).unwrap();
    assert!(sol.solver.converged());
    assert!(sol.theta_star >= 1.5 * 3.0 / 10.0 - 1e-6);
    let mut r = rng::seeded(52);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..1000 {
        best = best.max(p.value(&random_feasible(&p, &mut r)));
    }
    assert!(sol.theta_upper_bound >= best - 1e-9, "{} < {best}", sol.theta_upper_bound);
    assert!(sol.theta_star >= best - 1e-5);
    assert!(sol.theta_upper_bound >= sol.theta_star - 1e-6);
    // certified bound on λ_max of the eliminated quartic
    let lam = hermitian_lambda_max(&majorana_dense(&hp));
    assert!(2.0 * 5.0 / 3.0 * sol.theta_upper_bound >= lam - 1e-9);
}

#[test]
fn random_sandwich() {
    let mut r = rng::seeded(53);
    for _ in 0..5 {
        let h = random_majorana_hamiltonian(3, 0.8, false, &mut r).unwrap();
        for target in [Target::Gaussian, Target::Slater] {
            let p = assemble(&h, target).unwrap();
            let sol = solve_relaxation(&p, &opts()).unwrap();
            let rounded = round(&sol.rho, &p, 64, 7).unwrap();
            assert!(sol.theta_upper_bound >= rounded.value - 1e-9);
            assert!(rounded.value >= rounded.mean_value - 1e-12);
            assert!(operator_norm(rounded.x.matrix()) <= 1.0 + 1e-9);
            for _ in 0..50 {
                assert!(sol.theta_upper_bound >= p.value(&random_feasible(&p, &mut r)) - 1e-9);
            }
            let lam = hermitian_lambda_max(&majorana_dense(&h)) - h.shift();
            if target == Target::Gaussian {
                assert!(2.0 * 3.0 / 3.0 * sol.theta_upper_bound >= lam - 1e-9);
            }
        }
    }
}

#[test]
fn rank_one_rounding_recovers_the_point() {
    let mut r = rng::seeded(54);
    let h = random_majorana_hamiltonian(3, 1.0, false, &mut r).unwrap();
    let p = assemble(&h, Target::Gaussian).unwrap();
    let x0 = random_feasible(&p, &mut r);
    let x0 = &x0 / operator_norm(&x0);
    let xi = p.coordinates(&x0);
    let rho = RealSymmetric::symmetrized(&(&xi * xi.transpose()));
    let out = round(&rho, &p, 32, 1).unwrap();
    // every sample is t·x0 with |t| <= 1, and F is even of degree two;
    // the square root of the roundoff spectrum leaves ~1e-8 noise
    let f0 = p.value(&x0);
    let t = out.x.matrix().dot(&x0) / x0.norm_squared();
    assert!((out.x.matrix() - &x0 * t).amax() < 1e-6);
    assert!(t.abs() <= 1.0 + 1e-6);
    assert!((out.value - t * t * f0).abs() < 1e-6);
    assert!(out.value <= f0.abs() + 1e-6);
    assert!(round(&rho, &p, 0, 1).is_err());
}

#[test]
fn rounding_is_deterministic_per_seed() {
    let hp = richardson_quartic(2);
    let p = assemble(&hp, Target::Gaussian).unwrap();
    let sol = solve_relaxation(&p, &opts()).unwrap();
    let a = round(&sol.rho, &p, 40, 9).unwrap();
    let b = round(&sol.rho, &p, 40, 9).unwrap();
    assert_eq!(a.x.matrix(), b.x.matrix());
    assert!(a.value >= 0.0, "rounded F {}", a.value);
    println!("richardson(2) rounded F {:.4} (mean {:.4}) over {} samples", a.value, a.mean_value, a.samples);
}

#[test]
fn extraction() {
    let mut r = rng::seeded(55);
    let h = random_majorana_hamiltonian(3, 0.6, true, &mut r).unwrap();
    let dense = majorana_dense(&h);
    let x = covariance_of(&random_pure_gaussian(3, &mut r));
    let ex = extract_state(&x, &h, Target::Gaussian, 8, 2).unwrap();
    assert!((ex.state.covariance().matrix() - x.matrix()).amax() < 1e-8);
    let psi = gaussian_statevector(&ex.state.covariance()).unwrap();
    assert!((expectation(&dense, &psi).re - ex.energy).abs() < 1e-9);

    // mixed input: the best draw beats the mean, which tracks the mixed energy
    let p = assemble(&MajoranaHamiltonian::zero(3).unwrap(), Target::Gaussian).unwrap();
    let mixed = CovarianceMatrix::from_matrix(random_feasible(&p, &mut r)).unwrap();
    let ex = extract_state(&mixed, &h, Target::Gaussian, 4000, 3).unwrap();
    assert!(ex.energy >= ex.mean_energy);
    assert!((ex.mean_energy - ex.mixed_energy).abs() < 0.1, "{} vs {}", ex.mean_energy, ex.mixed_energy);
}

#[test]
fn pipeline_on_richardson() {
    let h = to_majorana(&richardson(2).unwrap()).unwrap();
    let lam = hermitian_lambda_max(&majorana_dense(&h));
    for target in [Target::Gaussian, Target::Slater] {
        let rep = approximate_fermion(&h, target, &FermionConfig::default(), &opts()).unwrap();
        assert!(rep.extracted_energy >= 1.4, "{target:?}: {}", rep.extracted_energy);
        assert!(rep.extracted_energy <= lam + 1e-9);
        let psi = match &rep.extracted_state {
            qapprox::gaussian::ExtractedState::Gaussian(g) => gaussian_statevector(&covariance_of(g)).unwrap(),
            qapprox::gaussian::ExtractedState::Slater(s) => s.statevector().unwrap(),
        };
        assert!((expectation(&majorana_dense(&h), &psi).re - rep.extracted_energy).abs() < 1e-9);
        if let Some(ub) = rep.lambda_max_upper_bound {
            assert!(ub >= lam - 1e-9);
        }
    }
    let a = approximate_fermion(&h, Target::Gaussian, &FermionConfig::default(), &opts()).unwrap();
    let b = approximate_fermion(&h, Target::Gaussian, &FermionConfig::default(), &opts()).unwrap();
    assert_eq!(a.extracted_state, b.extracted_state);
}

#[test]
fn feasible_point_from_eigenvector() {
    let mut r = rng::seeded(56);
    for k in 0..6 {
        let h = if k == 0 { richardson_quartic(2) } else { random_majorana_hamiltonian(3, 0.8, false, &mut r).unwrap() };
        let n = h.n_modes();
        let d = 2 * n;
        let dense = DenseHermitian::new(majorana_dense(&h)).unwrap();
        let e = eigh_hermitian(&dense);
        let lam = *e.values.last().unwrap();
        let fp = feasible_from_eigenvector(&h, &e.top_vector()).unwrap();
        assert!(jacobi_eigenvalues(&fp.rho)[0] >= -1e-8);
        for t in [&fp.tr1, &fp.tr2] {
            let top = *jacobi_eigenvalues(&(RMat::identity(d, d) - t)).first().unwrap();
            assert!(top >= -1e-8);
        }
        assert!((fp.objective - (lam - h.shift()) / d as f64).abs() < 1e-8, "{} vs {}", fp.objective, lam);
        assert!(fp.support_residual < 1e-9);
        assert!((fp.energy - lam).abs() < 1e-9);
    }
    let with_quadratic = MajoranaHamiltonian::from_terms(1, &[(0, 1, 1.0)], &[], 0.0).unwrap();
    assert!(feasible_from_eigenvector(&with_quadratic, &nalgebra::dvector![common::c(1.0, 0.0), common::c(0.0, 0.0)]).is_err());
}

#[test]
fn paired_ratio_exceeds_relaxation_guarantee() {
    for n_pairs in 4..=8usize {
        let paired = (n_pairs * (n_pairs + 1)) as f64 / 4.0;
        let lam = qapprox::fermion::richardson_lambda_max(n_pairs);
        assert!(paired / lam >= 1.0 - 6.0 / (2 * n_pairs) as f64);
    }
}
