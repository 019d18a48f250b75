mod common;

use common::{hermitian_lambda_max, jacobi_eigenvalues, qubit_dense};
use qapprox::linalg::{RMat, RealSymmetric};
use qapprox::oracle::f_max_enumerate;
use qapprox::qubit::{diagonal_from_quadratic, eliminate_linear, random_instance, TwoLocalHamiltonian};
use qapprox::rng;
use qapprox::sdp::{gram_factor, moment_problem, solve, solve_moment_sdp, Dominance, SdpProblem, SdpStatus, SolverOptions, Subspace, SymSparse};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn unit_diagonal(dim: usize) -> Vec<(SymSparse, f64)> {
    (0..dim)
        .map(|i| {
            let mut a = SymSparse::new();
            a.add(i, i, 1.0);
            (a, 1.0)
        })
        .collect()
}

#[test]
fn rank_one_optimum() {
    let c = RMat::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
    let mut p = SdpProblem::new(2, SymSparse::from_dense(&c));
    p.equalities = unit_diagonal(2);
    let s = solve(&p, &opts()).unwrap();
    assert_eq!(s.status, SdpStatus::Converged);
    assert!((s.objective - 1.0).abs() < 1e-5);
    assert!((s.x.matrix() - RMat::from_element(2, 2, 1.0)).amax() < 1e-4);
    assert!((s.objective - p.objective.inner(s.x.matrix())).abs() < 1e-9);
}

#[test]
fn zz_moment_relaxation_is_tight() {
    let h = TwoLocalHamiltonian::from_triplets(2, &[(2, 5, 0.5)], &[]).unwrap();
    let m = solve_moment_sdp(&h, &opts()).unwrap();
    let lam = hermitian_lambda_max(&qubit_dense(&h));
    assert!((lam - 1.0).abs() < 1e-9);
    assert!((m.objective - 1.0).abs() < 1e-5);
    assert!(m.upper_bound >= lam - 1e-9);
}

#[test]
fn zero_couplings() {
    let m = solve_moment_sdp(&TwoLocalHamiltonian::zero(2), &opts()).unwrap();
    assert!(m.objective.abs() < 1e-9);
    assert!(solve_moment_sdp(&TwoLocalHamiltonian::from_triplets(1, &[], &[(0, 1.0)]).unwrap(), &opts()).is_err());
}

#[test]
fn triangle_sandwich() {
    for sign in [1.0, -1.0] {
        let b = RMat::from_fn(3, 3, |p, q| if p == q { 0.0 } else { sign });
        let h = diagonal_from_quadratic(&b, &[0.0; 3]).unwrap();
        let f = f_max_enumerate(&b, &[0.0; 3]).unwrap().value;
        let m = solve_moment_sdp(&h, &opts()).unwrap();
        assert!(m.objective >= f - 1e-5, "objective {} < F_max {f}", m.objective);
        assert!(m.upper_bound >= f - 1e-9);
    }
}

#[test]
fn moment_bounds_on_random_instances() {
    let mut r = rng::seeded(21);
    for k in 0..50 {
        let n = 1 + k % 5;
        let h = random_instance(n, 0.8, &mut r);
        let lam = hermitian_lambda_max(&qubit_dense(&h));
        let work = eliminate_linear(&h);
        let m = solve_moment_sdp(&work, &opts()).unwrap();
        assert!(m.objective >= lam - 1e-5, "instance {k}: {} < {lam}", m.objective);
        assert!(m.upper_bound >= lam - 1e-9);
        let diag_err = (0..m.m.dim()).map(|i| (m.m.matrix()[(i, i)] - 1.0).abs()).fold(0.0, f64::max);
        assert!(diag_err <= opts().feas_tol);
        assert!(jacobi_eigenvalues(m.m.matrix())[0] >= -opts().feas_tol);
        let recomputed = work.coupling_matrix().dot(m.m.matrix());
        assert!((recomputed - m.objective).abs() < 1e-9);
    }
}

#[test]
fn solver_residuals_are_reported() {
    let mut r = rng::seeded(22);
    let h = random_instance(3, 1.0, &mut r).quadratic_part();
    let p = moment_problem(&h);
    let s = solve(&p, &opts()).unwrap();
    assert!(s.converged());
    assert!(s.primal_residual <= opts().feas_tol);
    for (a, b) in &p.equalities {
        assert!((a.inner(s.x.matrix()) - b).abs() <= opts().feas_tol);
    }
    assert!(jacobi_eigenvalues(s.x.matrix())[0] >= -opts().feas_tol);
    assert!((s.objective - p.objective.inner(s.x.matrix())).abs() < 1e-9);
}

#[test]
fn dominance_constraint() {
    // maximize the sum of entries of X subject to X ⪯ I: optimum 2
    let mut p = SdpProblem::new(2, SymSparse::from_dense(&RMat::from_element(2, 2, 1.0)));
    let mut map = Vec::new();
    for a in 0..2 {
        for b in a..2 {
            let mut g = SymSparse::new();
            g.add(a, b, if a == b { 1.0 } else { 0.5 });
            map.push((a, b, g));
        }
    }
    p.dominance.push(Dominance { map, bound: RMat::identity(2, 2) });
    let s = solve(&p, &opts()).unwrap();
    assert!(s.converged());
    assert!((s.objective - 2.0).abs() < 1e-5);
    assert!(p.dominance[0].violation(s.x.matrix()) <= opts().feas_tol);
}

#[test]
fn subspace_restriction() {
    // maximize diag(1, 5) with unit trace, restricted to span(e0): optimum 1
    let mut obj = SymSparse::new();
    obj.add(0, 0, 1.0);
    obj.add(1, 1, 5.0);
    let mut tr = SymSparse::new();
    tr.add(0, 0, 1.0);
    tr.add(1, 1, 1.0);
    let mut p = SdpProblem::new(2, obj);
    p.equalities.push((tr, 1.0));
    let free = solve(&p, &opts()).unwrap();
    assert!((free.objective - 5.0).abs() < 1e-5);
    p.subspace = Some(Subspace { ambient: 2, columns: vec![vec![(0, 1.0)]] });
    let restricted = solve(&p, &opts()).unwrap();
    assert!((restricted.objective - 1.0).abs() < 1e-5);
    p.subspace = Some(Subspace { ambient: 2, columns: vec![vec![(0, 2.0)]] });
    assert!(solve(&p, &opts()).is_err());
}

#[test]
fn gram_factors() {
    let v = gram_factor(&RealSymmetric::identity(3), 1e-10).unwrap();
    assert!((&v * v.transpose() - RMat::identity(3, 3)).amax() < 1e-12);
    let ones = RealSymmetric::new(RMat::from_element(3, 3, 1.0)).unwrap();
    let v = gram_factor(&ones, 1e-10).unwrap();
    for i in 1..3 {
        assert!((v.row(i) - v.row(0)).amax() < 1e-12);
    }
    let h = random_instance(4, 0.8, &mut rng::seeded(23)).quadratic_part();
    let m = solve_moment_sdp(&h, &opts()).unwrap();
    let v = gram_factor(&m.m, 1e-10).unwrap();
    assert!((&v * v.transpose() - m.m.matrix()).amax() <= 1e-7);
    for i in 0..v.nrows() {
        assert!((v.row(i).norm() - 1.0).abs() <= 1e-7);
    }
    let bad = RealSymmetric::new(RMat::from_diagonal(&nalgebra::dvector![1.0, -1.0])).unwrap();
    assert!(gram_factor(&bad, 1e-10).is_err());
}
