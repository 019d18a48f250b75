//! Reference implementations used as oracles by the integration tests.
//! Everything here is built from explicit Kronecker products and a plain
//! Jacobi sweep, independent of the library's own dense routines.
#![allow(dead_code)]

use nalgebra::DVector;
use num_complex::Complex64;
use qapprox::fermion::MajoranaHamiltonian;
use qapprox::linalg::{CMat, RMat};
use qapprox::qubit::TwoLocalHamiltonian;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 Pauli matrix for axis 0 = X, 1 = Y, 2 = Z; 3 is the identity.
pub fn pauli(axis: usize) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match axis {
        0 => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        1 => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        2 => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => CMat::identity(2, 2),
    }
}

/// Operator acting as `ops[q]` on qubit `q`; qubit `q` is bit `q` of the
/// basis index.
pub fn kron_chain(ops: &[CMat]) -> CMat {
    let mut m = CMat::identity(1, 1);
    for op in ops.iter().rev() {
        m = m.kronecker(op);
    }
    m
}

/// Single Pauli `P_v` (qubit `v / 3`, axis `v % 3`) on `n` qubits.
pub fn pauli_index(v: usize, n: usize) -> CMat {
    let ops: Vec<CMat> = (0..n).map(|q| if q == v / 3 { pauli(v % 3) } else { pauli(3) }).collect();
    kron_chain(&ops)
}

/// `Σ D_j P_j + Σ_{i,j} C_ij P_i P_j` with the double-counted sum.
pub fn qubit_dense(h: &TwoLocalHamiltonian) -> CMat {
    let n = h.n_qubits();
    let dim = 1 << n;
    let mut m = CMat::zeros(dim, dim);
    for (j, &d) in h.linear().iter().enumerate() {
        if d != 0.0 {
            m += pauli_index(j, n) * c(d, 0.0);
        }
    }
    let cm = h.coupling_matrix();
    for i in 0..3 * n {
        for j in 0..3 * n {
            if cm[(i, j)] != 0.0 {
                m += pauli_index(i, n) * pauli_index(j, n) * c(cm[(i, j)], 0.0);
            }
        }
    }
    m
}

/// Jordan–Wigner Majorana `c_p`: `Z` on modes below `p / 2`, then `X`
/// (even `p`) or `Y` (odd `p`).
pub fn majorana(p: usize, n_modes: usize) -> CMat {
    let ops: Vec<CMat> = (0..n_modes)
        .map(|m| {
            if m < p / 2 {
                pauli(2)
            } else if m == p / 2 {
                pauli(p % 2)
            } else {
                pauli(3)
            }
        })
        .collect();
    kron_chain(&ops)
}

/// `shift + Σ_{p<q} 2i V_pq c_p c_q + Σ_{p<q<r<s} w c_p c_q c_r c_s`.
pub fn majorana_dense(h: &MajoranaHamiltonian) -> CMat {
    let n = h.n_modes();
    let d = 2 * n;
    let cs: Vec<CMat> = (0..d).map(|p| majorana(p, n)).collect();
    let dim = 1 << n;
    let mut m = CMat::identity(dim, dim) * c(h.shift(), 0.0);
    let v = h.v().matrix();
    for p in 0..d {
        for q in (p + 1)..d {
            if v[(p, q)] != 0.0 {
                m += &cs[p] * &cs[q] * c(0.0, 2.0 * v[(p, q)]);
            }
        }
    }
    for (&[p, q, r, s], &w) in h.quartic() {
        m += &cs[p] * &cs[q] * &cs[r] * &cs[s] * c(w, 0.0);
    }
    m
}

/// Annihilator `a_j = (c_{2j} + i c_{2j+1}) / 2`.
pub fn annihilator(j: usize, n_modes: usize) -> CMat {
    (majorana(2 * j, n_modes) + majorana(2 * j + 1, n_modes) * c(0.0, 1.0)) * c(0.5, 0.0)
}

pub fn expectation(m: &CMat, psi: &DVector<Complex64>) -> Complex64 {
    psi.dotc(&(m * psi))
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_eigenvalues(m: &RMat) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp - sn * akq;
                    a[(k, q)] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk - sn * aqk;
                    a[(q, k)] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    e.sort_by(|x, y| x.partial_cmp(y).unwrap());
    e
}

/// Eigenvalues of a Hermitian matrix via the real embedding
/// `[[A, -B], [B, A]]`, whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let big = RMat::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    jacobi_eigenvalues(&big).into_iter().step_by(2).collect()
}

pub fn hermitian_lambda_max(m: &CMat) -> f64 {
    *hermitian_eigenvalues(m).last().unwrap()
}

/// Normalized complex Gaussian vector.
pub fn random_state(dim: usize, rng: &mut qapprox::rng::StreamRng) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| {
        c(qapprox::rng::standard_normal(rng), qapprox::rng::standard_normal(rng))
    });
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Largest eigenvalue of `m` restricted to a basis of the given states
/// (indices into the computational basis).
pub fn restricted_lambda_max(m: &CMat, basis: &[usize]) -> f64 {
    let k = basis.len();
    let sub = CMat::from_fn(k, k, |i, j| m[(basis[i], basis[j])]);
    hermitian_lambda_max(&sub)
}
