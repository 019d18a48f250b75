//! Exact and brute-force reference values for small systems.
//!
//! Every value carries a certification label: dense diagonalization and
//! full enumeration are exact, local ascents only give lower bounds.

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{
    covariance_of, random_pure_gaussian, random_slater, wick_energy_unchecked, CovarianceMatrix,
    MajoranaHamiltonian, NumberConservingHamiltonian,
};
use crate::linalg::{eigvalsh_hermitian, DenseHermitian, RMat};
use crate::qubit::{build_dense, energy_flat, ProductState, TwoLocalHamiltonian};
use crate::rng::{self, standard_normal};
use crate::rounding::best_stabilizer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub value: f64,
    pub method: String,
    pub certified: Certification,
    pub runtime_seconds: f64,
}

impl OracleReport {
    fn timed(quantity: &str, method: &str, certified: Certification, start: Instant, value: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            method: method.to_string(),
            certified,
            runtime_seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn top_eigenvalue(m: &DenseHermitian) -> f64 {
    *eigvalsh_hermitian(m).last().expect("non-empty spectrum")
}

pub fn lambda_max_qubit(h: &TwoLocalHamiltonian) -> Result<OracleReport> {
    let start = Instant::now();
    let value = top_eigenvalue(&build_dense(h)?);
    Ok(OracleReport::timed("lambda_max", "dense_eigh", Certification::Exact, start, value))
}

pub fn lambda_max_majorana(h: &MajoranaHamiltonian) -> Result<OracleReport> {
    let start = Instant::now();
    let value = top_eigenvalue(&h.build_dense()?);
    Ok(OracleReport::timed("lambda_max", "dense_eigh", Certification::Exact, start, value))
}

pub fn lambda_max_number_conserving(h: &NumberConservingHamiltonian) -> Result<OracleReport> {
    let start = Instant::now();
    let value = top_eigenvalue(&h.build_dense()?);
    Ok(OracleReport::timed("lambda_max", "dense_eigh", Certification::Exact, start, value))
}

/// Largest register for [`f_max_enumerate`].
pub const MAX_ENUMERATION_BITS: usize = 24;

/// `max_{x ∈ {±1}^n} xᵀ B x + vᵀ x`.
pub fn f_max_enumerate(b: &RMat, v: &[f64]) -> Result<OracleReport> {
    let n = v.len();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::Dimension { expected: n, got: b.nrows() });
    }
    if n > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge { what: "enumeration bits", value: n, max: MAX_ENUMERATION_BITS });
    }
    let start = Instant::now();
    let value = (0u64..1 << n)
        .into_par_iter()
        .map(|bits| {
            let x: Vec<f64> = (0..n).map(|a| if (bits >> a) & 1 == 0 { 1.0 } else { -1.0 }).collect();
            let mut f = 0.0;
            for i in 0..n {
                f += v[i] * x[i];
                for j in 0..n {
                    f += b[(i, j)] * x[i] * x[j];
                }
            }
            f
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(OracleReport::timed("f_max", "enumeration", Certification::Exact, start, value))
}

/// Largest register for [`lambda_sep_ascent`].
pub const MAX_ASCENT_QUBITS: usize = 12;
pub const MAX_SWEEPS: usize = 500;

#[derive(Clone, Debug)]
pub struct AscentRun {
    pub state: ProductState,
    pub value: f64,
    /// Energy after each sweep, starting with the initial energy.
    pub trace: Vec<f64>,
}

/// `∂E/∂y` for the flat Bloch vector `y`: `D + 2 C y`.
fn effective_field(h: &TwoLocalHamiltonian, y: &[f64], qubit: usize) -> [f64; 3] {
    let mut f = [0.0; 3];
    for (k, fk) in f.iter_mut().enumerate() {
        let i = 3 * qubit + k;
        *fk = h.linear().get(i).copied().unwrap_or(0.0);
    }
    for (i, j, c) in h.couplings() {
        if i / 3 == qubit {
            f[i % 3] += 2.0 * c * y[j];
        } else if j / 3 == qubit {
            f[j % 3] += 2.0 * c * y[i];
        }
    }
    f
}

/// Coordinate ascent from `start`: the energy is affine in each qubit's
/// Bloch vector, so each update sets it to the unit vector along the
/// effective field. Stops when a sweep gains less than `1e-10`.
pub fn sep_ascent_from(h: &TwoLocalHamiltonian, start: &ProductState) -> Result<AscentRun> {
    let n = h.n_qubits();
    if start.n_qubits() != n {
        return Err(Error::Dimension { expected: n, got: start.n_qubits() });
    }
    let mut y = start.flat();
    let mut value = energy_flat(h, &y);
    let mut trace = vec![value];
    for _ in 0..MAX_SWEEPS {
        for a in 0..n {
            let f = effective_field(h, &y, a);
            let norm = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
            if norm > 1e-300 {
                for k in 0..3 {
                    y[3 * a + k] = f[k] / norm;
                }
            }
        }
        let next = energy_flat(h, &y);
        trace.push(next);
        let gain = next - value;
        value = next;
        if gain < crate::tol::ASCENT_GAIN {
            break;
        }
    }
    Ok(AscentRun { state: ProductState::from_flat(&y)?, value, trace })
}

fn random_unit_bloch(n: usize, r: &mut rng::StreamRng) -> ProductState {
    let bloch = (0..n)
        .map(|_| loop {
            let g = [standard_normal(r), standard_normal(r), standard_normal(r)];
            let s = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            if s > 1e-12 {
                break [g[0] / s, g[1] / s, g[2] / s];
            }
        })
        .collect();
    ProductState::new(bloch).expect("unit Bloch vectors")
}

/// Best of `restarts` ascents from uniformly random pure product states;
/// restart `k` uses stream `k + 1` of `seed`.
pub fn lambda_sep_ascent(h: &TwoLocalHamiltonian, restarts: usize, seed: u64) -> Result<(OracleReport, AscentRun)> {
    let n = h.n_qubits();
    if n > MAX_ASCENT_QUBITS {
        return Err(Error::TooLarge { what: "qubits for ascent", value: n, max: MAX_ASCENT_QUBITS });
    }
    if restarts == 0 {
        return Err(Error::validation("at least one restart is required"));
    }
    let start = Instant::now();
    let runs: Vec<AscentRun> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64 + 1);
            sep_ascent_from(h, &random_unit_bloch(n, &mut r))
        })
        .collect::<Result<_>>()?;
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("restarts > 0");
    let report = OracleReport::timed("lambda_sep", "coordinate_ascent", Certification::LowerBound, start, best.value);
    Ok((report, best))
}

/// Exact maximum over the `6^n` stabilizer product states.
pub fn lambda_sep_stabilizer(h: &TwoLocalHamiltonian) -> Result<OracleReport> {
    let start = Instant::now();
    let (_, value) = best_stabilizer(h)?;
    Ok(OracleReport::timed("lambda_sep_stabilizer", "stabilizer_enumeration", Certification::Exact, start, value))
}

/// Largest mode count for the fermionic ascents.
pub const MAX_ASCENT_MODES: usize = 10;

/// `G` with `E(X + εΔ) = E(X) + ε⟨G, Δ⟩ + O(ε²)` for antisymmetric `Δ`.
pub fn wick_gradient(h: &MajoranaHamiltonian, x: &RMat) -> RMat {
    let d = x.nrows();
    let mut g = -h.v().matrix().clone();
    let mut upper = |p: usize, q: usize, val: f64| {
        g[(p, q)] += 0.5 * val;
        g[(q, p)] -= 0.5 * val;
    };
    for (&[p, q, r, s], &w) in h.quartic() {
        upper(p, q, -w * x[(r, s)]);
        upper(r, s, -w * x[(p, q)]);
        upper(p, r, w * x[(q, s)]);
        upper(q, s, w * x[(p, r)]);
        upper(p, s, -w * x[(q, r)]);
        upper(q, r, -w * x[(p, s)]);
    }
    debug_assert_eq!(g.nrows(), d);
    g
}

/// Cayley transform `(I − A/2)^{-1} (I + A/2)` of an antisymmetric `A`.
fn cayley(a: &RMat) -> RMat {
    let d = a.nrows();
    let id = RMat::identity(d, d);
    let lhs = &id - a * 0.5;
    let rhs = &id + a * 0.5;
    lhs.lu().solve(&rhs).expect("I − A/2 is invertible for antisymmetric A")
}

fn number_conserving_projection(omega: &RMat) -> RMat {
    let d = omega.nrows();
    let mut j = RMat::zeros(d, d);
    for k in 0..d / 2 {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    (omega + &j * omega * j.transpose()) * 0.5
}

#[derive(Clone, Debug)]
pub struct FermionAscentRun {
    pub covariance: CovarianceMatrix,
    pub value: f64,
    pub accepted_steps: usize,
    pub trace: Vec<f64>,
}

/// Riemannian ascent of the Wick energy over pure covariances
/// `X → Q X Qᵀ`, `Q = cayley(t Ω)`, `Ω = [X, G]`, with backtracking on `t`.
/// With `number_conserving` the direction is restricted to rotations that
/// commute with the vacuum pairing, which keeps Slater determinants (and
/// their particle number) invariant.
pub fn fermion_ascent_from(
    h: &MajoranaHamiltonian,
    start: &CovarianceMatrix,
    number_conserving: bool,
    max_steps: usize,
) -> FermionAscentRun {
    let mut x = start.matrix().clone();
    let mut value = wick_energy_unchecked(h, &x);
    let mut trace = vec![value];
    let mut t = 1.0;
    let mut accepted = 0;
    for _ in 0..max_steps {
        let g = wick_gradient(h, &x);
        let mut omega = &x * &g - &g * &x;
        if number_conserving {
            omega = number_conserving_projection(&omega);
        }
        let slope = omega.norm_squared();
        if slope < 1e-24 {
            break;
        }
        let mut improved = false;
        while t > 1e-12 {
            let q = cayley(&(&omega * t));
            let cand = &q * &x * q.transpose();
            let cand = (&cand - cand.transpose()) * 0.5;
            let e = wick_energy_unchecked(h, &cand);
            if e > value + 1e-4 * t * slope {
                let gain = e - value;
                x = cand;
                value = e;
                trace.push(value);
                accepted += 1;
                improved = gain >= crate::tol::ASCENT_GAIN;
                t *= 2.0;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let covariance = CovarianceMatrix::from_matrix(x.clone())
        .unwrap_or_else(|_| CovarianceMatrix::from_matrix(&x / crate::linalg::operator_norm(&x)).expect("rescaled"));
    FermionAscentRun { covariance, value, accepted_steps: accepted, trace }
}

pub const MAX_ASCENT_STEPS: usize = 2000;

fn best_run(runs: Vec<FermionAscentRun>) -> Option<FermionAscentRun> {
    runs.into_iter().reduce(|a, b| if b.value > a.value { b } else { a })
}

/// Lower bound on the best pure Gaussian energy: ascents from `restarts`
/// Haar-random pure Gaussian states plus the given warm starts.
pub fn gaussian_ascent(
    h: &MajoranaHamiltonian,
    restarts: usize,
    seed: u64,
    warm: &[CovarianceMatrix],
) -> Result<(OracleReport, FermionAscentRun)> {
    let n = h.n_modes();
    if n > MAX_ASCENT_MODES {
        return Err(Error::TooLarge { what: "modes for ascent", value: n, max: MAX_ASCENT_MODES });
    }
    if restarts + warm.len() == 0 {
        return Err(Error::validation("at least one start is required"));
    }
    let start = Instant::now();
    let mut starts: Vec<CovarianceMatrix> = warm.to_vec();
    for k in 0..restarts {
        let mut r = rng::stream(seed, k as u64 + 1);
        starts.push(covariance_of(&random_pure_gaussian(n, &mut r)));
    }
    let runs: Vec<FermionAscentRun> =
        starts.par_iter().map(|s| fermion_ascent_from(h, s, false, MAX_ASCENT_STEPS)).collect();
    let best = best_run(runs).expect("non-empty starts");
    let report = OracleReport::timed("lambda_gauss", "riemannian_ascent", Certification::LowerBound, start, best.value);
    Ok((report, best))
}

/// Lower bound on the best Slater determinant energy: for every particle
/// number `k`, ascents from `restarts` Haar-random determinants.
pub fn slater_ascent(
    h: &MajoranaHamiltonian,
    restarts: usize,
    seed: u64,
) -> Result<(OracleReport, FermionAscentRun, usize)> {
    let n = h.n_modes();
    if n > MAX_ASCENT_MODES {
        return Err(Error::TooLarge { what: "modes for ascent", value: n, max: MAX_ASCENT_MODES });
    }
    if restarts == 0 {
        return Err(Error::validation("at least one restart is required"));
    }
    let start = Instant::now();
    let jobs: Vec<(usize, usize)> = (0..=n).flat_map(|k| (0..restarts).map(move |t| (k, t))).collect();
    let runs: Vec<(usize, FermionAscentRun)> = jobs
        .par_iter()
        .map(|&(k, t)| {
            let mut r = rng::stream(seed, (k * restarts + t) as u64 + 1);
            let s = random_slater(n, k, &mut r).covariance();
            (k, fermion_ascent_from(h, &s, true, MAX_ASCENT_STEPS))
        })
        .collect();
    let (k, best) = runs
        .into_iter()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("non-empty jobs");
    let report = OracleReport::timed("lambda_slater", "riemannian_ascent", Certification::LowerBound, start, best.value);
    Ok((report, best, k))
}

/// Largest eigenvalue of `h` restricted to `k` particles.
pub fn sector_lambda_max(h: &NumberConservingHamiltonian, k: usize) -> Result<OracleReport> {
    let n = h.n_modes();
    if k > n {
        return Err(Error::validation(format!("sector {k} exceeds {n} modes")));
    }
    let start = Instant::now();
    let dense = h.build_dense()?;
    let states: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() as usize == k).collect();
    let block = crate::linalg::CMat::from_fn(states.len(), states.len(), |i, j| dense.matrix()[(states[i], states[j])]);
    let value = top_eigenvalue(&DenseHermitian::new(block)?);
    Ok(OracleReport::timed(&format!("lambda_max_sector_{k}"), "dense_sector_eigh", Certification::Exact, start, value))
}

/// Dominant eigenvalue by power iteration on `H + s I` with `s` shifting
/// the spectrum to be nonnegative; used to cross-check dense results.
pub fn power_iteration_lambda_max(m: &DenseHermitian, iterations: usize, seed: u64) -> f64 {
    let dim = m.dim();
    let shift: f64 = (0..dim).map(|i| m.matrix().row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut r = rng::seeded(seed);
    let mut v = DVector::from_fn(dim, |_, _| num_complex::Complex64::new(standard_normal(&mut r), standard_normal(&mut r)));
    v /= num_complex::Complex64::new(v.norm(), 0.0);
    for _ in 0..iterations {
        let w = m.matrix() * &v + &v * num_complex::Complex64::new(shift, 0.0);
        let norm = w.norm();
        v = w / num_complex::Complex64::new(norm, 0.0);
    }
    m.expectation(&v)
}
