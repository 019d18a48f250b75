//! Quadratic optimization over covariance matrices (Qp-Oc) for quartic
//! fermionic Hamiltonians, its SDP relaxation, and rounding to Gaussian or
//! Slater states.
//!
//! For a purely quartic `h` the energy of a state with covariance `X` is
//! `F(X) = vec(X)ᵀ W vec(X)` with `W_{(pq),(rs)} = −3 W_pqrs`. The
//! relaxation replaces `vec(X) vec(X)ᵀ` by `ρ ⪰ 0` with both partial traces
//! dominated by the identity, and `ρ` supported on the subspace of allowed
//! covariances (all antisymmetric matrices for Gaussian states, the
//! number-conserving ones for Slater determinants). `ρ` is stored in the
//! coordinates of an orthonormal basis of that subspace.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{
    antisymmetric_basis, canonical_form, covariance_from_one_body, eliminate_linear_fermionic,
    one_body_from_covariance, quartic_energy, recover_gaussian, sample_pure, slater_subspace_basis,
    sparse_to_dense, subspace_residual, wick_energy_unchecked, CovarianceMatrix, GaussianStateSpec,
    MajoranaHamiltonian, SlaterSpec, SparseAntisymmetric,
};
use crate::linalg::{
    eigh, eigh_hermitian, gaussian_vector, operator_norm, psd_project, psd_sqrt, CMat, DenseHermitian, RMat,
    RealAntisymmetric, RealSymmetric,
};
use crate::majorana::{monomial_pauli, monomial_product_sign};
use crate::pauli::check_register;
use crate::rng::{self, StreamRng};
use crate::sdp::{solve, Dominance, SdpProblem, SdpSolution, SdpStatus, SolverOptions, Subspace, SymSparse};

/// Largest mode count for the relaxation (the full variable has side `4n²`).
pub const MAX_RELAXATION_MODES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Gaussian,
    Slater,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "slater" => Ok(Self::Slater),
            other => Err(Error::Parse(format!("unknown target `{other}` (expected gaussian or slater)"))),
        }
    }
}

/// Signed permutations of four positions.
fn permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().any(|&i| std::mem::replace(&mut seen[i], true)) {
                        continue;
                    }
                    let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                    out.push((p, if inversions % 2 == 0 { 1.0 } else { -1.0 }));
                }
            }
        }
    }
    out
}

/// `W` on `vec(X)` (index `p·d + q`) such that `vec(X)ᵀ W vec(X)` is the
/// quartic energy of `h`.
pub fn objective_form(h: &MajoranaHamiltonian) -> SymSparse {
    let d = 2 * h.n_modes();
    let perms = permutations4();
    let mut w = SymSparse::new();
    for (&k, &c) in h.quartic() {
        for (perm, sign) in &perms {
            let i = perm.map(|t| k[t]);
            let u = i[0] * d + i[1];
            let v = i[2] * d + i[3];
            // each unordered (u, v) pair is visited twice
            if u < v {
                w.add(u, v, -sign * c / 8.0);
            }
        }
    }
    w
}

/// Partial trace maps as dominance constraints on the full variable:
/// `(Tr₁ρ)_qs = Σ_p ρ_{(pq),(ps)}` and `(Tr₂ρ)_pr = Σ_q ρ_{(pq),(rq)}`.
pub fn partial_trace_dominance(d: usize, first: bool) -> Dominance {
    let mut map = Vec::with_capacity(d * (d + 1) / 2);
    for a in 0..d {
        for b in a..d {
            let mut g = SymSparse::new();
            for t in 0..d {
                let (u, v) = if first { (t * d + a, t * d + b) } else { (a * d + t, b * d + t) };
                g.add(u, v, if a == b { 1.0 } else { 0.5 });
            }
            map.push((a, b, g));
        }
    }
    Dominance { map, bound: RMat::identity(d, d) }
}

fn partial_trace(rho: &RMat, d: usize, first: bool) -> RMat {
    RMat::from_fn(d, d, |a, b| {
        (0..d)
            .map(|t| if first { rho[(t * d + a, t * d + b)] } else { rho[(a * d + t, b * d + t)] })
            .sum()
    })
}

#[derive(Clone, Debug)]
pub struct QpocProblem {
    h: MajoranaHamiltonian,
    target: Target,
    basis: Vec<SparseAntisymmetric>,
    subspace: Subspace,
    objective: SymSparse,
    w: RealSymmetric,
}

/// Build the Qp-Oc for a purely quartic `h`.
pub fn assemble(h: &MajoranaHamiltonian, target: Target) -> Result<QpocProblem> {
    if h.has_quadratic() {
        return Err(Error::validation(
            "Qp-Oc requires a purely quartic Hamiltonian; eliminate the quadratic part first",
        ));
    }
    let n = h.n_modes();
    if n > MAX_RELAXATION_MODES {
        return Err(Error::TooLarge { what: "relaxation modes", value: n, max: MAX_RELAXATION_MODES });
    }
    let d = 2 * n;
    let basis = match target {
        Target::Gaussian => antisymmetric_basis(n),
        Target::Slater => slater_subspace_basis(n),
    };
    let subspace = Subspace {
        ambient: d * d,
        columns: basis
            .iter()
            .map(|b| b.iter().flat_map(|&(p, q, v)| [(p * d + q, v), (q * d + p, -v)]).collect())
            .collect(),
    };
    let objective = objective_form(h);
    let w = RealSymmetric::symmetrized(&subspace.compress(&objective).to_dense(subspace.dim()));
    Ok(QpocProblem { h: h.clone(), target, basis, subspace, objective, w })
}

impl QpocProblem {
    pub fn n_modes(&self) -> usize {
        self.h.n_modes()
    }

    pub fn side(&self) -> usize {
        2 * self.h.n_modes()
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn hamiltonian(&self) -> &MajoranaHamiltonian {
        &self.h
    }

    pub fn basis(&self) -> &[SparseAntisymmetric] {
        &self.basis
    }

    pub fn subspace_dim(&self) -> usize {
        self.basis.len()
    }

    /// `W` in subspace coordinates.
    pub fn compressed_form(&self) -> &RealSymmetric {
        &self.w
    }

    /// Coordinates `ξ_k = ⟨B_k, X⟩` of `x` in the subspace basis.
    pub fn coordinates(&self, x: &RMat) -> DVector<f64> {
        let d = self.side();
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| sparse_to_dense(b, d).dot(x)))
    }

    pub fn from_coordinates(&self, xi: &DVector<f64>) -> RMat {
        let d = self.side();
        let mut x = RMat::zeros(d, d);
        for (b, &c) in self.basis.iter().zip(xi.iter()) {
            for &(p, q, v) in b {
                x[(p, q)] += c * v;
                x[(q, p)] -= c * v;
            }
        }
        x
    }

    /// `F(X)`, the quartic energy.
    pub fn value(&self, x: &RMat) -> f64 {
        quartic_energy(&self.h, x)
    }

    pub fn value_compressed(&self, xi: &DVector<f64>) -> f64 {
        xi.dot(&(self.w.matrix() * xi))
    }

    pub fn sdp(&self) -> SdpProblem {
        let d = self.side();
        let mut p = SdpProblem::new(d * d, self.objective.clone());
        // on antisymmetric subspaces Tr₁ρ = Tr₂ρ, one constraint suffices
        p.dominance.push(partial_trace_dominance(d, true));
        p.subspace = Some(self.subspace.clone());
        p
    }

    pub fn expand(&self, rho: &RMat) -> RMat {
        self.subspace.expand(rho)
    }
}

#[derive(Clone, Debug)]
pub struct QpocSolution {
    /// `ρ` in subspace coordinates (PSD part of the solver output).
    pub rho: RealSymmetric,
    pub theta_star: f64,
    /// Dual bound valid for every feasible `ρ`; always `≥ θ*`.
    pub theta_upper_bound: f64,
    pub tr1_violation: f64,
    pub tr2_violation: f64,
    pub solver: SdpSolution,
}

pub fn solve_relaxation(p: &QpocProblem, opts: &SolverOptions) -> Result<QpocSolution> {
    let problem = p.sdp();
    let sol = solve(&problem, opts)?;
    if sol.status == SdpStatus::Diverged {
        return Err(Error::validation("Qp-Oc relaxation diverged"));
    }
    let rho = psd_project(&sol.x);
    let theta_star = p.w.matrix().dot(rho.matrix());
    let d = p.side();
    let full = p.expand(rho.matrix());
    let violation = |m: RMat| (eigh(&RealSymmetric::symmetrized(&m)).max_value() - 1.0).max(0.0);
    let tr1_violation = violation(partial_trace(&full, d, true));
    let tr2_violation = violation(partial_trace(&full, d, false));

    // For any PSD Y: ⟨W, ρ⟩ ≤ Tr Y + Tr(ρ) λ_max⁺(W − T*Y) with Tr ρ ≤ d.
    let dom = &problem.compressed().dominance[0];
    let mut y = RMat::zeros(d, d);
    for ((a, b, _), &yk) in dom.map.iter().zip(&sol.dual) {
        if a == b {
            y[(*a, *a)] = yk;
        } else {
            y[(*a, *b)] = 0.5 * yk;
            y[(*b, *a)] = 0.5 * yk;
        }
    }
    let y = psd_project(&RealSymmetric::symmetrized(&y));
    let mut residual = p.w.matrix().clone();
    for (a, b, g) in &dom.map {
        let coef = if a == b { y.matrix()[(*a, *a)] } else { 2.0 * y.matrix()[(*a, *b)] };
        if coef != 0.0 {
            residual -= g.to_dense(p.subspace_dim()) * coef;
        }
    }
    let lam = eigh(&RealSymmetric::symmetrized(&residual)).max_value().max(0.0);
    let theta_upper_bound = y.matrix().trace() + d as f64 * lam;

    Ok(QpocSolution { rho, theta_star, theta_upper_bound, tr1_violation, tr2_violation, solver: sol })
}

#[derive(Clone, Debug)]
pub struct RoundedCovariance {
    pub x: CovarianceMatrix,
    pub value: f64,
    pub samples: usize,
    /// Mean of `F` over all samples.
    pub mean_value: f64,
}

/// Sample `|X⟩ = ρ^{1/2} g`, rescale to `‖X‖ <= 1` and keep the best `F`.
/// Sample `k` uses stream `k + 1` of `seed`.
pub fn round(rho: &RealSymmetric, p: &QpocProblem, samples: usize, seed: u64) -> Result<RoundedCovariance> {
    if samples == 0 {
        return Err(Error::validation("at least one rounding sample is required"));
    }
    if rho.dim() != p.subspace_dim() {
        return Err(Error::Dimension { expected: p.subspace_dim(), got: rho.dim() });
    }
    let root = psd_sqrt(rho)?;
    let draws: Vec<(RMat, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64 + 1);
            let g = gaussian_vector(rho.dim(), &mut r);
            let x = p.from_coordinates(&(root.matrix() * g));
            let norm = operator_norm(&x).max(1.0);
            let x = x / norm;
            let f = p.value(&x);
            (x, f)
        })
        .collect();
    let mean_value = draws.iter().map(|(_, f)| f).sum::<f64>() / samples as f64;
    let (x, value) = draws
        .into_iter()
        .fold(None, |best: Option<(RMat, f64)>, (x, f)| match best {
            Some((bx, bf)) if bf >= f => Some((bx, bf)),
            _ => Some((x, f)),
        })
        .expect("samples > 0");
    Ok(RoundedCovariance {
        x: CovarianceMatrix::new(RealAntisymmetric::antisymmetrized(&x))?,
        value,
        samples,
        mean_value,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractedState {
    Gaussian(GaussianStateSpec),
    Slater(SlaterSpec),
}

impl ExtractedState {
    pub fn covariance(&self) -> CovarianceMatrix {
        match self {
            Self::Gaussian(g) => crate::fermion::covariance_of(g),
            Self::Slater(s) => s.covariance(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub state: ExtractedState,
    pub energy: f64,
    /// Energy of the mixed state with covariance `X`.
    pub mixed_energy: f64,
    pub mean_energy: f64,
    pub samples: usize,
}

/// Sample pure states from the mixture described by `x` and keep the one
/// with the largest energy on `h`.
pub fn extract_state(
    x: &CovarianceMatrix,
    h: &MajoranaHamiltonian,
    target: Target,
    samples: usize,
    seed: u64,
) -> Result<Extraction> {
    if samples == 0 {
        return Err(Error::validation("at least one extraction sample is required"));
    }
    if x.n_modes() != h.n_modes() {
        return Err(Error::Dimension { expected: 2 * h.n_modes(), got: 2 * x.n_modes() });
    }
    let mixed_energy = wick_energy_unchecked(h, x.matrix());
    let draws: Vec<(ExtractedState, f64)> = match target {
        Target::Gaussian => {
            let spec = canonical_form(x)?;
            (0..samples)
                .into_par_iter()
                .map(|k| {
                    let mut r = rng::stream(seed, k as u64 + 1);
                    let s = sample_pure(&spec, &mut r);
                    let e = wick_energy_unchecked(h, crate::fermion::covariance_of(&s).matrix());
                    (ExtractedState::Gaussian(s), e)
                })
                .collect()
        }
        Target::Slater => {
            let basis = slater_subspace_basis(h.n_modes());
            let res = subspace_residual(x.matrix(), &basis);
            if res > 1e-9 * x.matrix().norm().max(1.0) {
                return Err(Error::validation(format!(
                    "covariance is not number conserving (residual {res:.3e})"
                )));
            }
            let q = one_body_from_covariance(x.matrix());
            let q = DenseHermitian::new((&q + q.adjoint()).map(|z| z * 0.5))?;
            let e = eigh_hermitian(&q);
            let n = h.n_modes();
            (0..samples)
                .into_par_iter()
                .map(|k| -> Result<(ExtractedState, f64)> {
                    let mut r = rng::stream(seed, k as u64 + 1);
                    let mut occupied = Vec::new();
                    let mut empty = Vec::new();
                    for (m, &mu) in e.values.iter().enumerate() {
                        if r.random::<f64>() < mu {
                            occupied.push(m);
                        } else {
                            empty.push(m);
                        }
                    }
                    let order: Vec<usize> = occupied.iter().chain(&empty).copied().collect();
                    let u = CMat::from_fn(n, n, |p, q| e.vectors[(q, order[p])]);
                    let s = SlaterSpec::new(occupied.len(), u)?;
                    let en = wick_energy_unchecked(h, s.covariance().matrix());
                    Ok((ExtractedState::Slater(s), en))
                })
                .collect::<Result<_>>()?
        }
    };
    let mean_energy = draws.iter().map(|(_, e)| e).sum::<f64>() / samples as f64;
    let (state, energy) = draws
        .into_iter()
        .fold(None, |best: Option<(ExtractedState, f64)>, (s, e)| match best {
            Some((bs, be)) if be >= e => Some((bs, be)),
            _ => Some((s, e)),
        })
        .expect("samples > 0");
    Ok(Extraction { state, energy, mixed_energy, mean_energy, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionConfig {
    pub rounding_samples: usize,
    pub extraction_samples: usize,
    pub seed: u64,
}

impl Default for FermionConfig {
    fn default() -> Self {
        Self { rounding_samples: 256, extraction_samples: 256, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FermionReport {
    pub target: Target,
    pub n_modes: usize,
    pub shift: f64,
    pub quadratic_eliminated: bool,
    pub relaxation_modes: usize,
    pub theta_star: f64,
    pub theta_upper_bound: f64,
    /// `shift + (2n/3)·θ_ub` over the relaxation modes; bounds `λ_max(h)`
    /// for the Gaussian target only.
    pub lambda_max_upper_bound: Option<f64>,
    pub rounded_f: f64,
    pub rounded_mean_f: f64,
    /// Energy on `h` of the (recovered) rounded covariance.
    pub rounded_energy: f64,
    pub extracted_energy: f64,
    pub extracted_mean_energy: f64,
    pub extracted_state: ExtractedState,
    pub rounding_samples: usize,
    pub extraction_samples: usize,
    pub seed: u64,
    pub sdp_status: SdpStatus,
    pub sdp_iterations: usize,
    pub sdp_primal_residual: f64,
    pub sdp_dual_residual: f64,
    pub tr1_violation: f64,
    pub tr2_violation: f64,
    pub lambda_max: Option<f64>,
    pub ratio_extracted_lambda_max: Option<f64>,
    pub ratio_rounded_theta: f64,
}

impl FermionReport {
    /// Record `λ_max(h)`; ratios use the traceless convention.
    pub fn attach_lambda_max(&mut self, lambda_max: f64) {
        self.lambda_max = Some(lambda_max);
        self.ratio_extracted_lambda_max =
            Some(crate::rounding::ratio(self.extracted_energy - self.shift, lambda_max - self.shift));
    }
}

/// Full pipeline: drop the shift, eliminate the quadratic part, solve the
/// relaxation, round, recover and extract a pure state.
pub fn approximate_fermion(
    h: &MajoranaHamiltonian,
    target: Target,
    cfg: &FermionConfig,
    opts: &SolverOptions,
) -> Result<FermionReport> {
    let traceless = h.traceless();
    let eliminated = traceless.has_quadratic();
    let work = if eliminated { eliminate_linear_fermionic(&traceless)? } else { traceless.clone() };
    let problem = assemble(&work, target)?;
    let relaxed = solve_relaxation(&problem, opts)?;
    let rounded = round(&relaxed.rho, &problem, cfg.rounding_samples, cfg.seed)?;
    let x = if eliminated { recover_gaussian(&rounded.x, &traceless)?.covariance } else { rounded.x.clone() };
    let rounded_energy = wick_energy_unchecked(h, x.matrix());
    let extraction = extract_state(&x, h, target, cfg.extraction_samples, cfg.seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let n_rel = work.n_modes() as f64;
    Ok(FermionReport {
        target,
        n_modes: h.n_modes(),
        shift: h.shift(),
        quadratic_eliminated: eliminated,
        relaxation_modes: work.n_modes(),
        theta_star: relaxed.theta_star,
        theta_upper_bound: relaxed.theta_upper_bound,
        lambda_max_upper_bound: match target {
            Target::Gaussian => Some(h.shift() + 2.0 * n_rel / 3.0 * relaxed.theta_upper_bound),
            Target::Slater => None,
        },
        rounded_f: rounded.value,
        rounded_mean_f: rounded.mean_value,
        rounded_energy,
        extracted_energy: extraction.energy,
        extracted_mean_energy: extraction.mean_energy,
        extracted_state: extraction.state,
        rounding_samples: cfg.rounding_samples,
        extraction_samples: cfg.extraction_samples,
        seed: cfg.seed,
        sdp_status: relaxed.solver.status,
        sdp_iterations: relaxed.solver.iterations,
        sdp_primal_residual: relaxed.solver.primal_residual,
        sdp_dual_residual: relaxed.solver.dual_residual,
        tr1_violation: relaxed.tr1_violation,
        tr2_violation: relaxed.tr2_violation,
        lambda_max: None,
        ratio_extracted_lambda_max: None,
        ratio_rounded_theta: crate::rounding::ratio(rounded.value, relaxed.theta_star),
    })
}

/// The feasible point of the relaxation built from an eigenvector `ψ` of
/// a quartic `h`: `ρ_{(pq),(rs)} = −(1/2n) ε_pq ε_rs Re⟨ψ|c_p c_q c_r c_s|ψ⟩`
/// with `ε_pq = [p ≠ q]`.
#[derive(Clone, Debug)]
pub struct FeasiblePoint {
    pub rho: RMat,
    pub compressed: RealSymmetric,
    /// Distance from `ρ` to the antisymmetric subspace.
    pub support_residual: f64,
    pub tr1: RMat,
    pub tr2: RMat,
    pub min_eigenvalue: f64,
    /// `Tr(ρ W)` with `W_{(pq),(rs)} = −W_pqrs`.
    pub objective: f64,
    pub energy: f64,
}

/// Largest mode count for [`feasible_from_eigenvector`].
pub const MAX_FEASIBLE_MODES: usize = 6;

pub fn feasible_from_eigenvector(h: &MajoranaHamiltonian, psi: &DVector<Complex64>) -> Result<FeasiblePoint> {
    if h.has_quadratic() {
        return Err(Error::validation("feasible point requires a purely quartic Hamiltonian"));
    }
    let n = h.n_modes();
    if n > MAX_FEASIBLE_MODES {
        return Err(Error::TooLarge { what: "modes for feasible point", value: n, max: MAX_FEASIBLE_MODES });
    }
    check_register(n)?;
    if psi.len() != 1 << n {
        return Err(Error::Dimension { expected: 1 << n, got: psi.len() });
    }
    let psi = psi / Complex64::new(psi.norm(), 0.0);
    let d = 2 * n;

    // ⟨c_p c_q c_r c_s⟩ only depends on the product monomial and its sign
    let mut expect = std::collections::HashMap::new();
    let mut moment = |mask: u64| -> Result<Complex64> {
        if let Some(&v) = expect.get(&mask) {
            return Ok(v);
        }
        let v = monomial_pauli(mask, n)?.expectation(&psi);
        expect.insert(mask, v);
        Ok(v)
    };
    let mut rho = RMat::zeros(d * d, d * d);
    for p in 0..d {
        for q in 0..d {
            if p == q {
                continue;
            }
            for r in 0..d {
                for s in 0..d {
                    if r == s {
                        continue;
                    }
                    let mut mask = 0u64;
                    let mut sign = 1.0;
                    for i in [p, q, r, s] {
                        sign *= monomial_product_sign(mask, 1u64 << i);
                        mask ^= 1u64 << i;
                    }
                    let v = moment(mask)? * sign;
                    rho[(p * d + q, r * d + s)] = -v.re / d as f64;
                }
            }
        }
    }
    let rho = RealSymmetric::symmetrized(&rho).into_inner();
    let basis = antisymmetric_basis(n);
    let problem_basis = Subspace {
        ambient: d * d,
        columns: basis
            .iter()
            .map(|b| b.iter().flat_map(|&(p, q, v)| [(p * d + q, v), (q * d + p, -v)]).collect())
            .collect(),
    };
    let bm = problem_basis.to_dense();
    let compressed = RealSymmetric::symmetrized(&(bm.transpose() * &rho * &bm));
    let support_residual = (problem_basis.expand(compressed.matrix()) - &rho).norm();
    let tr1 = partial_trace(&rho, d, true);
    let tr2 = partial_trace(&rho, d, false);
    let min_eigenvalue = eigh(&RealSymmetric::symmetrized(&rho)).min_value();
    let w = objective_form(h).to_dense(d * d) / 3.0;
    let objective = w.dot(&rho);
    let dense = h.build_dense()?;
    let energy = dense.expectation(&psi);
    Ok(FeasiblePoint { rho, compressed, support_residual, tr1, tr2, min_eigenvalue, objective, energy })
}

/// One-body matrix of a number-conserving covariance, re-exported for
/// callers that hold a rounded Slater covariance.
pub fn slater_one_body(x: &CovarianceMatrix) -> CMat {
    one_body_from_covariance(x.matrix())
}

/// Covariance of a one-body matrix `Q` with `0 ⪯ Q ⪯ I`.
pub fn covariance_from_slater_one_body(q: &CMat) -> Result<CovarianceMatrix> {
    CovarianceMatrix::from_matrix(covariance_from_one_body(q))
}

/// Random covariance in the subspace of `p` with `‖X‖ <= 1`.
pub fn random_feasible(p: &QpocProblem, rng: &mut StreamRng) -> RMat {
    let xi = gaussian_vector(p.subspace_dim(), rng);
    let x = p.from_coordinates(&xi);
    let scale = rng.random::<f64>() / operator_norm(&x).max(1e-300);
    x * scale
}
