//! Rounding moment-SDP solutions to product states.
//!
//! The main pipeline ([`approximate_max`]) samples a Gaussian hyperplane
//! direction, projects the Gram vectors of the moment matrix onto it,
//! truncates to a valid product state and then measures every qubit in a
//! random Pauli basis to obtain a stabilizer product state.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh_hermitian, gaussian_vector, RMat};
use crate::qubit::{
    build_dense, eliminate_linear, energy_product, recover_stabilizer_state, Axis, PauliIndex,
    ProductState, StabilizerProductState, TwoLocalHamiltonian,
};
use crate::rng::{self, StreamRng};
use crate::sdp::{gram_factor, solve_moment_sdp, SdpStatus, SolverOptions};

/// Largest register for exhaustive stabilizer search (6^n states).
pub const MAX_EXHAUSTIVE_QUBITS: usize = 6;

/// Largest register for the sampled certificate (dense eigenvector).
pub const MAX_SAMPLED_QUBITS: usize = 12;

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingConfig {
    /// `T = max(1, c·sqrt(ln n))`.
    pub c: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self { c: 2.0, trials: 64, seed: 0 }
    }
}

impl RoundingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::validation("truncation constant c must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::validation("at least one rounding trial is required"));
        }
        Ok(())
    }

    pub fn truncation_scale(&self, n: usize) -> f64 {
        (self.c * (n.max(1) as f64).ln().sqrt()).max(1.0)
    }
}

/// `z` if `|z| <= 1/√3`, otherwise `sgn(z)/√3`.
pub fn truncate(z: f64) -> f64 {
    if z.abs() > INV_SQRT3 {
        z.signum() * INV_SQRT3
    } else {
        z
    }
}

/// Hyperplane rounding: `z_i = ⟨r, v^i⟩ / T`, truncated coordinate-wise.
/// `vectors` holds one `v^i` per row (3n rows).
pub fn charikar_wirth_round(vectors: &RMat, t: f64, rng: &mut StreamRng) -> Result<ProductState> {
    if !vectors.nrows().is_multiple_of(3) {
        return Err(Error::validation("expected 3n Gram vectors"));
    }
    let z = projections(vectors, t, rng);
    let y: Vec<f64> = z.iter().map(|&v| truncate(v)).collect();
    ProductState::from_flat(&y)
}

/// Untruncated `z = V r / T`.
pub fn projections(vectors: &RMat, t: f64, rng: &mut StreamRng) -> Vec<f64> {
    let r = gaussian_vector(vectors.ncols(), rng);
    (vectors * r).iter().map(|v| v / t).collect()
}

/// Measure each qubit of `s` in a uniformly random Pauli basis; outcome `+`
/// with probability `(1 + y_axis)/2`.
pub fn depolarize_measure(s: &ProductState, rng: &mut StreamRng) -> StabilizerProductState {
    let factors = s
        .bloch()
        .iter()
        .map(|y| {
            let axis = Axis::from_index(rng.random_range(0..3));
            let p_plus = 0.5 * (1.0 + y[axis.index()]);
            let sign = if rng.random::<f64>() < p_plus { 1 } else { -1 };
            (axis, sign)
        })
        .collect();
    StabilizerProductState { factors }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundingReport {
    pub best_state: StabilizerProductState,
    pub best_energy: f64,
    pub trials: Vec<TrialRecord>,
    /// Relaxation value of the solved moment SDP (polished primal).
    pub sdp_objective: f64,
    /// Dual certificate; an upper bound on `λ_max` regardless of convergence.
    pub sdp_upper_bound: f64,
    pub sdp_status: SdpStatus,
    pub sdp_iterations: usize,
    pub sdp_primal_residual: f64,
    pub truncation_scale: f64,
    pub linear_eliminated: bool,
    pub ratio_best_sdp: f64,
    pub ratio_best_lambda_max: Option<f64>,
    pub lambda_max: Option<f64>,
}

impl RoundingReport {
    pub fn attach_lambda_max(&mut self, lambda_max: f64) {
        self.lambda_max = Some(lambda_max);
        self.ratio_best_lambda_max = Some(ratio(self.best_energy, lambda_max));
    }
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den.abs() < 1e-300 {
        if num.abs() < 1e-300 {
            1.0
        } else {
            f64::NAN
        }
    } else {
        num / den
    }
}

/// Full pipeline: eliminate linear terms if present, solve the moment SDP,
/// run `cfg.trials` independent rounding trials (trial `k` uses stream
/// `k + 1` of `cfg.seed`) and keep the best stabilizer product state.
pub fn approximate_max(
    h: &TwoLocalHamiltonian,
    cfg: &RoundingConfig,
    opts: &SolverOptions,
) -> Result<RoundingReport> {
    cfg.validate()?;
    h.validate()?;
    if h.n_qubits() == 0 {
        return Err(Error::validation("Hamiltonian has no qubits"));
    }
    let eliminated = h.has_linear();
    let work = if eliminated { eliminate_linear(h) } else { h.clone() };
    let moment = solve_moment_sdp(&work, opts)?;
    let vectors = gram_factor(&moment.m, 1e-10)?;
    let t = cfg.truncation_scale(work.n_qubits());

    let results: Vec<(StabilizerProductState, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| -> Result<(StabilizerProductState, f64)> {
            let mut r = rng::stream(cfg.seed, k as u64 + 1);
            let rho = charikar_wirth_round(&vectors, t, &mut r)?;
            let phi = depolarize_measure(&rho, &mut r);
            let phi = if eliminated { recover_stabilizer_state(&phi, h)? } else { phi };
            let e = energy_product(h, &phi.to_product())?;
            Ok((phi, e))
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (k, (_, e)) in results.iter().enumerate() {
        if *e > results[best].1 {
            best = k;
        }
    }
    let best_energy = results[best].1;
    Ok(RoundingReport {
        best_state: results[best].0.clone(),
        best_energy,
        trials: results.iter().enumerate().map(|(k, (_, e))| TrialRecord { trial: k, energy: *e }).collect(),
        sdp_objective: moment.objective,
        sdp_upper_bound: moment.upper_bound,
        sdp_status: moment.solver.status,
        sdp_iterations: moment.solver.iterations,
        sdp_primal_residual: moment.solver.primal_residual,
        truncation_scale: t,
        linear_eliminated: eliminated,
        ratio_best_sdp: ratio(best_energy, moment.objective),
        ratio_best_lambda_max: None,
        lambda_max: None,
    })
}

/// Statevector of a stabilizer product state.
pub fn stabilizer_statevector(s: &StabilizerProductState) -> Result<DVector<Complex64>> {
    s.to_product().statevector()
}

/// Exact mean energy of the state obtained by measuring every qubit of
/// `psi` in a uniformly random Pauli basis: the average over all `6^n`
/// stabilizer products `φ` of `|⟨φ|ψ⟩|² · ⟨φ|H|φ⟩ / 3^n`.
pub fn depolarized_mean_energy(h: &TwoLocalHamiltonian, psi: &DVector<Complex64>) -> Result<f64> {
    let n = h.n_qubits();
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::TooLarge { what: "qubits for exhaustive search", value: n, max: MAX_EXHAUSTIVE_QUBITS });
    }
    if psi.len() != 1 << n {
        return Err(Error::Dimension { expected: 1 << n, got: psi.len() });
    }
    let total = 6u64.pow(n as u32);
    let mut mean = 0.0;
    for k in 0..total {
        let s = StabilizerProductState::enumerate(n, k);
        let phi = stabilizer_statevector(&s)?;
        let p = phi.dotc(psi).norm_sqr();
        mean += p * energy_product(h, &s.to_product())?;
    }
    Ok(mean / 3f64.powi(n as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiebMode {
    /// Best of all `6^n` stabilizer products.
    Exhaustive,
    /// Best of `trials` random-basis measurements of the top eigenvector.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiebCertificate {
    pub state: StabilizerProductState,
    pub energy: f64,
    pub lambda_max: f64,
    /// `energy >= λ_max / 9 − 1e-9`.
    pub certified: bool,
}

/// Stabilizer product state with energy at least `λ_max / 9` for a
/// Hamiltonian without linear terms.
pub fn lieb_certificate(h: &TwoLocalHamiltonian, mode: LiebMode) -> Result<LiebCertificate> {
    if h.has_linear() {
        return Err(Error::validation("certificate requires a Hamiltonian without linear terms"));
    }
    let n = h.n_qubits();
    let (state, energy, lambda_max) = match mode {
        LiebMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_QUBITS {
                return Err(Error::TooLarge { what: "qubits for exhaustive search", value: n, max: MAX_EXHAUSTIVE_QUBITS });
            }
            let (state, energy) = best_stabilizer(h)?;
            let lam = eigh_hermitian(&build_dense(h)?).max_value();
            (state, energy, lam)
        }
        LiebMode::Sampled { trials, seed } => {
            if n > MAX_SAMPLED_QUBITS {
                return Err(Error::TooLarge { what: "qubits for sampled certificate", value: n, max: MAX_SAMPLED_QUBITS });
            }
            if trials == 0 {
                return Err(Error::validation("at least one sample is required"));
            }
            let e = eigh_hermitian(&build_dense(h)?);
            let psi = e.top_vector();
            let mut r = rng::seeded(seed);
            let mut best: Option<(StabilizerProductState, f64)> = None;
            for _ in 0..trials {
                let s = measure_random_bases(&psi, n, &mut r)?;
                let en = energy_product(h, &s.to_product())?;
                if best.as_ref().is_none_or(|(_, b)| en > *b) {
                    best = Some((s, en));
                }
            }
            let (s, en) = best.expect("trials > 0");
            (s, en, e.max_value())
        }
    };
    Ok(LiebCertificate { certified: energy >= lambda_max / 9.0 - 1e-9, state, energy, lambda_max })
}

/// Best of all `6^n` stabilizer product states.
pub fn best_stabilizer(h: &TwoLocalHamiltonian) -> Result<(StabilizerProductState, f64)> {
    let n = h.n_qubits();
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::TooLarge { what: "qubits for exhaustive search", value: n, max: MAX_EXHAUSTIVE_QUBITS });
    }
    let total = 6u64.pow(n as u32);
    let mut best = (StabilizerProductState::enumerate(n, 0), f64::NEG_INFINITY);
    for k in 0..total {
        let s = StabilizerProductState::enumerate(n, k);
        let e = energy_product(h, &s.to_product())?;
        if e > best.1 {
            best = (s, e);
        }
    }
    Ok(best)
}

/// Measure every qubit of the pure state `psi` in an independently and
/// uniformly chosen Pauli basis.
fn measure_random_bases(
    psi: &DVector<Complex64>,
    n: usize,
    rng: &mut StreamRng,
) -> Result<StabilizerProductState> {
    let axes: Vec<Axis> = (0..n).map(|_| Axis::from_index(rng.random_range(0..3))).collect();
    let dim = 1usize << n;
    let mut probs = Vec::with_capacity(dim);
    let mut states = Vec::with_capacity(dim);
    for outcome in 0..dim {
        let s = StabilizerProductState {
            factors: axes
                .iter()
                .enumerate()
                .map(|(a, &ax)| (ax, if (outcome >> a) & 1 == 0 { 1 } else { -1 }))
                .collect(),
        };
        let phi = stabilizer_statevector(&s)?;
        probs.push(phi.dotc(psi).norm_sqr());
        states.push(s);
    }
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (p, s) in probs.iter().zip(&states) {
        if u < *p {
            return Ok(s.clone());
        }
        u -= p;
    }
    Ok(states.pop().expect("non-empty outcome set"))
}

/// One draw of the matching construction: a uniformly random perfect
/// matching of the qubits (an idle qubit is appended when `n` is odd) and,
/// per matched pair, a uniformly random pair of axes `(k, l)`; the two
/// qubits are put in eigenstates of those axes with a uniformly random sign
/// on the first and the sign of the coupling applied to the second.
pub fn matching_sample(h: &TwoLocalHamiltonian, rng: &mut StreamRng) -> Result<StabilizerProductState> {
    if h.has_linear() {
        return Err(Error::validation("matching construction requires a Hamiltonian without linear terms"));
    }
    let n = h.n_qubits();
    let padded = n + n % 2;
    let mut order: Vec<usize> = (0..padded).collect();
    order.shuffle(rng);
    let mut factors = vec![(Axis::Z, 1i8); padded];
    for pair in order.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let k = Axis::from_index(rng.random_range(0..3));
        let l = Axis::from_index(rng.random_range(0..3));
        let c = if a < n && b < n {
            h.coupling(PauliIndex::new(a, k).0, PauliIndex::new(b, l).0)
        } else {
            0.0
        };
        let first: i8 = if rng.random::<bool>() { 1 } else { -1 };
        let second = if c < 0.0 { -first } else { first };
        factors[a] = (k, first);
        factors[b] = (l, second);
    }
    factors.truncate(n);
    Ok(StabilizerProductState { factors })
}

/// `Σ_{i,j} |C_ij| / (9(n − 1))` with `n` rounded up to even.
pub fn matching_expected_energy(h: &TwoLocalHamiltonian) -> f64 {
    let n = h.n_qubits() + h.n_qubits() % 2;
    if n < 2 {
        return 0.0;
    }
    h.coupling_one_norm() / (9.0 * (n as f64 - 1.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchingReport {
    pub best_state: StabilizerProductState,
    pub best_energy: f64,
    pub mean_energy: f64,
    /// Standard error of `mean_energy`.
    pub mean_standard_error: f64,
    pub expected_energy: f64,
    pub trials: usize,
}

/// Best of `trials` draws of [`matching_sample`].
pub fn matching_round(h: &TwoLocalHamiltonian, trials: usize, rng: &mut StreamRng) -> Result<MatchingReport> {
    if trials == 0 {
        return Err(Error::validation("at least one trial is required"));
    }
    let mut best: Option<(StabilizerProductState, f64)> = None;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let s = matching_sample(h, rng)?;
        let e = energy_product(h, &s.to_product())?;
        sum += e;
        sum_sq += e * e;
        if best.as_ref().is_none_or(|(_, b)| e > *b) {
            best = Some((s, e));
        }
    }
    let (best_state, best_energy) = best.expect("trials > 0");
    let mean = sum / trials as f64;
    let variance = if trials > 1 { (sum_sq - trials as f64 * mean * mean).max(0.0) / (trials - 1) as f64 } else { 0.0 };
    Ok(MatchingReport {
        best_state,
        best_energy,
        mean_energy: mean,
        mean_standard_error: (variance / trials as f64).sqrt(),
        expected_energy: matching_expected_energy(h),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{diagonal_from_quadratic, random_quadratic_instance};

    fn zz() -> TwoLocalHamiltonian {
        TwoLocalHamiltonian::from_triplets(2, &[(2, 5, 0.5)], &[]).unwrap()
    }

    #[test]
    fn truncation_rule() {
        assert!((truncate(0.9) - INV_SQRT3).abs() < 1e-15);
        assert!((truncate(-0.9) + INV_SQRT3).abs() < 1e-15);
        assert_eq!(truncate(0.3), 0.3);
        assert!((INV_SQRT3 - 1.0 / 3f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn truncation_scale_floor() {
        let cfg = RoundingConfig::default();
        assert_eq!(cfg.truncation_scale(1), 1.0);
        assert!(cfg.truncation_scale(2) >= 1.0);
        assert!((cfg.truncation_scale(100) - 2.0 * 100f64.ln().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_vectors_give_zero_state() {
        // vectors supported on a coordinate the sample never touches
        let v = RMat::zeros(6, 2);
        let s = charikar_wirth_round(&v, 1.0, &mut rng::seeded(1)).unwrap();
        assert!(s.flat().iter().all(|&y| y == 0.0));
        assert_eq!(energy_product(&zz(), &s).unwrap(), 0.0);
    }

    #[test]
    fn rounded_components_bounded() {
        let mut r = rng::seeded(2);
        let v = RMat::from_fn(12, 12, |_, _| rng::standard_normal(&mut r));
        for _ in 0..100 {
            let s = charikar_wirth_round(&v, 0.3, &mut r).unwrap();
            for y in s.bloch() {
                assert!(y.iter().all(|c| c.abs() <= INV_SQRT3 + 1e-15));
                assert!((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn depolarize_deterministic_and_uniform() {
        let s = ProductState::new(vec![[1.0, 0.0, 0.0]]).unwrap();
        let mut r = rng::seeded(3);
        for _ in 0..200 {
            let m = depolarize_measure(&s, &mut r);
            if m.factors[0].0 == Axis::X {
                assert_eq!(m.factors[0].1, 1);
            }
        }
        let mixed = ProductState::maximally_mixed(1);
        let mut counts = [0usize; 6];
        let draws = 60_000;
        for _ in 0..draws {
            let (a, s) = depolarize_measure(&mixed, &mut r).factors[0];
            counts[2 * a.index() + usize::from(s < 0)] += 1;
        }
        let p = 1.0 / 6.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * p).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn approximate_max_trivial_and_zz() {
        let zero = TwoLocalHamiltonian::zero(2);
        let rep = approximate_max(&zero, &RoundingConfig::default(), &SolverOptions::default()).unwrap();
        assert_eq!(rep.best_energy, 0.0);

        let rep = approximate_max(&zz(), &RoundingConfig { seed: 7, ..Default::default() }, &SolverOptions::default()).unwrap();
        assert!((rep.best_energy - 1.0).abs() < 1e-12);
        assert_eq!(rep.best_energy, rep.trials.iter().map(|t| t.energy).fold(f64::MIN, f64::max));
    }

    #[test]
    fn approximate_max_with_linear_terms() {
        let b = RMat::from_fn(3, 3, |i, j| if i == j { 0.0 } else { -1.0 });
        let h = diagonal_from_quadratic(&b, &[0.5, -0.3, 0.2]).unwrap();
        let rep = approximate_max(&h, &RoundingConfig { seed: 3, ..Default::default() }, &SolverOptions::default()).unwrap();
        assert!(rep.linear_eliminated);
        assert_eq!(rep.best_state.n_qubits(), 3);
        assert!(rep.best_energy <= rep.sdp_objective + 1e-6);
        assert!(rep.best_energy <= rep.sdp_upper_bound + 1e-9);
    }

    #[test]
    fn lieb_on_zz() {
        let c = lieb_certificate(&zz(), LiebMode::Exhaustive).unwrap();
        assert!((c.energy - 1.0).abs() < 1e-12 && c.certified);
        let c = lieb_certificate(&zz(), LiebMode::Sampled { trials: 32, seed: 1 }).unwrap();
        assert!(c.energy <= 1.0 + 1e-12);
        let lin = TwoLocalHamiltonian::from_triplets(1, &[], &[(0, 1.0)]).unwrap();
        assert!(lieb_certificate(&lin, LiebMode::Exhaustive).is_err());
        assert!(lieb_certificate(&TwoLocalHamiltonian::zero(7), LiebMode::Exhaustive).is_err());
    }

    #[test]
    fn depolarized_mean_is_one_ninth() {
        let mut r = rng::seeded(8);
        let h = random_quadratic_instance(2, 0.9, &mut r);
        let e = eigh_hermitian(&build_dense(&h).unwrap());
        let mean = depolarized_mean_energy(&h, &e.top_vector()).unwrap();
        assert!((mean - e.max_value() / 9.0).abs() < 1e-9);
    }

    #[test]
    fn matching_single_edge() {
        let rep = matching_round(&zz(), 16, &mut rng::seeded(4)).unwrap();
        assert!((rep.best_energy - 1.0).abs() < 1e-12);
        assert!((rep.expected_energy - 1.0 / 9.0).abs() < 1e-12);

        // coupling -2 X_0 X_1 on four qubits
        let h = TwoLocalHamiltonian::from_triplets(4, &[(0, 3, -1.0)], &[]).unwrap();
        let rep = matching_round(&h, 400, &mut rng::seeded(5)).unwrap();
        assert!((rep.best_energy - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matching_odd_register() {
        let h = random_quadratic_instance(3, 1.0, &mut rng::seeded(6));
        let s = matching_sample(&h, &mut rng::seeded(7)).unwrap();
        assert_eq!(s.n_qubits(), 3);
    }
}
