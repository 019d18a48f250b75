//! Traceless 2-local qubit Hamiltonians
//! `H = Σ_j D_j P_j + Σ_{i,j} C_ij P_i P_j`.
//!
//! The quadratic sum runs over ordered pairs, so a coupling stored once as
//! `C_ij = C_ji = c` contributes `2c · P_i P_j`. Pauli index `v` addresses
//! qubit `v / 3` with axis `X, Y, Z` for `v % 3 = 0, 1, 2`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseHermitian, RMat};
use crate::pauli::{check_register, PauliString, PauliSum};
use crate::rng::{standard_normal, StreamRng};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Axis {
        Axis::ALL[k % 3]
    }

    pub fn pauli(self, qubit: usize) -> PauliString {
        match self {
            Axis::X => PauliString::x(qubit),
            Axis::Y => PauliString::y(qubit),
            Axis::Z => PauliString::z(qubit),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex(pub usize);

impl PauliIndex {
    pub fn new(qubit: usize, axis: Axis) -> Self {
        PauliIndex(3 * qubit + axis.index())
    }

    pub fn qubit(self) -> usize {
        self.0 / 3
    }

    pub fn axis(self) -> Axis {
        Axis::from_index(self.0)
    }

    pub fn pauli(self) -> PauliString {
        self.axis().pauli(self.qubit())
    }
}

/// Coefficients `(C, D)` of a traceless 2-local Hamiltonian on `n` qubits.
///
/// `C` is kept as its strict upper triangle: key `(i, j)` with `i < j`
/// holds `C_ij = C_ji`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLocalHamiltonian {
    n: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    linear: Vec<f64>,
}

impl TwoLocalHamiltonian {
    pub fn zero(n: usize) -> Self {
        Self { n, couplings: BTreeMap::new(), linear: vec![0.0; 3 * n] }
    }

    /// Build from coupling triplets `(i, j, c)` meaning `C_ij = C_ji = c`
    /// and linear pairs `(j, d)`. Either orientation of a pair may be given,
    /// but each unordered pair at most once.
    pub fn from_triplets(n: usize, c: &[(usize, usize, f64)], d: &[(usize, f64)]) -> Result<Self> {
        let dim = 3 * n;
        let mut h = Self::zero(n);
        for &(i, j, v) in c {
            for idx in [i, j] {
                if idx >= dim {
                    return Err(Error::OutOfRange { index: idx, bound: dim });
                }
            }
            if !v.is_finite() {
                return Err(Error::validation(format!("non-finite coupling at ({i}, {j})")));
            }
            if i == j {
                return Err(Error::validation(format!("nonzero diagonal entry C[{i}][{i}]")));
            }
            if i / 3 == j / 3 {
                return Err(Error::validation(format!(
                    "same-qubit coupling between Pauli indices {i} and {j} (qubit {})",
                    i / 3
                )));
            }
            let key = (i.min(j), i.max(j));
            if h.couplings.insert(key, v).is_some() {
                return Err(Error::validation(format!(
                    "duplicate coupling entry ({}, {})",
                    key.0, key.1
                )));
            }
        }
        let mut seen = vec![false; dim];
        for &(j, v) in d {
            if j >= dim {
                return Err(Error::OutOfRange { index: j, bound: dim });
            }
            if !v.is_finite() {
                return Err(Error::validation(format!("non-finite linear term at {j}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::validation(format!("duplicate linear entry {j}")));
            }
            h.linear[j] = v;
        }
        h.couplings.retain(|_, v| *v != 0.0);
        Ok(h)
    }

    /// Build from a dense symmetric `C` (3n×3n) and `D` (3n).
    pub fn from_dense(c: &RMat, d: &[f64]) -> Result<Self> {
        if c.nrows() != c.ncols() || !c.nrows().is_multiple_of(3) {
            return Err(Error::validation(format!(
                "coupling matrix is {}x{}, expected 3n x 3n",
                c.nrows(),
                c.ncols()
            )));
        }
        let dim = c.nrows();
        if d.len() != dim {
            return Err(Error::Dimension { expected: dim, got: d.len() });
        }
        let scale = 1.0f64.max(c.amax());
        let mut trip = Vec::new();
        for i in 0..dim {
            if c[(i, i)].abs() > tol::VALIDATION * scale {
                return Err(Error::validation(format!("nonzero diagonal entry C[{i}][{i}]")));
            }
            for j in (i + 1)..dim {
                if (c[(i, j)] - c[(j, i)]).abs() > tol::VALIDATION * scale {
                    return Err(Error::validation(format!("asymmetric coupling at ({i}, {j})")));
                }
                let v = 0.5 * (c[(i, j)] + c[(j, i)]);
                if v != 0.0 {
                    if i / 3 == j / 3 && v.abs() > tol::VALIDATION * scale {
                        return Err(Error::validation(format!(
                            "same-qubit coupling between Pauli indices {i} and {j} (qubit {})",
                            i / 3
                        )));
                    }
                    if i / 3 != j / 3 {
                        trip.push((i, j, v));
                    }
                }
            }
        }
        let lin: Vec<(usize, f64)> = d.iter().copied().enumerate().collect();
        Self::from_triplets(dim / 3, &trip, &lin)
    }

    /// Re-check every structural invariant.
    pub fn validate(&self) -> Result<()> {
        if self.linear.len() != 3 * self.n {
            return Err(Error::Dimension { expected: 3 * self.n, got: self.linear.len() });
        }
        for (&(i, j), v) in &self.couplings {
            if i >= j || j >= 3 * self.n {
                return Err(Error::validation(format!("bad coupling key ({i}, {j})")));
            }
            if i / 3 == j / 3 {
                return Err(Error::validation(format!(
                    "same-qubit coupling between Pauli indices {i} and {j}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::validation(format!("non-finite coupling at ({i}, {j})")));
            }
        }
        if self.linear.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite linear term"));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Upper-triangle couplings `(i, j, C_ij)` with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn has_linear(&self) -> bool {
        self.linear.iter().any(|&v| v != 0.0)
    }

    /// Dense symmetric `C`.
    pub fn coupling_matrix(&self) -> RMat {
        let dim = 3 * self.n;
        let mut c = RMat::zeros(dim, dim);
        for (i, j, v) in self.couplings() {
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
        c
    }

    /// The quadratic part `H₂` alone.
    pub fn quadratic_part(&self) -> Self {
        Self { linear: vec![0.0; 3 * self.n], ..self.clone() }
    }

    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            couplings: self.couplings.iter().map(|(&k, &v)| (k, -v)).collect(),
            linear: self.linear.iter().map(|v| -v).collect(),
        }
    }

    /// Same Hamiltonian on `n + extra` qubits, new qubits idle.
    pub fn padded(&self, extra: usize) -> Self {
        let mut linear = self.linear.clone();
        linear.resize(3 * (self.n + extra), 0.0);
        Self { n: self.n + extra, couplings: self.couplings.clone(), linear }
    }

    pub fn pauli_sum(&self) -> PauliSum {
        let mut sum = PauliSum::new();
        for (j, &d) in self.linear.iter().enumerate() {
            if d != 0.0 {
                sum.push(d, PauliIndex(j).pauli());
            }
        }
        for (i, j, c) in self.couplings() {
            sum.push(2.0 * c, PauliIndex(i).pauli() * PauliIndex(j).pauli());
        }
        sum
    }

    /// `Σ |C_ij| + Σ |D_i|` over the full (double-counted) `C`.
    pub fn coefficient_one_norm(&self) -> f64 {
        2.0 * self.couplings.values().map(|v| v.abs()).sum::<f64>()
            + self.linear.iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `Σ_{i,j} |C_ij|` only.
    pub fn coupling_one_norm(&self) -> f64 {
        2.0 * self.couplings.values().map(|v| v.abs()).sum::<f64>()
    }
}

/// Dense `2^n × 2^n` matrix of `h`.
pub fn build_dense(h: &TwoLocalHamiltonian) -> Result<DenseHermitian> {
    check_register(h.n)?;
    h.pauli_sum().to_hermitian(h.n)
}

/// Product state given by one Bloch vector per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    bloch: Vec<[f64; 3]>,
}

impl ProductState {
    pub fn new(bloch: Vec<[f64; 3]>) -> Result<Self> {
        for (a, y) in bloch.iter().enumerate() {
            let norm = bloch_norm(y);
            if !norm.is_finite() || norm > 1.0 + 1e-9 {
                return Err(Error::validation(format!(
                    "Bloch vector of qubit {a} has norm {norm}"
                )));
            }
        }
        Ok(Self { bloch })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { bloch: vec![[0.0; 3]; n] }
    }

    /// Flat `y` with `y[3a + k] = bloch[a][k]`.
    pub fn from_flat(y: &[f64]) -> Result<Self> {
        if !y.len().is_multiple_of(3) {
            return Err(Error::validation("flat Bloch vector length is not a multiple of 3"));
        }
        Self::new(y.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.bloch.len()
    }

    pub fn bloch(&self) -> &[[f64; 3]] {
        &self.bloch
    }

    pub fn flat(&self) -> Vec<f64> {
        self.bloch.iter().flatten().copied().collect()
    }

    pub fn is_pure(&self) -> bool {
        self.bloch.iter().all(|y| (bloch_norm(y) - 1.0).abs() <= 1e-9)
    }

    /// Statevector of a pure product state.
    pub fn statevector(&self) -> Result<DVector<Complex64>> {
        if !self.is_pure() {
            return Err(Error::validation("statevector requested for a mixed product state"));
        }
        check_register(self.bloch.len())?;
        let factors: Vec<[Complex64; 2]> = self.bloch.iter().map(qubit_amplitudes).collect();
        let dim = 1usize << self.bloch.len();
        Ok(DVector::from_fn(dim, |b, _| {
            factors
                .iter()
                .enumerate()
                .map(|(a, f)| f[(b >> a) & 1])
                .product()
        }))
    }
}

fn bloch_norm(y: &[f64; 3]) -> f64 {
    (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt()
}

/// `(α, β)` with Bloch vector `y` for a unit `y`.
fn qubit_amplitudes(y: &[f64; 3]) -> [Complex64; 2] {
    let theta = y[2].clamp(-1.0, 1.0).acos();
    let phi = y[1].atan2(y[0]);
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Product of single-qubit Pauli eigenstates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabilizerProductState {
    pub factors: Vec<(Axis, i8)>,
}

impl StabilizerProductState {
    pub fn new(factors: Vec<(Axis, i8)>) -> Result<Self> {
        if factors.iter().any(|&(_, s)| s != 1 && s != -1) {
            return Err(Error::validation("stabilizer sign must be +1 or -1"));
        }
        Ok(Self { factors })
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn to_product(&self) -> ProductState {
        ProductState {
            bloch: self
                .factors
                .iter()
                .map(|&(axis, s)| {
                    let mut y = [0.0; 3];
                    y[axis.index()] = s as f64;
                    y
                })
                .collect(),
        }
    }

    /// The `index`-th of the `6^n` stabilizer products (base-6 digits,
    /// qubit 0 least significant; digit `2k + t` is axis `k`, sign `(-1)^t`).
    pub fn enumerate(n: usize, mut index: u64) -> Self {
        let mut factors = Vec::with_capacity(n);
        for _ in 0..n {
            let digit = (index % 6) as usize;
            index /= 6;
            factors.push((Axis::from_index(digit / 2), if digit.is_multiple_of(2) { 1 } else { -1 }));
        }
        Self { factors }
    }
}

/// `yᵀ C y + Dᵀ y`.
pub fn energy_product(h: &TwoLocalHamiltonian, s: &ProductState) -> Result<f64> {
    if s.n_qubits() != h.n {
        return Err(Error::Dimension { expected: h.n, got: s.n_qubits() });
    }
    Ok(energy_flat(h, &s.flat()))
}

pub(crate) fn energy_flat(h: &TwoLocalHamiltonian, y: &[f64]) -> f64 {
    let quad: f64 = h.couplings().map(|(i, j, c)| 2.0 * c * y[i] * y[j]).sum();
    let lin: f64 = h.linear.iter().zip(y).map(|(d, v)| d * v).sum();
    quad + lin
}

/// `H′ = H₂ + Z_n H₁` on `n + 1` qubits: every linear term `D_j P_j`
/// becomes a coupling of `P_j` with the Z axis of the new last qubit.
pub fn eliminate_linear(h: &TwoLocalHamiltonian) -> TwoLocalHamiltonian {
    let mut out = h.quadratic_part().padded(1);
    let anc = PauliIndex::new(h.n, Axis::Z).0;
    for (j, &d) in h.linear.iter().enumerate() {
        if d != 0.0 {
            out.couplings.insert((j, anc), d / 2.0);
        }
    }
    out
}

/// Map a product state of `eliminate_linear(h)` back to a product state of
/// `h` with energy at least as large.
///
/// The ancilla branch `z = 0` keeps the system qubits; branch `z = 1`
/// applies time reversal (complex conjugation followed by `Y^{⊗n}`), which
/// sends every Bloch vector to its negative and hence `H₂ + H₁` to
/// `H₂ - H₁`. The better branch is returned; ties follow the ancilla.
pub fn recover_product_state(omega: &ProductState, h: &TwoLocalHamiltonian) -> Result<ProductState> {
    if omega.n_qubits() != h.n + 1 {
        return Err(Error::Dimension { expected: h.n + 1, got: omega.n_qubits() });
    }
    let system = ProductState { bloch: omega.bloch[..h.n].to_vec() };
    let reversed = ProductState {
        bloch: system.bloch.iter().map(|y| [-y[0], -y[1], -y[2]]).collect(),
    };
    let keep = energy_product(h, &system)?;
    let flip = energy_product(h, &reversed)?;
    let ancilla_z = omega.bloch[h.n][2];
    let take_flip = flip > keep || (flip == keep && ancilla_z < 0.0);
    Ok(if take_flip { reversed } else { system })
}

/// Stabilizer-product version of [`recover_product_state`].
pub fn recover_stabilizer_state(
    omega: &StabilizerProductState,
    h: &TwoLocalHamiltonian,
) -> Result<StabilizerProductState> {
    if omega.n_qubits() != h.n + 1 {
        return Err(Error::Dimension { expected: h.n + 1, got: omega.n_qubits() });
    }
    let system = StabilizerProductState { factors: omega.factors[..h.n].to_vec() };
    let reversed = StabilizerProductState {
        factors: system.factors.iter().map(|&(a, s)| (a, -s)).collect(),
    };
    let keep = energy_product(h, &system.to_product())?;
    let flip = energy_product(h, &reversed.to_product())?;
    let (anc_axis, anc_sign) = omega.factors[h.n];
    let ancilla_negative = anc_axis == Axis::Z && anc_sign < 0;
    let take_flip = flip > keep || (flip == keep && ancilla_negative);
    Ok(if take_flip { reversed } else { system })
}

/// Random instance: each admissible coupling (and each linear term) is
/// present with probability `density` and then drawn from N(0, 1).
pub fn random_instance(n: usize, density: f64, rng: &mut StreamRng) -> TwoLocalHamiltonian {
    let mut h = random_quadratic_instance(n, density, rng);
    for d in h.linear.iter_mut() {
        if rng.random::<f64>() < density {
            *d = standard_normal(rng);
        }
    }
    h
}

/// As [`random_instance`] but with `D = 0`.
pub fn random_quadratic_instance(n: usize, density: f64, rng: &mut StreamRng) -> TwoLocalHamiltonian {
    let dim = 3 * n;
    let mut h = TwoLocalHamiltonian::zero(n);
    for i in 0..dim {
        for j in (i + 1)..dim {
            if i / 3 == j / 3 {
                continue;
            }
            if rng.random::<f64>() < density {
                h.couplings.insert((i, j), standard_normal(rng));
            }
        }
    }
    h
}

/// Diagonal Hamiltonian whose value on basis state `x ∈ {±1}^n`
/// (`x_a = ⟨Z_a⟩`) is `F(x) = xᵀ B x + vᵀ x`.
pub fn diagonal_from_quadratic(b: &RMat, v: &[f64]) -> Result<TwoLocalHamiltonian> {
    let n = b.nrows();
    if b.ncols() != n {
        return Err(Error::validation("B must be square"));
    }
    if v.len() != n {
        return Err(Error::Dimension { expected: n, got: v.len() });
    }
    for a in 0..n {
        if b[(a, a)] != 0.0 {
            return Err(Error::validation(format!("B has nonzero diagonal entry at {a}")));
        }
    }
    let mut trip = Vec::new();
    for a in 0..n {
        for c in (a + 1)..n {
            let w = 0.5 * (b[(a, c)] + b[(c, a)]);
            if w != 0.0 {
                trip.push((PauliIndex::new(a, Axis::Z).0, PauliIndex::new(c, Axis::Z).0, w));
            }
        }
    }
    let lin: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .map(|(a, &x)| (PauliIndex::new(a, Axis::Z).0, x))
        .collect();
    TwoLocalHamiltonian::from_triplets(n, &trip, &lin)
}
