//! Fermionic Hamiltonians, covariance matrices and Gaussian / Slater states.
//!
//! A [`MajoranaHamiltonian`] on `n` modes is
//! `h = shift + Σ_{p<q} 2i V_pq c_p c_q + Σ_{p<q<r<s} w_pqrs c_p c_q c_r c_s`,
//! i.e. `h₁ = Σ_{p,q} i V_pq c_p c_q` with `V` antisymmetric, and the
//! canonical quartic coefficient `w` equals `24·W` for the fully
//! antisymmetric tensor `W` of `h₂ = Σ W_pqrs c_p c_q c_r c_s`.
//!
//! The covariance matrix of a state is `X_pq = −i⟨c_p c_q⟩` for `p ≠ q`.
//! The vacuum has `X_{2j,2j+1} = 1`. A Gaussian state is described by an
//! orthogonal `R` and per-mode probabilities `λ_j` of the rotated mode being
//! empty, with covariance `R · ⊕_j (2λ_j − 1) J · Rᵀ`, `J = [[0, 1], [−1, 0]]`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    antisymmetry_defect, eigh, eigh_hermitian, non_hermiticity, operator_norm, CMat, DenseHermitian, RMat,
    RealAntisymmetric, RealSymmetric,
};
use crate::majorana::{MajoranaPoly, MAX_MODES};
use crate::pauli::check_register;
use crate::qubit::TwoLocalHamiltonian;
use crate::rng::{standard_normal, StreamRng};
use crate::tol;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 0 {
        return Err(Error::validation("number of modes must be positive"));
    }
    if n_modes > MAX_MODES {
        return Err(Error::TooLarge { what: "fermionic modes", value: n_modes, max: MAX_MODES });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaHamiltonian {
    n_modes: usize,
    v: RealAntisymmetric,
    w: BTreeMap<[usize; 4], f64>,
    shift: f64,
}

impl MajoranaHamiltonian {
    pub fn zero(n_modes: usize) -> Result<Self> {
        check_modes(n_modes)?;
        Ok(Self { n_modes, v: RealAntisymmetric::zeros(2 * n_modes), w: BTreeMap::new(), shift: 0.0 })
    }

    pub fn new(n_modes: usize, v: RealAntisymmetric, w: BTreeMap<[usize; 4], f64>, shift: f64) -> Result<Self> {
        check_modes(n_modes)?;
        if v.dim() != 2 * n_modes {
            return Err(Error::Dimension { expected: 2 * n_modes, got: v.dim() });
        }
        for (k, c) in &w {
            if !(k[0] < k[1] && k[1] < k[2] && k[2] < k[3]) {
                return Err(Error::validation(format!("quartic key {k:?} is not strictly increasing")));
            }
            if k[3] >= 2 * n_modes {
                return Err(Error::OutOfRange { index: k[3], bound: 2 * n_modes });
            }
            if !c.is_finite() {
                return Err(Error::validation(format!("non-finite quartic coefficient at {k:?}")));
            }
        }
        if !shift.is_finite() {
            return Err(Error::validation("non-finite shift"));
        }
        let w = w.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(Self { n_modes, v, w, shift })
    }

    /// From canonical entries: `(p, q, v)` with `p < q` sets `V_pq = v`,
    /// `V_qp = −v`; `([p, q, r, s], w)` with `p < q < r < s`.
    pub fn from_terms(
        n_modes: usize,
        v_entries: &[(usize, usize, f64)],
        w_entries: &[([usize; 4], f64)],
        shift: f64,
    ) -> Result<Self> {
        check_modes(n_modes)?;
        let d = 2 * n_modes;
        let mut v = RMat::zeros(d, d);
        let mut seen = std::collections::HashSet::new();
        for &(p, q, val) in v_entries {
            if p >= q {
                return Err(Error::validation(format!("quadratic key ({p}, {q}) must satisfy p < q")));
            }
            if q >= d {
                return Err(Error::OutOfRange { index: q, bound: d });
            }
            if !val.is_finite() {
                return Err(Error::validation(format!("non-finite quadratic coefficient at ({p}, {q})")));
            }
            if !seen.insert((p, q)) {
                return Err(Error::validation(format!("duplicate quadratic entry ({p}, {q})")));
            }
            v[(p, q)] = val;
            v[(q, p)] = -val;
        }
        let mut w = BTreeMap::new();
        for &(k, val) in w_entries {
            if w.insert(k, val).is_some() {
                return Err(Error::validation(format!("duplicate quartic entry {k:?}")));
            }
        }
        Self::new(n_modes, RealAntisymmetric::new(v)?, w, shift)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn v(&self) -> &RealAntisymmetric {
        &self.v
    }

    pub fn quartic(&self) -> &BTreeMap<[usize; 4], f64> {
        &self.w
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn has_quadratic(&self) -> bool {
        self.v.matrix().iter().any(|&x| x != 0.0)
    }

    /// Same operator without its identity component.
    pub fn traceless(&self) -> Self {
        Self { shift: 0.0, ..self.clone() }
    }

    pub fn negated(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            v: RealAntisymmetric::antisymmetrized(&(-self.v.matrix())),
            w: self.w.iter().map(|(&k, &c)| (k, -c)).collect(),
            shift: -self.shift,
        }
    }

    /// Fully antisymmetric `W_pqrs` for an arbitrary index tuple.
    pub fn full_w(&self, idx: [usize; 4]) -> f64 {
        let mut sorted = idx;
        let mut parity = 0;
        for i in 0..4 {
            for j in 0..3 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    parity ^= 1;
                } else if sorted[j] == sorted[j + 1] {
                    return 0.0;
                }
            }
        }
        if sorted[0] == sorted[1] || sorted[1] == sorted[2] || sorted[2] == sorted[3] {
            return 0.0;
        }
        let c = self.w.get(&sorted).copied().unwrap_or(0.0) / 24.0;
        if parity == 0 { c } else { -c }
    }

    pub fn to_poly(&self) -> MajoranaPoly {
        let mut poly = MajoranaPoly::zero();
        if self.shift != 0.0 {
            poly.add_term(0, Complex64::new(self.shift, 0.0));
        }
        let d = 2 * self.n_modes;
        for p in 0..d {
            for q in (p + 1)..d {
                let v = self.v.matrix()[(p, q)];
                if v != 0.0 {
                    poly.add_term((1u64 << p) | (1u64 << q), Complex64::new(0.0, 2.0 * v));
                }
            }
        }
        for (k, &c) in &self.w {
            let mask = k.iter().fold(0u64, |m, &i| m | (1u64 << i));
            poly.add_term(mask, Complex64::new(c, 0.0));
        }
        poly
    }

    /// Inverse of [`Self::to_poly`]; the polynomial must be Hermitian with
    /// monomials of degree 0, 2 and 4 only.
    pub fn from_poly(poly: &MajoranaPoly, n_modes: usize) -> Result<Self> {
        check_modes(n_modes)?;
        let d = 2 * n_modes;
        let scale = 1.0f64.max(poly.terms.values().map(|c| c.norm()).fold(0.0, f64::max));
        let eps = 1e-12 * scale;
        let mut v = RMat::zeros(d, d);
        let mut w = BTreeMap::new();
        let mut shift = 0.0;
        for (&mask, &c) in &poly.terms {
            if c.norm() <= eps {
                continue;
            }
            if mask >> d != 0 {
                return Err(Error::OutOfRange { index: 63 - mask.leading_zeros() as usize, bound: d });
            }
            let idx: Vec<usize> = (0..d).filter(|&i| (mask >> i) & 1 == 1).collect();
            match idx.len() {
                0 => {
                    if c.im.abs() > eps {
                        return Err(Error::validation("identity coefficient is not real"));
                    }
                    shift = c.re;
                }
                2 => {
                    // c c_p c_q = 2i V_pq c_p c_q
                    let val = c / Complex64::new(0.0, 2.0);
                    if val.im.abs() > eps {
                        return Err(Error::validation("quadratic coefficient breaks hermiticity"));
                    }
                    v[(idx[0], idx[1])] = val.re;
                    v[(idx[1], idx[0])] = -val.re;
                }
                4 => {
                    if c.im.abs() > eps {
                        return Err(Error::validation("quartic coefficient breaks hermiticity"));
                    }
                    w.insert([idx[0], idx[1], idx[2], idx[3]], c.re);
                }
                k => {
                    return Err(Error::validation(format!(
                        "monomial of degree {k} cannot be represented"
                    )))
                }
            }
        }
        Self::new(n_modes, RealAntisymmetric::new(v)?, w, shift)
    }

    pub fn build_dense(&self) -> Result<DenseHermitian> {
        check_register(self.n_modes)?;
        self.to_poly().to_hermitian(self.n_modes)
    }
}

/// `h = ω + Σ V_pq a†_p a_q + Σ W_pqrs a†_p a†_q a_r a_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberConservingHamiltonian {
    n_modes: usize,
    vc: CMat,
    wc: BTreeMap<[usize; 4], Complex64>,
    omega: f64,
}

impl NumberConservingHamiltonian {
    pub fn new(n_modes: usize, vc: CMat, wc: BTreeMap<[usize; 4], Complex64>, omega: f64) -> Result<Self> {
        check_modes(n_modes)?;
        if vc.nrows() != n_modes || vc.ncols() != n_modes {
            return Err(Error::Dimension { expected: n_modes, got: vc.nrows() });
        }
        let scale = 1.0f64.max(vc.iter().map(|z| z.norm()).fold(0.0, f64::max));
        if non_hermiticity(&vc) > tol::VALIDATION * scale {
            return Err(Error::validation("one-body matrix is not Hermitian"));
        }
        for k in wc.keys() {
            if let Some(&i) = k.iter().find(|&&i| i >= n_modes) {
                return Err(Error::OutOfRange { index: i, bound: n_modes });
            }
        }
        if !omega.is_finite() {
            return Err(Error::validation("non-finite shift"));
        }
        let h = Self { n_modes, vc, wc, omega };
        let two_body = h.two_body_poly();
        let wscale = 1.0f64.max(h.wc.values().map(|z| z.norm()).fold(0.0, f64::max));
        if two_body.distance(&two_body.dagger()) > 1e-10 * wscale {
            return Err(Error::validation("two-body coefficients do not define a Hermitian operator"));
        }
        Ok(h)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn vc(&self) -> &CMat {
        &self.vc
    }

    pub fn wc(&self) -> &BTreeMap<[usize; 4], Complex64> {
        &self.wc
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn two_body_poly(&self) -> MajoranaPoly {
        let mut poly = MajoranaPoly::zero();
        for (&[p, q, r, s], &c) in &self.wc {
            let term = MajoranaPoly::creator(p)
                .mul(&MajoranaPoly::creator(q))
                .mul(&MajoranaPoly::annihilator(r))
                .mul(&MajoranaPoly::annihilator(s));
            poly.add(&term.scaled(c));
        }
        poly
    }

    pub fn to_poly(&self) -> MajoranaPoly {
        let mut poly = MajoranaPoly::scalar(self.omega);
        for p in 0..self.n_modes {
            for q in 0..self.n_modes {
                let c = self.vc[(p, q)];
                if c != C_ZERO {
                    let term = MajoranaPoly::creator(p).mul(&MajoranaPoly::annihilator(q));
                    poly.add(&term.scaled(c));
                }
            }
        }
        poly.add(&self.two_body_poly());
        poly.pruned(1e-15)
    }

    /// Dense matrix built directly from ladder operators on basis states.
    pub fn build_dense(&self) -> Result<DenseHermitian> {
        check_register(self.n_modes)?;
        let dim = 1usize << self.n_modes;
        let mut m = CMat::zeros(dim, dim);
        for b in 0..dim as u64 {
            m[(b as usize, b as usize)] += Complex64::new(self.omega, 0.0);
            for p in 0..self.n_modes {
                for q in 0..self.n_modes {
                    let c = self.vc[(p, q)];
                    if c == C_ZERO {
                        continue;
                    }
                    if let Some((s1, b1)) = ladder(b, q, false).and_then(|(s, b1)| ladder(b1, p, true).map(|(s2, b2)| (s * s2, b2))) {
                        m[(b1 as usize, b as usize)] += c * s1;
                    }
                }
            }
            for (&[p, q, r, s], &c) in &self.wc {
                let step = ladder(b, s, false)
                    .and_then(|(x1, b1)| ladder(b1, r, false).map(|(x2, b2)| (x1 * x2, b2)))
                    .and_then(|(x, b2)| ladder(b2, q, true).map(|(x3, b3)| (x * x3, b3)))
                    .and_then(|(x, b3)| ladder(b3, p, true).map(|(x4, b4)| (x * x4, b4)));
                if let Some((sign, out)) = step {
                    m[(out as usize, b as usize)] += c * sign;
                }
            }
        }
        DenseHermitian::new(m)
    }
}

/// `a_p |b⟩` (or `a_p† |b⟩` when `create`) as `(sign, b')`, or `None` if
/// the result vanishes.
pub fn ladder(b: u64, p: usize, create: bool) -> Option<(f64, u64)> {
    let occupied = (b >> p) & 1 == 1;
    if occupied == create {
        return None;
    }
    let sign = if (b & ((1u64 << p) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((sign, b ^ (1u64 << p)))
}

pub fn to_majorana(h: &NumberConservingHamiltonian) -> Result<MajoranaHamiltonian> {
    MajoranaHamiltonian::from_poly(&h.to_poly(), h.n_modes)
}

/// `h = P†P` with `P = Σ_j a_{2j} a_{2j+1}` on `2N` modes.
pub fn richardson(n_pairs: usize) -> Result<NumberConservingHamiltonian> {
    if n_pairs == 0 {
        return Err(Error::validation("Richardson model needs at least one pair"));
    }
    let n = 2 * n_pairs;
    let mut wc = BTreeMap::new();
    for i in 0..n_pairs {
        for j in 0..n_pairs {
            // (a_{2i} a_{2i+1})† a_{2j} a_{2j+1} = a†_{2i+1} a†_{2i} a_{2j} a_{2j+1}
            wc.insert([2 * i + 1, 2 * i, 2 * j, 2 * j + 1], Complex64::new(1.0, 0.0));
        }
    }
    NumberConservingHamiltonian::new(n, CMat::zeros(n, n), wc, 0.0)
}

/// `(N(N + 2) + (N mod 2)) / 4`.
pub fn richardson_lambda_max(n_pairs: usize) -> f64 {
    let n = n_pairs as f64;
    (n * (n + 2.0) + (n_pairs % 2) as f64) / 4.0
}

/// Real antisymmetric matrix with operator norm at most `1 + 1e-9`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix(RealAntisymmetric);

impl CovarianceMatrix {
    pub fn new(x: RealAntisymmetric) -> Result<Self> {
        let norm = operator_norm(x.matrix());
        if norm > 1.0 + tol::COVARIANCE_NORM {
            return Err(Error::validation(format!("covariance matrix has operator norm {norm} > 1")));
        }
        Ok(Self(x))
    }

    pub fn from_matrix(x: RMat) -> Result<Self> {
        Self::new(RealAntisymmetric::new(x)?)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let mut x = RMat::zeros(2 * n_modes, 2 * n_modes);
        for j in 0..n_modes {
            x[(2 * j, 2 * j + 1)] = 1.0;
            x[(2 * j + 1, 2 * j)] = -1.0;
        }
        Self(RealAntisymmetric::antisymmetrized(&x))
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self(RealAntisymmetric::zeros(2 * n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.0.dim() / 2
    }

    pub fn matrix(&self) -> &RMat {
        self.0.matrix()
    }

    /// `X Xᵀ = I` within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        let x = self.matrix();
        (x * x.transpose() - RMat::identity(x.nrows(), x.nrows())).amax() <= tol
    }
}

/// Orthogonal frame `R` and per-mode vacuum probabilities `λ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianStateSpec {
    #[serde(with = "real_matrix")]
    pub r: RMat,
    pub occupations: Vec<f64>,
}

impl GaussianStateSpec {
    pub fn new(r: RMat, occupations: Vec<f64>) -> Result<Self> {
        let d = r.nrows();
        if r.ncols() != d || d != 2 * occupations.len() {
            return Err(Error::Dimension { expected: 2 * occupations.len(), got: d });
        }
        let defect = (r.transpose() * &r - RMat::identity(d, d)).amax();
        if defect > tol::ORTHONORMAL {
            return Err(Error::validation(format!("frame is not orthogonal (defect {defect:.3e})")));
        }
        if occupations.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::validation("occupations must lie in [0, 1]"));
        }
        Ok(Self { r, occupations })
    }

    pub fn n_modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_pure(&self) -> bool {
        self.occupations.iter().all(|&l| l == 0.0 || l == 1.0)
    }
}

/// Block-diagonalize `X = R (⊕ x_j J) Rᵀ` with `x_j >= 0`.
///
/// The planes are found from the eigenvectors of `−X²` (each eigenvalue
/// `x_j²` appears twice): for a new unit vector `r`, the partner is
/// `s = X r / |X r|` and the plane carries `x_j = |X r|`. Vectors of the
/// kernel are paired up arbitrarily.
pub fn canonical_form(x: &CovarianceMatrix) -> Result<GaussianStateSpec> {
    let xm = x.matrix();
    let d = xm.nrows();
    let n = d / 2;
    let sq = RealSymmetric::symmetrized(&(-(xm * xm)));
    let e = eigh(&sq);
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut planes: Vec<(DVector<f64>, DVector<f64>, f64)> = Vec::with_capacity(n);
    let mut pending: Option<DVector<f64>> = None;

    let orthogonalize = |v: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(v);
                v.axpy(-c, b, 1.0);
            }
        }
    };

    for idx in (0..d).rev() {
        let mut r = e.vectors.column(idx).into_owned();
        orthogonalize(&mut r, &chosen);
        let norm = r.norm();
        if norm < 1e-6 {
            continue;
        }
        r /= norm;
        let xr = xm * &r;
        let b = xr.norm();
        if b > 1e-9 {
            let mut s = xr / b;
            chosen.push(r.clone());
            orthogonalize(&mut s, &chosen);
            s /= s.norm();
            let xval = s.dot(&(xm * &r));
            chosen.push(s.clone());
            planes.push((s, r, xval));
        } else if let Some(prev) = pending.take() {
            let xval = prev.dot(&(xm * &r));
            chosen.push(r.clone());
            planes.push((prev, r, xval));
        } else {
            chosen.push(r.clone());
            pending = Some(r);
        }
    }
    if planes.len() != n || pending.is_some() {
        return Err(Error::validation("failed to block-diagonalize covariance matrix"));
    }
    let mut r = RMat::zeros(d, d);
    let mut occupations = Vec::with_capacity(n);
    for (k, (s, rv, xval)) in planes.into_iter().enumerate() {
        r.set_column(2 * k, &s);
        r.set_column(2 * k + 1, &rv);
        occupations.push((0.5 * (1.0 + xval)).clamp(0.0, 1.0));
    }
    GaussianStateSpec::new(r, occupations)
}

pub fn covariance_of(spec: &GaussianStateSpec) -> CovarianceMatrix {
    let d = spec.r.nrows();
    let mut b = RMat::zeros(d, d);
    for (j, &l) in spec.occupations.iter().enumerate() {
        let x = 2.0 * l - 1.0;
        b[(2 * j, 2 * j + 1)] = x;
        b[(2 * j + 1, 2 * j)] = -x;
    }
    let m = &spec.r * b * spec.r.transpose();
    CovarianceMatrix(RealAntisymmetric::antisymmetrized(&m))
}

/// Draw a pure Gaussian state from the mixture: rotated mode `j` is empty
/// with probability `λ_j`.
pub fn sample_pure(spec: &GaussianStateSpec, rng: &mut StreamRng) -> GaussianStateSpec {
    let occupations = spec
        .occupations
        .iter()
        .map(|&l| if rng.random::<f64>() < l { 1.0 } else { 0.0 })
        .collect();
    GaussianStateSpec { r: spec.r.clone(), occupations }
}

/// Energy of the Gaussian state with covariance `x`:
/// `shift − Σ V_pq X_pq − Σ_{p<q<r<s} w (X_pq X_rs − X_pr X_qs + X_ps X_qr)`.
pub fn wick_energy(h: &MajoranaHamiltonian, x: &CovarianceMatrix) -> Result<f64> {
    if x.n_modes() != h.n_modes {
        return Err(Error::Dimension { expected: 2 * h.n_modes, got: 2 * x.n_modes() });
    }
    Ok(wick_energy_unchecked(h, x.matrix()))
}

pub(crate) fn wick_energy_unchecked(h: &MajoranaHamiltonian, x: &RMat) -> f64 {
    let quad = -h.v.matrix().dot(x);
    h.shift + quad + quartic_energy(h, x)
}

pub(crate) fn quartic_energy(h: &MajoranaHamiltonian, x: &RMat) -> f64 {
    -h.w
        .iter()
        .map(|(&[p, q, r, s], &c)| c * (x[(p, q)] * x[(r, s)] - x[(p, r)] * x[(q, s)] + x[(p, s)] * x[(q, r)]))
        .sum::<f64>()
}

/// The pure Gaussian state on `2N` modes that pairs the Majoranas of every
/// mode quadruple `(α, β, γ, δ) = (c_{4j}, c_{4j+1}, c_{4j+2}, c_{4j+3})`
/// as `β γ ψ = i ψ` and `α δ ψ = i ψ`.
pub fn paired_gaussian_state(n_pairs: usize) -> Result<GaussianStateSpec> {
    if n_pairs == 0 {
        return Err(Error::validation("paired state needs at least one pair"));
    }
    let d = 4 * n_pairs;
    let mut r = RMat::zeros(d, d);
    for j in 0..n_pairs {
        let (a, b, g, dl) = (4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3);
        // plane 2j: (β, γ); plane 2j + 1: (α, δ); both with X = +1
        r[(b, 4 * j)] = 1.0;
        r[(g, 4 * j + 1)] = 1.0;
        r[(a, 4 * j + 2)] = 1.0;
        r[(dl, 4 * j + 3)] = 1.0;
    }
    GaussianStateSpec::new(r, vec![1.0; 2 * n_pairs])
}

/// `h′ = h₁ · (−i c_{2n} c_{2n+1}) + h₂` on `n + 1` modes.
pub fn eliminate_linear_fermionic(h: &MajoranaHamiltonian) -> Result<MajoranaHamiltonian> {
    let n = h.n_modes;
    check_modes(n + 1)?;
    let mut w = h.w.clone();
    let d = 2 * n;
    for p in 0..d {
        for q in (p + 1)..d {
            let v = h.v.matrix()[(p, q)];
            if v != 0.0 {
                w.insert([p, q, d, d + 1], 2.0 * v);
            }
        }
    }
    MajoranaHamiltonian::new(n + 1, RealAntisymmetric::zeros(d + 2), w, h.shift)
}

/// Covariance after projecting onto `−i c_a c_b = s`, and the probability
/// of that outcome.
pub fn condition_on_parity(x: &RMat, a: usize, b: usize, s: f64) -> (f64, RMat) {
    let prob = 0.5 * (1.0 + s * x[(a, b)]);
    let d = x.nrows();
    let mut out = RMat::zeros(d, d);
    if prob <= 1e-15 {
        return (0.0, out);
    }
    let denom = 1.0 + s * x[(a, b)];
    for p in 0..d {
        for q in 0..d {
            if p == a || p == b || q == a || q == b {
                continue;
            }
            out[(p, q)] = x[(p, q)] - s * (x[(p, a)] * x[(q, b)] - x[(p, b)] * x[(q, a)]) / denom;
        }
    }
    out[(a, b)] = s;
    out[(b, a)] = -s;
    (prob, out)
}

#[derive(Clone, Debug)]
pub struct RecoveredState {
    pub covariance: CovarianceMatrix,
    /// Ancilla parity branch: `+1` keeps the state, `−1` time-reverses it.
    pub branch: i8,
    pub energy: f64,
}

/// Map a state of `eliminate_linear_fermionic(h)` back to a state of `h`
/// with energy at least as large. Each ancilla parity branch is
/// conditioned on; the `−1` branch is time-reversed (`X → −X`), which
/// maps `h₂ − h₁` to `h₂ + h₁`. The better branch is returned.
pub fn recover_gaussian(omega: &CovarianceMatrix, h: &MajoranaHamiltonian) -> Result<RecoveredState> {
    let n = h.n_modes;
    if omega.n_modes() != n + 1 {
        return Err(Error::Dimension { expected: 2 * (n + 1), got: 2 * omega.n_modes() });
    }
    let d = 2 * n;
    let mut best: Option<RecoveredState> = None;
    for s in [1.0, -1.0] {
        let (prob, cond) = condition_on_parity(omega.matrix(), d, d + 1, s);
        if prob <= 1e-15 {
            continue;
        }
        let sys = cond.view((0, 0), (d, d)).into_owned();
        let sys = if s > 0.0 { sys } else { -sys };
        let x = RealAntisymmetric::antisymmetrized(&sys);
        let x = CovarianceMatrix(clip_norm(x));
        let energy = wick_energy_unchecked(h, x.matrix());
        if best.as_ref().is_none_or(|b| energy > b.energy) {
            best = Some(RecoveredState { covariance: x, branch: s as i8, energy });
        }
    }
    best.ok_or_else(|| Error::validation("both parity branches have zero weight"))
}

fn clip_norm(x: RealAntisymmetric) -> RealAntisymmetric {
    let norm = operator_norm(x.matrix());
    if norm > 1.0 {
        RealAntisymmetric::antisymmetrized(&(x.matrix() / norm))
    } else {
        x
    }
}

/// Three Majoranas per qubit: `X_a = i c_{3a} c_{3a+1}`,
/// `Y_a = i c_{3a+1} c_{3a+2}`, `Z_a = i c_{3a} c_{3a+2}`. An odd qubit
/// count is padded with an idle qubit.
pub fn encode_qubit_hamiltonian(h: &TwoLocalHamiltonian) -> Result<MajoranaHamiltonian> {
    if h.has_linear() {
        return Err(Error::validation("encoding requires a Hamiltonian without linear terms"));
    }
    let n = h.n_qubits() + h.n_qubits() % 2;
    let n_modes = 3 * n / 2;
    let pair = |v: usize| -> (usize, usize) {
        let a = v / 3;
        match v % 3 {
            0 => (3 * a, 3 * a + 1),
            1 => (3 * a + 1, 3 * a + 2),
            _ => (3 * a, 3 * a + 2),
        }
    };
    let mut w = BTreeMap::new();
    for (i, j, c) in h.couplings() {
        let (p, q) = pair(i);
        let (r, s) = pair(j);
        // 2c (i c_p c_q)(i c_r c_s) = −2c c_p c_q c_r c_s
        *w.entry([p, q, r, s]).or_insert(0.0) += -2.0 * c;
    }
    MajoranaHamiltonian::new(n_modes, RealAntisymmetric::zeros(2 * n_modes), w, 0.0)
}

/// Antisymmetric matrix given by its upper entries `(p, q, v)`, `p < q`.
pub type SparseAntisymmetric = Vec<(usize, usize, f64)>;

pub fn sparse_to_dense(m: &SparseAntisymmetric, d: usize) -> RMat {
    let mut x = RMat::zeros(d, d);
    for &(p, q, v) in m {
        x[(p, q)] += v;
        x[(q, p)] -= v;
    }
    x
}

/// Frobenius-orthonormal basis `(e_p e_qᵀ − e_q e_pᵀ)/√2` of all
/// antisymmetric `2n × 2n` matrices.
pub fn antisymmetric_basis(n_modes: usize) -> Vec<SparseAntisymmetric> {
    let d = 2 * n_modes;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for p in 0..d {
        for q in (p + 1)..d {
            out.push(vec![(p, q, s)]);
        }
    }
    out
}

/// Frobenius-orthonormal basis of the covariances with `⟨a_p a_q⟩ = 0`:
/// `X_{2p,2q} = X_{2p+1,2q+1}` and `X_{2p,2q+1} = −X_{2p+1,2q}`.
/// Its dimension is `n²`.
pub fn slater_subspace_basis(n_modes: usize) -> Vec<SparseAntisymmetric> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n_modes * n_modes);
    for p in 0..n_modes {
        out.push(vec![(2 * p, 2 * p + 1, s)]);
    }
    for p in 0..n_modes {
        for q in (p + 1)..n_modes {
            out.push(vec![(2 * p, 2 * q, 0.5), (2 * p + 1, 2 * q + 1, 0.5)]);
            out.push(vec![(2 * p, 2 * q + 1, 0.5), (2 * p + 1, 2 * q, -0.5)]);
        }
    }
    out
}

/// Distance from `x` to the span of an orthonormal sparse basis.
pub fn subspace_residual(x: &RMat, basis: &[SparseAntisymmetric]) -> f64 {
    let d = x.nrows();
    let mut proj = RMat::zeros(d, d);
    for b in basis {
        let bd = sparse_to_dense(b, d);
        proj += &bd * bd.dot(x);
    }
    (x - proj).norm()
}

/// `Q_ij = ⟨a_i† a_j⟩` from the covariance matrix of a state with
/// `⟨a_p a_q⟩ = 0`.
pub fn one_body_from_covariance(x: &RMat) -> CMat {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        let re = 0.25 * (x[(2 * i + 1, 2 * j)] - x[(2 * i, 2 * j + 1)]);
        let im = 0.25 * (x[(2 * i, 2 * j)] + x[(2 * i + 1, 2 * j + 1)]);
        let diag = if i == j { 0.5 } else { 0.0 };
        Complex64::new(diag + re, im)
    })
}

/// Inverse of [`one_body_from_covariance`].
pub fn covariance_from_one_body(q: &CMat) -> RMat {
    let n = q.nrows();
    let mut x = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let mut t = q[(i, j)];
            if i == j {
                t -= Complex64::new(0.5, 0.0);
            }
            x[(2 * i, 2 * j)] = 2.0 * t.im;
            x[(2 * i + 1, 2 * j + 1)] = 2.0 * t.im;
            x[(2 * i, 2 * j + 1)] = -2.0 * t.re;
            x[(2 * i + 1, 2 * j)] = 2.0 * t.re;
        }
    }
    x
}

/// `b_1† … b_k† |0⟩` with `b_p = Σ_q U_pq a_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterSpec {
    pub particles: usize,
    #[serde(with = "complex_matrix")]
    pub u: CMat,
}

impl SlaterSpec {
    pub fn new(particles: usize, u: CMat) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::validation("orbital matrix must be square"));
        }
        if particles > n {
            return Err(Error::validation(format!("{particles} particles exceed {n} modes")));
        }
        let defect = (u.adjoint() * &u - CMat::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > tol::ORTHONORMAL {
            return Err(Error::validation(format!("orbital matrix is not unitary (defect {defect:.3e})")));
        }
        Ok(Self { particles, u })
    }

    pub fn n_modes(&self) -> usize {
        self.u.nrows()
    }

    /// `Q_ij = Σ_{p<k} U_pi conj(U_pj)`.
    pub fn one_body(&self) -> CMat {
        let n = self.n_modes();
        CMat::from_fn(n, n, |i, j| {
            (0..self.particles).map(|p| self.u[(p, i)] * self.u[(p, j)].conj()).sum()
        })
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        let x = covariance_from_one_body(&self.one_body());
        CovarianceMatrix(RealAntisymmetric::antisymmetrized(&x))
    }

    /// Dense statevector built by applying the orbital creators.
    pub fn statevector(&self) -> Result<DVector<Complex64>> {
        let n = self.n_modes();
        check_register(n)?;
        let mut psi = DVector::from_element(1 << n, C_ZERO);
        psi[0] = Complex64::new(1.0, 0.0);
        for p in (0..self.particles).rev() {
            let mut next = DVector::from_element(1 << n, C_ZERO);
            for q in 0..n {
                let coef = self.u[(p, q)].conj();
                if coef == C_ZERO {
                    continue;
                }
                for (b, &amp) in psi.iter().enumerate() {
                    if amp == C_ZERO {
                        continue;
                    }
                    if let Some((sign, out)) = ladder(b as u64, q, true) {
                        next[out as usize] += coef * amp * sign;
                    }
                }
            }
            psi = next;
        }
        Ok(psi)
    }
}

mod real_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &RMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<RMat, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}

mod complex_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }
}

/// Pure Gaussian state with covariance `x` (which must satisfy `X² = −I`):
/// the top eigenvector of `Σ_{p<q} X_pq (−i c_p c_q)`.
pub fn gaussian_statevector(x: &CovarianceMatrix) -> Result<DVector<Complex64>> {
    if !x.is_pure(1e-8) {
        return Err(Error::validation("statevector requested for a mixed covariance matrix"));
    }
    let n = x.n_modes();
    check_register(n)?;
    let mut poly = MajoranaPoly::zero();
    let xm = x.matrix();
    for p in 0..2 * n {
        for q in (p + 1)..2 * n {
            if xm[(p, q)] != 0.0 {
                poly.add_term((1u64 << p) | (1u64 << q), Complex64::new(0.0, -xm[(p, q)]));
            }
        }
    }
    let e = eigh_hermitian(&poly.to_hermitian(n)?);
    Ok(e.top_vector())
}

/// Dense density matrix `∏_j (I + x_j (−i c̃_{2j} c̃_{2j+1})) / 2` with
/// rotated Majoranas `c̃_k = Σ_p R_pk c_p`.
pub fn gaussian_density_matrix(spec: &GaussianStateSpec) -> Result<CMat> {
    let n = spec.n_modes();
    check_register(n)?;
    let dim = 1usize << n;
    let mut rho = CMat::identity(dim, dim);
    for j in 0..n {
        let x = 2.0 * spec.occupations[j] - 1.0;
        let mut ca = MajoranaPoly::zero();
        let mut cb = MajoranaPoly::zero();
        for p in 0..2 * n {
            ca.add_term(1u64 << p, Complex64::new(spec.r[(p, 2 * j)], 0.0));
            cb.add_term(1u64 << p, Complex64::new(spec.r[(p, 2 * j + 1)], 0.0));
        }
        let mut factor = ca.mul(&cb).scaled(Complex64::new(0.0, -x));
        factor.add(&MajoranaPoly::scalar(1.0));
        let f = factor.scaled(Complex64::new(0.5, 0.0)).to_dense(n)?;
        rho *= f;
    }
    Ok(rho)
}

/// `X_pq = −i ⟨ψ| c_p c_q |ψ⟩` computed densely.
pub fn covariance_of_statevector(psi: &DVector<Complex64>, n_modes: usize) -> Result<RMat> {
    let d = 2 * n_modes;
    let mut x = RMat::zeros(d, d);
    for p in 0..d {
        for q in (p + 1)..d {
            let op = crate::majorana::monomial_pauli((1u64 << p) | (1u64 << q), n_modes)?;
            let e = op.expectation(psi) / psi.norm_squared();
            x[(p, q)] = (e * Complex64::new(0.0, -1.0)).re;
            x[(q, p)] = -x[(p, q)];
        }
    }
    Ok(x)
}

/// Random Hamiltonian with N(0, 1) coefficients; every quadratic and
/// quartic term is present with probability `density`.
pub fn random_majorana_hamiltonian(
    n_modes: usize,
    density: f64,
    quadratic: bool,
    rng: &mut StreamRng,
) -> Result<MajoranaHamiltonian> {
    check_modes(n_modes)?;
    let d = 2 * n_modes;
    let mut v = RMat::zeros(d, d);
    if quadratic {
        for p in 0..d {
            for q in (p + 1)..d {
                if rng.random::<f64>() < density {
                    let g = standard_normal(rng);
                    v[(p, q)] = g;
                    v[(q, p)] = -g;
                }
            }
        }
    }
    let mut w = BTreeMap::new();
    for p in 0..d {
        for q in (p + 1)..d {
            for r in (q + 1)..d {
                for s in (r + 1)..d {
                    if rng.random::<f64>() < density {
                        w.insert([p, q, r, s], standard_normal(rng));
                    }
                }
            }
        }
    }
    MajoranaHamiltonian::new(n_modes, RealAntisymmetric::antisymmetrized(&v), w, 0.0)
}

/// Random number-conserving Hamiltonian with Hermitian one- and two-body
/// parts.
pub fn random_number_conserving(n_modes: usize, rng: &mut StreamRng) -> Result<NumberConservingHamiltonian> {
    check_modes(n_modes)?;
    let g = CMat::from_fn(n_modes, n_modes, |_, _| Complex64::new(standard_normal(rng), standard_normal(rng)));
    let vc = (&g + g.adjoint()).map(|z| z * 0.5);
    let mut wc: BTreeMap<[usize; 4], Complex64> = BTreeMap::new();
    for p in 0..n_modes {
        for q in (p + 1)..n_modes {
            for r in 0..n_modes {
                for s in (r + 1)..n_modes {
                    let c = Complex64::new(standard_normal(rng), standard_normal(rng)) * 0.5;
                    *wc.entry([p, q, r, s]).or_insert(C_ZERO) += c;
                    *wc.entry([s, r, q, p]).or_insert(C_ZERO) += c.conj();
                }
            }
        }
    }
    NumberConservingHamiltonian::new(n_modes, vc, wc, standard_normal(rng))
}

/// Random pure Gaussian state: Haar-random frame, random occupations.
pub fn random_pure_gaussian(n_modes: usize, rng: &mut StreamRng) -> GaussianStateSpec {
    let r = crate::linalg::random_orthogonal(2 * n_modes, rng);
    let occupations = (0..n_modes).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect();
    GaussianStateSpec { r, occupations }
}

/// Random Slater determinant with `k` particles and Haar-random orbitals.
pub fn random_slater(n_modes: usize, k: usize, rng: &mut StreamRng) -> SlaterSpec {
    SlaterSpec { particles: k.min(n_modes), u: crate::linalg::random_unitary(n_modes, rng) }
}

/// Largest `|X_ij + X_ji|`, used by tests on assembled matrices.
pub fn antisymmetry_error(x: &RMat) -> f64 {
    antisymmetry_defect(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh_hermitian;
    use crate::rng;

    fn top(h: &DenseHermitian) -> f64 {
        *eigvalsh_hermitian(h).last().unwrap()
    }

    #[test]
    fn single_mode_number_operator() {
        let mut vc = CMat::zeros(1, 1);
        vc[(0, 0)] = Complex64::new(1.0, 0.0);
        let h = NumberConservingHamiltonian::new(1, vc, BTreeMap::new(), 0.0).unwrap();
        let m = to_majorana(&h).unwrap();
        assert!((m.shift() - 0.5).abs() < 1e-15);
        assert!((m.v().matrix()[(0, 1)] - 0.25).abs() < 1e-15);
        let diff = (m.build_dense().unwrap().matrix() - h.build_dense().unwrap().matrix()).camax();
        assert!(diff < 1e-12);
    }

    #[test]
    fn to_majorana_dense_equality_random() {
        let mut r = rng::seeded(40);
        for _ in 0..3 {
            let h = random_number_conserving(3, &mut r).unwrap();
            let m = to_majorana(&h).unwrap();
            let diff = (m.build_dense().unwrap().matrix() - h.build_dense().unwrap().matrix()).camax();
            assert!(diff < 1e-9, "{diff}");
        }
    }

    #[test]
    fn richardson_values() {
        for (n, expected) in [(1, 1.0), (2, 2.0), (3, 4.0)] {
            let h = richardson(n).unwrap();
            let lam = top(&h.build_dense().unwrap());
            assert!((lam - expected).abs() < 1e-9);
            assert!((richardson_lambda_max(n) - expected).abs() < 1e-15);
        }
        assert_eq!(richardson_lambda_max(4), 6.0);
        let single = richardson(1).unwrap();
        assert_eq!(single.wc().len(), 1);
        assert!(single.wc().contains_key(&[1, 0, 0, 1]));
    }

    #[test]
    fn richardson_psd_and_number_conserving() {
        let h = richardson(2).unwrap().build_dense().unwrap();
        assert!(eigvalsh_hermitian(&h)[0] > -1e-12);
        for (i, j) in (0..16).flat_map(|i| (0..16).map(move |j| (i, j))) {
            if h.matrix()[(i, j)].norm() > 0.0 {
                assert_eq!((i as u32).count_ones(), (j as u32).count_ones());
            }
        }
    }

    #[test]
    fn paired_energy() {
        for (n, expected) in [(1, 0.5), (2, 1.5), (3, 3.0), (4, 5.0)] {
            let h = to_majorana(&richardson(n).unwrap()).unwrap();
            let x = covariance_of(&paired_gaussian_state(n).unwrap());
            let e = wick_energy(&h, &x).unwrap();
            assert!((e - expected).abs() < 1e-9, "N={n}: {e}");
        }
    }

    #[test]
    fn paired_state_dense_expectation() {
        let h = richardson(2).unwrap();
        let x = covariance_of(&paired_gaussian_state(2).unwrap());
        let psi = gaussian_statevector(&x).unwrap();
        let e = h.build_dense().unwrap().expectation(&psi);
        assert!((e - 1.5).abs() < 1e-9);
        // stabilizers β γ ψ = i ψ
        let bg = crate::majorana::monomial_pauli(0b0110, 4).unwrap();
        let out = bg.apply(&psi);
        assert!((out - psi.map(|z| z * Complex64::new(0.0, 1.0))).norm() < 1e-9);
    }

    #[test]
    fn wick_zero_covariance() {
        let h = random_majorana_hamiltonian(3, 0.6, true, &mut rng::seeded(1)).unwrap();
        let h = MajoranaHamiltonian { shift: 0.7, ..h };
        assert!((wick_energy(&h, &CovarianceMatrix::zeros(3)).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn wick_matches_dense_on_random_states() {
        let mut r = rng::seeded(41);
        for _ in 0..10 {
            let h = random_majorana_hamiltonian(4, 0.5, true, &mut r).unwrap();
            let spec = random_pure_gaussian(4, &mut r);
            let x = covariance_of(&spec);
            let psi = gaussian_statevector(&x).unwrap();
            let dense = h.build_dense().unwrap().expectation(&psi);
            assert!((dense - wick_energy(&h, &x).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_roundtrip() {
        let mut r = rng::seeded(42);
        for _ in 0..20 {
            let g = RMat::from_fn(8, 8, |_, _| standard_normal(&mut r));
            let a = (&g - g.transpose()) * 0.5;
            let a = &a / (operator_norm(&a) * 1.01);
            let x = CovarianceMatrix::from_matrix(a).unwrap();
            let spec = canonical_form(&x).unwrap();
            assert!((covariance_of(&spec).matrix() - x.matrix()).amax() < 1e-8);
        }
        let zero = canonical_form(&CovarianceMatrix::zeros(3)).unwrap();
        assert!(zero.occupations.iter().all(|&l| (l - 0.5).abs() < 1e-12));
        let vac = canonical_form(&CovarianceMatrix::vacuum(2)).unwrap();
        assert!((covariance_of(&vac).matrix() - CovarianceMatrix::vacuum(2).matrix()).amax() < 1e-12);
        // degenerate spectrum with a kernel
        let mut m = RMat::zeros(6, 6);
        m[(0, 3)] = 0.5;
        m[(3, 0)] = -0.5;
        m[(1, 4)] = 0.5;
        m[(4, 1)] = -0.5;
        let x = CovarianceMatrix::from_matrix(m).unwrap();
        assert!((covariance_of(&canonical_form(&x).unwrap()).matrix() - x.matrix()).amax() < 1e-12);
    }

    #[test]
    fn sample_pure_cases() {
        let x = covariance_of(&paired_gaussian_state(1).unwrap());
        let spec = canonical_form(&x).unwrap();
        let mut r = rng::seeded(43);
        for _ in 0..10 {
            let s = sample_pure(&spec, &mut r);
            assert!((covariance_of(&s).matrix() - x.matrix()).amax() < 1e-9);
        }
        let mixed = canonical_form(&CovarianceMatrix::zeros(2)).unwrap();
        let mut mean = RMat::zeros(4, 4);
        let draws = 4000;
        for _ in 0..draws {
            mean += covariance_of(&sample_pure(&mixed, &mut r)).matrix();
        }
        assert!((mean / draws as f64).amax() < 0.06);
    }

    #[test]
    fn mixed_density_matches_covariance() {
        let mut r = rng::seeded(44);
        let spec = GaussianStateSpec::new(crate::linalg::random_orthogonal(6, &mut r), vec![0.2, 0.9, 0.5]).unwrap();
        let rho = gaussian_density_matrix(&spec).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let x = covariance_of(&spec);
        for p in 0..6 {
            for q in (p + 1)..6 {
                let op = crate::majorana::monomial_pauli((1 << p) | (1 << q), 3).unwrap().to_dense(3).unwrap();
                let e = (&rho * op).trace() * Complex64::new(0.0, -1.0);
                assert!((e.re - x.matrix()[(p, q)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn elimination_preserves_lambda_max() {
        // h = i c_0 c_1: V_01 = 1/2
        let h = MajoranaHamiltonian::from_terms(1, &[(0, 1, 0.5)], &[], 0.0).unwrap();
        let hp = eliminate_linear_fermionic(&h).unwrap();
        assert!(!hp.has_quadratic());
        assert_eq!(hp.quartic().get(&[0, 1, 2, 3]), Some(&1.0));
        assert!((top(&h.build_dense().unwrap()) - 1.0).abs() < 1e-12);
        assert!((top(&hp.build_dense().unwrap()) - 1.0).abs() < 1e-12);

        let mut r = rng::seeded(45);
        for _ in 0..5 {
            let h = random_majorana_hamiltonian(3, 0.6, true, &mut r).unwrap();
            let hp = eliminate_linear_fermionic(&h).unwrap();
            assert!((top(&h.build_dense().unwrap()) - top(&hp.build_dense().unwrap())).abs() < 1e-9);
        }
    }

    #[test]
    fn recover_never_decreases_energy() {
        let mut r = rng::seeded(46);
        for _ in 0..20 {
            let h = random_majorana_hamiltonian(3, 0.6, true, &mut r).unwrap();
            let hp = eliminate_linear_fermionic(&h).unwrap();
            let omega = covariance_of(&random_pure_gaussian(4, &mut r));
            let before = wick_energy(&hp, &omega).unwrap();
            let rec = recover_gaussian(&omega, &h).unwrap();
            assert!(rec.energy >= before - 1e-9);
            assert!(rec.covariance.is_pure(1e-8));
            assert!((wick_energy(&h, &rec.covariance).unwrap() - rec.energy).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_conditioning_matches_dense_projection() {
        let mut r = rng::seeded(47);
        let spec = random_pure_gaussian(3, &mut r);
        let x = covariance_of(&spec);
        let psi = gaussian_statevector(&x).unwrap();
        let parity = crate::majorana::monomial_pauli(0b110000, 3).unwrap().scaled_by_i(3);
        for s in [1.0, -1.0] {
            let (prob, cond) = condition_on_parity(x.matrix(), 4, 5, s);
            let proj = (&psi + parity.apply(&psi).map(|z| z * s)) * Complex64::new(0.5, 0.0);
            assert!((proj.norm_squared() - prob).abs() < 1e-10);
            if prob > 1e-6 {
                let dense = covariance_of_statevector(&proj, 3).unwrap();
                assert!((dense - &cond).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn encoding_zz() {
        let zz = TwoLocalHamiltonian::from_triplets(2, &[(2, 5, 0.5)], &[]).unwrap();
        let enc = encode_qubit_hamiltonian(&zz).unwrap();
        assert_eq!(enc.n_modes(), 3);
        let spec = eigvalsh_hermitian(&enc.build_dense().unwrap());
        let ones = spec.iter().filter(|&&e| (e - 1.0).abs() < 1e-9).count();
        assert_eq!(ones, 4);
        let lin = TwoLocalHamiltonian::from_triplets(1, &[], &[(0, 1.0)]).unwrap();
        assert!(encode_qubit_hamiltonian(&lin).is_err());
    }

    #[test]
    fn slater_basis_properties() {
        let b1 = slater_subspace_basis(1);
        assert_eq!(b1.len(), 1);
        assert_eq!(b1[0], vec![(0, 1, std::f64::consts::FRAC_1_SQRT_2)]);
        let b = slater_subspace_basis(3);
        assert_eq!(b.len(), 9);
        for (i, u) in b.iter().enumerate() {
            for (j, v) in b.iter().enumerate() {
                let dot = sparse_to_dense(u, 6).dot(&sparse_to_dense(v, 6));
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let mut r = rng::seeded(48);
        for k in 0..=3 {
            let s = random_slater(3, k, &mut r);
            assert!(subspace_residual(s.covariance().matrix(), &b) < 1e-9);
        }
    }

    #[test]
    fn slater_covariance_matches_dense() {
        let mut r = rng::seeded(49);
        for k in 0..=3 {
            let s = random_slater(3, k, &mut r);
            let psi = s.statevector().unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let dense = covariance_of_statevector(&psi, 3).unwrap();
            assert!((dense - s.covariance().matrix()).amax() < 1e-12);
            let q = one_body_from_covariance(s.covariance().matrix());
            assert!((q - s.one_body()).camax() < 1e-12);
        }
    }

    #[test]
    fn full_w_antisymmetry() {
        let h = MajoranaHamiltonian::from_terms(2, &[], &[([0, 1, 2, 3], 24.0)], 0.0).unwrap();
        assert_eq!(h.full_w([0, 1, 2, 3]), 1.0);
        assert_eq!(h.full_w([1, 0, 2, 3]), -1.0);
        assert_eq!(h.full_w([3, 2, 1, 0]), 1.0);
        assert_eq!(h.full_w([0, 0, 2, 3]), 0.0);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(MajoranaHamiltonian::from_terms(2, &[(1, 0, 1.0)], &[], 0.0).is_err());
        assert!(MajoranaHamiltonian::from_terms(2, &[], &[([0, 2, 1, 3], 1.0)], 0.0).is_err());
        assert!(MajoranaHamiltonian::from_terms(2, &[], &[([0, 1, 2, 4], 1.0)], 0.0).is_err());
        let mut vc = CMat::zeros(2, 2);
        vc[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(NumberConservingHamiltonian::new(2, vc, BTreeMap::new(), 0.0).is_err());
        let mut wc = BTreeMap::new();
        wc.insert([0, 1, 0, 1], Complex64::new(0.0, 1.0));
        assert!(NumberConservingHamiltonian::new(2, CMat::zeros(2, 2), wc, 0.0).is_err());
        assert!(CovarianceMatrix::from_matrix(RMat::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0])).is_err());
    }
}
