//! Dense real/complex linear algebra shared by every other module.
//!
//! Storage is `nalgebra::DMatrix`. The checked newtypes ([`RealSymmetric`],
//! [`RealAntisymmetric`], [`DenseHermitian`]) validate their structural
//! invariant once at construction so downstream code can rely on it.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{standard_normal, StreamRng};
use crate::tol;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

fn check_square<T: nalgebra::Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::validation(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::validation("matrix dimension must be positive"));
    }
    Ok(m.nrows())
}

/// Largest |m_ij - m_ji|.
pub fn asymmetry(m: &RMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest |m_ij + m_ji| (including the diagonal).
pub fn antisymmetry_defect(m: &RMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest |m_ij - conj(m_ji)|.
pub fn non_hermiticity(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSymmetric(RMat);

impl RealSymmetric {
    pub fn new(m: RMat) -> Result<Self> {
        check_square(&m)?;
        let scale = 1.0f64.max(m.amax());
        let defect = asymmetry(&m);
        if defect > tol::VALIDATION * scale {
            return Err(Error::validation(format!(
                "matrix is not symmetric (defect {defect:.3e})"
            )));
        }
        Ok(Self(m))
    }

    /// Symmetrize `(m + mᵀ)/2` without checking.
    pub fn symmetrized(m: &RMat) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn identity(dim: usize) -> Self {
        Self(RMat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    pub fn into_inner(self) -> RMat {
        self.0
    }
}

/// Real antisymmetric matrix of even dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct RealAntisymmetric(RMat);

impl RealAntisymmetric {
    pub fn new(m: RMat) -> Result<Self> {
        let n = check_square(&m)?;
        if n % 2 != 0 {
            return Err(Error::validation(format!(
                "antisymmetric matrix must have even dimension, got {n}"
            )));
        }
        let scale = 1.0f64.max(m.amax());
        let defect = antisymmetry_defect(&m);
        if defect > tol::VALIDATION * scale {
            return Err(Error::validation(format!(
                "matrix is not antisymmetric (defect {defect:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(RMat::zeros(dim, dim))
    }

    /// `(m - mᵀ)/2` without checking.
    pub fn antisymmetrized(m: &RMat) -> Self {
        Self((m - m.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    pub fn into_inner(self) -> RMat {
        self.0
    }
}

/// Complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian(CMat);

impl DenseHermitian {
    pub fn new(m: CMat) -> Result<Self> {
        check_square(&m)?;
        let scale = 1.0f64.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let defect = non_hermiticity(&m);
        if defect > tol::VALIDATION * scale {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `⟨ψ|H|ψ⟩` for a (not necessarily normalized) vector.
    pub fn expectation(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.0 * psi)).re
    }
}

/// Eigendecomposition with eigenvalues sorted ascending and the matching
/// orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh<T: nalgebra::Scalar> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> Eigh<T> {
    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    /// Column of the largest eigenvalue.
    pub fn top_vector(&self) -> DVector<T> {
        self.vectors.column(self.values.len() - 1).into_owned()
    }

    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = T::from_real(f(lam));
            for i in 0..n {
                scaled[(i, k)] *= w.clone();
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

fn sorted_eigh<T: ComplexField<RealField = f64>>(m: DMatrix<T>) -> Eigh<T> {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])].clone());
    Eigh { values, vectors }
}

/// Eigendecomposition of a real symmetric matrix.
pub fn eigh(m: &RealSymmetric) -> Eigh<f64> {
    sorted_eigh(m.0.clone())
}

/// Eigendecomposition of a complex Hermitian matrix.
pub fn eigh_hermitian(m: &DenseHermitian) -> Eigh<Complex64> {
    sorted_eigh(m.0.clone())
}

/// Eigendecomposition of a matrix already known to be symmetric; only the
/// lower triangle is read.
pub(crate) fn eigh_unchecked(m: &RMat) -> Eigh<f64> {
    sorted_eigh(m.clone())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh_hermitian(m: &DenseHermitian) -> Vec<f64> {
    let mut v: Vec<f64> = m.0.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest singular value.
pub fn operator_norm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to 0.
pub fn psd_project(m: &RealSymmetric) -> RealSymmetric {
    let e = eigh(m);
    RealSymmetric::symmetrized(&e.reconstruct_with(|l| l.max(0.0)))
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-PSD_CLIP, 0)`
/// are clipped; anything more negative is rejected.
pub fn psd_sqrt(m: &RealSymmetric) -> Result<RealSymmetric> {
    let e = eigh(m);
    let scale = 1.0f64.max(e.values.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    if e.min_value() < -tol::PSD_CLIP * scale {
        return Err(Error::validation(format!(
            "matrix is indefinite (min eigenvalue {:.3e})",
            e.min_value()
        )));
    }
    Ok(RealSymmetric::symmetrized(
        &e.reconstruct_with(|l| l.max(0.0).sqrt()),
    ))
}

/// Vector of `dim` i.i.d. standard normals drawn from `rng`.
pub fn gaussian_vector(dim: usize, rng: &mut StreamRng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| standard_normal(rng))
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal(dim: usize, rng: &mut StreamRng) -> RMat {
    let g = RMat::from_fn(dim, dim, |_, _| standard_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Haar-random unitary matrix.
pub fn random_unitary(dim: usize, rng: &mut StreamRng) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Frobenius inner product `Σ a_ij b_ij`.
pub fn frobenius_dot(a: &RMat, b: &RMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
