//! Numerical tolerances shared by validation, solvers and tests.

/// Symmetry / hermiticity / antisymmetry checks on stored matrices.
pub const VALIDATION: f64 = 1e-12;

/// Relative reconstruction error allowed for eigendecompositions.
pub const EIGH_RECONSTRUCTION: f64 = 1e-9;

/// Orthonormality of eigenvector columns and subspace bases.
pub const ORTHONORMAL: f64 = 1e-10;

/// Agreement between two exact routes to the same real number.
pub const EXACT_MATCH: f64 = 1e-9;

/// Allowed excess of a covariance matrix operator norm over 1.
pub const COVARIANCE_NORM: f64 = 1e-9;

/// Eigenvalues above `-PSD_CLIP` are clipped to zero before a square root.
pub const PSD_CLIP: f64 = 1e-8;

/// Default SDP feasibility tolerance.
pub const SDP_FEAS: f64 = 1e-6;

/// Default SDP relative duality-gap tolerance.
pub const SDP_OBJ: f64 = 1e-7;

/// Default ADMM iteration cap.
pub const SDP_MAX_ITER: usize = 50_000;

/// Ascent oracles stop once a full sweep gains less than this.
pub const ASCENT_GAIN: f64 = 1e-10;
