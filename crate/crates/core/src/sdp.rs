//! Semidefinite programs solved by dual ADMM with PSD projection.
//!
//! Problems are stated as maximization of `⟨C, X⟩` over symmetric `X ⪰ 0`
//! subject to linear equalities `⟨A_k, X⟩ = b_k`, dominance constraints
//! `T_m(X) ⪯ B_m` and, optionally, `X` restricted to a subspace spanned by
//! an orthonormal basis. Dominance constraints are turned into equalities
//! on a block-diagonal lifted variable `diag(X, S_1, …)` with PSD slacks
//! `S_m = B_m − T_m(X)`. A subspace restriction is applied by compressing
//! every matrix to the basis coordinates before solving.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigh_unchecked, RMat, RealSymmetric};
use crate::qubit::TwoLocalHamiltonian;
use crate::tol;

/// Sparse symmetric matrix stored as its upper triangle `(i, j, v)` with
/// `i <= j`; `v` is the value of both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymSparse {
    entries: BTreeMap<(usize, usize), f64>,
}

impl SymSparse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `v` to entries `(i, j)` and `(j, i)` (once if `i == j`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        *self.entries.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
    }

    pub fn from_dense(m: &RMat) -> Self {
        let mut s = Self::new();
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                if v != 0.0 {
                    s.add(i, j, v);
                }
            }
        }
        s
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().map(|&(_, j)| j).max()
    }

    /// `⟨self, x⟩ = Σ_ij s_ij x_ij`.
    pub fn inner(&self, x: &RMat) -> f64 {
        self.entries()
            .map(|(i, j, v)| if i == j { v * x[(i, i)] } else { v * (x[(i, j)] + x[(j, i)]) })
            .sum()
    }

    pub fn to_dense(&self, dim: usize) -> RMat {
        let mut m = RMat::zeros(dim, dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries().map(|(i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum()
    }

    fn drop_small(mut self, eps: f64) -> Self {
        self.entries.retain(|_, v| v.abs() > eps);
        self
    }
}

/// `T(X) ⪯ B` where `T(X)_ab = ⟨G_ab, X⟩` for every `a <= b < bound.dim()`.
#[derive(Clone, Debug)]
pub struct Dominance {
    pub map: Vec<(usize, usize, SymSparse)>,
    pub bound: RMat,
}

impl Dominance {
    pub fn apply(&self, x: &RMat) -> RMat {
        let m = self.bound.nrows();
        let mut t = RMat::zeros(m, m);
        for (a, b, g) in &self.map {
            let v = g.inner(x);
            t[(*a, *b)] = v;
            t[(*b, *a)] = v;
        }
        t
    }

    /// Largest violation `max(0, −λ_min(B − T(X)))`.
    pub fn violation(&self, x: &RMat) -> f64 {
        let slack = &self.bound - self.apply(x);
        let lam = eigh_unchecked(&((&slack + slack.transpose()) * 0.5)).min_value();
        (-lam).max(0.0)
    }
}

/// Orthonormal basis of a subspace of `R^ambient`, one sparse column per
/// basis vector.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    pub columns: Vec<Vec<(usize, f64)>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> RMat {
        let mut b = RMat::zeros(self.ambient, self.columns.len());
        for (k, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                b[(i, k)] += v;
            }
        }
        b
    }

    /// Largest entry of `BᵀB − I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let b = self.to_dense();
        (b.transpose() * &b - RMat::identity(self.dim(), self.dim())).amax()
    }

    fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.ambient];
        for (k, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                rows[i].push((k, v));
            }
        }
        rows
    }

    /// `Bᵀ A B` computed sparsely.
    pub fn compress(&self, a: &SymSparse) -> SymSparse {
        compress_with_rows(&self.rows(), a)
    }

    /// `B Y Bᵀ`.
    pub fn expand(&self, y: &RMat) -> RMat {
        let b = self.to_dense();
        &b * y * b.transpose()
    }
}

fn compress_with_rows(rows: &[Vec<(usize, f64)>], a: &SymSparse) -> SymSparse {
    let mut out = SymSparse::new();
    for (i, j, v) in a.entries() {
        for &(k, bik) in &rows[i] {
            for &(l, bjl) in &rows[j] {
                let w = v * bik * bjl;
                if i == j {
                    // contributes w to (k, l); add() symmetrizes, so halve off-diagonal
                    if k == l {
                        out.add(k, l, w);
                    } else {
                        out.add(k, l, 0.5 * w);
                    }
                } else {
                    // (i, j) and (j, i) both present in A
                    if k == l {
                        out.add(k, l, 2.0 * w);
                    } else {
                        out.add(k, l, w);
                    }
                }
            }
        }
    }
    out.drop_small(1e-15)
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: SymSparse,
    pub equalities: Vec<(SymSparse, f64)>,
    pub dominance: Vec<Dominance>,
    pub subspace: Option<Subspace>,
}

impl SdpProblem {
    pub fn new(dim: usize, objective: SymSparse) -> Self {
        Self { dim, objective, equalities: Vec::new(), dominance: Vec::new(), subspace: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::validation("SDP dimension must be positive"));
        }
        let check = |s: &SymSparse| -> Result<()> {
            match s.max_index() {
                Some(j) if j >= self.dim => Err(Error::OutOfRange { index: j, bound: self.dim }),
                _ => Ok(()),
            }
        };
        check(&self.objective)?;
        for (a, b) in &self.equalities {
            check(a)?;
            if !b.is_finite() {
                return Err(Error::validation("non-finite equality right-hand side"));
            }
        }
        for d in &self.dominance {
            let m = d.bound.nrows();
            if d.bound.ncols() != m || crate::linalg::asymmetry(&d.bound) > tol::VALIDATION {
                return Err(Error::validation("dominance bound must be symmetric"));
            }
            for (a, b, g) in &d.map {
                if *a >= m || *b >= m {
                    return Err(Error::OutOfRange { index: (*a).max(*b), bound: m });
                }
                check(g)?;
            }
        }
        if let Some(sub) = &self.subspace {
            if sub.ambient != self.dim {
                return Err(Error::Dimension { expected: self.dim, got: sub.ambient });
            }
            if sub.dim() == 0 {
                return Err(Error::validation("subspace basis is empty"));
            }
            let defect = sub.orthonormality_defect();
            if defect > tol::ORTHONORMAL {
                return Err(Error::validation(format!(
                    "subspace basis not orthonormal (defect {defect:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// The same problem in subspace coordinates (identity if unrestricted).
    pub fn compressed(&self) -> SdpProblem {
        let Some(sub) = &self.subspace else {
            return self.clone();
        };
        let rows = sub.rows();
        SdpProblem {
            dim: sub.dim(),
            objective: compress_with_rows(&rows, &self.objective),
            equalities: self
                .equalities
                .iter()
                .map(|(a, b)| (compress_with_rows(&rows, a), *b))
                .collect(),
            dominance: self
                .dominance
                .iter()
                .map(|d| Dominance {
                    map: d
                        .map
                        .iter()
                        .map(|(a, b, g)| (*a, *b, compress_with_rows(&rows, g)))
                        .collect(),
                    bound: d.bound.clone(),
                })
                .collect(),
            subspace: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub obj_tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty; rescaled adaptively from the residual ratio.
    pub penalty: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { feas_tol: tol::SDP_FEAS, obj_tol: tol::SDP_OBJ, max_iter: tol::SDP_MAX_ITER, penalty: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Optimal variable in solver (compressed) coordinates.
    pub x: RealSymmetric,
    pub objective: f64,
    /// Dual objective `bᵀy`; equals `objective` at optimality.
    pub dual_objective: f64,
    /// Largest equality residual, dominance violation or PSD violation.
    pub primal_residual: f64,
    /// Relative dual infeasibility at the last iterate.
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    /// Multipliers of the equalities (dominance entries follow, in order).
    pub dual: Vec<f64>,
    pub dominance_violation: f64,
}

impl SdpSolution {
    pub fn converged(&self) -> bool {
        self.status == SdpStatus::Converged
    }
}

/// One term of a lifted constraint: block, entry `(i <= j)`, value.
type Term = (usize, usize, usize, f64);

struct Lifted {
    sizes: Vec<usize>,
    cost: Vec<RMat>,
    constraints: Vec<Vec<Term>>,
    rhs: Vec<f64>,
}

impl Lifted {
    fn build(p: &SdpProblem) -> Self {
        let mut sizes = vec![p.dim];
        let mut constraints: Vec<Vec<Term>> = Vec::new();
        let mut rhs = Vec::new();
        for (a, b) in &p.equalities {
            constraints.push(a.entries().map(|(i, j, v)| (0, i, j, v)).collect());
            rhs.push(*b);
        }
        for d in &p.dominance {
            let block = sizes.len();
            let m = d.bound.nrows();
            sizes.push(m);
            for (a, b, g) in &d.map {
                let mut terms: Vec<Term> = g.entries().map(|(i, j, v)| (0, i, j, v)).collect();
                let (lo, hi) = ((*a).min(*b), (*a).max(*b));
                terms.push((block, lo, hi, if lo == hi { 1.0 } else { 0.5 }));
                constraints.push(terms);
                rhs.push(d.bound[(lo, hi)]);
            }
        }
        let mut cost: Vec<RMat> = sizes.iter().map(|&s| RMat::zeros(s, s)).collect();
        // minimize ⟨-C, X⟩
        cost[0] = -p.objective.to_dense(p.dim);
        Self { sizes, cost, constraints, rhs }
    }

    fn apply(&self, z: &[RMat]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|&(blk, i, j, v)| {
                        if i == j {
                            v * z[blk][(i, i)]
                        } else {
                            v * (z[blk][(i, j)] + z[blk][(j, i)])
                        }
                    })
                    .sum()
            })
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<RMat> {
        let mut out: Vec<RMat> = self.sizes.iter().map(|&s| RMat::zeros(s, s)).collect();
        for (terms, &yk) in self.constraints.iter().zip(y) {
            for &(blk, i, j, v) in terms {
                out[blk][(i, j)] += yk * v;
                if i != j {
                    out[blk][(j, i)] += yk * v;
                }
            }
        }
        out
    }

    /// Pseudo-inverse of `A A*`.
    fn gram_pinv(&self) -> RMat {
        let m = self.constraints.len();
        let mut by_pos: BTreeMap<(usize, usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
        for (k, terms) in self.constraints.iter().enumerate() {
            for &(blk, i, j, v) in terms {
                by_pos.entry((blk, i, j)).or_default().push((k, v));
            }
        }
        let mut g = RMat::zeros(m, m);
        for ((_, i, j), list) in &by_pos {
            let mult = if i == j { 1.0 } else { 2.0 };
            for &(k, vk) in list {
                for &(l, vl) in list {
                    g[(k, l)] += mult * vk * vl;
                }
            }
        }
        if m == 0 {
            return g;
        }
        let e = eigh_unchecked(&g);
        let cut = 1e-12 * e.max_value().max(1e-300);
        e.reconstruct_with(|l| if l > cut { 1.0 / l } else { 0.0 })
    }
}

fn frob(blocks: &[RMat]) -> f64 {
    blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
}

fn block_dot(a: &[RMat], b: &[RMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// Solve `p` (maximization). Non-convergence is reported through
/// [`SdpSolution::status`], never as an error.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    let cp = p.compressed();
    let lifted = Lifted::build(&cp);
    let pinv = lifted.gram_pinv();
    let b = &lifted.rhs;
    let m = b.len();
    let c_norm = frob(&lifted.cost);

    let mut x: Vec<RMat> = lifted.sizes.iter().map(|&s| RMat::zeros(s, s)).collect();
    let mut s: Vec<RMat> = x.clone();
    let mut y = vec![0.0; m];
    let mut mu = opts.penalty.max(1e-8);
    let mut status = SdpStatus::MaxIterations;
    let mut pinf = f64::INFINITY;
    let mut dinf = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut ratio_acc = 0.0f64;

    for it in 1..=opts.max_iter {
        iterations = it;
        let ax = lifted.apply(&x);
        let cms: Vec<RMat> = lifted.cost.iter().zip(&s).map(|(c, sb)| c - sb).collect();
        let acs = lifted.apply(&cms);
        let rhs: Vec<f64> = (0..m).map(|k| mu * (b[k] - ax[k]) + acs[k]).collect();
        let rhs_v = nalgebra::DVector::from_vec(rhs);
        y = (&pinv * rhs_v).iter().copied().collect();
        let aty = lifted.adjoint(&y);

        let mut dual_res = 0.0;
        for blk in 0..lifted.sizes.len() {
            let v = &lifted.cost[blk] - &aty[blk] - &x[blk] * mu;
            let v = (&v + v.transpose()) * 0.5;
            let e = eigh_unchecked(&v);
            let s_new = e.reconstruct_with(|l| l.max(0.0));
            let x_new = e.reconstruct_with(|l| (-l).max(0.0) / mu);
            let r = &lifted.cost[blk] - &aty[blk] - &s_new;
            dual_res += r.norm_squared();
            s[blk] = s_new;
            x[blk] = x_new;
        }
        dinf = dual_res.sqrt() / (1.0 + c_norm);
        let ax = lifted.apply(&x);
        pinf = ax.iter().zip(b).map(|(a, bb)| (a - bb).abs()).fold(0.0, f64::max);
        let pobj = block_dot(&lifted.cost, &x);
        let dobj: f64 = y.iter().zip(b).map(|(a, bb)| a * bb).sum();
        gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if !pinf.is_finite() || !dinf.is_finite() || frob(&x) > 1e12 {
            status = SdpStatus::Diverged;
            break;
        }
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && gap <= opts.obj_tol {
            status = SdpStatus::Converged;
            break;
        }
        // penalty adaptation on the geometric mean of recent residual ratios
        ratio_acc += ((pinf + 1e-300) / (dinf + 1e-300)).ln();
        if it % 20 == 0 {
            let mean = ratio_acc / 20.0;
            ratio_acc = 0.0;
            if mean > 1.5 {
                mu = (mu * 2.0).min(1e8);
            } else if mean < -1.5 {
                mu = (mu / 2.0).max(1e-8);
            }
        }
    }

    let x0 = RealSymmetric::symmetrized(&x[0]);
    let objective = -lifted.cost[0].dot(x0.matrix());
    let dual_objective = -y.iter().zip(b).map(|(a, bb)| a * bb).sum::<f64>();
    let dominance_violation = cp
        .dominance
        .iter()
        .map(|d| d.violation(x0.matrix()))
        .fold(0.0, f64::max);
    let eq_res = cp
        .equalities
        .iter()
        .map(|(a, bb)| (a.inner(x0.matrix()) - bb).abs())
        .fold(0.0, f64::max);
    Ok(SdpSolution {
        x: x0,
        objective,
        dual_objective,
        primal_residual: eq_res.max(dominance_violation).max(pinf.min(f64::MAX)),
        dual_residual: dinf,
        gap,
        iterations,
        status,
        dual: y.iter().map(|v| -v).collect(),
        dominance_violation,
    })
}

/// Moment relaxation of a 2-local Hamiltonian without linear terms:
/// maximize `Tr(C M)` over `M ⪰ 0` with unit diagonal.
#[derive(Clone, Debug)]
pub struct MomentSolution {
    /// Unit-diagonal PSD moment matrix (3n × 3n) after polishing.
    pub m: RealSymmetric,
    /// `Tr(C M)` of the polished matrix.
    pub objective: f64,
    /// Dual bound `Σ y_i + 3n λ_max(C − Diag y)`; always `≥ λ_max(H)`.
    pub upper_bound: f64,
    pub solver: SdpSolution,
}

pub fn moment_problem(h: &TwoLocalHamiltonian) -> SdpProblem {
    let dim = 3 * h.n_qubits();
    let mut c = SymSparse::new();
    for (i, j, v) in h.couplings() {
        c.add(i, j, v);
    }
    let mut p = SdpProblem::new(dim.max(1), c);
    for i in 0..dim {
        let mut a = SymSparse::new();
        a.add(i, i, 1.0);
        p.equalities.push((a, 1.0));
    }
    p
}

pub fn solve_moment_sdp(h: &TwoLocalHamiltonian, opts: &SolverOptions) -> Result<MomentSolution> {
    if h.has_linear() {
        return Err(Error::validation(
            "moment relaxation requires a Hamiltonian without linear terms",
        ));
    }
    if h.n_qubits() == 0 {
        return Err(Error::validation("Hamiltonian has no qubits"));
    }
    let p = moment_problem(h);
    let sol = solve(&p, opts)?;
    let c = h.coupling_matrix();
    let dim = c.nrows();

    // polish: PSD part rescaled to exact unit diagonal
    let plus = crate::linalg::psd_project(&sol.x);
    let d: Vec<f64> = (0..dim).map(|i| plus.matrix()[(i, i)].max(1e-300).sqrt()).collect();
    let mut polished = RMat::from_fn(dim, dim, |i, j| plus.matrix()[(i, j)] / (d[i] * d[j]));
    for i in 0..dim {
        polished[(i, i)] = 1.0;
    }
    let m = RealSymmetric::symmetrized(&polished);
    let objective = c.dot(m.matrix());

    let mut shifted = c.clone();
    for i in 0..dim {
        shifted[(i, i)] -= sol.dual[i];
    }
    let lam = eigh(&RealSymmetric::symmetrized(&shifted)).max_value();
    let upper_bound = sol.dual.iter().sum::<f64>() + dim as f64 * lam;
    Ok(MomentSolution { m, objective, upper_bound, solver: sol })
}

/// Rows `v^i` with `⟨v^i, v^j⟩ = M_ij`, from the eigendecomposition of `M`
/// with eigenvalues below `rank_tol` dropped and rows renormalized.
pub fn gram_factor(m: &RealSymmetric, rank_tol: f64) -> Result<RMat> {
    let e = eigh(m);
    let scale = 1.0f64.max(e.max_value().abs());
    if e.min_value() < -rank_tol.max(tol::PSD_CLIP) * scale {
        return Err(Error::validation(format!(
            "moment matrix is indefinite (min eigenvalue {:.3e})",
            e.min_value()
        )));
    }
    let keep: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > rank_tol).collect();
    let n = m.dim();
    let mut v = RMat::zeros(n, keep.len().max(1));
    for (c, &k) in keep.iter().enumerate() {
        let s = e.values[k].sqrt();
        for i in 0..n {
            v[(i, c)] = e.vectors[(i, k)] * s;
        }
    }
    for i in 0..n {
        let norm = v.row(i).norm();
        if norm > 0.0 {
            let scaled = v.row(i) / norm;
            v.set_row(i, &scaled);
        }
    }
    Ok(v)
}
