//! Extraction of the deterministic dynamic relations hidden in a
//! rank-deficient spectral density.
//!
//! For a valid model with `m < p`, the outputs split into `m` "input"
//! components `u` driving the remaining `p - m` through a proper transfer
//! function `T(s)`, so that the kernel identity `(-T(iw), I) Phi(iw) = 0`
//! holds on the whole axis. The split requires choosing `m` rows of `H`
//! whose product with `G` is invertible; the choice is free, and this
//! module picks it deterministically.

use num_complex::Complex64;

use super::spectrum::{ct_factor_at, to_complex, CMatrix};
use super::{CtModel, ModelError};
use crate::matfun::{self, Matrix};

/// State-space quadruple `(A, B, C, D)` representing
/// `C (sI - A)^{-1} B + D`, used for the `T` and `M` factors of the
/// decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

impl Realization {
    /// Evaluates the transfer function at a complex point.
    pub fn eval(&self, s: Complex64) -> CMatrix {
        let n = self.a.nrows();
        if self.c.nrows() == 0 {
            return CMatrix::zeros(0, self.b.ncols());
        }
        if n == 0 {
            return to_complex(&self.d);
        }
        let arg = CMatrix::from_diagonal_element(n, n, s) - to_complex(&self.a);
        let x = arg.lu().solve(&to_complex(&self.b)).expect("evaluation point is not a pole");
        to_complex(&self.c) * x + to_complex(&self.d)
    }
}

/// Result of splitting the outputs into inputs `u` and dependents `y`.
#[derive(Debug, Clone)]
pub struct RelationDecomposition {
    /// Rows of `H` forming `u` (ascending). `H0 G` is invertible.
    pub input_indices: Vec<usize>,
    /// Remaining rows, forming `y` (ascending).
    pub output_indices: Vec<usize>,
    /// Closed-loop matrix `Gamma = F - G K H0 F` with `K = (H0 G)^{-1}`.
    /// `H0 Gamma = 0`, so it carries (at least) `m` eigenvalues at zero.
    pub gamma: Matrix,
    /// Realization of the relation transfer function from `u` to `y`: the
    /// observable restriction of `(Gamma, G K, H1 Gamma, H1 G K)`. The
    /// discarded modes are the zero eigenvalues of `Gamma`, unobservable
    /// through `H1 Gamma`; restricting them away removes the matching
    /// removable poles so `T` stays evaluable on the whole axis, `s = 0`
    /// included.
    pub t_real: Realization,
    /// The common factor `(F, G, H0 F, H0 G)`.
    pub m_real: Realization,
    /// Number of deterministic relations, `p - m`.
    pub relation_count: usize,
}

/// Pivot guard: an earlier row is preferred unless it is more than this
/// factor closer to dependence than the best remaining candidate.
const PIVOT_GUARD: f64 = 1e-3;

/// Splits the outputs so that `H0 G` is invertible and returns state-space
/// realizations of the relation transfer function `T(s)` and the common
/// factor `M(s)`.
///
/// Row selection is a greedy pivoted elimination on the rows of `H G`,
/// preferring natural row order and deviating only when an early row is
/// nearly dependent on the rows already chosen. A caller-supplied
/// permutation of `0..p` overrides the choice: its first `m` entries become
/// the input rows.
pub fn decompose_relations(
    model: &CtModel,
    row_order_hint: Option<&[usize]>,
) -> Result<RelationDecomposition, ModelError> {
    let (p, m, n) = (model.p(), model.m(), model.n());
    let hg = model.h() * model.g();
    let hg_rank = matfun::numerical_rank(&hg, matfun::tol::RANK_TOL);
    if hg_rank < m {
        return Err(ModelError::NoInvertiblePartition { rank: hg_rank, need: m });
    }

    let mut input_indices = match row_order_hint {
        Some(hint) => {
            let mut seen = vec![false; p];
            if hint.len() != p || hint.iter().any(|&i| i >= p || std::mem::replace(&mut seen[i], true)) {
                return Err(ModelError::InvalidHint(p));
            }
            hint[..m].to_vec()
        }
        None => select_pivot_rows(&hg, m),
    };
    input_indices.sort_unstable();
    let output_indices: Vec<usize> = (0..p).filter(|i| !input_indices.contains(i)).collect();

    let h0 = select_rows(model.h(), &input_indices);
    let h1 = select_rows(model.h(), &output_indices);
    let h0g = &h0 * model.g();
    let k = h0g.clone().lu().try_inverse().ok_or(ModelError::NoInvertiblePartition {
        rank: matfun::numerical_rank(&h0g, matfun::tol::RANK_TOL),
        need: m,
    })?;

    let gk = model.g() * &k;
    let gamma = model.f() - &gk * &h0 * model.f();
    let t_c = &h1 * &gamma;
    let basis = observable_basis(&gamma, &t_c);
    let t_real = Realization {
        a: basis.transpose() * &gamma * &basis,
        b: basis.transpose() * &gk,
        c: t_c * &basis,
        d: &h1 * &gk,
    };
    let m_real = Realization {
        a: model.f().clone(),
        b: model.g().clone(),
        c: &h0 * model.f(),
        d: h0g,
    };
    let _ = n;
    Ok(RelationDecomposition {
        input_indices,
        output_indices,
        gamma,
        t_real,
        m_real,
        relation_count: p - m,
    })
}

/// Greedy row selection on `hg`: at each step takes the first row whose
/// component orthogonal to the span of the chosen rows is within a factor
/// [`PIVOT_GUARD`] of the best remaining one.
fn select_pivot_rows(hg: &Matrix, m: usize) -> Vec<usize> {
    let p = hg.nrows();
    let mut residual: Vec<nalgebra::DVector<f64>> =
        (0..p).map(|i| hg.row(i).transpose().into_owned()).collect();
    let mut chosen = Vec::with_capacity(m);
    let mut available: Vec<usize> = (0..p).collect();
    for _ in 0..m {
        let best = available.iter().map(|&i| residual[i].norm()).fold(0.0_f64, f64::max);
        let pick = available
            .iter()
            .copied()
            .find(|&i| residual[i].norm() >= PIVOT_GUARD * best)
            .expect("rank precondition guarantees a usable pivot");
        let dir = residual[pick].normalize();
        for &i in &available {
            if i != pick {
                let proj = residual[i].dot(&dir);
                residual[i] -= &dir * proj;
            }
        }
        chosen.push(pick);
        available.retain(|&i| i != pick);
    }
    chosen
}

/// Orthonormal basis (n x k) of the observable subspace of the pair
/// `(a, c)`, from an SVD of the stacked observability matrix. The
/// unobservable subspace is `a`-invariant, so restricting `a`, `b`, `c` to
/// this basis reproduces the transfer function exactly.
fn observable_basis(a: &Matrix, c: &Matrix) -> Matrix {
    let n = a.nrows();
    if c.nrows() == 0 {
        return Matrix::zeros(n, 0);
    }
    let rows = c.nrows();
    let mut stacked = Matrix::zeros(rows * n, n);
    let mut block = c.clone();
    for k in 0..n {
        stacked.view_mut((k * rows, 0), (rows, n)).copy_from(&block);
        block = &block * a;
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("SVD with V requested");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > matfun::tol::RANK_TOL * smax.max(f64::MIN_POSITIVE))
        .count();
    v_t.rows(0, rank).transpose()
}

fn select_rows(m: &Matrix, rows: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(rows.len(), m.ncols());
    for (k, &i) in rows.iter().enumerate() {
        out.row_mut(k).copy_from(&m.row(i));
    }
    out
}

/// Largest relative kernel residual `||L Phi|| / ||Phi||` over the grid,
/// with `L(iw) = (-T(iw), I)` acting on the density reordered so the input
/// rows come first. Values at the level of [`matfun::tol::TAU_FUN`] confirm
/// the decomposition.
pub fn kernel_residual(decomp: &RelationDecomposition, model: &CtModel, omegas: &[f64]) -> f64 {
    let p = model.p();
    let m = decomp.input_indices.len();
    if p == m {
        return 0.0;
    }
    let perm: Vec<usize> =
        decomp.input_indices.iter().chain(decomp.output_indices.iter()).copied().collect();

    let mut worst: f64 = 0.0;
    for &w in omegas {
        let s = Complex64::new(0.0, w);
        let v = ct_factor_at(model, s);
        let phi = &v * v.adjoint();
        let mut phi_reordered = CMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                phi_reordered[(i, j)] = phi[(perm[i], perm[j])];
            }
        }
        let t = decomp.t_real.eval(s);
        let mut kernel = CMatrix::zeros(p - m, p);
        for i in 0..p - m {
            for j in 0..m {
                kernel[(i, j)] = -t[(i, j)];
            }
            kernel[(i, m + i)] = Complex64::new(1.0, 0.0);
        }
        let product = kernel * phi_reordered.clone();
        let num = product.singular_values().max();
        let den = phi_reordered.singular_values().max();
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    worst
}
