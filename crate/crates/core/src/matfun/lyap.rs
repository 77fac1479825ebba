//! Lyapunov equation solvers and the integrated noise Gramian.
//!
//! Both solvers vectorize the equation with Kronecker products and solve the
//! resulting n^2 x n^2 linear system by LU. That is O(n^6) flops, which is
//! fine for the desk-scale state dimensions this crate targets (n <= 50) and
//! keeps the code free of a Bartels-Stewart implementation.

use nalgebra::DVector;

use super::schur_fun::eigenvalues_of;
use super::{expm_raw, MatError, Matrix, SymMatrix};

/// Near-singularity threshold on the eigenvalue pair sums of the Lyapunov
/// operator, relative to the spectral scale.
const PAIR_SUM_TOL: f64 = 1e-10;

/// Solves `F P + P F' + W = 0` for stable `F`.
pub fn lyap_ct(f: &Matrix, w: &SymMatrix) -> Result<SymMatrix, MatError> {
    let n = check_square_pair(f, w)?;
    let eigs = eigenvalues_of(f)?;
    if let Some(bad) = eigs.iter().find(|l| l.re >= 0.0) {
        return Err(MatError::Unstable { eigenvalue: *bad });
    }
    let scale = eigs.iter().map(|l| l.norm()).fold(0.0_f64, f64::max);
    for (i, li) in eigs.iter().enumerate() {
        for lj in &eigs[i..] {
            let pair_sum = (li + lj).norm();
            if pair_sum < PAIR_SUM_TOL * scale {
                return Err(MatError::IllConditioned { pair_sum });
            }
        }
    }

    let eye = Matrix::identity(n, n);
    let op = eye.kronecker(f) + f.kronecker(&eye);
    let rhs = -DVector::from_column_slice(w.as_matrix().as_slice());
    let p = op.lu().solve(&rhs).ok_or(MatError::Singular)?;
    Ok(SymMatrix::symmetrize(Matrix::from_column_slice(n, n, p.as_slice())))
}

/// Solves `P = A P A' + W` for Schur-stable `A`.
pub fn lyap_dt(a: &Matrix, w: &SymMatrix) -> Result<SymMatrix, MatError> {
    let n = check_square_pair(a, w)?;
    let eigs = eigenvalues_of(a)?;
    if let Some(bad) = eigs.iter().find(|l| l.norm() >= 1.0) {
        return Err(MatError::NotSchurStable { eigenvalue: *bad });
    }
    for (i, li) in eigs.iter().enumerate() {
        for lj in &eigs[i..] {
            let gap = (1.0 - li * lj).norm();
            if gap < PAIR_SUM_TOL {
                return Err(MatError::IllConditioned { pair_sum: gap });
            }
        }
    }

    let eye = Matrix::identity(n * n, n * n);
    let op = eye - a.kronecker(a);
    let rhs = DVector::from_column_slice(w.as_matrix().as_slice());
    let p = op.lu().solve(&rhs).ok_or(MatError::Singular)?;
    Ok(SymMatrix::symmetrize(Matrix::from_column_slice(n, n, p.as_slice())))
}

/// Integrated noise covariance over one sampling interval,
/// `Q = int_0^h exp(F tau) G G' exp(F' tau) dtau`.
///
/// Uses the augmented-exponential method: exponentiate the 2n x 2n block
/// matrix `[[-F, GG'], [0, F']]` over `h` and assemble `Q = E22' E12`, which
/// avoids quadrature entirely. `Q` is nonsingular whenever `(F, G)` is
/// controllable.
pub fn noise_gramian(f: &Matrix, g: &Matrix, h: f64) -> Result<SymMatrix, MatError> {
    let n = f.nrows();
    if f.ncols() != n {
        return Err(MatError::NonSquare { rows: f.nrows(), cols: f.ncols() });
    }
    if g.nrows() != n {
        return Err(MatError::DimensionMismatch(format!(
            "noise gain has {} rows, state dimension is {n}",
            g.nrows()
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(MatError::InvalidArgument("sampling period h must be positive and finite".into()));
    }

    let gg = g * g.transpose();
    let mut block = Matrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-f));
    block.view_mut((0, n), (n, n)).copy_from(&gg);
    block.view_mut((n, n), (n, n)).copy_from(&f.transpose());
    let e = expm_raw(&(block * h));
    let e12 = e.view((0, n), (n, n));
    let e22 = e.view((n, n), (n, n));
    Ok(SymMatrix::symmetrize(e22.transpose() * e12))
}

fn check_square_pair(m: &Matrix, w: &SymMatrix) -> Result<usize, MatError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(MatError::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if w.dim() != n {
        return Err(MatError::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{n}",
            w.dim(),
            w.dim()
        )));
    }
    Ok(n)
}
