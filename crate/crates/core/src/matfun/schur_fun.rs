//! Principal matrix logarithm and q-th root via a real Schur form.
//!
//! The logarithm uses inverse scaling and squaring: square roots of the
//! quasi-triangular factor are taken until it is close to the identity, a
//! Pade-class approximant of `log(I + X)` (Gauss-Legendre partial fractions)
//! is applied, and the result is scaled back. Both functions reject any
//! spectrum touching the closed negative real axis, where no principal
//! branch exists.

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use super::{norm_1, MatError, Matrix};

// 8-point Gauss-Legendre nodes/weights on [0,1]; the induced rational
// approximant of log(1+x) is accurate to ~1e-17 for |x| <= 0.3.
const GL_NODES: [f64; 8] = [
    0.019855071751231884,
    0.10166676129318664,
    0.2372337950418355,
    0.40828267875217505,
    0.5917173212478249,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL_WEIGHTS: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668723,
    0.15685332293894372,
    0.18134189168918097,
    0.18134189168918097,
    0.15685332293894372,
    0.11119051722668723,
    0.05061426814518813,
];

/// Threshold on ||T - I||_1 below which the log approximant is applied.
const LOG_SERIES_RADIUS: f64 = 0.25;
const MAX_SQRT_STEPS: usize = 64;

/// Real Schur form with exact-zero subdiagonals between blocks and every
/// 2x2 diagonal block holding a complex conjugate eigenvalue pair.
struct QuasiSchur {
    q: Matrix,
    t: Matrix,
    /// (start index, block size) pairs, sizes 1 or 2.
    blocks: Vec<(usize, usize)>,
}

fn quasi_schur(a: &Matrix) -> Result<QuasiSchur, MatError> {
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| MatError::InvalidArgument("Schur iteration failed to converge".into()))?;
    let (mut q, mut t) = schur.unpack();
    let n = t.nrows();

    // Flush negligible subdiagonals so the block scan is unambiguous.
    for i in 0..n.saturating_sub(1) {
        let scale = t[(i, i)].abs() + t[(i + 1, i + 1)].abs();
        if t[(i + 1, i)].abs() <= f64::EPSILON * scale {
            t[(i + 1, i)] = 0.0;
        }
    }

    // Split any 2x2 block whose eigenvalues are actually real.
    let mut i = 0;
    while i + 1 < n {
        if t[(i + 1, i)] == 0.0 {
            i += 1;
            continue;
        }
        let (a11, a12, a21, a22) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let half_diff = 0.5 * (a11 - a22);
        let disc = half_diff * half_diff + a12 * a21;
        if disc >= 0.0 {
            // Real pair: rotate so the block becomes triangular.
            let sgn = if half_diff >= 0.0 { 1.0 } else { -1.0 };
            let v0 = half_diff + sgn * disc.sqrt();
            let v1 = a21;
            let norm = v0.hypot(v1);
            let (c, s) = (v0 / norm, v1 / norm);
            givens_similarity(&mut t, &mut q, i, c, s);
            t[(i + 1, i)] = 0.0;
        }
        i += 2;
    }

    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    Ok(QuasiSchur { q, t, blocks })
}

/// Applies the rotation G = [[c, -s], [s, c]] as a similarity on rows and
/// columns (i, i+1) of `t`, accumulating into `q`.
fn givens_similarity(t: &mut Matrix, q: &mut Matrix, i: usize, c: f64, s: f64) {
    let n = t.nrows();
    for col in 0..n {
        let (x, y) = (t[(i, col)], t[(i + 1, col)]);
        t[(i, col)] = c * x + s * y;
        t[(i + 1, col)] = -s * x + c * y;
    }
    for row in 0..n {
        let (x, y) = (t[(row, i)], t[(row, i + 1)]);
        t[(row, i)] = c * x + s * y;
        t[(row, i + 1)] = -s * x + c * y;
    }
    for row in 0..q.nrows() {
        let (x, y) = (q[(row, i)], q[(row, i + 1)]);
        q[(row, i)] = c * x + s * y;
        q[(row, i + 1)] = -s * x + c * y;
    }
}

fn block_eigenvalues(t: &Matrix, blocks: &[(usize, usize)]) -> Vec<Complex64> {
    let mut eigs = Vec::new();
    for &(i, size) in blocks {
        if size == 1 {
            eigs.push(Complex64::new(t[(i, i)], 0.0));
        } else {
            let re = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let det = t[(i, i)] * t[(i + 1, i + 1)] - t[(i, i + 1)] * t[(i + 1, i)];
            let im = (det - re * re).max(0.0).sqrt();
            eigs.push(Complex64::new(re, im));
            eigs.push(Complex64::new(re, -im));
        }
    }
    eigs
}

/// Rejects spectra with an eigenvalue on the closed negative real axis.
fn check_principal_branch(t: &Matrix, blocks: &[(usize, usize)]) -> Result<(), MatError> {
    for &(i, size) in blocks {
        if size == 1 {
            let lambda = t[(i, i)];
            if lambda == 0.0 {
                return Err(MatError::Singular);
            }
            if lambda < 0.0 {
                return Err(MatError::SpectrumOnBranchCut {
                    eigenvalue: Complex64::new(lambda, 0.0),
                });
            }
        }
        // 2x2 blocks hold strictly complex pairs after the split pass and
        // never touch the real axis.
    }
    Ok(())
}

/// Square root of an upper quasi-triangular matrix whose spectrum avoids
/// the closed negative real axis. The result has the same block pattern
/// and its spectrum lies in the open right half-plane.
fn sqrt_quasi_triangular(t: &Matrix, blocks: &[(usize, usize)]) -> Matrix {
    let n = t.nrows();
    let nb = blocks.len();
    let mut u = Matrix::zeros(n, n);

    for &(i, size) in blocks {
        if size == 1 {
            u[(i, i)] = t[(i, i)].sqrt();
        } else {
            // Complex pair theta +/- i*mu: the primary root of the block is
            // (M + r I) / (2 alpha), r = |lambda|, alpha = Re sqrt(lambda).
            let m00 = t[(i, i)];
            let m01 = t[(i, i + 1)];
            let m10 = t[(i + 1, i)];
            let m11 = t[(i + 1, i + 1)];
            let theta = 0.5 * (m00 + m11);
            let det = m00 * m11 - m01 * m10;
            let r = det.sqrt();
            let alpha = (0.5 * (r + theta)).sqrt();
            let scale = 1.0 / (2.0 * alpha);
            u[(i, i)] = (m00 + r) * scale;
            u[(i, i + 1)] = m01 * scale;
            u[(i + 1, i)] = m10 * scale;
            u[(i + 1, i + 1)] = (m11 + r) * scale;
        }
    }

    for dist in 1..nb {
        for bi in 0..nb - dist {
            let bj = bi + dist;
            let (i, ni) = blocks[bi];
            let (j, nj) = blocks[bj];
            let mut rhs = t.view((i, j), (ni, nj)).into_owned();
            for bk in bi + 1..bj {
                let (k, nk) = blocks[bk];
                rhs -= u.view((i, k), (ni, nk)) * u.view((k, j), (nk, nj));
            }
            let uii = u.view((i, i), (ni, ni)).into_owned();
            let ujj = u.view((j, j), (nj, nj)).into_owned();
            let x = solve_small_sylvester(&uii, &ujj, &rhs);
            u.view_mut((i, j), (ni, nj)).copy_from(&x);
        }
    }
    u
}

/// Solves `A X + X B = C` for blocks of size at most 2 via Kronecker
/// vectorization. The operator is nonsingular whenever the spectra of `A`
/// and `-B` are disjoint, which holds for square-root recurrences.
fn solve_small_sylvester(a: &Matrix, b: &Matrix, c: &Matrix) -> Matrix {
    let (ni, nj) = (a.nrows(), b.nrows());
    let op = Matrix::identity(nj, nj).kronecker(a) + b.transpose().kronecker(&Matrix::identity(ni, ni));
    let rhs = nalgebra::DVector::from_column_slice(c.as_slice());
    let x = op.lu().solve(&rhs).expect("square-root Sylvester operator is nonsingular");
    Matrix::from_column_slice(ni, nj, x.as_slice())
}

/// Principal matrix logarithm.
///
/// Returns `L` with `exp(L) = A` and the spectrum of `L` inside the strip
/// `|Im| < pi`. Fails with [`MatError::SpectrumOnBranchCut`] when an
/// eigenvalue of `A` lies on the negative real axis and with
/// [`MatError::Singular`] when `A` has a zero eigenvalue.
pub fn logm_principal(a: &Matrix) -> Result<Matrix, MatError> {
    if a.nrows() != a.ncols() {
        return Err(MatError::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(MatError::InvalidArgument("logm input must be finite".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }

    let QuasiSchur { q, mut t, blocks } = quasi_schur(a)?;
    check_principal_branch(&t, &blocks)?;

    let eye = Matrix::identity(n, n);
    let mut nroots = 0usize;
    while norm_1(&(&t - &eye)) > LOG_SERIES_RADIUS && nroots < MAX_SQRT_STEPS {
        t = sqrt_quasi_triangular(&t, &blocks);
        nroots += 1;
    }

    let x = &t - &eye;
    let mut log_t = Matrix::zeros(n, n);
    for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        // weight * X * (I + node*X)^{-1}, computed as a transposed solve.
        let m = &eye + &x * *node;
        let y_t = m
            .transpose()
            .lu()
            .solve(&x.transpose())
            .expect("log approximant denominator is nonsingular");
        log_t += y_t.transpose() * *weight;
    }
    log_t *= 2f64.powi(nroots as i32);

    Ok(&q * log_t * q.transpose())
}

/// Principal q-th root: `R` with `R^q = A` and the spectrum of `R` in the
/// sector `|arg| < pi/q`. For `q = 1` this is `A` itself, with no branch
/// condition. Computed as `exp(log(A)/q)`.
pub fn rootq_principal(a: &Matrix, q: u32) -> Result<Matrix, MatError> {
    if q == 0 {
        return Err(MatError::InvalidArgument("root order q must be positive".into()));
    }
    if a.nrows() != a.ncols() {
        return Err(MatError::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if q == 1 {
        return Ok(a.clone());
    }
    let log = logm_principal(a)?;
    Ok(super::expm_raw(&(log / q as f64)))
}

/// Complex eigenvalues read off the quasi-triangular Schur factor.
pub fn eigenvalues_of(a: &Matrix) -> Result<Vec<Complex64>, MatError> {
    let qs = quasi_schur(a)?;
    Ok(block_eigenvalues(&qs.t, &qs.blocks))
}
