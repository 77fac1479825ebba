//! Matrix exponential by scaling and squaring with diagonal Pade
//! approximants, following the standard order-selection thresholds.

use super::{norm_1, MatError, Matrix};

// 1-norm thresholds theta_m below which the [m/m] Pade approximant delivers
// full double-precision accuracy.
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Computes `exp(F t)`.
///
/// Exact (the identity) for `t = 0`. Errors on non-square or non-finite
/// input.
pub fn expm(f: &Matrix, t: f64) -> Result<Matrix, MatError> {
    if f.nrows() != f.ncols() {
        return Err(MatError::NonSquare { rows: f.nrows(), cols: f.ncols() });
    }
    if !t.is_finite() || f.iter().any(|v| !v.is_finite()) {
        return Err(MatError::InvalidArgument("expm input must be finite".into()));
    }
    if t == 0.0 {
        return Ok(Matrix::identity(f.nrows(), f.nrows()));
    }
    Ok(expm_raw(&(f * t)))
}

/// Scaling-and-squaring core on a square matrix.
pub(crate) fn expm_raw(a: &Matrix) -> Matrix {
    let n = a.nrows();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let norm = norm_1(a);

    if norm <= THETA_3 {
        return pade_solve(a, &B3);
    }
    if norm <= THETA_5 {
        return pade_solve(a, &B5);
    }
    if norm <= THETA_7 {
        return pade_solve(a, &B7);
    }
    if norm <= THETA_9 {
        return pade_solve(a, &B9);
    }

    let s = ((norm / THETA_13).log2().ceil()).max(0.0) as i32;
    let scaled = a / 2f64.powi(s);
    let mut e = pade_solve(&scaled, &B13);
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

/// Evaluates the [m/m] Pade approximant with coefficients `b` and solves
/// `(V - U) X = (V + U)`.
fn pade_solve(a: &Matrix, b: &[f64]) -> Matrix {
    let n = a.nrows();
    let eye = Matrix::identity(n, n);
    let a2 = a * a;

    // U = A * (odd part in A^2), V = even part in A^2.
    let (u, v) = if b.len() == 14 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let u_hi = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
        let u_lo = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
        let u = a * (u_hi + u_lo);
        let v_hi = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
        let v = v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];
        (u, v)
    } else {
        let mut u_sum = &eye * b[1];
        let mut v_sum = &eye * b[0];
        let mut pow = eye.clone();
        let mut k = 2;
        while k < b.len() {
            pow = &pow * &a2;
            v_sum += &pow * b[k];
            if k + 1 < b.len() {
                u_sum += &pow * b[k + 1];
            }
            k += 2;
        }
        (a * u_sum, v_sum)
    };

    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu().solve(&rhs).expect("Pade denominator is nonsingular for scaled input")
}
