//! Dense complex linear-algebra helpers on top of `faer`.

use faer::Mat;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

/// Largest element of `|H - H†|`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Entrywise Frobenius norm.
pub fn frobenius(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖V†V − 1‖_max` for a set of column vectors.
pub fn orthonormality_defect(v: &CMat) -> f64 {
    let g = v.adjoint() * v;
    max_abs_diff(&g, &identity(v.ncols()))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn scale(m: &CMat, c: f64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

pub fn determinant(m: &CMat) -> C64 {
    if m.nrows() == 0 {
        return ONE;
    }
    m.as_ref().determinant()
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Polar factor `U V†` of `m = U Σ V†`, together with the smallest singular value.
pub fn polar_unitary(m: &CMat) -> Result<(CMat, f64)> {
    let n = m.nrows();
    if n == 1 && m.ncols() == 1 {
        let z = m[(0, 0)];
        let r = z.norm();
        let u = if r > 0.0 { z / r } else { ONE };
        return Ok((Mat::from_fn(1, 1, |_, _| u), r));
    }
    let svd = m.svd().map_err(|e| Error::Solver {
        dim: n,
        detail: format!("svd: {e:?}"),
    })?;
    let sigma_min = svd
        .S()
        .column_vector()
        .iter()
        .map(|s| s.re)
        .fold(f64::INFINITY, f64::min);
    Ok((svd.U() * svd.V().adjoint(), sigma_min))
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Solver {
            dim: n,
            detail: format!("{e:?}"),
        })?;
    let vals = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Hermitian eigenvalues only, ascending.
pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    let n = m.nrows();
    m.self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Solver {
            dim: n,
            detail: format!("{e:?}"),
        })
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
pub fn eig(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = m.nrows();
    let evd = m.eigen().map_err(|e| Error::Solver {
        dim: n,
        detail: format!("{e:?}"),
    })?;
    let vals = evd.S().column_vector().iter().copied().collect();
    Ok((vals, evd.U().to_owned()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let scaled = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    // ‖scaled‖ <= 1/2, so 20 terms put the remainder below 1e-25.
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=20 {
        term = &term * &scaled;
        let inv = 1.0 / k as f64;
        term = Mat::from_fn(n, n, |i, j| term[(i, j)] * inv);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Fixes the global phase of each column so that its largest-modulus entry
/// (first one on ties) is real and positive.
pub fn fix_column_phases(v: &mut CMat) {
    for j in 0..v.ncols() {
        let mut best = 0usize;
        let mut best_abs = -1.0f64;
        for i in 0..v.nrows() {
            let a = v[(i, j)].norm();
            if a > best_abs * (1.0 + 1e-12) {
                best_abs = a;
                best = i;
            }
        }
        if best_abs > 0.0 {
            let phase = v[(best, j)].conj() / best_abs;
            for i in 0..v.nrows() {
                v[(i, j)] *= phase;
            }
        }
    }
}
