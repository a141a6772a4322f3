//! Small dense linear-algebra helpers shared by the operator modules.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type CMat = Mat<C64>;
pub type RMat = Mat<f64>;

/// Largest entrywise deviation from conjugate-transpose symmetry.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.nrows() == a.ncols() && hermitian_defect(a) <= tol * (1.0 + operator_scale(a))
}

/// Max entry magnitude, used to make tolerances relative.
pub fn operator_scale(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Full eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// the matrix whose columns are the corresponding orthonormal eigenvectors.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let n = a.nrows();
    let s = evd.S();
    let vals: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let vecs = evd.U().to_owned();
    Ok((vals, vecs))
}

/// Singular values in descending order.
///
/// Hermitian inputs take the eigenvalue route (σ = |λ|); general matrices go
/// through the dense SVD.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    if is_hermitian(a, 1e-12) {
        let mut s: Vec<f64> = eigvalsh(a)?.into_iter().map(f64::abs).collect();
        s.sort_by(|x, y| y.partial_cmp(x).unwrap());
        Ok(s)
    } else {
        let sv = a
            .singular_values()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(sv)
    }
}

/// Hermitian square root of a positive-semidefinite matrix. Slightly negative
/// eigenvalues from roundoff are clamped to zero.
pub fn hermitian_sqrt(a: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(a)?;
    let n = a.nrows();
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        let s = vals[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += C64::from(s) * vecs[(i, k)] * vecs[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

/// Commutator [a, b] = ab − ba.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// binom(n, k) as f64; 0 when k > n.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
