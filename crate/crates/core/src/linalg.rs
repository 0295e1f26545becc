//! Dense helpers shared by the spectral and block-encoding checks.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};

/// Largest singular value of an arbitrary matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Eigenvalue magnitudes `(min |λ|, max |λ|)` of a symmetric matrix.
pub fn sym_abs_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l.abs()), hi.max(l.abs())))
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    sym_abs_extremes(m).1
}

/// `f(M)` for symmetric `M`, through its eigendecomposition.
pub fn sym_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let fl = f(l);
        scaled.column_mut(k).scale_mut(fl);
    }
    scaled * v.transpose()
}

pub fn gaussian_matrix<R: RngCore>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Symmetric Gaussian matrix `(G + Gᵀ)/2`.
pub fn gaussian_symmetric<R: RngCore>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal pushed into `Q`.
pub fn random_orthogonal<R: RngCore>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// Symmetric matrix with the given eigenvalues in a random orthonormal basis.
pub fn with_spectrum<R: RngCore>(rng: &mut R, eigenvalues: &[f64]) -> DMatrix<f64> {
    let n = eigenvalues.len();
    let q = random_orthogonal(rng, n);
    let mut scaled = q.clone();
    for (k, &l) in eigenvalues.iter().enumerate() {
        scaled.column_mut(k).scale_mut(l);
    }
    let m = scaled * q.transpose();
    (&m + m.transpose()) * 0.5
}
