//! Dense complex linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `<x, y>`, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖U*U − I‖` in the spectral norm.
pub fn isometry_residual(u: &CMatrix) -> f64 {
    let gram = u.adjoint() * u;
    spectral_norm(&(gram - CMatrix::identity(u.ncols(), u.ncols())))
}

/// Haar-distributed isometry `rows × cols` (`rows ≥ cols`): thin QR of a
/// complex Gaussian matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = rng::gaussian_matrix(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::from(1.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Component of `y` orthogonal to unit `x`, normalized. `None` if `y ∥ x`.
pub fn orthogonal_complement(x: &CVector, y: &CVector) -> Option<CVector> {
    let z = y - x * inner(y, x);
    let n = z.norm();
    (n > 1e-10).then(|| z / Complex64::from(n))
}

/// Global phase `γ` (|γ| = 1) minimising `‖a − γ b‖_F`.
pub fn best_phase(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(bi, ai)| bi.conj() * ai).sum();
    if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::from(1.0)
    }
}

/// `max_ij |a − γ b|` after aligning the global phase.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let gamma = best_phase(a, b);
    max_abs_entry(&(a - b * gamma))
}
