//! Linear algebra kernels: banded LU for the per-mode blocks, restarted GMRES
//! for the coupled rough-surface systems, and small dense helpers.

mod banded;
mod gmres;

pub use banded::BandedLu;
pub use gmres::{gmres, GmresConfig, GmresOutcome};

use nalgebra::{DMatrix, Matrix3};

use crate::C64;

/// A linear map on complex vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

/// Conjugated inner product `Σ conj(a_i) b_i`, summed in index order.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub type Mat3 = [[C64; 3]; 3];

pub fn mat3_mul_vec(m: &Mat3, v: &[C64; 3]) -> [C64; 3] {
    let mut out = [C64::new(0.0, 0.0); 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// Smallest eigenvalue of the Hermitian part `(A + A*)/2` of a 3×3 matrix.
pub fn min_eig_hermitian_part(a: &Mat3) -> f64 {
    let m = Matrix3::from_fn(|i, j| (a[i][j] + a[j][i].conj()) * 0.5);
    m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Smallest generalized eigenvalue of `H x = θ N x` for Hermitian `H` and
/// Hermitian positive definite `N`.
pub fn min_generalized_eig(h: &DMatrix<C64>, n: &DMatrix<C64>) -> Option<f64> {
    let chol = n.clone().cholesky()?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    let c = &linv * h * linv.adjoint();
    let c = (&c + c.adjoint()) * C64::new(0.5, 0.0);
    c.symmetric_eigenvalues().iter().cloned().reduce(f64::min)
}

/// Solve a small dense complex system by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
pub fn dense_solve(a: &DMatrix<C64>, b: &[C64]) -> Option<Vec<C64>> {
    let lu = a.clone().lu();
    let rhs = nalgebra::DVector::from_column_slice(b);
    lu.solve(&rhs).map(|x| x.as_slice().to_vec())
}
