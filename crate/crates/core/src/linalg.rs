//! Dense complex matrix helpers and the Hermitian eigensolver.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{lit, tol, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((x - y).modulus()))
}

/// `max |(H - H^dagger)_{ab}|`.
pub fn hermiticity_residual<T: Real>(h: &CMatrix<T>) -> T {
    max_abs_diff(h, &h.adjoint())
}

/// `max |(U^dagger U - I)_{ab}|`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// Residual between two vectors after removing their relative global phase.
///
/// The phase is fixed by the largest-magnitude entry of `a`; the result is
/// `max_i |e^{i alpha} a_i - b_i|`.
pub fn phase_aligned_residual<T: Real>(a: &CVector<T>, b: &CVector<T>) -> T {
    assert_eq!(a.len(), b.len(), "length mismatch");
    let pivot = a
        .iter()
        .enumerate()
        .fold((0usize, T::zero()), |(bi, bn), (i, z)| {
            if z.modulus() > bn {
                (i, z.modulus())
            } else {
                (bi, bn)
            }
        })
        .0;
    let phase = if a[pivot].modulus() > T::zero() && b[pivot].modulus() > T::zero() {
        let r = b[pivot] / a[pivot];
        r / Complex::from(r.modulus())
    } else {
        Complex::from(T::one())
    };
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((x * phase - y).modulus()))
}

/// Same as [`phase_aligned_residual`] for matrices.
pub fn phase_aligned_matrix_residual<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let av = CVector::from_iterator(a.len(), a.iter().copied());
    let bv = CVector::from_iterator(b.len(), b.iter().copied());
    phase_aligned_residual(&av, &bv)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem<T: Real> {
    /// Ascending.
    pub eigenvalues: DVector<T>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> HermitianEigensystem<T> {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(self.eigenvalues.iter()) {
            col *= f(lambda);
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map_spectrum(|l| Complex::from(l))
    }
}

const EIGEN_MAX_ITER: usize = 10_000;

/// Eigen-decomposition of `h`, which must be Hermitian within 1e-10.
///
/// Eigenvalues come back ascending; output is a deterministic function of the input.
pub fn hermitian_eigensystem<T: Real>(h: &CMatrix<T>) -> Result<HermitianEigensystem<T>> {
    if !h.is_square() {
        return Err(Error::contract(format!(
            "eigensystem of non-square {}x{} matrix",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = max_abs(h).max(T::one());
    let residual = hermiticity_residual(h);
    if residual > tol::<T>(1e-10) * scale {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (residual {residual})"
        )));
    }
    // Symmetrize so the solver sees an exactly Hermitian matrix.
    let sym = (h + h.adjoint()) * Complex::from(lit::<T>(0.5));
    let eig = SymmetricEigen::try_new(sym, T::default_epsilon(), EIGEN_MAX_ITER)
        .ok_or_else(|| Error::numerical("Hermitian eigensolver did not converge"))?;

    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}
