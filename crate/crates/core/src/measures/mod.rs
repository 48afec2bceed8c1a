//! Correlation measures of the symmetric multi-qubit state. Entropies are in nats.

mod discord;

use nalgebra::{Complex, ComplexField, DVector};
use serde::Serialize;

pub use discord::{
    conditional_entropy_at, minimize_conditional_entropy, mutual_information, quantum_discord,
    DiscordSettings, MeasurementSetting,
};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, CMatrix};
use crate::reduction::{
    dicke_rdm, symmetric_to_qubit_basis, QubitExpansion, RdmBasis, ReducedDensityMatrix,
};
use crate::scalar::{lit, tol, Real};
use crate::spinalg::DickeVector;

/// Eigenvalues in `[-1e-10, 0)` are treated as zero; anything below is an error.
const NEGATIVE_CLAMP: f64 = 1e-10;

/// Eigenvalues of a unit-trace matrix below this are numerically zero.
const RANK_FLOOR: f64 = 1e-14;

fn clamp_spectrum<T: Real>(values: &DVector<T>) -> Result<Vec<T>> {
    let floor = -tol::<T>(NEGATIVE_CLAMP);
    values
        .iter()
        .map(|&l| {
            if l < floor {
                Err(Error::contract(format!("negative eigenvalue {l} in density matrix")))
            } else {
                Ok(l.max(T::zero()))
            }
        })
        .collect()
}

/// `-sum l ln l` with `0 ln 0 = 0`.
pub fn spectrum_entropy<T: Real>(spectrum: &[T]) -> T {
    spectrum
        .iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |acc, &l| acc - l * l.ln())
}

pub(crate) fn entropy_of_matrix<T: Real>(rho: &CMatrix<T>) -> Result<T> {
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > tol(1e-8) {
        return Err(Error::input(format!("density matrix trace {tr} != 1")));
    }
    let eig = hermitian_eigensystem(rho)?;
    Ok(spectrum_entropy(&clamp_spectrum(&eig.eigenvalues)?))
}

/// `S = -Tr(rho ln rho)`, in `[0, ln dim]`.
pub fn von_neumann_entropy<T: Real>(rho: &ReducedDensityMatrix<T>) -> Result<T> {
    entropy_of_matrix(rho.matrix())
}

/// Schmidt coefficients `lambda_i` (squared singular values) of a pure state
/// across the cut `left | rest`, sorted descending.
pub fn schmidt_decompose<T: Real>(psi: &QubitExpansion<T>, left: &[usize]) -> Result<Vec<T>> {
    let n = psi.qubits();
    let mut kept = left.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.iter().any(|&q| q >= n) || kept.len() != left.len() {
        return Err(Error::input(format!("invalid bipartition {left:?} of {n} qubits")));
    }
    let rest: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let place = |bits: usize, qubits: &[usize]| -> usize {
        qubits.iter().enumerate().fold(0usize, |idx, (pos, &q)| {
            idx | (((bits >> (qubits.len() - 1 - pos)) & 1) << (n - 1 - q))
        })
    };
    let coeff = CMatrix::from_fn(1 << kept.len(), 1 << rest.len(), |a, b| {
        psi.amplitudes()[place(a, &kept) | place(b, &rest)]
    });
    let svd = coeff.svd(false, false);
    let mut lambdas: Vec<T> = svd.singular_values.iter().map(|&s| s * s).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(lambdas)
}

fn sigma_yy<T: Real>() -> CMatrix<T> {
    let one = Complex::from(T::one());
    let z = Complex::from(T::zero());
    CMatrix::from_row_slice(
        4,
        4,
        &[z, z, z, -one, z, z, one, z, z, one, z, z, -one, z, z, z],
    )
}

/// `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`.
pub fn spin_flip<T: Real>(rho: &CMatrix<T>) -> CMatrix<T> {
    let yy = sigma_yy::<T>();
    &yy * rho.map(|x| x.conj()) * &yy
}

fn check_two_qubit<T: Real>(rho4: &ReducedDensityMatrix<T>) -> Result<()> {
    if rho4.qubits() != 2 || rho4.basis() != RdmBasis::StandardQubit {
        return Err(Error::input("expected a 2-qubit matrix in the standard basis"));
    }
    Ok(())
}

/// Wootters concurrence via the Hermitian route. The eigenvalues of
/// `R = sqrt(sqrt(rho) rho~ sqrt(rho))` are the square roots of the
/// eigenvalues of `rho rho~`; they are taken as the singular values of
/// `sqrt(rho) (sigma_y (x) sigma_y) sqrt(rho)^*`, whose Gram matrix is `R^2`.
pub fn concurrence<T: Real>(rho4: &ReducedDensityMatrix<T>) -> Result<T> {
    check_two_qubit(rho4)?;
    let rho = rho4.matrix();
    let eig = hermitian_eigensystem(rho)?;
    // eigenvalues at the solver's noise floor are zero: their square roots
    // would otherwise leak ~1e-8 into the result for rank-deficient states
    let floor = tol::<T>(RANK_FLOOR);
    let spectrum: Vec<T> = clamp_spectrum(&eig.eigenvalues)?
        .into_iter()
        .map(|l| if l < floor { T::zero() } else { l })
        .collect();
    let sqrt_rho = {
        let mut scaled = eig.eigenvectors.clone();
        for (mut col, &l) in scaled.column_iter_mut().zip(spectrum.iter()) {
            col *= Complex::from(l.sqrt());
        }
        scaled * eig.eigenvectors.adjoint()
    };
    let a = &sqrt_rho * sigma_yy::<T>() * sqrt_rho.map(|x| x.conj());
    let mut roots: Vec<T> = a.singular_values().iter().copied().collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(T::zero()))
}

/// `2 |b^2/2 - a c|` for the pure symmetric two-qubit state `(a, b, c)`.
pub fn pure_symmetric_concurrence<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> T {
    (b * b * lit::<T>(0.5) - a * c).modulus() * lit(2.0)
}

/// Three-tangle of a pure three-qubit symmetric state (`2j = 3`):
/// `tau = C^2_{1(23)} - C^2_{12} - C^2_{13}` with `C^2_{1(23)} = 4 det(rho_1)`.
pub fn three_tangle<T: Real>(psi: &DickeVector<T>) -> Result<T> {
    if psi.spin().two_j() != 3 {
        return Err(Error::input(format!(
            "three-tangle needs 2j = 3, got 2j = {}",
            psi.spin().two_j()
        )));
    }
    let rho1 = dicke_rdm(psi, 1)?;
    let m = rho1.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let c12 = concurrence(&symmetric_to_qubit_basis(&dicke_rdm(psi, 2)?)?)?;
    let tau = lit::<T>(4.0) * det - lit::<T>(2.0) * c12 * c12;
    Ok(tau.max(T::zero()).min(T::one()))
}

/// Meyer-Wallach `Q = 2 (1 - mean single-qubit purity)`; every qubit has the
/// same reduced state in the symmetric subspace.
pub fn q_measure<T: Real>(psi: &DickeVector<T>) -> Result<T> {
    if psi.spin().two_j() < 2 {
        return Err(Error::input("Q needs at least two qubits"));
    }
    let purity = dicke_rdm(psi, 1)?.purity();
    Ok(lit::<T>(2.0) * (T::one() - purity))
}

/// All measures of one state. Fields that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport<T> {
    /// One qubit vs the rest.
    pub s_vn_1: T,
    /// Two qubits vs the rest, for `2j >= 3`.
    pub s_vn_2: Option<T>,
    /// Between two qubits, measuring the first.
    pub discord: T,
    pub concurrence: T,
    /// Only for `2j = 3`.
    pub three_tangle: Option<T>,
    pub q_measure: T,
}

/// Measure names in report order.
pub const MEASURE_NAMES: [&str; 6] = [
    "s_vn_1",
    "s_vn_2",
    "discord",
    "concurrence",
    "tangle",
    "q_measure",
];

impl<T: Real> CorrelationReport<T> {
    /// `(name, value)` pairs in [`MEASURE_NAMES`] order; inapplicable ones are `None`.
    pub fn fields(&self) -> [(&'static str, Option<T>); 6] {
        [
            (MEASURE_NAMES[0], Some(self.s_vn_1)),
            (MEASURE_NAMES[1], self.s_vn_2),
            (MEASURE_NAMES[2], Some(self.discord)),
            (MEASURE_NAMES[3], Some(self.concurrence)),
            (MEASURE_NAMES[4], self.three_tangle),
            (MEASURE_NAMES[5], Some(self.q_measure)),
        ]
    }

    pub fn is_entropy(name: &str) -> bool {
        name.starts_with("s_vn")
    }
}

pub fn report<T: Real>(psi: &DickeVector<T>, settings: &DiscordSettings) -> Result<CorrelationReport<T>> {
    let two_j = psi.spin().two_j();
    if two_j < 2 {
        return Err(Error::input("correlation report needs 2j >= 2"));
    }
    let rho1 = dicke_rdm(psi, 1)?;
    let rho2 = dicke_rdm(psi, 2)?;
    let rho4 = symmetric_to_qubit_basis(&rho2)?;
    let s_vn_2 = if two_j >= 3 {
        Some(von_neumann_entropy(&rho2)?)
    } else {
        None
    };
    let three_tangle = if two_j == 3 {
        Some(three_tangle(psi)?)
    } else {
        None
    };
    let s_vn_1 = von_neumann_entropy(&rho1)?;
    // two qubits in a pure state: discord is the entanglement entropy
    let discord = if two_j == 2 {
        s_vn_1
    } else {
        quantum_discord(&rho4, settings)?
    };
    Ok(CorrelationReport {
        s_vn_1,
        s_vn_2,
        discord,
        concurrence: concurrence(&rho4)?,
        three_tangle,
        q_measure: lit::<T>(2.0) * (T::one() - rho1.purity()),
    })
}
