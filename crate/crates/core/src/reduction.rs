//! Reduced density matrices of qubit subsets of a symmetric `2j`-qubit state.
//!
//! Qubit-space convention: in a computational index over `N` qubits, qubit
//! `i` (0-based) is bit `N - 1 - i`, and a set bit means that qubit is in
//! `|0>` (spin down). Index 0 is therefore the all-up state, matching Dicke
//! index `n = 0`, and the popcount of an index is its down-spin count.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::fault::{self, Fault};
use crate::linalg::{hermiticity_residual, CMatrix, CVector};
use crate::scalar::{lit, tol, Real};
use crate::spinalg::{binomial, DickeVector};

/// Largest `2j` the full qubit-space expansion is built for.
pub const MAX_EXPANSION_QUBITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdmBasis {
    /// `q + 1` Dicke states of the kept qubits, indexed by down-spin count.
    SymmetricDicke,
    /// `2^q` computational states, qubit-space convention of this module.
    StandardQubit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix<T: Real> {
    qubits: usize,
    basis: RdmBasis,
    matrix: CMatrix<T>,
}

impl<T: Real> ReducedDensityMatrix<T> {
    /// Checks shape, hermiticity and unit trace (1e-12).
    pub fn new(qubits: usize, basis: RdmBasis, matrix: CMatrix<T>) -> Result<Self> {
        let dim = match basis {
            RdmBasis::SymmetricDicke => qubits + 1,
            RdmBasis::StandardQubit => 1 << qubits,
        };
        if matrix.shape() != (dim, dim) {
            return Err(Error::input(format!(
                "{qubits}-qubit {basis:?} matrix must be {dim}x{dim}, got {:?}",
                matrix.shape()
            )));
        }
        let rdm = ReducedDensityMatrix {
            qubits,
            basis,
            matrix,
        };
        rdm.check(tol(1e-10))?;
        Ok(rdm)
    }

    fn check(&self, eps: T) -> Result<()> {
        let herm = hermiticity_residual(&self.matrix);
        if herm > eps {
            return Err(Error::contract(format!("density matrix not Hermitian ({herm})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - T::one()).abs() > eps || tr.im.abs() > eps {
            return Err(Error::contract(format!("density matrix trace {tr} != 1")));
        }
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn basis(&self) -> RdmBasis {
        self.basis
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.matrix.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }
}

/// Pure state of `N = 2j` qubits in the full `2^N` space.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitExpansion<T: Real> {
    qubits: usize,
    amplitudes: CVector<T>,
}

impl<T: Real> QubitExpansion<T> {
    pub fn new(qubits: usize, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != 1 << qubits {
            return Err(Error::input("amplitude count is not 2^qubits"));
        }
        if (amplitudes.norm() - T::one()).abs() > tol(1e-12) {
            return Err(Error::input("qubit state is not normalized"));
        }
        Ok(QubitExpansion { qubits, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    /// Exchange qubits `a` and `b`.
    pub fn swap_qubits(&self, a: usize, b: usize) -> Self {
        let n = self.qubits;
        let (ba, bb) = (n - 1 - a, n - 1 - b);
        let amps = CVector::from_fn(self.amplitudes.len(), |idx, _| {
            let x = ((idx >> ba) ^ (idx >> bb)) & 1;
            let src = idx ^ ((x << ba) | (x << bb));
            self.amplitudes[src]
        });
        QubitExpansion {
            qubits: n,
            amplitudes: amps,
        }
    }

    /// Apply `sigma_z` to every qubit (`sigma_z |1> = |1>`, `sigma_z |0> = -|0>`).
    pub fn apply_sigmaz_all(&self) -> Self {
        let amps = CVector::from_fn(self.amplitudes.len(), |idx, _| {
            if idx.count_ones() % 2 == 0 {
                self.amplitudes[idx]
            } else {
                -self.amplitudes[idx]
            }
        });
        QubitExpansion {
            qubits: self.qubits,
            amplitudes: amps,
        }
    }
}

/// Spread each Dicke amplitude `c_n` evenly over the `C(2j, n)` bitstrings with `n` down-spins.
pub fn expand_to_qubits<T: Real>(psi: &DickeVector<T>) -> Result<QubitExpansion<T>> {
    let n_q = psi.spin().two_j();
    if n_q > MAX_EXPANSION_QUBITS {
        return Err(Error::Scale(format!(
            "qubit expansion limited to 2j <= {MAX_EXPANSION_QUBITS}, got {n_q}"
        )));
    }
    let weights: Vec<T> = (0..=n_q)
        .map(|n| T::one() / lit::<T>(binomial(n_q, n) as f64).sqrt())
        .collect();
    let amps = CVector::from_fn(1 << n_q, |idx, _| {
        let n = idx.count_ones() as usize;
        psi.amplitudes()[n] * weights[n]
    });
    Ok(QubitExpansion {
        qubits: n_q as usize,
        amplitudes: amps,
    })
}

/// Partial trace onto the qubits in `keep` (ascending order defines the output bit order).
pub fn brute_force_rdm<T: Real>(
    full: &QubitExpansion<T>,
    keep: &[usize],
) -> Result<ReducedDensityMatrix<T>> {
    let n = full.qubits;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&q| q >= n) || kept.is_empty() {
        return Err(Error::input(format!(
            "keep set {keep:?} must be distinct qubit indices below {n}"
        )));
    }
    let rest: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let (dk, dr) = (1usize << kept.len(), 1usize << rest.len());
    let compose = |a: usize, b: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            let bit = (a >> (kept.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        for (pos, &q) in rest.iter().enumerate() {
            let bit = (b >> (rest.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        idx
    };
    // coefficient matrix c[a, b] with a over kept, b over the rest
    let coeff = CMatrix::from_fn(dk, dr, |a, b| full.amplitudes[compose(a, b)]);
    let rho = &coeff * coeff.adjoint();
    ReducedDensityMatrix::new(kept.len(), RdmBasis::StandardQubit, rho)
}

fn weight_binomial(n: u32, k: u32) -> f64 {
    let b = binomial(n, k);
    if k == 1 && fault::active(Fault::BinomialWeight) {
        (b + 1) as f64
    } else {
        b as f64
    }
}

/// Reduced state of any `q` qubits, in the Dicke basis of those qubits.
///
/// `rho[a][b] = sum_r c_{a+r} conj(c_{b+r}) f(a, r) f(b, r)` with
/// `f(x, r) = sqrt(C(q, x) C(2j - q, r) / C(2j, x + r))`, where `a`, `b` count
/// down-spins among the kept qubits and `r` among the traced ones.
pub fn dicke_rdm<T: Real>(psi: &DickeVector<T>, q: usize) -> Result<ReducedDensityMatrix<T>> {
    let n_total = psi.spin().two_j();
    if q == 0 || q > n_total as usize {
        return Err(Error::input(format!("q = {q} outside 1..={n_total}")));
    }
    let rest = n_total - q as u32;
    let f = |x: usize, r: usize| -> T {
        let num = binomial(q as u32, x as u32) as f64 * binomial(rest, r as u32) as f64;
        lit((num / weight_binomial(n_total, (x + r) as u32)).sqrt())
    };
    let c = psi.amplitudes();
    let mut rho = CMatrix::zeros(q + 1, q + 1);
    for a in 0..=q {
        for b in a..=q {
            let mut acc = Complex::from(T::zero());
            for r in 0..=rest as usize {
                acc += c[a + r] * c[b + r].conj() * (f(a, r) * f(b, r));
            }
            rho[(a, b)] = acc;
            rho[(b, a)] = acc.conj();
        }
    }
    ReducedDensityMatrix::new(q, RdmBasis::SymmetricDicke, rho)
}

/// Isometry from the `q + 1` symmetric states into the `2^q` qubit basis.
pub fn dicke_embedding<T: Real>(q: usize) -> CMatrix<T> {
    CMatrix::from_fn(1 << q, q + 1, |idx, a| {
        if idx.count_ones() as usize == a {
            Complex::from(T::one() / lit::<T>(binomial(q as u32, a as u32) as f64).sqrt())
        } else {
            Complex::from(T::zero())
        }
    })
}

/// Any symmetric-basis RDM expressed in the standard qubit basis.
pub fn embed_in_qubit_basis<T: Real>(
    rdm: &ReducedDensityMatrix<T>,
) -> Result<ReducedDensityMatrix<T>> {
    if rdm.basis != RdmBasis::SymmetricDicke {
        return Err(Error::input("expected a symmetric-Dicke basis matrix"));
    }
    let e = dicke_embedding::<T>(rdm.qubits);
    let m = &e * &rdm.matrix * e.adjoint();
    Ok(ReducedDensityMatrix {
        qubits: rdm.qubits,
        basis: RdmBasis::StandardQubit,
        matrix: m,
    })
}

/// Two-qubit symmetric RDM as a 4x4 matrix over `{|11>, |10>, |01>, |00>}`.
pub fn symmetric_to_qubit_basis<T: Real>(
    rdm: &ReducedDensityMatrix<T>,
) -> Result<ReducedDensityMatrix<T>> {
    if rdm.qubits != 2 {
        return Err(Error::input(format!("expected 2 qubits, got {}", rdm.qubits)));
    }
    embed_in_qubit_basis(rdm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::spinalg::SpinQuantum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spin(two_j: u32) -> SpinQuantum {
        SpinQuantum::from_two_j(two_j).unwrap()
    }

    #[test]
    fn spin_one_middle_state_expansion() {
        let psi = DickeVector::<f64>::basis(spin(2), 1).unwrap();
        let full = expand_to_qubits(&psi).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let a: Vec<f64> = full.amplitudes().iter().map(|z| z.re).collect();
        assert!((a[1] - h).abs() < 1e-15 && (a[2] - h).abs() < 1e-15);
        assert_eq!(a[0], 0.0);
        assert_eq!(a[3], 0.0);
    }

    #[test]
    fn all_up_is_product() {
        let psi = DickeVector::<f64>::basis(spin(5), 0).unwrap();
        let full = expand_to_qubits(&psi).unwrap();
        assert_eq!(full.amplitudes()[0], Complex::new(1.0, 0.0));
        assert!(full.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn expansion_symmetric_and_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for two_j in [3u32, 6, 9] {
            let psi = DickeVector::random(spin(two_j), &mut rng);
            let full = expand_to_qubits(&psi).unwrap();
            assert!((full.amplitudes().norm() - 1.0).abs() < 1e-12);
            for (a, b) in [(0, 1), (0, two_j as usize - 1), (1, 2)] {
                let swapped = full.swap_qubits(a, b);
                assert!((swapped.amplitudes() - full.amplitudes()).norm() < 1e-12);
            }
        }
        assert!(matches!(
            expand_to_qubits(&DickeVector::<f64>::basis(spin(13), 0).unwrap()),
            Err(Error::Scale(_))
        ));
    }

    #[test]
    fn brute_force_examples() {
        let psi = DickeVector::<f64>::basis(spin(2), 1).unwrap();
        let full = expand_to_qubits(&psi).unwrap();
        let one = brute_force_rdm(&full, &[0]).unwrap();
        let half = CMatrix::identity(2, 2) * Complex::new(0.5, 0.0);
        assert!(max_abs_diff(one.matrix(), &half) < 1e-15);
        let all = brute_force_rdm(&full, &[0, 1]).unwrap();
        assert!((all.purity() - 1.0).abs() < 1e-14);
        assert!(brute_force_rdm(&full, &[2]).is_err());
        assert!(brute_force_rdm(&full, &[0, 0]).is_err());
    }

    #[test]
    fn complementary_purities_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let two_j = rng.random_range(2..=8u32);
            let psi = DickeVector::random(spin(two_j), &mut rng);
            let full = expand_to_qubits(&psi).unwrap();
            let cut = rng.random_range(1..two_j as usize);
            let keep: Vec<usize> = (0..cut).collect();
            let rest: Vec<usize> = (cut..two_j as usize).collect();
            let a = brute_force_rdm(&full, &keep).unwrap().purity();
            let b = brute_force_rdm(&full, &rest).unwrap().purity();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dicke_rdm_examples() {
        let psi = DickeVector::<f64>::basis(spin(2), 1).unwrap();
        let one = dicke_rdm(&psi, 1).unwrap();
        let half = CMatrix::identity(2, 2) * Complex::new(0.5, 0.0);
        assert!(max_abs_diff(one.matrix(), &half) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let psi = DickeVector::random(spin(5), &mut rng);
        let whole = dicke_rdm(&psi, 5).unwrap();
        let proj = psi.amplitudes() * psi.amplitudes().adjoint();
        assert!(max_abs_diff(whole.matrix(), &proj) < 1e-14);
        assert!(dicke_rdm(&psi, 0).is_err());
        assert!(dicke_rdm(&psi, 6).is_err());
    }

    #[test]
    fn dicke_rdm_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for two_j in 2..=10u32 {
            for _ in 0..5 {
                let psi = DickeVector::random(spin(two_j), &mut rng);
                let full = expand_to_qubits(&psi).unwrap();
                for q in 1..=2usize.min(two_j as usize) {
                    let keep: Vec<usize> = (0..q).collect();
                    let fast = embed_in_qubit_basis(&dicke_rdm(&psi, q).unwrap()).unwrap();
                    let slow = brute_force_rdm(&full, &keep).unwrap();
                    assert!(max_abs_diff(fast.matrix(), slow.matrix()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn triplet_embedding() {
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex::new(0.5_f64, 0.0),
            Complex::new(0.3, 0.0),
            Complex::new(0.2, 0.0),
        ]));
        let rdm = ReducedDensityMatrix::new(2, RdmBasis::SymmetricDicke, diag).unwrap();
        let four = symmetric_to_qubit_basis(&rdm).unwrap();
        let m = four.matrix();
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((m[(r, c)].re - 0.15).abs() < 1e-15);
        }
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15 && (m[(3, 3)].re - 0.2).abs() < 1e-15);
        assert!((m.trace() - rdm.matrix().trace()).norm() < 1e-15);
        // singlet (|10> - |01>)/sqrt2 has zero weight
        let singlet = CVector::from_vec(vec![
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(-1.0, 0.0),
            Complex::new(0.0, 0.0),
        ]);
        assert!((m * &singlet).norm() < 1e-15);
        let one = dicke_rdm(&DickeVector::<f64>::basis(spin(2), 0).unwrap(), 1).unwrap();
        assert!(symmetric_to_qubit_basis(&one).is_err());
    }

    #[test]
    fn sigmaz_on_qubits_matches_dicke_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let psi = DickeVector::random(spin(4), &mut rng);
        let lhs = expand_to_qubits(&crate::dynamics::local_sigmaz_product(&psi)).unwrap();
        let rhs = expand_to_qubits(&psi).unwrap().apply_sigmaz_all();
        assert!(crate::linalg::phase_aligned_residual(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
    }

    #[test]
    fn binomial_fault_breaks_trace() {
        let psi = DickeVector::<f64>::basis(spin(4), 1).unwrap();
        assert!(dicke_rdm(&psi, 1).is_ok());
        let faulty = fault::inject(Fault::BinomialWeight, || dicke_rdm(&psi, 1));
        assert!(faulty.is_err());
    }
}
