//! Angular-momentum algebra in the `|j, m>` basis.
//!
//! Basis ordering is fixed crate-wide: index `n = 0..=2j` is `|j, j - n>`,
//! i.e. `m` descending and `n` counting down-spins from the all-up state.

use nalgebra::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fault::{self, Fault};
use crate::linalg::{hermitian_eigensystem, CMatrix, CVector};
use crate::scalar::{cis, lit, tol, Real};

pub use crate::linalg::HermitianEigensystem;

/// Largest supported `2j`; binomials up to `C(64, 32)` fit in `u64`.
pub const MAX_TWO_J: u32 = 64;

/// Spin quantum number `j`, stored exactly as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinQuantum {
    two_j: u32,
}

impl SpinQuantum {
    pub fn from_two_j(two_j: u32) -> Result<Self> {
        if two_j == 0 || two_j > MAX_TWO_J {
            return Err(Error::input(format!(
                "2j must lie in 1..={MAX_TWO_J}, got {two_j}"
            )));
        }
        Ok(SpinQuantum { two_j })
    }

    /// Number of qubits `N = 2j`.
    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn j<T: Real>(self) -> T {
        lit::<T>(self.two_j as f64) / lit(2.0)
    }

    pub fn is_integer(self) -> bool {
        self.two_j.is_multiple_of(2)
    }

    /// `2m` for basis index `n`.
    pub fn two_m(self, n: usize) -> i64 {
        self.two_j as i64 - 2 * n as i64
    }

    pub fn m<T: Real>(self, n: usize) -> T {
        lit::<T>(self.two_m(n) as f64) / lit(2.0)
    }
}

impl std::fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Exact binomial coefficient; `n <= 64`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c as u64
}

/// State vector in the symmetric subspace, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeVector<T: Real> {
    spin: SpinQuantum,
    amplitudes: CVector<T>,
}

impl<T: Real> DickeVector<T> {
    /// Wrap `amplitudes`, which must already have unit norm (within 1e-12).
    pub fn new(spin: SpinQuantum, amplitudes: CVector<T>) -> Result<Self> {
        Self::check_len(spin, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::input(format!("state norm {norm} is not 1")));
        }
        Ok(DickeVector { spin, amplitudes })
    }

    /// Rescale `amplitudes` to unit norm.
    pub fn normalized(spin: SpinQuantum, amplitudes: CVector<T>) -> Result<Self> {
        Self::check_len(spin, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::input("cannot normalize a zero or non-finite vector"));
        }
        Ok(DickeVector {
            spin,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Basis state `|j, j - n>`.
    pub fn basis(spin: SpinQuantum, n: usize) -> Result<Self> {
        if n >= spin.dim() {
            return Err(Error::input(format!("basis index {n} out of range for j={spin}")));
        }
        let mut amps = CVector::zeros(spin.dim());
        amps[n] = Complex::from(T::one());
        Ok(DickeVector {
            spin,
            amplitudes: amps,
        })
    }

    fn check_len(spin: SpinQuantum, len: usize) -> Result<()> {
        if len != spin.dim() {
            return Err(Error::input(format!(
                "expected {} amplitudes for j={spin}, got {len}",
                spin.dim()
            )));
        }
        Ok(())
    }

    pub(crate) fn from_raw(spin: SpinQuantum, amplitudes: CVector<T>) -> Self {
        debug_assert_eq!(amplitudes.len(), spin.dim());
        DickeVector { spin, amplitudes }
    }

    pub fn spin(&self) -> SpinQuantum {
        self.spin
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    /// Complex conjugate in the Dicke basis.
    pub fn conjugate(&self) -> Self {
        DickeVector::from_raw(self.spin, self.amplitudes.map(|z| z.conj()))
    }
}

impl DickeVector<f64> {
    /// Random state; amplitudes drawn uniformly from the unit complex square then normalized.
    pub fn random(spin: SpinQuantum, rng: &mut impl Rng) -> Self {
        loop {
            let amps = CVector::from_fn(spin.dim(), |_, _| {
                Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            if let Ok(v) = DickeVector::normalized(spin, amps) {
                return v;
            }
        }
    }
}

/// `J_z = diag(j, j-1, ..., -j)`.
pub fn jz_matrix<T: Real>(spin: SpinQuantum) -> CMatrix<T> {
    let diag = CVector::from_fn(spin.dim(), |n, _| Complex::from(spin.m::<T>(n)));
    CMatrix::from_diagonal(&diag)
}

/// Raising operator: `J+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>`.
pub fn jplus_matrix<T: Real>(spin: SpinQuantum) -> CMatrix<T> {
    let d = spin.dim();
    let two_j = spin.two_j() as f64;
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        // m = j - n, so (j - m)(j + m + 1) = n (2j - n + 1)
        let nf = n as f64;
        m[(n - 1, n)] = Complex::from(lit::<T>((nf * (two_j - nf + 1.0)).sqrt()));
    }
    m
}

/// `J_y = (J+ - J-) / 2i`: Hermitian, tridiagonal, purely imaginary.
pub fn jy_matrix<T: Real>(spin: SpinQuantum) -> CMatrix<T> {
    let jp = jplus_matrix::<T>(spin);
    let jm = jp.adjoint();
    let half_i = Complex::new(T::zero(), lit::<T>(0.5));
    // (A - B) / (2i) = -(i/2)(A - B)
    (jp - jm) * (-half_i)
}

/// `J_x = (J+ + J-) / 2`.
pub fn jx_matrix<T: Real>(spin: SpinQuantum) -> CMatrix<T> {
    let jp = jplus_matrix::<T>(spin);
    let jm = jp.adjoint();
    (jp + jm) * Complex::from(lit::<T>(0.5))
}

/// Kick factor `exp(-i (k / 2j) J_z^2)`, diagonal.
pub fn torsion_exp<T: Real>(spin: SpinQuantum, k: T) -> CMatrix<T> {
    let sign = if fault::active(Fault::TorsionSign) {
        T::one()
    } else {
        -T::one()
    };
    // (k / 2j) m^2 = k (2m)^2 / (4 * 2j)
    let denom = lit::<T>(4.0 * spin.two_j() as f64);
    let diag = CVector::from_fn(spin.dim(), |n, _| {
        let two_m = spin.two_m(n) as f64;
        cis(sign * k * lit::<T>(two_m * two_m) / denom)
    });
    CMatrix::from_diagonal(&diag)
}

/// `exp(-i p J_y)` through the eigen-decomposition of `J_y`.
pub fn rotation_exp<T: Real>(spin: SpinQuantum, p: T) -> Result<CMatrix<T>> {
    let eig = hermitian_eigensystem(&jy_matrix::<T>(spin))?;
    Ok(eig.map_spectrum(|lambda| cis(-p * lambda)))
}

/// `exp(-i phi J_z)`, diagonal.
pub fn z_rotation_exp<T: Real>(spin: SpinQuantum, phi: T) -> CMatrix<T> {
    let diag = CVector::from_fn(spin.dim(), |n, _| cis(-phi * spin.m::<T>(n)));
    CMatrix::from_diagonal(&diag)
}

/// Spin-coherent state pointing along `(theta, phi)`.
///
/// Amplitude on `|j, j-n>` is `sqrt(C(2j, n)) cos(theta/2)^(2j-n) sin(theta/2)^n e^{+i n phi}`,
/// which equals `exp(-i phi J_z) exp(-i theta J_y) |j, j>` up to the global phase `e^{-i j phi}`.
pub fn coherent_state<T: Real>(spin: SpinQuantum, theta: T, phi: T) -> Result<DickeVector<T>> {
    let pi = T::pi();
    if !(theta >= T::zero() && theta <= pi) {
        return Err(Error::input(format!("theta = {theta} outside [0, pi]")));
    }
    if !(phi > -pi && phi <= pi) {
        return Err(Error::input(format!("phi = {phi} outside (-pi, pi]")));
    }
    let half = theta / lit(2.0);
    let (s, c) = (half.sin(), half.cos());
    let two_j = spin.two_j();
    let amps = CVector::from_fn(spin.dim(), |n, _| {
        let weight = lit::<T>((binomial(two_j, n as u32) as f64).sqrt());
        let mag = weight * c.powi((two_j as usize - n) as i32) * s.powi(n as i32);
        cis(lit::<T>(n as f64) * phi) * mag
    });
    // Norm is 1 analytically; renormalize away rounding.
    DickeVector::normalized(spin, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, phase_aligned_residual, unitarity_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spin(two_j: u32) -> SpinQuantum {
        SpinQuantum::from_two_j(two_j).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn spin_quantum_bounds() {
        assert!(SpinQuantum::from_two_j(0).is_err());
        assert!(SpinQuantum::from_two_j(65).is_err());
        assert_eq!(spin(3).dim(), 4);
        assert_eq!(spin(3).to_string(), "3/2");
        assert_eq!(spin(4).to_string(), "2");
    }

    #[test]
    fn binomials_exact() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(5, 7), 0);
        for n in 0..=64u32 {
            let total: u128 = (0..=n).map(|k| binomial(n, k) as u128).sum();
            assert_eq!(total, 1u128 << n);
        }
    }

    #[test]
    fn jz_diagonals() {
        let d: Vec<f64> = jz_matrix::<f64>(spin(2)).diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![1.0, 0.0, -1.0]);
        let d: Vec<f64> = jz_matrix::<f64>(spin(1)).diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![0.5, -0.5]);
        let d: Vec<f64> = jz_matrix::<f64>(spin(4)).diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![2.0, 1.0, 0.0, -1.0, -2.0]);
    }

    #[test]
    fn jy_spin_half_is_half_sigma_y() {
        let jy = jy_matrix::<f64>(spin(1));
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]);
        assert!(max_abs_diff(&jy, &expected) < 1e-15);
    }

    #[test]
    fn jy_spin_one_entries() {
        let jy = jy_matrix::<f64>(spin(2));
        let v = 1.0 / 2f64.sqrt();
        // 1/(i sqrt2) = -i/sqrt2 above the diagonal
        assert!((jy[(0, 1)] - c(0.0, -v)).norm() < 1e-15);
        assert!((jy[(1, 2)] - c(0.0, -v)).norm() < 1e-15);
        assert!((jy[(1, 0)] - c(0.0, v)).norm() < 1e-15);
        assert!((jy[(2, 1)] - c(0.0, v)).norm() < 1e-15);
        assert!(jy[(0, 2)].norm() == 0.0);
    }

    #[test]
    fn jy_hermitian_and_commutator() {
        for two_j in 1..=8 {
            let s = spin(two_j);
            let jy = jy_matrix::<f64>(s);
            assert_eq!(jy, jy.adjoint());
            assert!(jy.iter().all(|z| z.re == 0.0));
            // [J_z, J_x] = i J_y
            let jz = jz_matrix::<f64>(s);
            let jx = jx_matrix::<f64>(s);
            let comm = &jz * &jx - &jx * &jz;
            assert!(max_abs_diff(&comm, &(&jy * c(0.0, 1.0))) < 1e-12);
        }
    }

    #[test]
    fn torsion_spin_one() {
        let k = 0.83;
        let t = torsion_exp::<f64>(spin(2), k);
        let e = Complex::from_polar(1.0, -k / 2.0);
        assert!((t[(0, 0)] - e).norm() < 1e-15);
        assert!((t[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((t[(2, 2)] - e).norm() < 1e-15);
        assert!(max_abs_diff(&torsion_exp::<f64>(spin(5), 0.0), &CMatrix::identity(6, 6)) == 0.0);
    }

    #[test]
    fn torsion_shift_by_two_pi_for_spin_one() {
        let k = 1.7;
        let a = torsion_exp::<f64>(spin(2), k);
        let b = torsion_exp::<f64>(spin(2), k + 2.0 * std::f64::consts::PI);
        let parity = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(max_abs_diff(&b, &(parity * a)) < 1e-14);
    }

    #[test]
    fn rotation_identity_and_spin_half_pi() {
        for two_j in 1..=6 {
            let r = rotation_exp::<f64>(spin(two_j), 0.0).unwrap();
            let d = spin(two_j).dim();
            assert!(max_abs_diff(&r, &CMatrix::identity(d, d)) < 1e-12);
        }
        let r = rotation_exp::<f64>(spin(1), std::f64::consts::PI).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(&r, &expected) < 1e-12);
    }

    #[test]
    fn rotation_matches_closed_form_wigner_d() {
        // d^{1/2}(p) and d^1(p) in m-descending order
        for &p in &[0.3, 1.1, 2.9, -0.7] {
            let (cp, sp) = ((p / 2.0f64).cos(), (p / 2.0f64).sin());
            let half = CMatrix::from_row_slice(2, 2, &[c(cp, 0.0), c(-sp, 0.0), c(sp, 0.0), c(cp, 0.0)]);
            assert!(max_abs_diff(&rotation_exp::<f64>(spin(1), p).unwrap(), &half) < 1e-12);

            let (cb, sb) = (p.cos(), p.sin());
            let r2 = 2f64.sqrt();
            let one = CMatrix::from_row_slice(
                3,
                3,
                &[
                    c((1.0 + cb) / 2.0, 0.0),
                    c(-sb / r2, 0.0),
                    c((1.0 - cb) / 2.0, 0.0),
                    c(sb / r2, 0.0),
                    c(cb, 0.0),
                    c(-sb / r2, 0.0),
                    c((1.0 - cb) / 2.0, 0.0),
                    c(sb / r2, 0.0),
                    c((1.0 + cb) / 2.0, 0.0),
                ],
            );
            assert!(max_abs_diff(&rotation_exp::<f64>(spin(2), p).unwrap(), &one) < 1e-12);
        }
    }

    #[test]
    fn rotations_unitary_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for two_j in 1..=12 {
            let p: f64 = rng.random_range(-7.0..7.0);
            let r = rotation_exp::<f64>(spin(two_j), p).unwrap();
            assert!(unitarity_residual(&r) < 1e-12);
            let back = rotation_exp::<f64>(spin(two_j), -p).unwrap();
            let d = spin(two_j).dim();
            assert!(max_abs_diff(&(r * back), &CMatrix::identity(d, d)) < 1e-12);
            assert!(unitarity_residual(&torsion_exp::<f64>(spin(two_j), p)) < 1e-12);
        }
    }

    #[test]
    fn coherent_state_examples() {
        let north = coherent_state::<f64>(spin(4), 0.0, 0.0).unwrap();
        assert_eq!(north.amplitudes()[0], c(1.0, 0.0));
        assert!(north.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));

        let eq = coherent_state::<f64>(spin(1), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((eq.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((eq.amplitudes()[1] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coherent_state_matches_rotation_oracle() {
        for two_j in [1u32, 2, 3, 4, 7] {
            let s = spin(two_j);
            let (theta, phi) = (2.5, 1.1);
            let mut top = CVector::zeros(s.dim());
            top[0] = c(1.0, 0.0);
            let rotated = z_rotation_exp::<f64>(s, phi) * rotation_exp::<f64>(s, theta).unwrap() * top;
            let cs = coherent_state::<f64>(s, theta, phi).unwrap();
            assert!(phase_aligned_residual(cs.amplitudes(), &rotated) < 1e-12);
        }
    }

    #[test]
    fn coherent_state_points_along_direction() {
        let s = spin(6);
        let (theta, phi) = (1.2f64, -2.3f64);
        let psi = coherent_state::<f64>(s, theta, phi).unwrap();
        let expect = |op: CMatrix<f64>| (psi.amplitudes().adjoint() * op * psi.amplitudes())[(0, 0)].re;
        let j = 3.0;
        assert!((expect(jx_matrix(s)) / j - theta.sin() * phi.cos()).abs() < 1e-12);
        assert!((expect(jy_matrix(s)) / j - theta.sin() * phi.sin()).abs() < 1e-12);
        assert!((expect(jz_matrix(s)) / j - theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_rejects_out_of_range() {
        assert!(coherent_state::<f64>(spin(2), -0.1, 0.0).is_err());
        assert!(coherent_state::<f64>(spin(2), 0.1, -std::f64::consts::PI).is_err());
        assert!(coherent_state::<f64>(spin(2), 0.1, std::f64::consts::PI).is_ok());
    }

    #[test]
    fn coherent_state_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pi = std::f64::consts::PI;
        for i in 0..10_000 {
            let s = spin(1 + (i % 64) as u32);
            let theta = rng.random_range(0.0..=pi);
            let phi = pi - rng.random_range(0.0..2.0 * pi);
            let psi = coherent_state::<f64>(s, theta, phi).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_builders() {
        let r = rotation_exp::<f32>(spin(4), 0.9).unwrap();
        assert!(unitarity_residual(&r) < 1e-5);
        let cs = coherent_state::<f32>(spin(4), 1.0, 0.5).unwrap();
        assert!((cs.norm() - 1.0).abs() < 1e-6);
    }
}
