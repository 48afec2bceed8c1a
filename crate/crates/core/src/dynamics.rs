//! Kicked-top Floquet operator, stroboscopic evolution, closed-form powers
//! for two qubits, and the parity / local-unitary identity behind the
//! periodicity in kick strength.

use nalgebra::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::linalg::{phase_aligned_residual, CMatrix, CVector};
use crate::scalar::{cis, lit, Real};
use crate::spinalg::{rotation_exp, torsion_exp, DickeVector, SpinQuantum};

/// Precession angle per period.
///
/// Multiples of `pi/2` are kept symbolic so that case analysis on them is
/// exact rather than tolerance based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precession<T> {
    /// `quarter_turns * pi/2`, with `quarter_turns` in `0..=4`.
    Quarter(u8),
    Free(T),
}

impl<T: Real> Precession<T> {
    pub const ZERO: Self = Precession::Quarter(0);
    pub const HALF_PI: Self = Precession::Quarter(1);
    pub const PI: Self = Precession::Quarter(2);
    pub const THREE_HALVES_PI: Self = Precession::Quarter(3);
    pub const TWO_PI: Self = Precession::Quarter(4);

    pub fn quarter(turns: u8) -> Result<Self> {
        if turns > 4 {
            return Err(Error::input(format!("{turns} quarter turns: expected 0..=4")));
        }
        Ok(Precession::Quarter(turns))
    }

    pub fn value(self) -> T {
        match self {
            Precession::Quarter(q) => T::frac_pi_2() * lit(q as f64),
            Precession::Free(p) => p,
        }
    }

    pub fn quarter_turns(self) -> Option<u8> {
        match self {
            Precession::Quarter(q) => Some(q),
            Precession::Free(_) => None,
        }
    }
}

impl<T: Real> std::fmt::Display for Precession<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precession::Quarter(0) => write!(f, "0"),
            Precession::Quarter(1) => write!(f, "pi/2"),
            Precession::Quarter(2) => write!(f, "pi"),
            Precession::Quarter(3) => write!(f, "3pi/2"),
            Precession::Quarter(4) => write!(f, "2pi"),
            Precession::Quarter(q) => write!(f, "{q}pi/2"),
            Precession::Free(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetParams<T> {
    pub spin: SpinQuantum,
    /// Kick strength (chaos parameter).
    pub k: T,
    pub p: Precession<T>,
}

impl<T: Real> FloquetParams<T> {
    pub fn new(spin: SpinQuantum, k: T, p: Precession<T>) -> Result<Self> {
        if !k.is_finite() || !p.value().is_finite() {
            return Err(Error::input("k and p must be finite"));
        }
        Ok(FloquetParams { spin, k, p })
    }

    pub fn with_k(self, k: T) -> Self {
        FloquetParams { k, ..self }
    }
}

/// Kick strength `r pi / s`, stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalKick {
    r: u64,
    s: u64,
}

impl RationalKick {
    pub fn new(r: u64, s: u64) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(Error::input(format!("kick r/s = {r}/{s}: both must be positive")));
        }
        let g = r.gcd(&s);
        Ok(RationalKick { r: r / g, s: s / g })
    }

    pub fn r(self) -> u64 {
        self.r
    }

    pub fn s(self) -> u64 {
        self.s
    }

    pub fn value<T: Real>(self) -> T {
        T::pi() * lit(self.r as f64) / lit(self.s as f64)
    }
}

impl std::fmt::Display for RationalKick {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}pi/{}", self.r, self.s)
    }
}

/// One-period propagator `U = exp(-i (k/2j) J_z^2) exp(-i p J_y)`.
#[derive(Debug, Clone)]
pub struct FloquetOperator<T: Real> {
    params: FloquetParams<T>,
    matrix: CMatrix<T>,
}

impl<T: Real> FloquetOperator<T> {
    pub fn params(&self) -> &FloquetParams<T> {
        &self.params
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, psi: &DickeVector<T>) -> DickeVector<T> {
        assert_eq!(psi.spin(), self.params.spin, "state and operator spin differ");
        DickeVector::from_raw(psi.spin(), &self.matrix * psi.amplitudes())
    }

    /// `U^n` by binary exponentiation.
    pub fn power(&self, n: u64) -> CMatrix<T> {
        let d = self.matrix.nrows();
        let mut acc = CMatrix::identity(d, d);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

pub fn build_floquet<T: Real>(params: FloquetParams<T>) -> Result<FloquetOperator<T>> {
    let kick = torsion_exp(params.spin, params.k);
    let precess = rotation_exp(params.spin, params.p.value())?;
    Ok(FloquetOperator {
        params,
        matrix: kick * precess,
    })
}

/// Stroboscopic trajectory `states[t] = U^t psi0`, `t = 0..=t_max`.
#[derive(Debug, Clone)]
pub struct EvolutionRecord<T: Real> {
    pub params: FloquetParams<T>,
    pub states: Vec<DickeVector<T>>,
    /// Steps at which the norm drifted by more than the threshold and was restored.
    pub renormalized_at: Vec<usize>,
}

impl<T: Real> EvolutionRecord<T> {
    pub fn initial(&self) -> &DickeVector<T> {
        &self.states[0]
    }

    pub fn t_max(&self) -> usize {
        self.states.len() - 1
    }
}

const NORM_DRIFT: f64 = 1e-12;

pub fn evolve<T: Real>(
    params: FloquetParams<T>,
    psi0: &DickeVector<T>,
    t_max: usize,
) -> Result<EvolutionRecord<T>> {
    if psi0.spin() != params.spin {
        return Err(Error::input("initial state spin does not match parameters"));
    }
    let u = build_floquet(params)?;
    Ok(evolve_with(&u, psi0, t_max))
}

pub fn evolve_with<T: Real>(
    u: &FloquetOperator<T>,
    psi0: &DickeVector<T>,
    t_max: usize,
) -> EvolutionRecord<T> {
    let drift = crate::scalar::tol::<T>(NORM_DRIFT);
    let mut states = Vec::with_capacity(t_max + 1);
    let mut renormalized_at = Vec::new();
    states.push(psi0.clone());
    for t in 1..=t_max {
        let mut next = u.apply(&states[t - 1]);
        let norm = next.norm();
        if (norm - T::one()).abs() > drift {
            next = DickeVector::from_raw(next.spin(), next.amplitudes().unscale(norm));
            renormalized_at.push(t);
        }
        states.push(next);
    }
    EvolutionRecord {
        params: *u.params(),
        states,
        renormalized_at,
    }
}

/// `U^n` for `j = 1` assembled from the spectral data of `U` at `p = pi/2` or `p = pi`.
pub fn closed_form_power<T: Real>(k: T, p: Precession<T>, n: u64) -> Result<CMatrix<T>> {
    let zero = Complex::from(T::zero());
    let one = T::one();
    let r2 = lit::<T>(2.0).sqrt();
    let half = lit::<T>(0.5);
    // eigenpairs (lambda^n, v)
    let pairs: Vec<(Complex<T>, [Complex<T>; 3])> = match p.quarter_turns() {
        Some(1) => {
            // e^{-ik/2}, -i e^{-ik/4}, i e^{-ik/4}
            let n_f = lit::<T>(n as f64);
            let l1 = cis(-k * n_f / lit(2.0));
            let base = cis(-k * n_f / lit(4.0));
            let l2 = i_power::<T>(n, false) * base;
            let l3 = i_power::<T>(n, true) * base;
            let w = cis(k / lit(4.0)) * Complex::new(T::zero(), one / r2);
            vec![
                (l1, [Complex::from(one / r2), zero, Complex::from(one / r2)]),
                (l2, [Complex::from(-half), -w, Complex::from(half)]),
                (l3, [Complex::from(-half), w, Complex::from(half)]),
            ]
        }
        Some(2) => {
            // -e^{-ik/2}, e^{-ik/2}, -1
            let e = cis(-k * lit::<T>(n as f64) / lit(2.0));
            let sign = if n.is_multiple_of(2) { one } else { -one };
            vec![
                (e * sign, [Complex::from(-one / r2), zero, Complex::from(one / r2)]),
                (e, [Complex::from(one / r2), zero, Complex::from(one / r2)]),
                (Complex::from(sign), [zero, Complex::from(one), zero]),
            ]
        }
        _ => {
            return Err(Error::input(format!(
                "closed-form power only available for p = pi/2 or pi, got {p}"
            )))
        }
    };
    let mut out = CMatrix::zeros(3, 3);
    for (lambda, v) in pairs {
        let v = CVector::from_row_slice(&v);
        out += (&v * v.adjoint()) * lambda;
    }
    Ok(out)
}

/// `(-i)^n` or `i^n`, exactly.
fn i_power<T: Real>(n: u64, positive: bool) -> Complex<T> {
    let one = T::one();
    let z = T::zero();
    let q = if positive { n % 4 } else { (4 - n % 4) % 4 };
    match q {
        0 => Complex::new(one, z),
        1 => Complex::new(z, one),
        2 => Complex::new(-one, z),
        _ => Complex::new(z, -one),
    }
}

/// `exp(-i pi J_z^2)`, with exactly representable phases.
pub fn parity_operator<T: Real>(spin: SpinQuantum) -> CMatrix<T> {
    let diag = CVector::from_fn(spin.dim(), |n, _| {
        let two_m = spin.two_m(n);
        // pi m^2 = pi (2m)^2 / 4, and (2m)^2 mod 8 is 0, 1 or 4
        match (two_m * two_m).rem_euclid(8) {
            0 => Complex::from(T::one()),
            4 => Complex::from(-T::one()),
            _ => cis(-T::frac_pi_4()),
        }
    });
    CMatrix::from_diagonal(&diag)
}

/// Action of `sigma_z` on every qubit: amplitude `n` picks up `(-1)^n`.
pub fn local_sigmaz_product<T: Real>(psi: &DickeVector<T>) -> DickeVector<T> {
    let amps = CVector::from_fn(psi.spin().dim(), |n, _| {
        if n % 2 == 0 {
            psi.amplitudes()[n]
        } else {
            -psi.amplitudes()[n]
        }
    });
    DickeVector::from_raw(psi.spin(), amps)
}

/// Which local unitary realizes the parity action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityRelation {
    /// Integer `j`: parity equals `(x) sigma_z` up to the sign `(-1)^j`.
    SigmaZProduct,
    /// Half-integer `j`: parity is the global phase `e^{-i pi/4}`.
    GlobalPhase,
}

#[derive(Debug, Clone, Copy)]
pub struct ParityIdentity<T> {
    pub relation: ParityRelation,
    /// Max-abs residual after optimal global-phase alignment.
    pub residual: T,
}

/// Checks that the parity action on `psi` is a local unitary action up to global phase.
pub fn verify_parity_lu_identity<T: Real>(psi: &DickeVector<T>) -> ParityIdentity<T> {
    let spin = psi.spin();
    let parity = parity_operator::<T>(spin) * psi.amplitudes();
    let (relation, local) = if spin.is_integer() {
        (ParityRelation::SigmaZProduct, local_sigmaz_product(psi).into_amplitudes())
    } else {
        (ParityRelation::GlobalPhase, psi.amplitudes().clone())
    };
    ParityIdentity {
        relation,
        residual: phase_aligned_residual(&local, &parity),
    }
}
