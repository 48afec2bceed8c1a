//! Verification harness for the periodicity and symmetry properties of the
//! kicked top: period `2j pi` in `k`, reflection about `k = j pi`, the
//! two-qubit time periods, the mirror identities at `p = pi`, and the
//! local-unitary form of the parity operator.
//!
//! Failed comparisons are results, not errors. An `Err` means the request
//! itself was invalid or the numerics broke down.

use nalgebra::Complex;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{self, Angles, SpecialPrecession, SpherePoint};
use crate::dynamics::{
    build_floquet, closed_form_power, evolve, evolve_with, parity_operator,
    verify_parity_lu_identity, FloquetParams, Precession, RationalKick,
};
use crate::error::{Error, Result};
use crate::fault;
use crate::linalg::{max_abs_diff, phase_aligned_matrix_residual, phase_aligned_residual, CMatrix};
use crate::measures::{report, CorrelationReport, DiscordSettings};
use crate::reduction::{brute_force_rdm, dicke_rdm, expand_to_qubits};
use crate::spinalg::{coherent_state, DickeVector, SpinQuantum};

/// Default comparison tolerance; discord carries minimizer noise.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Entropies are compared at this tolerance (or the check tolerance, if tighter).
pub const ENTROPY_TOL: f64 = 1e-10;
/// Matrix identities for `j = 1`.
pub const MATRIX_TOL: f64 = 1e-10;
/// Parity / local-unitary residual.
pub const LU_TOL: f64 = 1e-12;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const CONJUGACY_TOL: f64 = 1e-14;
pub const SPECIAL_MAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    KPeriod,
    TimePeriod,
    MirrorA,
    MirrorB,
    Reflection,
    LuEquivalence,
    Classical,
    Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    /// Concurrence matched but some other measure did not.
    Partial,
    Fail,
}

/// Inputs of a check, echoed into the report.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CheckParams {
    pub two_j: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kick: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<f64>,
    pub t_max: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl CheckParams {
    fn floquet(params: &FloquetParams<f64>, initial: Option<Angles<f64>>, t_max: usize, tolerance: f64) -> Self {
        CheckParams {
            two_j: params.spin.two_j(),
            p: Some(params.p.to_string()),
            k: Some(params.k),
            theta0: initial.map(|a| a.theta),
            phi0: initial.map(|a| a.phi),
            t_max,
            tolerance,
            ..Default::default()
        }
    }
}

/// Where the largest deviation occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Location {
    pub t: usize,
    pub measure: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDeviation {
    pub measure: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Outcome for one candidate initial-state transform in a reflection check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformVerdict {
    pub transform: String,
    pub theta0: f64,
    pub phi0: f64,
    pub passed: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicityCheck {
    pub kind: CheckKind,
    pub params: CheckParams,
    pub outcome: Outcome,
    /// Largest absolute deviation over all measures and times.
    pub max_deviation: f64,
    pub worst: Option<Location>,
    pub measures: Vec<MeasureDeviation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl PeriodicityCheck {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    fn broken(kind: CheckKind, params: CheckParams, err: &Error) -> Self {
        PeriodicityCheck {
            kind,
            params,
            outcome: Outcome::Fail,
            max_deviation: f64::INFINITY,
            worst: None,
            measures: Vec::new(),
            transforms: Vec::new(),
            detail: Some(err.to_string()),
        }
    }
}

/// Contract and scale violations raised while running a check (for example by
/// a corrupted reduction) are turned into failed checks. Numerical and input
/// errors propagate.
fn settle(kind: CheckKind, params: CheckParams, body: Result<PeriodicityCheck>) -> Result<PeriodicityCheck> {
    match body {
        Err(e @ (Error::Contract(_) | Error::Scale(_))) => Ok(PeriodicityCheck::broken(kind, params, &e)),
        other => other,
    }
}

/// Accumulates per-measure maximum deviations.
struct Tracker {
    tol: f64,
    measures: Vec<(String, f64, f64)>,
    worst: Option<(f64, usize, String)>,
}

impl Tracker {
    fn new(tol: f64) -> Self {
        Tracker {
            tol,
            measures: Vec::new(),
            worst: None,
        }
    }

    fn record(&mut self, t: usize, measure: &str, deviation: f64, tolerance: f64) {
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        match self.measures.iter_mut().find(|m| m.0 == measure) {
            Some(m) => m.1 = m.1.max(deviation),
            None => self.measures.push((measure.to_string(), deviation, tolerance)),
        }
        if self.worst.as_ref().is_none_or(|w| deviation > w.0) {
            self.worst = Some((deviation, t, measure.to_string()));
        }
    }

    fn measure_tol(&self, name: &str) -> f64 {
        if CorrelationReport::<f64>::is_entropy(name) {
            self.tol.min(ENTROPY_TOL)
        } else {
            self.tol
        }
    }

    fn compare(&mut self, t: usize, a: &CorrelationReport<f64>, b: &CorrelationReport<f64>) {
        for ((name, x), (_, y)) in a.fields().into_iter().zip(b.fields()) {
            let dev = match (x, y) {
                (Some(x), Some(y)) => (x - y).abs(),
                (None, None) => continue,
                _ => f64::INFINITY,
            };
            let tol = self.measure_tol(name);
            self.record(t, name, dev, tol);
        }
    }

    fn max_deviation(&self) -> f64 {
        self.measures.iter().fold(0.0, |m, d| m.max(d.1))
    }

    fn all_pass(&self) -> bool {
        self.measures.iter().all(|m| m.1 <= m.2)
    }

    fn finish(self, kind: CheckKind, params: CheckParams, allow_partial: bool) -> PeriodicityCheck {
        let measures: Vec<MeasureDeviation> = self
            .measures
            .iter()
            .map(|(name, dev, tol)| MeasureDeviation {
                measure: name.clone(),
                max_deviation: *dev,
                tolerance: *tol,
                passed: dev <= tol,
            })
            .collect();
        let outcome = if measures.iter().all(|m| m.passed) {
            Outcome::Pass
        } else if allow_partial
            && measures
                .iter()
                .any(|m| m.measure == "concurrence" && m.passed)
        {
            Outcome::Partial
        } else {
            Outcome::Fail
        };
        PeriodicityCheck {
            kind,
            params,
            outcome,
            max_deviation: self.max_deviation(),
            worst: self.worst.map(|(_, t, measure)| Location { t, measure }),
            measures,
            transforms: Vec::new(),
            detail: None,
        }
    }
}

fn coherent(spin: SpinQuantum, a: Angles<f64>) -> Result<DickeVector<f64>> {
    coherent_state(spin, a.theta, a.phi)
}

/// Correlation reports along the stroboscopic trajectory, `t = 0..=t_max`.
pub fn report_series(
    params: FloquetParams<f64>,
    psi0: &DickeVector<f64>,
    t_max: usize,
    settings: &DiscordSettings,
) -> Result<Vec<CorrelationReport<f64>>> {
    let record = evolve(params, psi0, t_max)?;
    record.states.iter().map(|s| report(s, settings)).collect()
}

/// Checks that all correlation measures agree between kick strengths `k`
/// and `k + 2j pi` for `t = 0..=t_max`. For `j = 1/2` there are no
/// correlations and the states themselves are compared up to global phase.
///
/// The period holds when `p` is a multiple of `pi/2`: the parity factor
/// picked up at each step flips `p` to `-p`, and `exp(-2ipJ_y)` must commute
/// with the kick for the factors to collect into one local unitary. For other
/// `p` the check fails from `t = 2` on.
pub fn verify_k_periodicity(
    params: FloquetParams<f64>,
    initial: Angles<f64>,
    t_max: usize,
    tol: f64,
    settings: &DiscordSettings,
) -> Result<PeriodicityCheck> {
    if t_max == 0 {
        return Err(Error::input("t_max must be at least 1"));
    }
    let spin = params.spin;
    let shifted = params.with_k(params.k + k_period(spin));
    let cp = CheckParams::floquet(&params, Some(initial), t_max, tol);
    let body = (|| {
        let psi0 = coherent(spin, initial)?;
        let mut tracker = Tracker::new(tol);
        if spin.two_j() == 1 {
            let a = evolve(params, &psi0, t_max)?;
            let b = evolve(shifted, &psi0, t_max)?;
            for (t, (x, y)) in a.states.iter().zip(&b.states).enumerate() {
                let dev = phase_aligned_residual(x.amplitudes(), y.amplitudes());
                tracker.record(t, "state", dev, tol);
            }
        } else {
            let a = report_series(params, &psi0, t_max, settings)?;
            let b = report_series(shifted, &psi0, t_max, settings)?;
            for (t, (x, y)) in a.iter().zip(&b).enumerate() {
                tracker.compare(t, x, y);
            }
        }
        Ok(tracker.finish(CheckKind::KPeriod, cp.clone(), false))
    })();
    settle(CheckKind::KPeriod, cp, body)
}

/// `kappa = 2j pi`.
pub fn k_period(spin: SpinQuantum) -> f64 {
    spin.two_j() as f64 * std::f64::consts::PI
}

/// `j pi`: beyond it the dynamics repeat as a reflection.
pub fn k_max(spin: SpinQuantum) -> f64 {
    spin.j::<f64>() * std::f64::consts::PI
}

/// `min(tau_coh, T)`.
pub fn experiment_window(tau_coh: f64, period: usize) -> Result<f64> {
    if !(tau_coh > 0.0) {
        return Err(Error::input("coherence time must be positive"));
    }
    Ok(tau_coh.min(period as f64))
}

/// Time period of the `j = 1` correlations for `k = r pi / s`.
pub fn predicted_time_period(p: Precession<f64>, kick: RationalKick) -> Result<usize> {
    let s = kick.s() as usize;
    let odd = kick.r().is_odd();
    match p.quarter_turns() {
        Some(1 | 3) => Ok(if odd { 4 * s } else { 2 * s }),
        Some(0 | 2 | 4) => Ok(if odd { 2 * s } else { s }),
        _ => Err(Error::input(format!(
            "time period is only known for p a multiple of pi/2, got {p}"
        ))),
    }
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn i_pow(n: u64) -> Complex<f64> {
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(n % 4) as usize]
}

/// `[[0,0,1],[0,-1,0],[1,0,0]]`.
fn flip_matrix() -> CMatrix<f64> {
    let z = c(0.0, 0.0);
    CMatrix::from_row_slice(3, 3, &[z, z, c(1.0, 0.0), z, c(-1.0, 0.0), z, c(1.0, 0.0), z, z])
}

/// `diag(-1, 1, -1)`, which is `-(sigma_z (x) sigma_z)` on the triplet.
fn z_matrix() -> CMatrix<f64> {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]))
}

fn torsion_diag(k: f64, n: u64) -> CMatrix<f64> {
    let e = Complex::from_polar(1.0, -k * n as f64 / 2.0);
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![e, c(1.0, 0.0), e]))
}

/// `U^n` for `j = 1` where a closed form is known.
fn reference_power(k: f64, p: Precession<f64>, n: u64) -> Option<CMatrix<f64>> {
    match p.quarter_turns() {
        Some(1 | 2) => closed_form_power(k, p, n).ok(),
        Some(0 | 4) => Some(torsion_diag(k, n)),
        _ => None,
    }
}

/// Expected `U^T`; `None` means "some element of the local-unitary group up to phase".
fn expected_period_matrix(p: Precession<f64>, kick: RationalKick, period: usize) -> Option<CMatrix<f64>> {
    let r = kick.r();
    match p.quarter_turns() {
        Some(1) => Some(if r % 4 == 2 { CMatrix::identity(3, 3) } else { flip_matrix() }),
        Some(2) if r.is_odd() => Some(z_matrix()),
        Some(2) => {
            let z = c(0.0, 0.0);
            let e = i_pow(r);
            Some(CMatrix::from_row_slice(3, 3, &[z, z, e, z, c(-1.0, 0.0), z, e, z, z]))
        }
        Some(0 | 4) => Some(torsion_diag(kick.value(), period as u64)),
        _ => None,
    }
}

fn lu_group_residual(m: &CMatrix<f64>) -> f64 {
    let a = flip_matrix();
    let z = z_matrix();
    [CMatrix::identity(3, 3), z.clone(), a.clone(), &z * &a]
        .iter()
        .map(|g| phase_aligned_matrix_residual(g, m))
        .fold(f64::INFINITY, f64::min)
}

fn two_qubit() -> SpinQuantum {
    SpinQuantum::from_two_j(2).expect("2j = 2 is valid")
}

/// Checks `report(t) = report(t + T)` for `t = 0..=cycles T` at `j = 1`, and
/// at matrix level that `U^n` follows its closed form for `n <= T` and that
/// `U^T` is the expected local unitary.
pub fn verify_time_periodicity(
    spin: SpinQuantum,
    p: Precession<f64>,
    kick: RationalKick,
    initial: Angles<f64>,
    cycles: usize,
    tol: f64,
    settings: &DiscordSettings,
) -> Result<PeriodicityCheck> {
    if spin.two_j() != 2 {
        return Err(Error::input(format!(
            "time periodicity is a j = 1 property, got j = {spin}"
        )));
    }
    if cycles == 0 {
        return Err(Error::input("cycles must be at least 1"));
    }
    let period = predicted_time_period(p, kick)?;
    let params = FloquetParams::new(spin, kick.value(), p)?;
    let t_max = (cycles + 1) * period;
    let mut cp = CheckParams::floquet(&params, Some(initial), t_max, tol);
    cp.kick = Some(kick.to_string());
    let body = (|| {
        let u = build_floquet(params)?;
        let mut tracker = Tracker::new(tol);
        let mut power = CMatrix::identity(3, 3);
        for n in 1..=period {
            power = u.matrix() * power;
            if let Some(reference) = reference_power(params.k, p, n as u64) {
                tracker.record(n, "matrix-power", max_abs_diff(&power, &reference), MATRIX_TOL);
            }
        }
        let dev = match expected_period_matrix(p, kick, period) {
            Some(expected) => max_abs_diff(&power, &expected),
            None => lu_group_residual(&power),
        };
        tracker.record(period, "period-matrix", dev, MATRIX_TOL);

        let psi0 = coherent(spin, initial)?;
        let record = evolve_with(&u, &psi0, t_max);
        let reports: Vec<_> = record
            .states
            .iter()
            .map(|s| report(s, settings))
            .collect::<Result<_>>()?;
        for t in 0..=cycles * period {
            tracker.compare(t, &reports[t], &reports[t + period]);
        }
        Ok(tracker.finish(CheckKind::TimePeriod, cp.clone(), false))
    })();
    settle(CheckKind::TimePeriod, cp, body)
}

/// Initial state of a check.
#[derive(Debug, Clone)]
pub enum Initial {
    Coherent(Angles<f64>),
    State(DickeVector<f64>),
}

impl Initial {
    fn resolve(&self, spin: SpinQuantum) -> Result<DickeVector<f64>> {
        match self {
            Initial::Coherent(a) => coherent(spin, *a),
            Initial::State(psi) if psi.spin() == spin => Ok(psi.clone()),
            Initial::State(psi) => Err(Error::input(format!(
                "initial state has j = {}, expected {spin}",
                psi.spin()
            ))),
        }
    }

    fn angles(&self) -> Option<Angles<f64>> {
        match self {
            Initial::Coherent(a) => Some(*a),
            Initial::State(_) => None,
        }
    }
}

/// `ac = b^2/2` for `a|11> + b|1,0> + c|00>`.
const SEPARABILITY_TOL: f64 = 1e-10;

/// Time pairs with equal correlations at `p = pi`, `j = 1`, for `k = r pi / s`.
pub fn mirror_pairs(kick: RationalKick) -> (CheckKind, Vec<(usize, usize)>) {
    let s = kick.s() as usize;
    if kick.r().is_odd() {
        (CheckKind::MirrorA, (1..s).map(|l| (s - l, s + l)).collect())
    } else {
        // r even forces s odd
        let pairs = (1..=s.saturating_sub(3) / 2)
            .map(|l| ((s - 2 * l - 1) / 2, (s + 2 * l + 1) / 2))
            .collect();
        (CheckKind::MirrorB, pairs)
    }
}

/// Mirror identities at `p = pi` for a separable `j = 1` initial state.
/// An empty set of pairs passes vacuously.
pub fn verify_mirror_identities(
    kick: RationalKick,
    initial: &Initial,
    tol: f64,
    settings: &DiscordSettings,
) -> Result<PeriodicityCheck> {
    let spin = two_qubit();
    let psi0 = initial.resolve(spin)?;
    let a = psi0.amplitudes();
    let gap = (a[0] * a[2] - a[1] * a[1] * 0.5).norm();
    if gap > SEPARABILITY_TOL {
        return Err(Error::input(format!(
            "mirror identities need a separable initial state (|ac - b^2/2| = {gap:e})"
        )));
    }
    let params = FloquetParams::new(spin, kick.value(), Precession::PI)?;
    let (kind, pairs) = mirror_pairs(kick);
    let t_max = pairs.iter().map(|&(_, b)| b).max().unwrap_or(0);
    let mut cp = CheckParams::floquet(&params, initial.angles(), t_max, tol);
    cp.kick = Some(kick.to_string());
    let body = (|| {
        let reports = report_series(params, &psi0, t_max, settings)?;
        let mut tracker = Tracker::new(tol);
        for &(t1, t2) in &pairs {
            tracker.compare(t2, &reports[t1], &reports[t2]);
        }
        let mut check = tracker.finish(kind, cp.clone(), true);
        if pairs.is_empty() {
            check.detail = Some("no pairs for this s".into());
        }
        Ok(check)
    })();
    settle(kind, cp, body)
}

/// Candidate maps `(theta0, phi0) -> (theta0', phi0')` for the reflection check.
pub const REFLECTION_TRANSFORMS: [&str; 4] = [
    "(pi-theta, phi)",
    "(pi-theta, pi-phi)",
    "(pi-theta, phi+pi)",
    "(theta, -phi)",
];

fn apply_transform(index: usize, a: Angles<f64>) -> Angles<f64> {
    use std::f64::consts::PI;
    let (theta, phi) = match index {
        0 => (PI - a.theta, a.phi),
        1 => (PI - a.theta, PI - a.phi),
        2 => (PI - a.theta, a.phi + PI),
        _ => (a.theta, -a.phi),
    };
    Angles::wrapped(theta, phi)
}

/// Compares the evolution at `k1` with the evolution at `k2 = 2j pi - k1`
/// from each transformed initial state. Passes if at least one transform
/// reproduces every measure at every `t`; all verdicts are recorded.
pub fn verify_reflection(
    params: FloquetParams<f64>,
    initial: Angles<f64>,
    t_max: usize,
    tol: f64,
    settings: &DiscordSettings,
) -> Result<PeriodicityCheck> {
    let spin = params.spin;
    if spin.two_j() < 2 {
        return Err(Error::input("reflection check needs 2j >= 2"));
    }
    if !(params.k >= 0.0 && params.k <= k_max(spin) + 1e-12) {
        return Err(Error::input(format!(
            "k1 = {} outside [0, j pi = {}]",
            params.k,
            k_max(spin)
        )));
    }
    let k2 = k_period(spin) - params.k;
    let cp = CheckParams::floquet(&params, Some(initial), t_max, tol);
    let body = (|| {
        let base = report_series(params, &coherent(spin, initial)?, t_max, settings)?;
        let mut best: Option<Tracker> = None;
        let mut verdicts = Vec::new();
        for (i, name) in REFLECTION_TRANSFORMS.iter().enumerate() {
            let moved = apply_transform(i, initial);
            let other = report_series(params.with_k(k2), &coherent(spin, moved)?, t_max, settings)?;
            let mut tracker = Tracker::new(tol);
            for (t, (x, y)) in base.iter().zip(&other).enumerate() {
                tracker.compare(t, x, y);
            }
            verdicts.push(TransformVerdict {
                transform: name.to_string(),
                theta0: moved.theta,
                phi0: moved.phi,
                passed: tracker.all_pass(),
                max_deviation: tracker.max_deviation(),
            });
            let better = match &best {
                None => true,
                Some(b) => {
                    (tracker.all_pass() && !b.all_pass())
                        || (tracker.all_pass() == b.all_pass() && tracker.max_deviation() < b.max_deviation())
                }
            };
            if better {
                best = Some(tracker);
            }
        }
        let mut check = best
            .expect("four candidates")
            .finish(CheckKind::Reflection, cp.clone(), false);
        let passing: Vec<&str> = verdicts
            .iter()
            .filter(|v| v.passed)
            .map(|v| v.transform.as_str())
            .collect();
        check.detail = Some(if passing.is_empty() {
            "no transform reproduces the k1 evolution".into()
        } else {
            format!("passing transforms: {}", passing.join(", "))
        });
        check.transforms = verdicts;
        Ok(check)
    })();
    settle(CheckKind::Reflection, cp, body)
}

/// Parity action versus the local unitary `(x) sigma_z` (integer `j`) or a
/// global phase (half-integer `j`), on random states, both in the Dicke basis
/// and after expansion into the qubit basis.
pub fn verify_lu_equivalence(spin: SpinQuantum, samples: usize, seed: u64) -> Result<PeriodicityCheck> {
    let cp = CheckParams {
        two_j: spin.two_j(),
        tolerance: LU_TOL,
        samples: Some(samples),
        ..Default::default()
    };
    let body = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parity = parity_operator::<f64>(spin);
        let mut tracker = Tracker::new(LU_TOL);
        let mut relation = None;
        for i in 0..samples {
            let psi = DickeVector::random(spin, &mut rng);
            let identity = verify_parity_lu_identity(&psi);
            relation = Some(identity.relation);
            tracker.record(i, "dicke-residual", identity.residual, LU_TOL);
            if spin.two_j() <= crate::reduction::MAX_EXPANSION_QUBITS {
                let acted = DickeVector::normalized(spin, &parity * psi.amplitudes())?;
                let lhs = expand_to_qubits(&acted)?;
                let full = expand_to_qubits(&psi)?;
                let rhs = if spin.is_integer() { full.apply_sigmaz_all() } else { full };
                tracker.record(i, "qubit-residual", phase_aligned_residual(lhs.amplitudes(), rhs.amplitudes()), LU_TOL);
            }
        }
        let mut check = tracker.finish(CheckKind::LuEquivalence, cp.clone(), false);
        check.detail = relation.map(|r| format!("{r:?}"));
        Ok(check)
    })();
    settle(CheckKind::LuEquivalence, cp, body)
}

/// `dicke_rdm` against the brute-force partial trace on random states.
pub fn verify_reduction(spin: SpinQuantum, samples: usize, seed: u64) -> Result<PeriodicityCheck> {
    let cp = CheckParams {
        two_j: spin.two_j(),
        tolerance: REDUCTION_TOL,
        samples: Some(samples),
        ..Default::default()
    };
    let body = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tracker = Tracker::new(REDUCTION_TOL);
        for i in 0..samples {
            let psi = DickeVector::random(spin, &mut rng);
            let full = expand_to_qubits(&psi)?;
            for q in 1..=2usize.min(spin.two_j() as usize - 1) {
                let fast = dicke_rdm(&psi, q)?;
                let keep: Vec<usize> = (0..q).collect();
                let slow = brute_force_rdm(&full, &keep)?;
                let fast = crate::reduction::embed_in_qubit_basis(&fast)?;
                let name = if q == 1 { "rdm-1" } else { "rdm-2" };
                tracker.record(i, name, max_abs_diff(fast.matrix(), slow.matrix()), REDUCTION_TOL);
            }
        }
        Ok(tracker.finish(CheckKind::Reduction, cp.clone(), false))
    })();
    settle(CheckKind::Reduction, cp, body)
}

/// Inversion conjugacy of the classical map and agreement of the reduced
/// maps with the general one, on random points, kicks and precessions.
pub fn verify_classical(samples: usize, seed: u64) -> Result<PeriodicityCheck> {
    let cp = CheckParams {
        tolerance: CONJUGACY_TOL,
        samples: Some(samples),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(CONJUGACY_TOL);
    for i in 0..samples {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let phi: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let point = SpherePoint::from_angles(Angles::wrapped(theta, phi));
        let k: f64 = rng.random_range(-10.0..10.0);
        let p: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        tracker.record(i, "inversion", classical::inversion_conjugacy_check(point, k, p)?, CONJUGACY_TOL);
        for which in [SpecialPrecession::HalfPi, SpecialPrecession::Pi, SpecialPrecession::TwoPi] {
            let special = classical::map_step_special(point, k, which)?;
            let general = classical::map_step(point, k, which.angle())?;
            tracker.record(i, "special-map", special.max_abs_diff(&general), SPECIAL_MAP_TOL);
        }
    }
    Ok(tracker.finish(CheckKind::Classical, cp, false))
}

/// Result of the optional period scan for `j > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodScan {
    pub two_j: u32,
    pub p: String,
    pub k: f64,
    pub max_period: usize,
    /// Smallest `T <= max_period` with `S(t) = S(t + T)` for `t = 0..=max_period`, if any.
    pub period: Option<usize>,
}

/// Searches for a time period of the single-qubit entropy up to `max_period`
/// steps. Reports what it finds without asserting anything.
pub fn scan_time_period(
    params: FloquetParams<f64>,
    initial: Angles<f64>,
    max_period: usize,
    tol: f64,
) -> Result<PeriodScan> {
    let psi0 = coherent(params.spin, initial)?;
    let record = evolve(params, &psi0, 2 * max_period)?;
    let entropy: Vec<f64> = record
        .states
        .iter()
        .map(|s| crate::measures::von_neumann_entropy(&dicke_rdm(s, 1)?))
        .collect::<Result<_>>()?;
    let period = (1..=max_period).find(|&period| (0..=max_period).all(|t| (entropy[t] - entropy[t + period]).abs() <= tol));
    Ok(PeriodScan {
        two_j: params.spin.two_j(),
        p: params.p.to_string(),
        k: params.k,
        max_period,
        period,
    })
}

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    KPeriod,
    TimePeriod,
    Mirrors,
    Reflection,
    Lu,
    Classical,
    Reduction,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "k-period",
        "time-period",
        "mirrors",
        "reflection",
        "lu",
        "classical",
        "reduction",
        "all",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Suite::*;
        let all = [KPeriod, TimePeriod, Mirrors, Reflection, Lu, Classical, Reduction, All];
        all.into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::input(format!("unknown suite '{s}' (expected one of {})", Self::NAMES.join(", "))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub discord: DiscordSettings,
    pub tol: f64,
    /// Random draws per spin for the k-period, LU and reduction checks.
    pub samples: usize,
    pub t_max: usize,
    /// Largest `s` in the `r/s` tables.
    pub s_max: u64,
    pub cycles: usize,
    /// Run the `j > 1` period scan.
    pub scan: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            discord: DiscordSettings::fine(),
            tol: DEFAULT_TOL,
            samples: 20,
            t_max: 50,
            s_max: 12,
            cycles: 2,
            scan: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<PeriodicityCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scans: Vec<PeriodScan>,
}

/// The initial state used in the paper's figures.
pub fn reference_initial() -> Angles<f64> {
    Angles { theta: 2.5, phi: 1.1 }
}

/// All reduced `r/s` with `s <= s_max` and `1 <= r <= 2s`.
pub fn rational_kicks(s_max: u64) -> Vec<RationalKick> {
    (1..=s_max)
        .flat_map(|s| (1..=2 * s).filter(move |r| r.gcd(&s) == 1).map(move |r| (r, s)))
        .map(|(r, s)| RationalKick::new(r, s).expect("positive"))
        .collect()
}

fn spins(two_js: &[u32]) -> Vec<SpinQuantum> {
    two_js.iter().map(|&t| SpinQuantum::from_two_j(t).expect("valid 2j")).collect()
}

type Job = Box<dyn Fn() -> Result<PeriodicityCheck> + Send + Sync>;

fn jobs_for(suite: Suite, cfg: &SuiteConfig) -> Vec<Job> {
    let cfg = *cfg;
    let mut jobs: Vec<Job> = Vec::new();
    let quarter = [
        Precession::ZERO,
        Precession::HALF_PI,
        Precession::PI,
        Precession::THREE_HALVES_PI,
        Precession::TWO_PI,
    ];
    if matches!(suite, Suite::KPeriod | Suite::All) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for spin in spins(&[1, 2, 3, 4, 5, 6]) {
            for i in 0..cfg.samples {
                let k = rng.random_range(0.0..k_period(spin));
                let p = quarter[i % quarter.len()];
                let initial = Angles::wrapped(
                    rng.random_range(0.0..std::f64::consts::PI),
                    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                );
                let params = FloquetParams { spin, k, p };
                jobs.push(Box::new(move || {
                    verify_k_periodicity(params, initial, cfg.t_max, cfg.tol, &cfg.discord)
                }));
            }
        }
    }
    if matches!(suite, Suite::TimePeriod | Suite::All) {
        for p in quarter {
            for kick in rational_kicks(cfg.s_max) {
                jobs.push(Box::new(move || {
                    verify_time_periodicity(two_qubit(), p, kick, reference_initial(), cfg.cycles, cfg.tol, &cfg.discord)
                }));
            }
        }
    }
    if matches!(suite, Suite::Mirrors | Suite::All) {
        for kick in rational_kicks(cfg.s_max.min(11)) {
            jobs.push(Box::new(move || {
                verify_mirror_identities(kick, &Initial::Coherent(reference_initial()), cfg.tol, &cfg.discord)
            }));
        }
    }
    if matches!(suite, Suite::Reflection | Suite::All) {
        for spin in spins(&[2, 3]) {
            for k1 in [0.5, 1.0, 2.0] {
                let params = FloquetParams {
                    spin,
                    k: k1,
                    p: Precession::HALF_PI,
                };
                jobs.push(Box::new(move || {
                    verify_reflection(params, reference_initial(), cfg.t_max, cfg.tol, &cfg.discord)
                }));
            }
        }
    }
    if matches!(suite, Suite::Lu | Suite::All) {
        for (i, spin) in spins(&[1, 2, 3, 4, 5, 6]).into_iter().enumerate() {
            let seed = cfg.seed.wrapping_add(100 + i as u64);
            jobs.push(Box::new(move || verify_lu_equivalence(spin, 5 * cfg.samples, seed)));
        }
    }
    if matches!(suite, Suite::Reduction | Suite::All) {
        for (i, spin) in spins(&[2, 3, 4, 5, 6, 7, 8]).into_iter().enumerate() {
            let seed = cfg.seed.wrapping_add(200 + i as u64);
            jobs.push(Box::new(move || verify_reduction(spin, cfg.samples, seed)));
        }
    }
    if matches!(suite, Suite::Classical | Suite::All) {
        let seed = cfg.seed.wrapping_add(300);
        jobs.push(Box::new(move || verify_classical(10_000, seed)));
    }
    jobs
}

/// Runs the checks of `suite` concurrently; results keep declaration order.
/// An injected fault on the calling thread is seen by every worker.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let active = fault::current();
    let checks = jobs_for(suite, cfg)
        .par_iter()
        .map(|job| fault::propagate(active, job))
        .collect::<Result<Vec<_>>>()?;
    let mut scans = Vec::new();
    if cfg.scan {
        for spin in spins(&[3, 4]) {
            let params = FloquetParams::new(spin, std::f64::consts::PI / 40.0, Precession::HALF_PI)?;
            scans.push(scan_time_period(params, reference_initial(), 1000, ENTROPY_TOL)?);
        }
    }
    Ok(SuiteReport {
        suite,
        passed: checks.iter().all(PeriodicityCheck::passed),
        checks,
        scans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spin(two_j: u32) -> SpinQuantum {
        SpinQuantum::from_two_j(two_j).unwrap()
    }

    fn kick(r: u64, s: u64) -> RationalKick {
        RationalKick::new(r, s).unwrap()
    }

    #[test]
    fn period_table() {
        assert_eq!(predicted_time_period(Precession::HALF_PI, kick(1, 40)).unwrap(), 160);
        assert_eq!(predicted_time_period(Precession::HALF_PI, kick(2, 5)).unwrap(), 10);
        assert_eq!(predicted_time_period(Precession::PI, kick(3, 7)).unwrap(), 14);
        assert_eq!(predicted_time_period(Precession::THREE_HALVES_PI, kick(3, 7)).unwrap(), 28);
        assert_eq!(predicted_time_period(Precession::ZERO, kick(2, 7)).unwrap(), 7);
        assert!(predicted_time_period(Precession::Free(1.0), kick(1, 2)).is_err());
    }

    #[test]
    fn windows_and_k_max() {
        assert_eq!(experiment_window(100.0, 160).unwrap(), 100.0);
        assert_eq!(experiment_window(1000.0, 160).unwrap(), 160.0);
        assert_eq!(experiment_window(160.0, 160).unwrap(), 160.0);
        assert!(experiment_window(0.0, 10).is_err());
        assert!((k_max(spin(2)) - PI).abs() < 1e-15);
        assert!((k_max(spin(3)) - 1.5 * PI).abs() < 1e-15);
        assert!((k_max(spin(4)) - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn mirror_pair_sets() {
        let (kind, pairs) = mirror_pairs(kick(3, 5));
        assert_eq!(kind, CheckKind::MirrorA);
        assert_eq!(pairs, vec![(4, 6), (3, 7), (2, 8), (1, 9)]);
        let (kind, pairs) = mirror_pairs(kick(2, 7));
        assert_eq!(kind, CheckKind::MirrorB);
        assert_eq!(pairs, vec![(2, 5), (1, 6)]);
        assert!(mirror_pairs(kick(2, 3)).1.is_empty());
    }

    #[test]
    fn k_periodicity_two_qubits() {
        let params = FloquetParams::new(spin(2), 1.3, Precession::HALF_PI).unwrap();
        let check = verify_k_periodicity(params, reference_initial(), 50, DEFAULT_TOL, &DiscordSettings::coarse()).unwrap();
        assert!(check.passed(), "{check:?}");
        assert_eq!(check.measures.len(), 4);
    }

    #[test]
    fn k_period_needs_quarter_turn_precession() {
        let s = DiscordSettings::coarse();
        let free = FloquetParams::new(spin(2), 1.3, Precession::Free(1.0)).unwrap();
        let check = verify_k_periodicity(free, reference_initial(), 10, DEFAULT_TOL, &s).unwrap();
        assert!(!check.passed());
        assert!(check.worst.unwrap().t >= 2);
        for q in 0..=4 {
            let params = FloquetParams::new(spin(3), 2.1, Precession::quarter(q).unwrap()).unwrap();
            assert!(verify_k_periodicity(params, reference_initial(), 10, DEFAULT_TOL, &s).unwrap().passed());
        }
    }

    #[test]
    fn k_periodicity_single_qubit_is_a_phase() {
        let params = FloquetParams::new(spin(1), 0.7, Precession::HALF_PI).unwrap();
        let check = verify_k_periodicity(params, reference_initial(), 20, DEFAULT_TOL, &DiscordSettings::coarse()).unwrap();
        assert!(check.passed());
        assert_eq!(check.measures[0].measure, "state");
    }

    #[test]
    fn wrong_period_is_detected() {
        // k + j pi is not a period
        let params = FloquetParams::new(spin(2), 1.3, Precession::HALF_PI).unwrap();
        let psi0 = coherent(spin(2), reference_initial()).unwrap();
        let s = DiscordSettings::coarse();
        let a = report_series(params, &psi0, 20, &s).unwrap();
        let b = report_series(params.with_k(1.3 + PI), &psi0, 20, &s).unwrap();
        let mut tracker = Tracker::new(DEFAULT_TOL);
        for (t, (x, y)) in a.iter().zip(&b).enumerate() {
            tracker.compare(t, x, y);
        }
        let check = tracker.finish(CheckKind::KPeriod, CheckParams::default(), false);
        assert!(!check.passed());
        assert!(check.worst.is_some());
    }

    #[test]
    fn time_periodicity_examples() {
        let s = DiscordSettings::coarse();
        for (p, r, sv) in [(Precession::HALF_PI, 1, 40), (Precession::PI, 3, 7), (Precession::THREE_HALVES_PI, 2, 5)] {
            let check = verify_time_periodicity(spin(2), p, kick(r, sv), reference_initial(), 2, DEFAULT_TOL, &s).unwrap();
            assert!(check.passed(), "{check:?}");
        }
        assert!(verify_time_periodicity(spin(3), Precession::PI, kick(1, 2), reference_initial(), 1, DEFAULT_TOL, &s).is_err());
    }

    #[test]
    fn mirrors_and_separability() {
        let s = DiscordSettings::coarse();
        for (r, sv) in [(3, 5), (2, 7), (1, 1), (2, 3)] {
            let check = verify_mirror_identities(kick(r, sv), &Initial::Coherent(reference_initial()), DEFAULT_TOL, &s).unwrap();
            assert_eq!(check.outcome, Outcome::Pass, "{check:?}");
        }
        let entangled = DickeVector::<f64>::basis(spin(2), 1).unwrap();
        assert!(verify_mirror_identities(kick(3, 5), &Initial::State(entangled), DEFAULT_TOL, &s).is_err());
    }

    #[test]
    fn reflection_records_transforms() {
        let params = FloquetParams::new(spin(2), 1.0, Precession::HALF_PI).unwrap();
        let check = verify_reflection(params, reference_initial(), 30, DEFAULT_TOL, &DiscordSettings::coarse()).unwrap();
        assert!(check.passed(), "{check:?}");
        assert_eq!(check.transforms.len(), 4);
        assert!(check.transforms[3].passed);
        let too_big = params.with_k(4.0);
        assert!(verify_reflection(too_big, reference_initial(), 5, DEFAULT_TOL, &DiscordSettings::coarse()).is_err());
    }

    #[test]
    fn lu_reduction_classical_checks_pass() {
        for two_j in 1..=6 {
            assert!(verify_lu_equivalence(spin(two_j), 20, 3).unwrap().passed());
        }
        assert!(verify_reduction(spin(5), 10, 4).unwrap().passed());
        assert!(verify_classical(1000, 5).unwrap().passed());
    }

    #[test]
    fn torsion_fault_breaks_time_period_check() {
        let check = fault::inject(fault::Fault::TorsionSign, || {
            verify_time_periodicity(spin(2), Precession::HALF_PI, kick(1, 3), reference_initial(), 1, DEFAULT_TOL, &DiscordSettings::coarse())
        })
        .unwrap();
        assert!(!check.passed());
        assert_eq!(check.worst.unwrap().measure, "matrix-power");
    }

    #[test]
    fn binomial_fault_becomes_failed_check() {
        let params = FloquetParams::new(spin(3), 1.0, Precession::HALF_PI).unwrap();
        let check = fault::inject(fault::Fault::BinomialWeight, || {
            verify_k_periodicity(params, reference_initial(), 3, DEFAULT_TOL, &DiscordSettings::coarse())
        })
        .unwrap();
        assert!(!check.passed());
        assert!(check.detail.is_some());
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn kick_enumeration() {
        let kicks = rational_kicks(3);
        assert_eq!(kicks.len(), 2 + 2 + 4);
        assert!(kicks.iter().all(|k| k.r().gcd(&k.s()) == 1));
    }

    #[test]
    fn report_serializes() {
        let report = run_suite(Suite::Classical, &SuiteConfig::default()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"kind\":\"classical\""));
        assert!(report.passed);
    }

    #[test]
    fn long_scans_survive_norm_drift() {
        for two_j in [3, 4] {
            let spin = SpinQuantum::from_two_j(two_j).unwrap();
            let params = FloquetParams::new(spin, PI / 40.0, Precession::HALF_PI).unwrap();
            let scan = scan_time_period(params, reference_initial(), 1000, 1e-8).unwrap();
            assert_eq!(scan.period, None);
        }
        let spin = SpinQuantum::from_two_j(2).unwrap();
        let params = FloquetParams::new(spin, PI / 40.0, Precession::HALF_PI).unwrap();
        assert_eq!(scan_time_period(params, reference_initial(), 200, 1e-8).unwrap().period, Some(160));
    }
}
