//! Two-qubit quantum discord with projective measurements on the first qubit.
//!
//! The conditional entropy is minimized over Bloch directions on the
//! upper hemisphere (antipodal directions give the same projector pair):
//! a fixed grid scan, then Nelder-Mead refinement from the best cells.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::reduction::{RdmBasis, ReducedDensityMatrix};
use crate::scalar::{lit, to_f64, Real};

use super::entropy_of_matrix;

/// Measurement along Bloch direction `(theta, phi)`: projectors `(I +/- n.sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> MeasurementSetting<T> {
    pub fn direction(&self) -> [T; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        [st * self.phi.cos(), st * self.phi.sin(), ct]
    }

    /// The two projectors, in the `(|1>, |0>)` = (up, down) order.
    pub fn projectors(&self) -> [CMatrix<T>; 2] {
        let [nx, ny, nz] = self.direction();
        let half = lit::<T>(0.5);
        let make = |s: T| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex::from(half * (T::one() + s * nz)),
                    Complex::new(half * s * nx, -half * s * ny),
                    Complex::new(half * s * nx, half * s * ny),
                    Complex::from(half * (T::one() - s * nz)),
                ],
            )
        };
        [make(T::one()), make(-T::one())]
    }
}

/// Minimizer configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordSettings {
    pub theta_cells: usize,
    pub phi_cells: usize,
    /// Number of best grid cells refined.
    pub starts: usize,
    /// Refinement stops once the simplex objective spread is below this.
    pub objective_tol: f64,
    pub max_iter: usize,
}

impl DiscordSettings {
    pub const fn coarse() -> Self {
        DiscordSettings {
            theta_cells: 32,
            phi_cells: 64,
            starts: 3,
            objective_tol: 1e-12,
            max_iter: 2000,
        }
    }

    pub const fn fine() -> Self {
        DiscordSettings {
            theta_cells: 64,
            phi_cells: 128,
            starts: 5,
            objective_tol: 1e-13,
            max_iter: 4000,
        }
    }
}

impl Default for DiscordSettings {
    fn default() -> Self {
        Self::coarse()
    }
}

/// Blocks `rho^{a a'}` (2x2 over qubit B) of a 4x4 matrix with qubit A as the high bit.
struct BlockState<T: Real> {
    blocks: [[[[Complex<T>; 2]; 2]; 2]; 2],
}

impl<T: Real> BlockState<T> {
    fn new(rho: &CMatrix<T>) -> Self {
        let mut blocks = [[[[Complex::from(T::zero()); 2]; 2]; 2]; 2];
        for a in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for bp in 0..2 {
                        blocks[a][ap][b][bp] = rho[(2 * a + b, 2 * ap + bp)];
                    }
                }
            }
        }
        BlockState { blocks }
    }

    /// `sum_i p_i H(rho_{B|i})` for the projective measurement along `setting`.
    fn conditional_entropy(&self, setting: MeasurementSetting<T>) -> T {
        let mut total = T::zero();
        for proj in setting.projectors() {
            // Tr_A[(P (x) I) rho] = sum_{a a'} P_{a' a} rho^{a a'}
            let mut m = [[Complex::from(T::zero()); 2]; 2];
            for a in 0..2 {
                for ap in 0..2 {
                    let w = proj[(ap, a)];
                    for b in 0..2 {
                        for bp in 0..2 {
                            m[b][bp] += w * self.blocks[a][ap][b][bp];
                        }
                    }
                }
            }
            let (d0, d1) = (m[0][0].re, m[1][1].re);
            let p = d0 + d1;
            if p <= T::zero() {
                continue;
            }
            let half_gap = ((d0 - d1) * (d0 - d1) / lit(4.0) + m[0][1].norm_sqr()).sqrt();
            let mid = p / lit(2.0);
            let mu = [mid + half_gap, mid - half_gap];
            // p H(m / p) = -sum mu ln mu + p ln p
            let mut h = p * p.ln();
            for &x in &mu {
                if x > T::zero() {
                    h -= x * x.ln();
                }
            }
            total += h;
        }
        total
    }
}

/// `D(B:A) = H(A) - H(A,B) + min_{Pi} sum_i p_i H(rho_{B|i})`, in nats, measuring qubit A.
pub fn quantum_discord<T: Real>(
    rho4: &ReducedDensityMatrix<T>,
    settings: &DiscordSettings,
) -> Result<T> {
    if rho4.qubits() != 2 || rho4.basis() != RdmBasis::StandardQubit {
        return Err(Error::input("discord needs a 2-qubit matrix in the standard basis"));
    }
    let rho = rho4.matrix();
    let h_ab = entropy_of_matrix(rho)?;
    let rho_a = partial_trace_second(rho);
    let h_a = entropy_of_matrix(&rho_a)?;
    let (min_cond, _) = minimize_conditional_entropy(rho, settings)?;
    let d = h_a - h_ab + min_cond;
    if d < T::zero() && d > -lit::<T>(1e-7) {
        return Ok(T::zero());
    }
    Ok(d)
}

/// Trace out qubit B (low bit) of a 4x4 matrix.
pub(crate) fn partial_trace_second<T: Real>(rho: &CMatrix<T>) -> CMatrix<T> {
    CMatrix::from_fn(2, 2, |a, ap| rho[(2 * a, 2 * ap)] + rho[(2 * a + 1, 2 * ap + 1)])
}

/// Trace out qubit A (high bit) of a 4x4 matrix.
pub(crate) fn partial_trace_first<T: Real>(rho: &CMatrix<T>) -> CMatrix<T> {
    CMatrix::from_fn(2, 2, |b, bp| rho[(b, bp)] + rho[(2 + b, 2 + bp)])
}

/// Minimum conditional entropy and the setting attaining it.
pub fn minimize_conditional_entropy<T: Real>(
    rho: &CMatrix<T>,
    settings: &DiscordSettings,
) -> Result<(T, MeasurementSetting<T>)> {
    let state = BlockState::new(rho);
    let objective = |x: [T; 2]| {
        state.conditional_entropy(MeasurementSetting {
            theta: x[0],
            phi: x[1],
        })
    };

    let dt = T::frac_pi_2() / lit(settings.theta_cells as f64);
    let dp = T::two_pi() / lit(settings.phi_cells as f64);
    let mut cells: Vec<(T, [T; 2])> =
        Vec::with_capacity(settings.theta_cells * settings.phi_cells);
    for i in 0..settings.theta_cells {
        for l in 0..settings.phi_cells {
            let x = [
                dt * lit(i as f64 + 0.5),
                dp * lit(l as f64 + 0.5),
            ];
            cells.push((objective(x), x));
        }
    }
    // stable sort: ties resolved by grid order
    cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut best: Option<(T, [T; 2])> = None;
    let mut failure: Option<T> = None;
    for &(_, x0) in cells.iter().take(settings.starts.max(1)) {
        match nelder_mead(&objective, x0, [dt, dp], settings) {
            Ok((f, x)) => {
                if best.is_none_or(|(bf, _)| f < bf) {
                    best = Some((f, x));
                }
            }
            Err(f) => failure = Some(failure.map_or(f, |g: T| g.min(f))),
        }
    }
    match best {
        Some((f, x)) => Ok((
            f,
            MeasurementSetting {
                theta: x[0],
                phi: x[1],
            },
        )),
        None => Err(Error::Numerical {
            message: "discord refinement did not converge".into(),
            best: failure.map(to_f64),
        }),
    }
}

/// 2-D Nelder-Mead. `Err` carries the best value when the iteration cap is hit.
fn nelder_mead<T: Real>(
    f: &impl Fn([T; 2]) -> T,
    x0: [T; 2],
    step: [T; 2],
    settings: &DiscordSettings,
) -> std::result::Result<(T, [T; 2]), T> {
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let mut simplex = [
        x0,
        [x0[0] + step[0] * half, x0[1]],
        [x0[0], x0[1] + step[1] * half],
    ];
    let mut values = simplex.map(&f);
    let ftol = lit::<T>(settings.objective_tol);
    let xtol = lit::<T>(1e-12);

    for _ in 0..settings.max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = values[2] - values[0];
        let size = (0..2).fold(T::zero(), |acc, d| {
            acc.max((simplex[1][d] - simplex[0][d]).abs())
                .max((simplex[2][d] - simplex[0][d]).abs())
        });
        if spread <= ftol || size <= xtol {
            return Ok((values[0], simplex[0]));
        }

        let centroid = [
            (simplex[0][0] + simplex[1][0]) * half,
            (simplex[0][1] + simplex[1][1]) * half,
        ];
        let toward = |t: T| {
            [
                centroid[0] + (simplex[2][0] - centroid[0]) * t,
                centroid[1] + (simplex[2][1] - centroid[1]) * t,
            ]
        };
        let xr = toward(-T::one());
        let fr = f(xr);
        if fr < values[0] {
            let xe = toward(-two);
            let fe = f(xe);
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let (xc, fc) = if fr < values[2] {
                let xc = toward(-half);
                (xc, f(xc))
            } else {
                let xc = toward(half);
                (xc, f(xc))
            };
            if fc < values[2].min(fr) {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + (simplex[i][0] - simplex[0][0]) * half,
                        simplex[0][1] + (simplex[i][1] - simplex[0][1]) * half,
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    Err(values.iter().copied().fold(values[0], |a, b| a.min(b)))
}

/// Conditional entropy at a given setting (exposed for brute-force checks).
pub fn conditional_entropy_at<T: Real>(rho: &CMatrix<T>, setting: MeasurementSetting<T>) -> T {
    BlockState::new(rho).conditional_entropy(setting)
}

/// Mutual information `H(A) + H(B) - H(A,B)`.
pub fn mutual_information<T: Real>(rho: &CMatrix<T>) -> Result<T> {
    Ok(entropy_of_matrix(&partial_trace_second(rho))?
        + entropy_of_matrix(&partial_trace_first(rho))?
        - entropy_of_matrix(rho)?)
}
