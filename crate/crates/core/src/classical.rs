//! Classical kicked-top map on the unit sphere.

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("constant representable in scalar type")
}

fn pi<T: Float>() -> T {
    c(std::f64::consts::PI)
}

/// Below this `sin(theta)` the azimuth is reported as 0.
const POLE_EPS: f64 = 1e-12;

/// Point `(X, Y, Z)` on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Float> SpherePoint<T> {
    /// Accepts points with `|X^2 + Y^2 + Z^2 - 1| <= 1e-12`.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let p = SpherePoint { x, y, z };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let dev = (self.norm_sq() - T::one()).abs();
        if !(dev <= tol::<T>(1e-12)) {
            return Err(Error::input(format!(
                "point is off the unit sphere (|r^2 - 1| = {})",
                dev.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }

    pub fn norm_sq(&self) -> T {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn from_angles(a: Angles<T>) -> Self {
        let (st, ct) = a.theta.sin_cos();
        let (sp, cp) = a.phi.sin_cos();
        SpherePoint {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn to_angles(&self) -> Angles<T> {
        let z = self.z.max(-T::one()).min(T::one());
        let theta = z.acos();
        let phi = if theta.sin() < c(POLE_EPS) {
            T::zero()
        } else {
            self.y.atan2(self.x)
        };
        Angles::wrapped(theta, phi)
    }

    /// Full inversion `(X, Y, Z) -> (-X, -Y, -Z)`.
    pub fn inverted(&self) -> Self {
        SpherePoint {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

fn tol<T: Float>(x: f64) -> T {
    c::<T>(x).max(T::epsilon() * c(64.0))
}

/// Polar angle in `[0, pi]`, azimuth in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Float> Angles<T> {
    pub fn new(theta: T, phi: T) -> Result<Self> {
        let pi = pi::<T>();
        if !(theta >= T::zero() && theta <= pi) {
            return Err(Error::input("theta outside [0, pi]"));
        }
        if !(phi > -pi && phi <= pi) {
            return Err(Error::input("phi outside (-pi, pi]"));
        }
        Ok(Angles { theta, phi })
    }

    /// Clamp `theta` into `[0, pi]` and wrap `phi` into `(-pi, pi]`.
    pub fn wrapped(theta: T, phi: T) -> Self {
        Angles {
            theta: theta.max(T::zero()).min(pi()),
            phi: wrap_phi(phi),
        }
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phi<T: Float>(phi: T) -> T {
    let two_pi = pi::<T>() + pi::<T>();
    let mut w = phi - two_pi * ((phi + pi::<T>()) / two_pi).floor();
    // w in [-pi, pi)
    if w <= -pi::<T>() {
        w = w + two_pi;
    }
    w
}

/// One iteration of the general map: precession by `p` about `y`, then the
/// `z`-axis twist by `k Z'`.
pub fn map_step<T: Float>(point: SpherePoint<T>, k: T, p: T) -> Result<SpherePoint<T>> {
    point.check()?;
    Ok(step_unchecked(point, k, p))
}

fn step_unchecked<T: Float>(v: SpherePoint<T>, k: T, p: T) -> SpherePoint<T> {
    let (sp, cp) = p.sin_cos();
    let xr = v.x * cp + v.z * sp;
    let zr = v.z * cp - v.x * sp;
    let (sk, ck) = (k * zr).sin_cos();
    SpherePoint {
        x: xr * ck - v.y * sk,
        y: xr * sk + v.y * ck,
        z: zr,
    }
}

/// Precessions with a dedicated reduced map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialPrecession {
    HalfPi,
    Pi,
    TwoPi,
}

impl SpecialPrecession {
    pub fn angle<T: Float>(self) -> T {
        match self {
            SpecialPrecession::HalfPi => pi::<T>() / c(2.0),
            SpecialPrecession::Pi => pi(),
            SpecialPrecession::TwoPi => pi::<T>() * c(2.0),
        }
    }
}

/// Reduced map at `p` in `{pi/2, pi, 2pi}`.
pub fn map_step_special<T: Float>(
    point: SpherePoint<T>,
    k: T,
    which: SpecialPrecession,
) -> Result<SpherePoint<T>> {
    point.check()?;
    let SpherePoint { x, y, z } = point;
    Ok(match which {
        SpecialPrecession::HalfPi => {
            let (s, co) = (k * x).sin_cos();
            SpherePoint {
                x: z * co + y * s,
                y: y * co - z * s,
                z: -x,
            }
        }
        SpecialPrecession::Pi => {
            let (s, co) = (k * z).sin_cos();
            SpherePoint {
                x: y * s - x * co,
                y: y * co + x * s,
                z: -z,
            }
        }
        SpecialPrecession::TwoPi => {
            let (s, co) = (k * z).sin_cos();
            SpherePoint {
                x: x * co - y * s,
                y: x * s + y * co,
                z,
            }
        }
    })
}

/// Iterates the map `steps` times; the result has `steps + 1` entries, starting with `start`.
pub fn trajectory<T: Float>(start: Angles<T>, k: T, p: T, steps: usize) -> Vec<Angles<T>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut v = SpherePoint::from_angles(start);
    out.push(start);
    for _ in 0..steps {
        v = step_unchecked(v, k, p);
        out.push(v.to_angles());
    }
    out
}

/// Phase-portrait point cloud, one trajectory per initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Portrait<T> {
    pub k: T,
    pub p: T,
    pub trajectories: Vec<Vec<Angles<T>>>,
}

/// Initial conditions: a grid that is uniform in `(cos theta, phi)` (hence
/// uniform on the sphere) with one seeded jitter inside each cell.
pub fn portrait_initial_conditions<T: Float>(n_initial: usize, seed: u64) -> Vec<Angles<T>> {
    let rows = ((n_initial as f64 / 2.0).sqrt().round() as usize).max(1);
    let cols = n_initial.div_ceil(rows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    (0..n_initial)
        .map(|i| {
            let (row, col) = (i / cols, i % cols);
            let u: f64 = rng.random();
            let w: f64 = rng.random();
            let cos_theta = -1.0 + 2.0 * (row as f64 + u) / rows as f64;
            let phi = -std::f64::consts::PI + two_pi * (col as f64 + w) / cols as f64;
            Angles::wrapped(c::<T>(cos_theta.clamp(-1.0, 1.0).acos()), c(phi))
        })
        .collect()
}

pub fn phase_portrait<T: Float + Send + Sync>(
    k: T,
    p: T,
    n_initial: usize,
    steps: usize,
    seed: u64,
) -> Result<Portrait<T>> {
    if n_initial == 0 || steps == 0 {
        return Err(Error::input("portrait needs at least one initial condition and one step"));
    }
    let starts = portrait_initial_conditions::<T>(n_initial, seed);
    // par_iter + collect keeps initial-condition order
    let trajectories = starts
        .par_iter()
        .map(|&a| trajectory(a, k, p, steps))
        .collect();
    Ok(Portrait { k, p, trajectories })
}

/// Mean fraction of equal-area sphere cells visited per trajectory.
///
/// Regular orbits trace curves and visit few cells; chaotic orbits spread
/// over a finite fraction of the sphere.
pub fn mean_cell_coverage<T: Float>(portrait: &Portrait<T>, bins_cos: usize, bins_phi: usize) -> f64 {
    let total = (bins_cos * bins_phi) as f64;
    let mut sum = 0.0;
    for traj in &portrait.trajectories {
        let mut seen = vec![false; bins_cos * bins_phi];
        for a in traj {
            let ct = a.theta.to_f64().unwrap_or(0.0).cos();
            let ph = a.phi.to_f64().unwrap_or(0.0);
            let bi = (((ct + 1.0) / 2.0 * bins_cos as f64) as usize).min(bins_cos - 1);
            let bj = (((ph + std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * bins_phi as f64)
                as usize)
                .min(bins_phi - 1);
            seen[bi * bins_phi + bj] = true;
        }
        sum += seen.iter().filter(|&&s| s).count() as f64 / total;
    }
    sum / portrait.trajectories.len().max(1) as f64
}

/// `max |map(-v, -k, p) + map(v, k, p)|`: the map at `-k` is conjugate to
/// the map at `k` under full inversion.
pub fn inversion_conjugacy_check<T: Float>(point: SpherePoint<T>, k: T, p: T) -> Result<T> {
    let forward = map_step(point, k, p)?;
    let mirrored = map_step(point.inverted(), -k, p)?;
    Ok(mirrored.max_abs_diff(&forward.inverted()))
}
