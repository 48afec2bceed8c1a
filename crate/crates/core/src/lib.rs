//! Quantum kicked top restricted to the symmetric subspace of `2j` qubits.
//!
//! The crate builds the Floquet operator in the Dicke basis, evolves spin
//! coherent states stroboscopically and computes the correlations between
//! the constituent qubits (entanglement entropies, discord, concurrence,
//! three-tangle and the Meyer-Wallach measure). The [`harness`] module checks
//! the periodicity of those correlations in kick strength and in time.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use kicktop::{coherent_state, evolve, report, DiscordSettings, FloquetParams, Precession, SpinQuantum};
//!
//! let spin = SpinQuantum::from_two_j(2).unwrap();
//! let params = FloquetParams::new(spin, 1.0, Precession::HALF_PI).unwrap();
//! let psi0 = coherent_state(spin, 2.5, 1.1).unwrap();
//! let record = evolve(params, &psi0, 10).unwrap();
//! let r = report(&record.states[10], &DiscordSettings::coarse()).unwrap();
//! assert!(r.s_vn_1 >= 0.0 && r.s_vn_1 <= std::f64::consts::LN_2 + 1e-12);
//! ```

pub mod classical;
pub mod dynamics;
pub mod error;
#[doc(hidden)]
pub mod fault;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod reduction;
pub mod scalar;
pub mod spinalg;

pub use dynamics::{build_floquet, evolve, RationalKick};
pub use error::{Error, Result};
pub use measures::{report, DiscordSettings};
pub use spinalg::{coherent_state, SpinQuantum};

pub type DickeVector = spinalg::DickeVector<f64>;
pub type Precession = dynamics::Precession<f64>;
pub type FloquetParams = dynamics::FloquetParams<f64>;
pub type FloquetOperator = dynamics::FloquetOperator<f64>;
pub type EvolutionRecord = dynamics::EvolutionRecord<f64>;
pub type ReducedDensityMatrix = reduction::ReducedDensityMatrix<f64>;
pub type CorrelationReport = measures::CorrelationReport<f64>;
pub type Angles = classical::Angles<f64>;
pub type SpherePoint = classical::SpherePoint<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type CVector = linalg::CVector<f64>;
