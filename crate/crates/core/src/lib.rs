//! Synchronization of a single dissipative quantum spin.
//!
//! The crate builds the gain/damping master equation that stabilizes the
//! equatorial Dicke state `|S,0⟩` of a spin `S`, drives it with a weak
//! rotating-frame signal, and quantifies phase locking through the spin
//! Husimi Q function and the phase distribution `S(φ)` derived from it.
//!
//! Module map:
//!
//! - [`spin_algebra`]: spin matrices, Wigner small-d matrices and spin
//!   coherent states in the descending Dicke basis.
//! - [`husimi`]: quadrature grid on the sphere, Q function and `S(φ)`.
//! - [`dynamics`]: Liouvillian construction, RK4 evolution, steady states.
//! - [`experiments`]: first-order analytics, Arnold-tongue sweeps, limit-cycle
//!   breakdown, spin comparison and the qubit no-go report.
//! - [`io`]: CSV/JSON artifact writers shared with the command-line driver.
//!
//! Units: `ħ = 1`, rates are plain numbers (conventionally in units of the
//! damping rate `γ_d`).

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod husimi;
pub mod io;
pub mod linalg;
pub mod quadrature;
pub mod spin_algebra;

pub use dynamics::{
    build_liouvillian, evolve, limit_cycle_validity, steady_state, steady_state_with,
    DensityMatrix, Liouvillian, LimitCycleVerdict, SteadyStateBackend, SystemParams, Trajectory,
};
pub use error::{Error, Result};
pub use husimi::{husimi_q, make_grid, peak, sync_measure, PhaseDistribution, QField, SphereGrid};
pub use spin_algebra::{
    build_spin_algebra, coherent_overlap, coherent_state, free_evolve, wigner_small_d, Spin,
    SpinAlgebra, SphereDirection, StateVector,
};
