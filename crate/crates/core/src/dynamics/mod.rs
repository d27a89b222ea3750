//! Master-equation dynamics of the driven, dissipative spin.
//!
//! In the frame rotating with the drive,
//!
//! ```text
//! dρ/dt = −i[Δ S_z + ε S_y, ρ] + (γ_g/2) D[S₊S_z]ρ + (γ_d/2) D[S₋S_z]ρ
//! D[O]ρ = OρO† − ½{O†O, ρ}
//! ```
//!
//! Superoperators act on column-stacked density matrices: `X ↦ AX` is
//! `I ⊗ A` and `X ↦ XB` is `Bᵀ ⊗ I`.

mod density;
mod evolve;
mod liouvillian;
mod steady;

pub use density::{DensityJson, DensityMatrix, HERMITICITY_TOL, MIN_EIGENVALUE_TOL, TRACE_TOL};
pub use evolve::{default_steps, evolve, evolve_with, Trajectory, DEFAULT_DT_FACTOR};
pub use liouvillian::{build_liouvillian, Liouvillian};
pub use steady::{
    limit_cycle_validity, steady_state, steady_state_with, LimitCycleVerdict, SteadyStateBackend,
    NULL_TOL, RESIDUAL_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_algebra::Spin;

/// Parameters of the rotating-frame master equation. The bare and drive
/// frequencies enter only through the detuning `delta = ω₀ − ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub spin: Spin,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma_g: f64,
    pub gamma_d: f64,
}

impl SystemParams {
    pub fn new(spin: Spin, delta: f64, epsilon: f64, gamma_g: f64, gamma_d: f64) -> Result<Self> {
        let p = SystemParams { spin, delta, epsilon, gamma_g, gamma_d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("gamma_g", self.gamma_g),
            ("gamma_d", self.gamma_d),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
        }
        if self.gamma_g < 0.0 || self.gamma_d < 0.0 {
            return Err(Error::InvalidParams(format!(
                "rates must be non-negative (gamma_g={}, gamma_d={})",
                self.gamma_g, self.gamma_d
            )));
        }
        if self.gamma_g == 0.0 && self.gamma_d == 0.0 {
            return Err(Error::InvalidParams("gamma_g and gamma_d cannot both vanish".into()));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// `min(γ_g, γ_d)`.
    pub fn gamma_min(&self) -> f64 {
        self.gamma_g.min(self.gamma_d)
    }

    /// Fastest rate in the generator, `max(γ_g, γ_d, ε, |Δ|)`.
    pub fn max_rate(&self) -> f64 {
        self.gamma_g.max(self.gamma_d).max(self.epsilon).max(self.delta.abs())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        SystemParams { delta, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        SystemParams { epsilon, ..self }
    }

    pub fn with_spin(self, spin: Spin) -> Self {
        SystemParams { spin, ..self }
    }
}
