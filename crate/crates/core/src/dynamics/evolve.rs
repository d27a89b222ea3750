use super::{build_liouvillian, DensityMatrix, Liouvillian, SystemParams};
use crate::error::{Error, Result};
use crate::linalg::{c, unvectorize, vectorize};

/// Default RK4 step: `dt = DEFAULT_DT_FACTOR / max_rate`.
pub const DEFAULT_DT_FACTOR: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(&self.states)
    }
}

/// Number of RK4 steps so that `dt ≤ dt_factor / max_rate`.
pub fn default_steps(p: &SystemParams, t_final: f64, dt_factor: f64) -> usize {
    let dt = dt_factor / p.max_rate();
    ((t_final / dt).ceil() as usize).max(1)
}

/// Fixed-step RK4 from `rho0` to `t_final` in `n_steps` steps. Stores every
/// step (including `t = 0`) and checks each stored state for physicality.
pub fn evolve(p: &SystemParams, rho0: &DensityMatrix, t_final: f64, n_steps: usize) -> Result<Trajectory> {
    evolve_with(&build_liouvillian(p)?, rho0, t_final, n_steps)
}

pub fn evolve_with(l: &Liouvillian, rho0: &DensityMatrix, t_final: f64, n_steps: usize) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: rho0.dim() });
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::Precondition(format!("t_final must be positive, got {t_final}")));
    }
    if n_steps == 0 {
        return Err(Error::Precondition("n_steps must be at least 1".into()));
    }
    let dt = t_final / n_steps as f64;
    let half = c(dt / 2.0);
    let sixth = c(dt / 6.0);
    let m = l.matrix();
    let d = l.dim();

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(rho0.clone());

    let mut v = vectorize(rho0.matrix());
    for step in 1..=n_steps {
        let k1 = m * &v;
        let k2 = m * (&v + &k1 * half);
        let k3 = m * (&v + &k2 * half);
        let k4 = m * (&v + &k3 * c(dt));
        v += (k1 + (k2 + k3) * c(2.0) + k4) * sixth;

        let t = step as f64 * dt;
        let state = DensityMatrix::new(unvectorize(&v, d)).map_err(|e| Error::Evolution {
            time: t,
            reason: e.to_string(),
        })?;
        times.push(t);
        states.push(state);
    }
    Ok(Trajectory { times, states })
}
