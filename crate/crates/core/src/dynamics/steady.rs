use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use super::{build_liouvillian, DensityMatrix, Liouvillian, SystemParams};
use crate::error::{Error, Result};
use crate::linalg::{c, trace, unvectorize, CMatrix, CVector};
use crate::spin_algebra::SpinAlgebra;

/// Eigenvalues with modulus below this count as zero modes.
pub const NULL_TOL: f64 = 1e-10;
/// Bound on `‖L vec(ρ_ss)‖₂`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Populations on `m ≠ ±S` below this count as absent.
const INTERIOR_POPULATION_TOL: f64 = 1e-6;
const PHASE_SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteadyStateBackend {
    /// Full eigendecomposition; the zero mode is the unique eigenvalue with
    /// `|λ| < NULL_TOL`, its vector taken from the SVD null space.
    #[default]
    Eigen,
    /// `L x = 0` with one population row swapped for the trace constraint.
    Linear,
}

impl Liouvillian {
    pub fn steady_state(&self, backend: SteadyStateBackend) -> Result<DensityMatrix> {
        let v = match backend {
            SteadyStateBackend::Eigen => self.null_vector_eigen()?,
            SteadyStateBackend::Linear => self.null_vector_linear()?,
        };
        let d = self.dim();
        let raw = unvectorize(&v, d);
        // Scrub rounding-level anti-Hermitian residue, then fix the trace.
        let herm = (&raw + raw.adjoint()) * c(0.5);
        let tr = trace(&herm);
        if tr.norm() < 1e-300 {
            return Err(Error::Solver("null vector has vanishing trace".into()));
        }
        let rho: CMatrix = herm / tr;
        let rho = (&rho + rho.adjoint()) * c(0.5);
        let residual = (self.matrix() * CVector::from_column_slice(rho.as_slice())).norm();
        if residual > RESIDUAL_TOL {
            return Err(Error::SteadyStateResidual(residual));
        }
        DensityMatrix::new(rho)
    }

    fn null_vector_eigen(&self) -> Result<CVector> {
        let eig = self.eigenvalues()?;
        let zero_modes = eig.iter().filter(|z| z.norm() < NULL_TOL).count();
        if zero_modes > 1 {
            return Err(Error::DegenerateSteadyState { count: zero_modes, tol: NULL_TOL });
        }
        if zero_modes == 0 {
            let smallest = eig.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            return Err(Error::NoNullVector { smallest, tol: NULL_TOL });
        }
        let svd = SVD::new(self.matrix().clone(), false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Solver("SVD did not return right singular vectors".into()))?;
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        // Row k of V† is the conjugate of the k-th right singular vector.
        Ok(v_t.row(k).transpose().map(|z| z.conj()))
    }

    fn null_vector_linear(&self) -> Result<CVector> {
        let d = self.dim();
        let n = d * d;
        let mut a = self.matrix().clone();
        // Row 0 is the ρ₀₀ equation; the diagonal rows sum to zero, so it is
        // redundant and can carry tr ρ = 1 instead.
        for j in 0..n {
            a[(0, j)] = c(0.0);
        }
        for i in 0..d {
            a[(0, i * d + i)] = c(1.0);
        }
        let mut b = CVector::zeros(n);
        b[0] = c(1.0);
        a.lu()
            .solve(&b)
            .ok_or_else(|| Error::Solver("trace-constrained Liouvillian is singular".into()))
    }
}

/// Unique steady state of the master equation (eigen backend).
pub fn steady_state(p: &SystemParams) -> Result<DensityMatrix> {
    steady_state_with(p, SteadyStateBackend::Eigen)
}

pub fn steady_state_with(p: &SystemParams, backend: SteadyStateBackend) -> Result<DensityMatrix> {
    build_liouvillian(p)?.steady_state(backend)
}

/// Classification of the undriven fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitCycleVerdict {
    /// Phase-symmetric with weight away from the poles: a usable limit cycle.
    Valid,
    /// The fixed point prefers a phase (`[ρ, S_z] ≠ 0`).
    NoFreePhase,
    /// Phase-symmetric but supported only on `m = ±S`, where the phase is
    /// undefined.
    ExtremalOnly,
}

/// Checks whether the undriven (`ε = 0`) steady state is a limit cycle.
pub fn limit_cycle_validity(p: &SystemParams) -> Result<LimitCycleVerdict> {
    if p.epsilon != 0.0 {
        return Err(Error::Precondition(format!(
            "limit-cycle check needs epsilon = 0, got {}",
            p.epsilon
        )));
    }
    let rho = steady_state(p)?;
    let alg = SpinAlgebra::new(p.spin);
    if rho.commutator_defect(alg.sz()) > PHASE_SYMMETRY_TOL {
        return Ok(LimitCycleVerdict::NoFreePhase);
    }
    let pops = rho.populations();
    let interior: f64 = pops[1..pops.len() - 1].iter().sum();
    if interior < INTERIOR_POPULATION_TOL {
        Ok(LimitCycleVerdict::ExtremalOnly)
    } else {
        Ok(LimitCycleVerdict::Valid)
    }
}
