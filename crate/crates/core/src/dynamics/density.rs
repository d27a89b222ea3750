use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hermitian_eigenvalues, max_abs, trace, CMatrix};
use crate::spin_algebra::{SpinAlgebra, StateVector};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const MIN_EIGENVALUE_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), trace (1e-9) and the smallest
    /// eigenvalue (> −1e-9).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensity(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensity(format!("Hermiticity defect {herm:e}")));
        }
        let tr = trace(&matrix);
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min_ev = hermitian_eigenvalues(&matrix)[0];
        if min_ev < -MIN_EIGENVALUE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn pure(state: &StateVector) -> Self {
        DensityMatrix { matrix: state.projector() }
    }

    /// `|S,m⟩⟨S,m|`.
    pub fn dicke(alg: &SpinAlgebra, m: f64) -> Result<Self> {
        Ok(DensityMatrix::pure(&alg.dicke(m)?))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64) }
    }

    /// Full-rank random state `AA†/tr(AA†)` with uniform entries in the
    /// unit square.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let m = &a * a.adjoint();
        let tr = trace(&m).re;
        let m = m / c(tr);
        DensityMatrix { matrix: (&m + m.adjoint()) * c(0.5) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// `Re tr(ρA)`.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        trace(&(&self.matrix * op)).re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, state: &StateVector) -> f64 {
        state.expectation(&self.matrix).re
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Largest entry of `[ρ, A]`.
    pub fn commutator_defect(&self, op: &CMatrix) -> f64 {
        max_abs(&commutator(&self.matrix, op))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn to_json(&self) -> DensityJson {
        let d = self.dim();
        DensityJson {
            dim: d,
            re: (0..d).map(|i| (0..d).map(|j| self.matrix[(i, j)].re).collect()).collect(),
            im: (0..d).map(|i| (0..d).map(|j| self.matrix[(i, j)].im).collect()).collect(),
        }
    }

    pub fn from_json(json: &DensityJson) -> Result<Self> {
        let d = json.dim;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !rows_ok(&json.re) || !rows_ok(&json.im) {
            return Err(Error::InvalidDensity(format!("JSON arrays do not match dim={d}")));
        }
        DensityMatrix::new(DMatrix::from_fn(d, d, |i, j| Complex64::new(json.re[i][j], json.im[i][j])))
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

/// `{ "dim": d, "re": [[...]], "im": [[...]] }`, rows outer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}
