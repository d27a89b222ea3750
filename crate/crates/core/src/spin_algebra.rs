//! Spin operators, Wigner small-d matrices and spin coherent states.
//!
//! Every matrix in the crate uses the Dicke basis ordered by descending
//! magnetic quantum number: index `k` holds `m = S - k`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, I};

/// A spin quantum number `S ∈ {1/2, 1, 3/2, …}`, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };
    pub const ONE: Spin = Spin { twice: 2 };
    pub const TWO: Spin = Spin { twice: 4 };

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Spin { twice })
    }

    /// Accepts `value` when `2·value` is a positive integer (to 1e-9).
    pub fn new(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !value.is_finite() || value <= 0.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(value));
        }
        Spin::from_twice(twice.round() as u32)
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.twice.is_multiple_of(2)
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.value() - k as f64
    }

    /// Basis index of magnetic quantum number `m`, if it belongs to this spin.
    pub fn index_of(self, m: f64) -> Option<usize> {
        let k = self.value() - m;
        let kr = k.round();
        ((k - kr).abs() < 1e-9 && kr >= 0.0 && (kr as usize) < self.dim()).then_some(kr as usize)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Spin::new(value)
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Spin::new(v).map_err(serde::de::Error::custom)
    }
}

/// Spin matrices of one irreducible representation, plus the eigenbasis of
/// `S_y` used to exponentiate rotations.
#[derive(Clone, Debug)]
pub struct SpinAlgebra {
    spin: Spin,
    sx: CMatrix,
    sy: CMatrix,
    sz: CMatrix,
    sp: CMatrix,
    sm: CMatrix,
    sy_eigenvalues: Vec<f64>,
    sy_eigenvectors: CMatrix,
}

/// Builds the spin-`s` algebra; `s` must be a positive half-integer.
pub fn build_spin_algebra(s: f64) -> Result<SpinAlgebra> {
    Ok(SpinAlgebra::new(Spin::new(s)?))
}

impl SpinAlgebra {
    pub fn new(spin: Spin) -> Self {
        let dim = spin.dim();
        let s = spin.value();
        let mut sz = CMatrix::zeros(dim, dim);
        let mut sp = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let m = spin.m(k);
            sz[(k, k)] = c(m);
            // S₊|m⟩ = √(S(S+1) − m(m+1)) |m+1⟩, and m+1 sits at index k−1.
            if k > 0 {
                sp[(k - 1, k)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt());
            }
        }
        let sm = sp.adjoint();
        let sx = (&sp + &sm) * c(0.5);
        let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);

        let eig = SymmetricEigen::new(sy.clone());
        SpinAlgebra {
            spin,
            sy_eigenvalues: eig.eigenvalues.iter().copied().collect(),
            sy_eigenvectors: eig.eigenvectors,
            sx,
            sy,
            sz,
            sp,
            sm,
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn sx(&self) -> &CMatrix {
        &self.sx
    }

    pub fn sy(&self) -> &CMatrix {
        &self.sy
    }

    pub fn sz(&self) -> &CMatrix {
        &self.sz
    }

    pub fn sp(&self) -> &CMatrix {
        &self.sp
    }

    pub fn sm(&self) -> &CMatrix {
        &self.sm
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// `S² = S_x² + S_y² + S_z²`.
    pub fn casimir(&self) -> CMatrix {
        &self.sx * &self.sx + &self.sy * &self.sy + &self.sz * &self.sz
    }

    /// `n·S⃗` for a (not necessarily unit) vector `n`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.sx * c(n[0]) + &self.sy * c(n[1]) + &self.sz * c(n[2])
    }

    /// Dicke state `|S, m⟩`.
    pub fn dicke(&self, m: f64) -> Result<StateVector> {
        let k = self
            .spin
            .index_of(m)
            .ok_or_else(|| Error::Precondition(format!("m={m} is not a level of spin {}", self.spin)))?;
        let mut amps = CVector::zeros(self.dim());
        amps[k] = c(1.0);
        Ok(StateVector { amplitudes: amps })
    }

    /// `d^S_{m',m}(θ) = ⟨S,m'| exp(−iθS_y) |S,m⟩`, built from the eigenbasis of
    /// `S_y`. The result is real up to rounding; the imaginary residue is dropped.
    pub fn wigner_small_d(&self, theta: f64) -> DMatrix<f64> {
        let v = &self.sy_eigenvectors;
        let phases = CVector::from_iterator(
            self.dim(),
            self.sy_eigenvalues.iter().map(|&l| (-I * theta * l).exp()),
        );
        let rot = v * CMatrix::from_diagonal(&phases) * v.adjoint();
        rot.map(|z| z.re)
    }

    /// Column `m = S` of the small-d matrix: amplitudes of the coherent state
    /// at polar angle `theta` before the azimuthal phase is applied.
    pub(crate) fn pole_column(&self, theta: f64) -> Vec<f64> {
        self.wigner_small_d(theta).column(0).iter().copied().collect()
    }
}

/// Free function form of [`SpinAlgebra::wigner_small_d`].
pub fn wigner_small_d(spin: Spin, theta: f64) -> DMatrix<f64> {
    SpinAlgebra::new(spin).wigner_small_d(theta)
}

/// A point on the unit sphere; `phi` is kept in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereDirection {
    theta: f64,
    phi: f64,
}

impl SphereDirection {
    /// Rejects non-finite angles and `theta ∉ [0, π]`; wraps `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidDirection { theta, phi });
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(SphereDirection { theta, phi })
    }

    /// Direction of a nonzero Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidDirection { theta: f64::NAN, phi: f64::NAN });
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        SphereDirection::new(theta, v[1].atan2(v[0]))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(cos φ sin θ, sin φ sin θ, cos θ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cp * st, sp * st, ct]
    }

    pub fn dot(&self, other: &SphereDirection) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
}

/// Normalized pure state in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps `amplitudes` if the norm is 1 within 1e-12.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes: amplitudes / c(norm) })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// `|θ,φ⟩ = exp(−iφS_z) exp(−iθS_y) |S,S⟩`; amplitude at `m'` is
/// `e^{−im'φ} d^S_{m',S}(θ)`. No re-phasing is applied.
pub fn coherent_state(alg: &SpinAlgebra, dir: &SphereDirection) -> StateVector {
    let column = alg.pole_column(dir.theta());
    let spin = alg.spin();
    let amps = CVector::from_iterator(
        alg.dim(),
        column
            .iter()
            .enumerate()
            .map(|(k, &d)| (-I * spin.m(k) * dir.phi()).exp() * d),
    );
    StateVector { amplitudes: amps }
}

/// `⟨dir2|dir1⟩`, whose squared modulus is `[(1 + n₁·n₂)/2]^{2S}`.
pub fn coherent_overlap(alg: &SpinAlgebra, dir1: &SphereDirection, dir2: &SphereDirection) -> Complex64 {
    coherent_state(alg, dir2).inner(&coherent_state(alg, dir1))
}

/// Applies `exp(−iω₀tS_z)`.
pub fn free_evolve(alg: &SpinAlgebra, state: &StateVector, omega0: f64, t: f64) -> Result<StateVector> {
    if state.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: state.dim() });
    }
    let spin = alg.spin();
    let amps = CVector::from_iterator(
        alg.dim(),
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| (-I * omega0 * t * spin.m(k)).exp() * a),
    );
    Ok(StateVector { amplitudes: amps })
}
