//! Spin Husimi Q function on a sphere grid and the phase distribution `S(φ)`.
//!
//! The grid integrates `∫₀^π sinθ dθ ∫₀^{2π} dφ`. The polar rule is
//! Gauss-Legendre in `θ` itself with `sinθ` folded into the weights: the
//! Q integrand is a trigonometric polynomial in `θ/2`, smooth in `θ` but with
//! `√(1−u²)` factors in `u = cosθ`, so a rule in `θ` converges spectrally
//! where a rule in `u` would converge only algebraically. The azimuthal rule
//! is the trapezoid rule, exact for trigonometric polynomials of degree
//! below `n_phi`.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::quadrature::gauss_legendre_interval;
use crate::spin_algebra::{coherent_state, SpinAlgebra, SphereDirection};

pub const DEFAULT_N_THETA: usize = 64;
pub const DEFAULT_N_PHI: usize = 360;

/// Q values in `[-NEGATIVITY_TOL, 0)` are rounding noise and clipped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    theta: Vec<f64>,
    theta_weights: Vec<f64>,
    phi: Vec<f64>,
}

/// Tensor grid with `n_theta` polar and `n_phi` azimuthal nodes.
///
/// For a spin `S`, `n_theta ≥ 2S+2` and `n_phi > 4S+1` keep every reported
/// integral at rounding level.
pub fn make_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 nodes per axis, got n_theta={n_theta}, n_phi={n_phi}"
        )));
    }
    let (theta, w) = gauss_legendre_interval(n_theta, 0.0, PI);
    let theta_weights = theta.iter().zip(&w).map(|(t, wi)| wi * t.sin()).collect();
    let nf = n_phi as f64;
    let phi = (0..n_phi).map(|j| TAU * (j as f64 / nf)).collect();
    Ok(SphereGrid { theta, theta_weights, phi })
}

impl Default for SphereGrid {
    fn default() -> Self {
        make_grid(DEFAULT_N_THETA, DEFAULT_N_PHI).expect("default grid is valid")
    }
}

impl SphereGrid {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta
    }

    /// Weights for `∫₀^π f(θ) sinθ dθ`; they sum to 2.
    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_step(&self) -> f64 {
        TAU / self.n_phi() as f64
    }

    /// `∫ sinθ dθ dφ f` for values laid out `n_theta × n_phi`.
    pub fn integrate(&self, values: &DMatrix<f64>) -> f64 {
        let dphi = self.phi_step();
        values
            .row_iter()
            .zip(&self.theta_weights)
            .map(|(row, w)| w * row.sum() * dphi)
            .sum()
    }
}

/// Q sampled on a [`SphereGrid`] (units: 1/steradian).
#[derive(Clone, Debug)]
pub struct QField {
    grid: SphereGrid,
    values: DMatrix<f64>,
}

impl QField {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    /// `n_theta × n_phi` matrix of Q values.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn normalization(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// CSV with header `theta,phi,q`, θ-outer row order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "phi", "q"])?;
        for (i, &t) in self.grid.theta.iter().enumerate() {
            for (j, &p) in self.grid.phi.iter().enumerate() {
                w.write_record([fmt_f64(t), fmt_f64(p), fmt_f64(self.values[(i, j)])])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Precomputed coherent-state amplitudes for repeated Q evaluations of one
/// spin on one grid.
///
/// With `c_k(θ,φ) = e^{−i m_k φ} a_k(θ)`,
/// `⟨θ,φ|ρ|θ,φ⟩ = Σ_n h_n(θ) e^{inφ}` where `h_n = Σ_{l−k=n} a_k a_l ρ_{kl}`.
#[derive(Clone, Debug)]
pub struct HusimiEvaluator {
    dim: usize,
    grid: SphereGrid,
    /// `a_k(θ_i)` per polar node.
    columns: Vec<Vec<f64>>,
    /// `e^{inφ_j}` for `n = 0..dim`, indexed `[j][n]`.
    harmonics: Vec<Vec<Complex64>>,
}

impl HusimiEvaluator {
    pub fn new(alg: &SpinAlgebra, grid: &SphereGrid) -> Self {
        let dim = alg.dim();
        let columns = grid.theta.iter().map(|&t| alg.pole_column(t)).collect();
        let harmonics = grid
            .phi
            .iter()
            .map(|&p| (0..dim).map(|n| Complex64::from_polar(1.0, n as f64 * p)).collect())
            .collect();
        HusimiEvaluator { dim, grid: grid.clone(), columns, harmonics }
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn q(&self, rho: &DensityMatrix) -> Result<QField> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.dim() });
        }
        let m = rho.matrix();
        let d = self.dim;
        let prefactor = d as f64 / (4.0 * PI);
        let n_phi = self.grid.n_phi();

        let rows: Vec<Vec<f64>> = self
            .columns
            .par_iter()
            .map(|a| {
                // h_n for n ≥ 0; h_{−n} = conj(h_n) because ρ is Hermitian.
                let h: Vec<Complex64> = (0..d)
                    .map(|n| (0..d - n).map(|k| m[(k, k + n)] * (a[k] * a[k + n])).sum())
                    .collect();
                self.harmonics
                    .iter()
                    .map(|e| {
                        let mut s = h[0].re;
                        for n in 1..d {
                            s += 2.0 * (h[n] * e[n]).re;
                        }
                        prefactor * s
                    })
                    .collect()
            })
            .collect();

        let mut values = DMatrix::zeros(self.grid.n_theta(), n_phi);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < -NEGATIVITY_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "Husimi value {v:e} at theta={}, phi={} is negative",
                        self.grid.theta[i], self.grid.phi[j]
                    )));
                }
                values[(i, j)] = v.max(0.0);
            }
        }
        Ok(QField { grid: self.grid.clone(), values })
    }

    /// `S(φ)` straight from `ρ`, skipping the stored field.
    pub fn phase_distribution(&self, rho: &DensityMatrix) -> Result<PhaseDistribution> {
        Ok(sync_measure(&self.q(rho)?))
    }
}

/// `Q(θ,φ) = (2S+1)/(4π) ⟨θ,φ|ρ|θ,φ⟩` on every grid node.
pub fn husimi_q(rho: &DensityMatrix, alg: &SpinAlgebra, grid: &SphereGrid) -> Result<QField> {
    HusimiEvaluator::new(alg, grid).q(rho)
}

/// Single-point Q by explicit coherent-state sandwich.
pub fn husimi_value(rho: &DensityMatrix, alg: &SpinAlgebra, dir: &SphereDirection) -> Result<f64> {
    if rho.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: rho.dim() });
    }
    let psi = coherent_state(alg, dir);
    let v = psi.expectation(rho.matrix());
    Ok(alg.dim() as f64 / (4.0 * PI) * v.re)
}

/// Integral of Q over the polar band `theta_lo < θ < theta_hi`, using its own
/// Gauss-Legendre rule on the band.
pub fn band_weight(
    rho: &DensityMatrix,
    alg: &SpinAlgebra,
    theta_lo: f64,
    theta_hi: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    if !(0.0 <= theta_lo && theta_lo < theta_hi && theta_hi <= PI) || n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidGrid(format!(
            "band ({theta_lo}, {theta_hi}) with {n_theta}x{n_phi} nodes"
        )));
    }
    let (theta, w) = gauss_legendre_interval(n_theta, theta_lo, theta_hi);
    let grid = SphereGrid {
        theta_weights: theta.iter().zip(&w).map(|(t, wi)| wi * t.sin()).collect(),
        theta,
        phi: (0..n_phi).map(|j| TAU * (j as f64 / n_phi as f64)).collect(),
    };
    Ok(husimi_q(rho, alg, &grid)?.normalization())
}

/// `S(φ)` on the grid's azimuthal nodes (units: 1/radian).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDistribution {
    phi: Vec<f64>,
    values: Vec<f64>,
}

impl PhaseDistribution {
    pub fn new(phi: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if phi.is_empty() || phi.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "phase distribution needs matching non-empty axes ({} nodes, {} values)",
                phi.len(),
                values.len()
            )));
        }
        Ok(PhaseDistribution { phi, values })
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoid integral over `[0, 2π)`; zero for any normalized Q.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * TAU / self.values.len() as f64
    }

    /// CSV with header `phi,s`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "s"])?;
        for (p, s) in self.phi.iter().zip(&self.values) {
            w.write_record([fmt_f64(*p), fmt_f64(*s)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `S(φ) = ∫₀^π sinθ Q(θ,φ) dθ − 1/(2π)` at each azimuthal node.
pub fn sync_measure(q: &QField) -> PhaseDistribution {
    let grid = q.grid();
    let values = (0..grid.n_phi())
        .map(|j| {
            grid.theta_weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * q.values[(i, j)])
                .sum::<f64>()
                - 1.0 / TAU
        })
        .collect();
    PhaseDistribution { phi: grid.phi.clone(), values }
}

/// `(φ*, max S)`; ties resolve to the smallest `φ`.
pub fn peak(dist: &PhaseDistribution) -> (f64, f64) {
    let mut best = 0;
    for (j, &v) in dist.values.iter().enumerate() {
        if v > dist.values[best] {
            best = j;
        }
    }
    (dist.phi[best], dist.values[best])
}
