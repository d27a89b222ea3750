//! Phase-locking experiments on top of the steady-state and Husimi machinery.
//!
//! Sweep axes (`delta`, `epsilon`) are expressed in units of
//! `γ_min = min(γ_g, γ_d)` of the template parameters; everything else keeps
//! the template's absolute units.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_liouvillian, evolve_with, limit_cycle_validity, DensityMatrix, LimitCycleVerdict, SteadyStateBackend,
    SystemParams,
};
use crate::error::{Error, Result};
use crate::husimi::{band_weight, make_grid, peak, HusimiEvaluator, PhaseDistribution, SphereGrid};
use crate::io::fmt_f64;
use crate::linalg::c;
use crate::spin_algebra::{coherent_state, Spin, SpinAlgebra, SphereDirection};

/// Contour level separating significant from insignificant locking in a
/// tongue map.
pub const LOCKING_THRESHOLD: f64 = 0.005;

/// Half-width of the equatorial band `|θ − π/2| < π/8` used to quantify how
/// far the driven state leaves the limit cycle.
pub const EQUATOR_BAND_HALF_WIDTH: f64 = PI / 8.0;

/// Largest `ε/γ_min` treated as weak driving by the first-order check.
pub const WEAK_DRIVE_RATIO: f64 = 0.1;

fn require_spin_one(p: &SystemParams) -> Result<()> {
    if p.spin != Spin::ONE {
        return Err(Error::Precondition(format!("first-order formulas hold for spin 1 only, got spin {}", p.spin)));
    }
    Ok(())
}

/// First-order rate of change of `S(φ)` for spin 1 starting from `|1,0⟩`:
/// `(3ε/16)(e^{−γ_g t/2} − e^{−γ_d t/2}) cos(φ − Δt)`.
pub fn analytic_sdot(phi: f64, t: f64, p: &SystemParams) -> Result<f64> {
    require_spin_one(p)?;
    Ok(analytic_envelope(t, p) * (phi - p.delta * t).cos())
}

fn analytic_envelope(t: f64, p: &SystemParams) -> f64 {
    3.0 * p.epsilon / 16.0 * ((-p.gamma_g * t / 2.0).exp() - (-p.gamma_d * t / 2.0).exp())
}

/// Resonant first-order steady state `(3ε/8)(1/γ_g − 1/γ_d) cos φ`.
///
/// Valid for `|Δ| ≪ γ_min`; `Δ` itself does not enter.
pub fn analytic_steady_s(phi: f64, p: &SystemParams) -> Result<f64> {
    require_spin_one(p)?;
    if p.gamma_min() <= 0.0 {
        return Err(Error::Precondition("both rates must be positive".into()));
    }
    Ok(3.0 * p.epsilon / 8.0 * (1.0 / p.gamma_g - 1.0 / p.gamma_d) * phi.cos())
}

/// Outcome of comparing the integrated `dS/dt` against the first-order formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstOrderReport {
    /// `max |numeric − analytic|` over time and φ, divided by
    /// `analytic_peak`; equals `max_abs_deviation` when the peak vanishes.
    pub relative_deviation: f64,
    pub max_abs_deviation: f64,
    /// `max_t (3ε/16)|e^{−γ_g t/2} − e^{−γ_d t/2}|` over the sampled times.
    pub analytic_peak: f64,
    /// `max |dS/dt|` of the numerical trajectory.
    pub max_abs_numeric: f64,
}

/// Grid used by [`first_order_consistency`]; the polar rule is converged to
/// rounding level for spin 1 at this size.
pub fn first_order_grid() -> SphereGrid {
    make_grid(24, 72).expect("valid grid")
}

/// Integrates the master equation from `|1,0⟩⟨1,0|` (flat `S(φ)`), takes
/// central differences of `S(φ)` along the trajectory and compares them to
/// [`analytic_sdot`].
pub fn first_order_consistency(p: &SystemParams, t_final: f64, n_steps: usize) -> Result<FirstOrderReport> {
    first_order_consistency_on(p, t_final, n_steps, &first_order_grid())
}

pub fn first_order_consistency_on(
    p: &SystemParams,
    t_final: f64,
    n_steps: usize,
    grid: &SphereGrid,
) -> Result<FirstOrderReport> {
    require_spin_one(p)?;
    p.validate()?;
    if p.epsilon > WEAK_DRIVE_RATIO * p.gamma_min() {
        return Err(Error::Precondition(format!(
            "epsilon={} exceeds the weak-drive bound {}·gamma_min={}",
            p.epsilon,
            WEAK_DRIVE_RATIO,
            WEAK_DRIVE_RATIO * p.gamma_min()
        )));
    }
    if n_steps < 2 {
        return Err(Error::Precondition("central differences need at least 2 steps".into()));
    }
    let alg = SpinAlgebra::new(p.spin);
    let l = build_liouvillian(p)?;
    let rho0 = DensityMatrix::dicke(&alg, 0.0)?;
    let traj = evolve_with(&l, &rho0, t_final, n_steps)?;

    let eval = HusimiEvaluator::new(&alg, grid);
    let series: Vec<PhaseDistribution> = traj
        .states()
        .par_iter()
        .map(|rho| eval.phase_distribution(rho))
        .collect::<Result<_>>()?;

    let times = traj.times();
    let phi = grid.phi_nodes();
    let mut max_abs_deviation: f64 = 0.0;
    let mut max_abs_numeric: f64 = 0.0;
    let mut analytic_peak: f64 = 0.0;
    for k in 1..times.len() - 1 {
        let dt = times[k + 1] - times[k - 1];
        let t = times[k];
        analytic_peak = analytic_peak.max(analytic_envelope(t, p).abs());
        for (j, &ph) in phi.iter().enumerate() {
            let numeric = (series[k + 1].values()[j] - series[k - 1].values()[j]) / dt;
            let analytic = analytic_sdot(ph, t, p)?;
            max_abs_numeric = max_abs_numeric.max(numeric.abs());
            max_abs_deviation = max_abs_deviation.max((numeric - analytic).abs());
        }
    }
    let relative_deviation = if analytic_peak > 0.0 { max_abs_deviation / analytic_peak } else { max_abs_deviation };
    Ok(FirstOrderReport { relative_deviation, max_abs_deviation, analytic_peak, max_abs_numeric })
}

/// Quadrature grid resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings { n_theta: crate::husimi::DEFAULT_N_THETA, n_phi: crate::husimi::DEFAULT_N_PHI }
    }
}

impl GridSettings {
    pub fn build(&self) -> Result<SphereGrid> {
        make_grid(self.n_theta, self.n_phi)
    }
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * (i as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// A (detuning × strength) scan around a parameter template.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Detunings in units of `γ_min`.
    pub deltas: Vec<f64>,
    /// Signal strengths in units of `γ_min`.
    pub epsilons: Vec<f64>,
    pub base: SystemParams,
    pub grid: GridSettings,
    pub backend: SteadyStateBackend,
}

impl SweepSpec {
    /// 21 detunings in `[−3, 3]γ_min` by 10 strengths in `[0.01, 0.1]γ_min`.
    pub fn default_tongue(base: SystemParams) -> Self {
        SweepSpec {
            deltas: linspace(-3.0, 3.0, 21),
            epsilons: linspace(0.01, 0.1, 10),
            base,
            grid: GridSettings::default(),
            backend: SteadyStateBackend::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.deltas.is_empty() || self.epsilons.is_empty() {
            return Err(Error::Precondition("sweep needs at least one delta and one epsilon".into()));
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Precondition("sweep epsilons must be finite and non-negative".into()));
        }
        if self.deltas.iter().any(|d| !d.is_finite()) {
            return Err(Error::Precondition("sweep deltas must be finite".into()));
        }
        if self.base.gamma_min() <= 0.0 {
            return Err(Error::Precondition("sweeps are scaled by gamma_min, which must be positive".into()));
        }
        Ok(())
    }
}

/// One sweep point. Failed points carry NaN observables and the error text.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// In units of `γ_min`.
    pub delta: f64,
    /// In units of `γ_min`.
    pub epsilon: f64,
    pub s_max: f64,
    pub phi_star: f64,
    pub mean_sz: f64,
    /// Q weight in the equatorial band; only filled by [`breakdown_scan`].
    pub equator_weight: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub template: SystemParams,
    pub gamma_min: f64,
    pub grid: GridSettings,
    pub backend: SteadyStateBackend,
    pub rows: Vec<SweepRow>,
}

/// Parameter record written next to every sweep CSV.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepSidecar {
    pub template: SystemParams,
    pub gamma_min: f64,
    pub axis_unit: String,
    pub grid: GridSettings,
    pub backend: SteadyStateBackend,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// Row at exactly this `(Δ, ε)` pair (both in units of `γ_min`).
    pub fn row(&self, delta: f64, epsilon: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.delta == delta && r.epsilon == epsilon)
    }

    /// For each distinct ε (first-seen order), the number of detunings with
    /// `s_max ≥ threshold`.
    pub fn tongue_widths(&self, threshold: f64) -> Vec<(f64, usize)> {
        let mut eps: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !eps.contains(&r.epsilon) {
                eps.push(r.epsilon);
            }
        }
        eps.into_iter()
            .map(|e| (e, self.rows.iter().filter(|r| r.epsilon == e && r.s_max >= threshold).count()))
            .collect()
    }

    pub fn sidecar(&self) -> SweepSidecar {
        SweepSidecar {
            template: self.template,
            gamma_min: self.gamma_min,
            axis_unit: "gamma_min".into(),
            grid: self.grid,
            backend: self.backend,
        }
    }

    /// CSV with header `delta,epsilon,s_max,phi_star,mean_sz`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["delta", "epsilon", "s_max", "phi_star", "mean_sz"])?;
        for r in &self.rows {
            w.write_record([fmt_f64(r.delta), fmt_f64(r.epsilon), fmt_f64(r.s_max), fmt_f64(r.phi_star), fmt_f64(r.mean_sz)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with header `epsilon,equator_weight` (breakdown scans).
    pub fn write_band_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epsilon", "equator_weight"])?;
        for r in &self.rows {
            w.write_record([fmt_f64(r.epsilon), fmt_f64(r.equator_weight.unwrap_or(f64::NAN))])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Steady-state observables at one parameter point.
#[derive(Clone, Debug)]
pub struct LockingPoint {
    pub state: DensityMatrix,
    pub distribution: PhaseDistribution,
    pub s_max: f64,
    pub phi_star: f64,
    pub mean_sz: f64,
}

/// Steady state → Q → `S(φ)` → peak and `⟨S_z⟩`.
pub fn locking_point(
    p: &SystemParams,
    eval: &HusimiEvaluator,
    backend: SteadyStateBackend,
) -> Result<LockingPoint> {
    let alg = SpinAlgebra::new(p.spin);
    let state = build_liouvillian(p)?.steady_state(backend)?;
    let distribution = eval.phase_distribution(&state)?;
    let (phi_star, s_max) = peak(&distribution);
    let mean_sz = state.expectation(alg.sz());
    Ok(LockingPoint { state, distribution, s_max, phi_star, mean_sz })
}

fn failed_row(delta: f64, epsilon: f64, err: &Error) -> SweepRow {
    SweepRow {
        delta,
        epsilon,
        s_max: f64::NAN,
        phi_star: f64::NAN,
        mean_sz: f64::NAN,
        equator_weight: None,
        error: Some(err.to_string()),
    }
}

/// Locking observables over every `(Δ, ε)` pair, Δ outer. Per-point solver
/// failures are recorded in their row; only an invalid spec is an error.
pub fn arnold_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let gmin = spec.base.gamma_min();
    let grid = spec.grid.build()?;
    let alg = SpinAlgebra::new(spec.base.spin);
    let eval = HusimiEvaluator::new(&alg, &grid);
    let points: Vec<(f64, f64)> = spec
        .deltas
        .iter()
        .flat_map(|&d| spec.epsilons.iter().map(move |&e| (d, e)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(d, e)| {
            let p = spec.base.with_delta(d * gmin).with_epsilon(e * gmin);
            match locking_point(&p, &eval, spec.backend) {
                Ok(lp) => SweepRow {
                    delta: d,
                    epsilon: e,
                    s_max: lp.s_max,
                    phi_star: lp.phi_star,
                    mean_sz: lp.mean_sz,
                    equator_weight: None,
                    error: None,
                },
                Err(err) => failed_row(d, e, &err),
            }
        })
        .collect();
    Ok(SweepResult { template: spec.base, gamma_min: gmin, grid: spec.grid, backend: spec.backend, rows })
}

/// Resonant scan over signal strengths (units of `γ_min`), adding the Q
/// weight in the equatorial band to each row.
pub fn breakdown_scan(
    p: &SystemParams,
    epsilons: &[f64],
    grid: GridSettings,
    backend: SteadyStateBackend,
) -> Result<SweepResult> {
    if p.delta != 0.0 {
        return Err(Error::Precondition(format!("breakdown scan runs at delta = 0, got {}", p.delta)));
    }
    let spec = SweepSpec { deltas: vec![0.0], epsilons: epsilons.to_vec(), base: *p, grid, backend };
    let mut result = arnold_sweep(&spec)?;
    let alg = SpinAlgebra::new(p.spin);
    let gmin = result.gamma_min;
    result.rows.par_iter_mut().for_each(|row| {
        if row.error.is_some() {
            return;
        }
        let q = p.with_epsilon(row.epsilon * gmin);
        let weight = build_liouvillian(&q).and_then(|l| l.steady_state(backend)).and_then(|rho| {
            band_weight(
                &rho,
                &alg,
                PI / 2.0 - EQUATOR_BAND_HALF_WIDTH,
                PI / 2.0 + EQUATOR_BAND_HALF_WIDTH,
                32,
                grid.n_phi,
            )
        });
        match weight {
            Ok(w) => row.equator_weight = Some(w),
            Err(e) => row.error = Some(e.to_string()),
        }
    });
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinComparisonRow {
    pub spin: Spin,
    pub s_max: f64,
    pub phi_star: f64,
}

/// Applies the same rates and drive to each integer spin and reports the
/// peak of `S(φ)`.
pub fn spin_comparison(
    spins: &[Spin],
    template: &SystemParams,
    grid: GridSettings,
    backend: SteadyStateBackend,
) -> Result<Vec<SpinComparisonRow>> {
    if let Some(s) = spins.iter().find(|s| !s.is_integer()) {
        return Err(Error::Precondition(format!("spin comparison covers integer spins only, got {s}")));
    }
    let g = grid.build()?;
    spins
        .par_iter()
        .map(|&spin| {
            let p = template.with_spin(spin);
            let eval = HusimiEvaluator::new(&SpinAlgebra::new(spin), &g);
            let lp = locking_point(&p, &eval, backend)?;
            Ok(SpinComparisonRow { spin, s_max: lp.s_max, phi_star: lp.phi_star })
        })
        .collect()
}

pub fn write_spin_comparison_csv<W: Write>(rows: &[SpinComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["spin", "s_max"])?;
    for r in rows {
        w.write_record([fmt_f64(r.spin.value()), fmt_f64(r.s_max)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NogoSample {
    pub lambda: f64,
    pub bloch: [f64; 3],
    /// `‖m⃗ − λn⃗‖`.
    pub colinearity_error: f64,
    /// Largest spread of Q along circles about the axis.
    pub q_symmetry_error: f64,
    /// Largest entry of `[ρ, n·σ⃗]`.
    pub commutator_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NogoReport {
    pub axis: [f64; 3],
    pub samples: Vec<NogoSample>,
    pub max_colinearity_error: f64,
    pub max_q_symmetry_error: f64,
    pub verdict_params: SystemParams,
    pub verdict: LimitCycleVerdict,
}

/// Circles about `axis` for the Q symmetry check.
const NOGO_POLAR_SAMPLES: usize = 7;
const NOGO_AZIMUTH_SAMPLES: usize = 24;

/// Enumerates the qubit states `(1 + λ n·σ⃗)/2`, `λ ∈ [−1, 1]` on `n_lambda`
/// points, that commute with `n·σ⃗`, and records that each has an axially
/// symmetric Q and a Bloch vector on the axis. The verdict applies
/// [`limit_cycle_validity`] to the spin-1/2 version of the gain/damping map
/// with the given rates.
pub fn qubit_nogo_report(axis: &SphereDirection, n_lambda: usize, gamma_g: f64, gamma_d: f64) -> Result<NogoReport> {
    if n_lambda < 2 {
        return Err(Error::Precondition("need at least two lambda samples".into()));
    }
    let alg = SpinAlgebra::new(Spin::HALF);
    let n = axis.unit_vector();
    let n_sigma = alg.along(n) * c(2.0);
    let sigmas = [alg.sx() * c(2.0), alg.sy() * c(2.0), alg.sz() * c(2.0)];
    let circles = axis_circles(&n);

    let samples = linspace(-1.0, 1.0, n_lambda)
        .into_iter()
        .map(|lambda| {
            let rho = DensityMatrix::new((alg.identity() + &n_sigma * c(lambda)) * c(0.5))?;
            let bloch = [0, 1, 2].map(|k| rho.expectation(&sigmas[k]));
            let colinearity_error =
                (0..3).map(|k| (bloch[k] - lambda * n[k]).powi(2)).sum::<f64>().sqrt();
            let mut q_symmetry_error: f64 = 0.0;
            for circle in &circles {
                let qs: Vec<f64> = circle
                    .iter()
                    .map(|d| rho.fidelity_with(&coherent_state(&alg, d)) * 2.0 / (4.0 * PI))
                    .collect();
                let (lo, hi) = qs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| (a.min(q), b.max(q)));
                q_symmetry_error = q_symmetry_error.max(hi - lo);
            }
            Ok(NogoSample {
                lambda,
                bloch,
                colinearity_error,
                q_symmetry_error,
                commutator_defect: rho.commutator_defect(&n_sigma),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let verdict_params = SystemParams::new(Spin::HALF, 0.0, 0.0, gamma_g, gamma_d)?;
    let verdict = limit_cycle_validity(&verdict_params)?;
    Ok(NogoReport {
        axis: n,
        max_colinearity_error: samples.iter().map(|s| s.colinearity_error).fold(0.0, f64::max),
        max_q_symmetry_error: samples.iter().map(|s| s.q_symmetry_error).fold(0.0, f64::max),
        samples,
        verdict_params,
        verdict,
    })
}

/// Points on circles of fixed angle to `n`.
fn axis_circles(n: &[f64; 3]) -> Vec<Vec<SphereDirection>> {
    let helper = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalize(cross(n, &helper));
    let e2 = cross(n, &e1);
    (1..=NOGO_POLAR_SAMPLES)
        .map(|i| {
            let beta = PI * i as f64 / (NOGO_POLAR_SAMPLES + 1) as f64;
            (0..NOGO_AZIMUTH_SAMPLES)
                .map(|k| {
                    let alpha = 2.0 * PI * k as f64 / NOGO_AZIMUTH_SAMPLES as f64;
                    let (sb, cb) = beta.sin_cos();
                    let (sa, ca) = alpha.sin_cos();
                    let v = [0, 1, 2].map(|j| cb * n[j] + sb * (ca * e1[j] + sa * e2[j]));
                    SphereDirection::from_vector(v).expect("unit vector")
                })
                .collect()
        })
        .collect()
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

/// Expectation of `S_z` in the steady state, a convenience for scans.
pub fn steady_mean_sz(p: &SystemParams, backend: SteadyStateBackend) -> Result<f64> {
    let alg = SpinAlgebra::new(p.spin);
    let rho = build_liouvillian(p)?.steady_state(backend)?;
    Ok(rho.expectation(alg.sz()))
}
