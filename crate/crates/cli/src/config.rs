use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use spinsync::dynamics::DEFAULT_DT_FACTOR;
use spinsync::experiments::{linspace, GridSettings};
use spinsync::{Spin, SphereDirection, SteadyStateBackend, SystemParams};

/// One run's worth of settings. Rates are absolute; with the defaults they are
/// in units of `gamma_d = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub spin: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma_g: f64,
    pub gamma_d: f64,
    pub grid: GridSettings,
    pub solver: SolverConfig,
    pub output: PathBuf,
    pub evolve: EvolveConfig,
    pub arnold: ArnoldConfig,
    pub breakdown: BreakdownConfig,
    pub compare: CompareConfig,
    pub nogo: NogoConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spin: 1.0,
            delta: 0.0,
            epsilon: 0.01,
            gamma_g: 0.1,
            gamma_d: 1.0,
            grid: GridSettings::default(),
            solver: SolverConfig::default(),
            output: PathBuf::from("out"),
            evolve: EvolveConfig::default(),
            arnold: ArnoldConfig::default(),
            breakdown: BreakdownConfig::default(),
            compare: CompareConfig::default(),
            nogo: NogoConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub backend: SteadyStateBackend,
    /// RK4 step as a fraction of the inverse fastest rate.
    pub dt_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { backend: SteadyStateBackend::Eigen, dt_factor: DEFAULT_DT_FACTOR }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// The `m = 0` Dicke state (integer spins only).
    LimitCycle,
    MaximallyMixed,
    Coherent { theta: f64, phi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_final: f64,
    /// Number of stored time points, including `t = 0`.
    pub samples: usize,
    pub initial: InitialState,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { t_final: 60.0, samples: 61, initial: InitialState::LimitCycle }
    }
}

/// Sweep axes in units of `min(gamma_g, gamma_d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArnoldConfig {
    pub deltas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl Default for ArnoldConfig {
    fn default() -> Self {
        ArnoldConfig { deltas: linspace(-3.0, 3.0, 21), epsilons: linspace(0.01, 0.1, 10) }
    }
}

/// Resonant drive strengths in units of `min(gamma_g, gamma_d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BreakdownConfig {
    pub epsilons: Vec<f64>,
}

impl Default for BreakdownConfig {
    fn default() -> Self {
        // log-spaced from 0.01 to 10
        let epsilons = linspace(-2.0, 1.0, 31).into_iter().map(|x| 10f64.powf(x)).collect();
        BreakdownConfig { epsilons }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub spins: Vec<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig { spins: vec![1.0, 2.0] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NogoConfig {
    pub theta: f64,
    pub phi: f64,
    pub n_lambda: usize,
}

impl Default for NogoConfig {
    fn default() -> Self {
        NogoConfig { theta: 0.0, phi: 0.0, n_lambda: 21 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn params(&self) -> Result<SystemParams, String> {
        let spin = Spin::new(self.spin).map_err(|e| e.to_string())?;
        SystemParams::new(spin, self.delta, self.epsilon, self.gamma_g, self.gamma_d).map_err(|e| e.to_string())
    }

    pub fn spins(&self) -> Result<Vec<Spin>, String> {
        self.compare.spins.iter().map(|&s| Spin::new(s).map_err(|e| e.to_string())).collect()
    }

    pub fn nogo_axis(&self) -> Result<SphereDirection, String> {
        SphereDirection::new(self.nogo.theta, self.nogo.phi).map_err(|e| e.to_string())
    }
}
