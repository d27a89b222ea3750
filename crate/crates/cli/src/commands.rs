use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use spinsync::dynamics::{default_steps, DensityJson};
use spinsync::experiments::{
    arnold_sweep, breakdown_scan, locking_point, qubit_nogo_report, spin_comparison, write_spin_comparison_csv,
    SweepResult, SweepSpec,
};
use spinsync::husimi::HusimiEvaluator;
use spinsync::io::{fmt_f64, write_json};
use spinsync::{
    coherent_state, evolve, husimi_q, steady_state_with, DensityMatrix, Error, SpinAlgebra, SteadyStateBackend,
    SystemParams,
};

use crate::config::{InitialState, RunConfig};

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "configuration error: {msg}"),
            Failure::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

fn at_point(p: &SystemParams) -> String {
    format!("(delta={}, epsilon={})", p.delta, p.epsilon)
}

/// Input-shaped errors are the config's fault; everything else happened while solving.
fn classify(err: Error, p: &SystemParams) -> Failure {
    match err {
        Error::InvalidSpin(_)
        | Error::InvalidDirection { .. }
        | Error::InvalidGrid(_)
        | Error::InvalidParams(_)
        | Error::Precondition(_) => Failure::Config(err.to_string()),
        Error::Io(_) => Failure::Config(err.to_string()),
        _ => Failure::Solver(format!("at {}: {err}", at_point(p))),
    }
}

fn io_failure(path: &Path, err: impl fmt::Display) -> Failure {
    Failure::Config(format!("cannot write {}: {err}", path.display()))
}

pub struct Context {
    pub config: RunConfig,
    pub params: SystemParams,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, Failure> {
        let params = config.params().map_err(Failure::Config)?;
        config.grid.build().map_err(|e| Failure::Config(e.to_string()))?;
        let out_dir = config.output.clone();
        fs::create_dir_all(&out_dir).map_err(|e| io_failure(&out_dir, e))?;
        Ok(Context { config, params, out_dir })
    }

    fn backend(&self) -> SteadyStateBackend {
        self.config.solver.backend
    }

    fn evaluator(&self, p: &SystemParams) -> HusimiEvaluator {
        let grid = self.config.grid.build().expect("grid checked in Context::new");
        HusimiEvaluator::new(&SpinAlgebra::new(p.spin), &grid)
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
        let path = self.out_dir.join(name);
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }

    fn with_file<F>(&self, name: &str, write: F) -> Result<PathBuf, Failure>
    where
        F: FnOnce(&mut BufWriter<File>) -> spinsync::Result<()>,
    {
        let (path, mut w) = self.create(name)?;
        write(&mut w).map_err(|e| io_failure(&path, e))?;
        w.flush().map_err(|e| io_failure(&path, e))?;
        Ok(path)
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let path = self.out_dir.join(name);
        write_json(&path, value).map_err(|e| io_failure(&path, e))?;
        Ok(path)
    }
}

pub fn qfunc(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let p = &ctx.params;
    let rho = steady_state_with(p, ctx.backend()).map_err(|e| classify(e, p))?;
    let grid = ctx.config.grid.build().map_err(|e| classify(e, p))?;
    let q = husimi_q(&rho, &SpinAlgebra::new(p.spin), &grid).map_err(|e| classify(e, p))?;
    Ok(vec![ctx.with_file("qfunc.csv", |w| q.write_csv(w))?])
}

#[derive(Serialize)]
struct SteadyReport {
    params: SystemParams,
    backend: SteadyStateBackend,
    s_max: f64,
    phi_star: f64,
    mean_sz: f64,
    density: DensityJson,
}

pub fn steady(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let p = &ctx.params;
    let lp = locking_point(p, &ctx.evaluator(p), ctx.backend()).map_err(|e| classify(e, p))?;
    let report = SteadyReport {
        params: *p,
        backend: ctx.backend(),
        s_max: lp.s_max,
        phi_star: lp.phi_star,
        mean_sz: lp.mean_sz,
        density: lp.state.to_json(),
    };
    Ok(vec![
        ctx.json("steady_state.json", &report)?,
        ctx.with_file("phase.csv", |w| lp.distribution.write_csv(w))?,
    ])
}

pub fn evolve_phase(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let p = &ctx.params;
    let cfg = ctx.config.evolve;
    if cfg.samples < 2 {
        return Err(Failure::Config(format!("evolve.samples must be at least 2, got {}", cfg.samples)));
    }
    let dt_factor = ctx.config.solver.dt_factor;
    if !(dt_factor.is_finite() && dt_factor > 0.0) {
        return Err(Failure::Config(format!("solver.dt_factor must be positive, got {dt_factor}")));
    }
    if !(cfg.t_final.is_finite() && cfg.t_final > 0.0) {
        return Err(Failure::Config(format!("evolve.t_final must be positive, got {}", cfg.t_final)));
    }
    let alg = SpinAlgebra::new(p.spin);
    let rho0 = match cfg.initial {
        InitialState::LimitCycle => {
            if !p.spin.is_integer() {
                return Err(Failure::Config(format!("limit_cycle start needs an integer spin, got {}", p.spin)));
            }
            DensityMatrix::dicke(&alg, 0.0).map_err(|e| classify(e, p))?
        }
        InitialState::MaximallyMixed => DensityMatrix::maximally_mixed(p.spin.dim()),
        InitialState::Coherent { theta, phi } => {
            let dir = spinsync::SphereDirection::new(theta, phi).map_err(|e| classify(e, p))?;
            DensityMatrix::pure(&coherent_state(&alg, &dir))
        }
    };
    // round the step count up so that every sample lands on a step
    let intervals = cfg.samples - 1;
    let stride = default_steps(p, cfg.t_final, dt_factor).div_ceil(intervals);
    let traj = evolve(p, &rho0, cfg.t_final, stride * intervals).map_err(|e| classify(e, p))?;
    let eval = ctx.evaluator(p);
    let mut rows = Vec::with_capacity(cfg.samples);
    for k in 0..cfg.samples {
        let i = k * stride;
        let dist = eval.phase_distribution(&traj.states()[i]).map_err(|e| classify(e, p))?;
        rows.push((traj.times()[i], dist));
    }
    let path = ctx.with_file("evolution.csv", |w| {
        writeln!(w, "t,phi,s")?;
        for (t, dist) in &rows {
            for (phi, s) in dist.phi_nodes().iter().zip(dist.values()) {
                writeln!(w, "{},{},{}", fmt_f64(*t), fmt_f64(*phi), fmt_f64(*s))?;
            }
        }
        Ok(())
    })?;
    Ok(vec![path])
}

fn sweep_failures(result: &SweepResult) -> Result<(), Failure> {
    let failed: Vec<String> = result
        .failures()
        .map(|r| {
            format!(
                "(delta={}, epsilon={}) [gamma_min units]: {}",
                r.delta,
                r.epsilon,
                r.error.as_deref().unwrap_or("unknown")
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Solver(format!("{} sweep point(s) failed: {}", failed.len(), failed.join("; "))))
    }
}

pub fn arnold(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let base = ctx.params.with_delta(0.0).with_epsilon(0.0);
    let spec = SweepSpec {
        deltas: ctx.config.arnold.deltas.clone(),
        epsilons: ctx.config.arnold.epsilons.clone(),
        base,
        grid: ctx.config.grid,
        backend: ctx.backend(),
    };
    let result = arnold_sweep(&spec).map_err(|e| classify(e, &base))?;
    let files = vec![
        ctx.with_file("arnold.csv", |w| result.write_csv(w))?,
        ctx.json("arnold.params.json", &result.sidecar())?,
    ];
    sweep_failures(&result)?;
    Ok(files)
}

pub fn breakdown(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let base = ctx.params.with_epsilon(0.0);
    let result = breakdown_scan(&base, &ctx.config.breakdown.epsilons, ctx.config.grid, ctx.backend())
        .map_err(|e| classify(e, &base))?;
    let files = vec![
        ctx.with_file("breakdown.csv", |w| result.write_csv(w))?,
        ctx.json("breakdown.params.json", &result.sidecar())?,
        ctx.with_file("breakdown_band.csv", |w| result.write_band_csv(w))?,
    ];
    sweep_failures(&result)?;
    Ok(files)
}

pub fn nogo(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let p = &ctx.params;
    let axis = ctx.config.nogo_axis().map_err(Failure::Config)?;
    let report =
        qubit_nogo_report(&axis, ctx.config.nogo.n_lambda, p.gamma_g, p.gamma_d).map_err(|e| classify(e, p))?;
    Ok(vec![ctx.json("nogo.json", &report)?])
}

pub fn compare_spins(ctx: &Context) -> Result<Vec<PathBuf>, Failure> {
    let p = &ctx.params;
    let spins = ctx.config.spins().map_err(Failure::Config)?;
    let rows = spin_comparison(&spins, p, ctx.config.grid, ctx.backend()).map_err(|e| classify(e, p))?;
    Ok(vec![ctx.with_file("compare_spins.csv", |w| write_spin_comparison_csv(&rows, w))?])
}
