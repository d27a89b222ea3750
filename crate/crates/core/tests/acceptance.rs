//! Acceptance gate. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p spinsync --test acceptance -- --nocapture` to see them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinsync::dynamics::{default_steps, evolve, DEFAULT_DT_FACTOR};
use spinsync::experiments::{
    first_order_consistency, locking_point, qubit_nogo_report, steady_mean_sz, arnold_sweep, SweepSpec,
    LOCKING_THRESHOLD,
};
use spinsync::husimi::HusimiEvaluator;
use spinsync::linalg::{c, CMatrix};
use spinsync::{
    build_liouvillian, coherent_overlap, coherent_state, husimi_q, limit_cycle_validity, DensityMatrix,
    LimitCycleVerdict, Spin, SpinAlgebra, SphereDirection, SphereGrid, SteadyStateBackend, SystemParams,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn params(spin: Spin, delta: f64, eps: f64, gg: f64, gd: f64) -> SystemParams {
    SystemParams::new(spin, delta, eps, gg, gd).expect("valid parameters")
}

fn locking(p: &SystemParams, grid: &SphereGrid) -> (f64, f64) {
    let eval = HusimiEvaluator::new(&SpinAlgebra::new(p.spin), grid);
    let lp = locking_point(p, &eval, SteadyStateBackend::Eigen).expect("steady state");
    (lp.phi_star, lp.s_max)
}

fn limit_cycle_q() -> Outcome {
    let alg = SpinAlgebra::new(Spin::ONE);
    let grid = SphereGrid::default();
    let rho = DensityMatrix::dicke(&alg, 0.0).unwrap();
    let q = husimi_q(&rho, &alg, &grid).map_err(|e| e.to_string())?;
    let mut dev: f64 = 0.0;
    for (i, t) in grid.theta_nodes().iter().enumerate() {
        for j in 0..grid.n_phi() {
            dev = dev.max((q.values()[(i, j)] - 3.0 * t.sin().powi(2) / (8.0 * PI)).abs());
        }
    }
    check(dev < 1e-12, format!("max |Q - 3 sin^2(theta)/(8 pi)| = {dev:.3e} (< 1e-12)"))
}

fn spin_one_locking() -> Outcome {
    let (phi_star, s_max) = locking(&params(Spin::ONE, 0.0, 0.01, 0.1, 1.0), &SphereGrid::default());
    check(
        (s_max - 0.032).abs() <= 0.003 && phi_star == 0.0,
        format!("max S = {s_max:.6} (0.032 +/- 0.003), phi* = {phi_star}"),
    )
}

fn spin_two_locking() -> Outcome {
    let (phi_star, s_max) = locking(&params(Spin::TWO, 0.0, 0.01, 0.1, 1.0), &SphereGrid::default());
    check(
        (s_max - 0.001).abs() <= 0.0005,
        format!("max S = {s_max:.6} (0.001 +/- 0.0005), phi* = {phi_star}"),
    )
}

fn anti_phase_locking() -> Outcome {
    let grid = SphereGrid::default();
    let (phi_anti, s_anti) = locking(&params(Spin::ONE, 0.0, 0.1, 10.0, 1.0), &grid);
    let (_, s_in) = locking(&params(Spin::ONE, 0.0, 0.01, 0.1, 1.0), &grid);
    check(
        (phi_anti - PI).abs() <= grid.phi_step() && (s_anti - s_in).abs() < 1e-8,
        format!(
            "phi* = {phi_anti:.6} (pi within {:.4}), |s_max(10) - s_max(0.1)| = {:.2e} (< 1e-8)",
            grid.phi_step(),
            (s_anti - s_in).abs()
        ),
    )
}

fn balanced_no_locking() -> Outcome {
    let grid = SphereGrid::default();
    let (_, balanced) = locking(&params(Spin::ONE, 0.0, 0.01, 1.0, 1.0), &grid);
    let (_, unbalanced) = locking(&params(Spin::ONE, 0.0, 0.01, 0.1, 1.0), &grid);
    check(
        balanced < 0.05 * unbalanced,
        format!("balanced max S = {balanced:.3e} < 0.05 x {unbalanced:.4e}"),
    )
}

fn first_order_oracle() -> Outcome {
    let run = |eps: f64| {
        first_order_consistency(&params(Spin::ONE, 0.0, eps, 0.1, 1.0), 60.0, 3000)
            .map(|r| r.relative_deviation)
            .map_err(|e| e.to_string())
    };
    let full = run(0.001)?;
    let half = run(0.0005)?;
    let ratio = full / half;
    check(
        full <= 0.05 && (1.8..=2.2).contains(&ratio),
        format!("deviation {full:.3e} (<= 0.05) at eps=0.001, {half:.3e} at eps/2, ratio {ratio:.3} (2 +/- 0.2)"),
    )
}

fn completeness() -> Outcome {
    let grid = SphereGrid::default();
    let mut worst: f64 = 0.0;
    for spin in [Spin::HALF, Spin::ONE, Spin::TWO] {
        let alg = SpinAlgebra::new(spin);
        let d = alg.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (&t, &w) in grid.theta_nodes().iter().zip(grid.theta_weights()) {
            for &p in grid.phi_nodes() {
                let psi = coherent_state(&alg, &SphereDirection::new(t, p).unwrap());
                acc += psi.projector() * c(w * grid.phi_step());
            }
        }
        let target = alg.identity() * c(4.0 * PI / d as f64);
        let err = (acc - target).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        worst = worst.max(err);
    }
    check(worst < 1e-10, format!("max-entry error {worst:.3e} over S in {{1/2, 1, 2}} (< 1e-10)"))
}

fn overlap_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for spin in [Spin::HALF, Spin::ONE, Spin::TWO] {
        let alg = SpinAlgebra::new(spin);
        for _ in 0..100 {
            let mut dir = || {
                let u: f64 = rng.random_range(-1.0..1.0);
                SphereDirection::new(u.acos(), rng.random_range(0.0..2.0 * PI)).unwrap()
            };
            let (a, b) = (dir(), dir());
            let expected = ((1.0 + a.dot(&b)) / 2.0).powi(spin.twice() as i32);
            worst = worst.max((coherent_overlap(&alg, &a, &b).norm_sqr() - expected).abs());
        }
    }
    check(worst < 1e-12, format!("max |overlap^2 - law| = {worst:.3e} over 300 pairs (< 1e-12)"))
}

fn physicality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut trace_dev, mut herm, mut min_ev, mut residual) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for run in 0..10 {
        let p = params(
            Spin::from_twice(rng.random_range(1..=4)).unwrap(),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.05..2.0),
            rng.random_range(0.05..2.0),
        );
        // alternate mixed starts with pure coherent states on the boundary of the state space
        let rho0 = if run % 2 == 0 {
            DensityMatrix::random(p.spin.dim(), &mut rng)
        } else {
            let dir = SphereDirection::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)).unwrap();
            DensityMatrix::pure(&coherent_state(&SpinAlgebra::new(p.spin), &dir))
        };
        let t = 5.0;
        let traj = evolve(&p, &rho0, t, default_steps(&p, t, DEFAULT_DT_FACTOR)).map_err(|e| e.to_string())?;
        for s in traj.states() {
            trace_dev = trace_dev.max((s.trace() - c(1.0)).norm());
            herm = herm.max(s.hermiticity_defect());
            min_ev = min_ev.min(s.min_eigenvalue());
        }
        let l = build_liouvillian(&p).unwrap();
        let ss = l.steady_state(SteadyStateBackend::Eigen).map_err(|e| e.to_string())?;
        let out = l.apply(ss.matrix()).unwrap();
        residual = residual.max(out.norm());
    }
    check(
        trace_dev < 1e-9 && herm < 1e-10 && min_ev > -1e-9 && residual < 1e-10,
        format!(
            "|tr-1| {trace_dev:.2e}, hermiticity {herm:.2e}, min eig {min_ev:.2e}, steady residual {residual:.2e}"
        ),
    )
}

fn qubit_no_go() -> Outcome {
    let verdict = |spin| limit_cycle_validity(&params(spin, 0.0, 0.0, 0.1, 1.0)).map_err(|e| e.to_string());
    let (half, one, two) = (verdict(Spin::HALF)?, verdict(Spin::ONE)?, verdict(Spin::TWO)?);
    let report = qubit_nogo_report(&SphereDirection::new(1.1, 2.3).unwrap(), 21, 0.1, 1.0).map_err(|e| e.to_string())?;
    check(
        half == LimitCycleVerdict::ExtremalOnly
            && one == LimitCycleVerdict::Valid
            && two == LimitCycleVerdict::Valid
            && report.verdict == LimitCycleVerdict::ExtremalOnly
            && report.max_colinearity_error < 1e-12,
        format!(
            "S=1/2 {half:?}, S=1 {one:?}, S=2 {two:?}; tilted-axis colinearity {:.1e}",
            report.max_colinearity_error
        ),
    )
}

fn tongue_properties() -> Outcome {
    let spec = SweepSpec::default_tongue(params(Spin::ONE, 0.0, 0.0, 0.1, 1.0));
    let result = arnold_sweep(&spec).map_err(|e| e.to_string())?;
    if let Some(f) = result.failures().next() {
        return Err(format!("point ({}, {}) failed: {:?}", f.delta, f.epsilon, f.error));
    }
    let s = |d: f64, e: f64| result.row(d, e).expect("grid point").s_max;
    let (nd, ne) = (spec.deltas.len(), spec.epsilons.len());
    let mut asym: f64 = 0.0;
    let mut monotone_delta = true;
    let mut monotone_eps = true;
    for &e in &spec.epsilons {
        for i in 0..nd {
            asym = asym.max((s(spec.deltas[i], e) - s(spec.deltas[nd - 1 - i], e)).abs());
        }
        // deltas are symmetric about 0: walk outward from the centre
        for i in nd / 2..nd - 1 {
            monotone_delta &= s(spec.deltas[i + 1], e) <= s(spec.deltas[i], e) + 1e-12;
        }
    }
    for &d in &spec.deltas {
        for k in 0..ne - 1 {
            monotone_eps &= s(d, spec.epsilons[k + 1]) > s(d, spec.epsilons[k]);
        }
    }
    let widths = result.tongue_widths(LOCKING_THRESHOLD);
    let widening = widths.windows(2).all(|w| w[1].1 >= w[0].1);
    check(
        nd == 21 && ne == 10 && asym < 1e-8 && monotone_delta && monotone_eps && widening,
        format!(
            "{nd}x{ne} grid, |s(D)-s(-D)| max {asym:.2e}, non-increasing in |D|: {monotone_delta}, increasing in eps: {monotone_eps}, widths {:?}",
            widths.iter().map(|w| w.1).collect::<Vec<_>>()
        ),
    )
}

fn breakdown() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    let mut strong_signs = Vec::new();
    for gg in [0.1, 10.0] {
        let p = params(Spin::ONE, 0.0, 0.0, gg, 1.0);
        let gmin = p.gamma_min();
        let sz = |eps: f64| steady_mean_sz(&p.with_epsilon(eps * gmin), SteadyStateBackend::Eigen).map_err(|e| e.to_string());
        let (strong, weak) = (sz(1.0)?, sz(0.01)?);
        ok &= strong.abs() > 10.0 * weak.abs();
        strong_signs.push(strong.signum());
        detail.push(format!("g/d={gg}: <Sz>({:.0e})={strong:.4e}, <Sz>(0.01 gmin)={weak:.3e}", gmin));
    }
    ok &= strong_signs[0] * strong_signs[1] < 0.0;
    check(ok, detail.join("; "))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<Criterion> = vec![
        ("limit-cycle Q function", limit_cycle_q),
        ("spin-1 locking value", spin_one_locking),
        ("spin-2 comparison", spin_two_locking),
        ("anti-phase locking", anti_phase_locking),
        ("balanced no-locking", balanced_no_locking),
        ("first-order oracle", first_order_oracle),
        ("completeness relation", completeness),
        ("overlap law", overlap_law),
        ("physicality suite", physicality),
        ("qubit no-go", qubit_no_go),
        ("tongue properties", tongue_properties),
        ("breakdown", breakdown),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
