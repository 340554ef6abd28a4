use crate::common;

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steepwell::bubble::{
    bubble_energy_bound, bubble_normalization, l2_mass_scaling_fit, log_grid, sobolev_constant,
    BubbleSpec, QuadratureOptions,
};
use steepwell::experiments::{
    nehari_comparison_check, render, run_sweep, OutputFormat, SweepConfig, SweepOutcome,
};
use steepwell::radial::{inner_l2, lp_norm};
use steepwell::sampling::{random_nodal_field, random_smooth_field};
use steepwell::{
    brute_force_oracle, critical_exponent, mu_l_lambda, mu_zero, solve_ground_state,
    DerivedConstants, EigenOptions, EnergyFunctional, GroundStateResult, RadialField, RadialGrid,
    SolveOptions,
};

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: String, started: Instant) {
        let status = if pass { "PASS" } else { "FAIL" };
        let line = format!(
            "criterion {id:2}: {status}  {detail}  ({:.1?})\n",
            started.elapsed()
        );
        let _ = std::io::stderr().write_all(line.as_bytes());
        if !pass {
            self.failed.push(id);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `(|Q − ‖u‖_p^p| / Q, |Q − 2pc/(p−2)| / Q)`.
fn identity_defects(functional: &EnergyFunctional, r: &GroundStateResult) -> (f64, f64) {
    let q = functional.quadratic_value(&r.field).unwrap();
    let p = functional.p();
    let lp = lp_norm(functional.grid(), &r.field, p).unwrap().powf(p);
    (
        (q - lp).abs() / q,
        (q - 2.0 * p * r.energy / (p - 2.0)).abs() / q,
    )
}

fn sweep_identities(cfg: &SweepConfig, outcome: &SweepOutcome) -> (usize, f64) {
    let ball = cfg.ball_grid().unwrap();
    let grid = cfg.whole_grid().unwrap();
    let mut solves = vec![(
        EnergyFunctional::limit(&ball, cfg.delta, cfg.p).unwrap(),
        &outcome.limit,
    )];
    for (rec, r) in outcome.records.iter().zip(&outcome.fields) {
        solves.push((cfg.problem(rec.lambda).functional(&grid).unwrap(), r));
    }
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (f, r) in solves.iter().filter(|(_, r)| r.converged) {
        let (a, b) = identity_defects(f, r);
        worst = worst.max(a).max(b);
        checked += 1;
    }
    (checked, worst)
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    let _ = std::io::stderr().write_all(b"\n");
    let eig = EigenOptions::default();
    let cfg = SweepConfig::default();
    let grid = cfg.whole_grid().unwrap();

    // 1
    let t = Instant::now();
    let exact = common::navier_mu0_dim5();
    let meshes = [256usize, 512, 1024];
    let values: Vec<f64> = meshes
        .iter()
        .map(|&m| {
            mu_zero(&RadialGrid::new(5, 1.0, m).unwrap(), eig)
                .unwrap()
                .value
        })
        .collect();
    let errors: Vec<(f64, f64)> = meshes
        .iter()
        .zip(&values)
        .map(|(&m, v)| (1.0 / (m + 1) as f64, (v - exact).abs()))
        .collect();
    let order = common::log_log_slope(&errors);
    let mu0 = values[2];
    let err1024 = rel(mu0, exact);
    report.record(
        1,
        err1024 < 5e-3 && (1.7..=2.3).contains(&order),
        format!("mu0(1024) = {mu0:.10}, oracle x1^4 = {exact:.10}, rel err {err1024:.2e} (< 5e-3), order {order:.3} (in [1.7, 2.3])"),
        t,
    );
    let mu_l0 = mu0 - cfg.delta;

    // 2
    let t = Instant::now();
    let mus: Vec<f64> = cfg
        .lambdas
        .iter()
        .map(|&l| mu_l_lambda(&grid, &cfg.problem(l), eig).unwrap().value)
        .collect();
    let nondecreasing = mus.windows(2).all(|w| w[1] >= w[0]);
    let gap2 = rel(*mus.last().unwrap(), mu_l0);
    report.record(
        2,
        nondecreasing && gap2 <= 1e-2,
        format!(
            "mu(L_lambda) = {:?}, nondecreasing {nondecreasing}, |mu(L_1e5) - mu(L0)| / mu(L0) = {gap2:.4} (<= 0.01), mu(L0) = {mu_l0:.4}",
            mus.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>()
        ),
        t,
    );

    // 3
    let t = Instant::now();
    let c1 = DerivedConstants::new(&cfg.problem(1.0), mu_l0, None).c1;
    let mut violations = 0;
    let mut checked_lambdas = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (&lambda, &mu) in cfg.lambdas.iter().zip(&mus) {
        if mu <= mu_l0 / 2.0 {
            continue;
        }
        checked_lambdas.push(lambda);
        let f = cfg.problem(lambda).functional(&grid).unwrap();
        for k in 0..500u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            let u = if k % 2 == 0 {
                random_smooth_field(&grid, &mut rng, 48)
            } else {
                random_nodal_field(&grid, &mut rng)
            };
            let n = f.norm(&u).unwrap();
            let n0 = f.positive_part_norm(&u).unwrap();
            lo = lo.min(n / n0);
            hi = hi.max(n / n0);
            if n > n0 * (1.0 + 1e-12) || c1 * n0 > n * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    report.record(
        3,
        violations == 0 && !checked_lambdas.is_empty(),
        format!("C1 = {c1:.6}, lambdas {checked_lambdas:?}, 500 fields each, ratio in [{lo:.6}, {hi:.6}], violations {violations}"),
        t,
    );

    // 4
    let t = Instant::now();
    let f = cfg.problem(1e3).functional(&grid).unwrap();
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
        let u = random_smooth_field(&grid, &mut rng, 32);
        let v = random_smooth_field(&grid, &mut rng, 32);
        let g = f.gradient(&u).unwrap();
        let analytic = inner_l2(&grid, &g, &v).unwrap();
        let energy = |x: &[f64]| {
            f.energy(&RadialField::new(Arc::clone(&grid), x.to_vec()).unwrap())
                .unwrap()
        };
        let fd = common::central_difference(energy, u.values(), v.values(), 1e-5);
        worst = worst.max((analytic - fd).abs() / analytic.abs());
    }
    report.record(
        4,
        worst < 1e-6,
        format!("50 fields, worst relative error {worst:.2e} (< 1e-6)"),
        t,
    );

    // 7 runs the default sweep, used by 5, 8 and 12 as well.
    let t7 = Instant::now();
    let outcome = run_sweep(&cfg).unwrap();
    let sweep_time = t7.elapsed();

    // 5
    let t = Instant::now();
    let (checked, worst5) = sweep_identities(&cfg, &outcome);
    let small = SweepConfig {
        r_max: 4.0,
        mesh: 32,
        ..SweepConfig::default()
    };
    let small_grid = small.whole_grid().unwrap();
    let small_f = small.problem(1e3).functional(&small_grid).unwrap();
    let small_r = solve_ground_state(
        &small_grid,
        &small.problem(1e3),
        None,
        SolveOptions::default(),
    )
    .unwrap();
    let (a, b) = identity_defects(&small_f, &small_r);
    let worst5 = worst5.max(a).max(b);
    report.record(
        5,
        worst5 <= 1e-10 && checked == outcome.records.len() + 1 && small_r.converged,
        format!(
            "{} converged solves, worst relative defect {worst5:.2e} (<= 1e-10)",
            checked + 1
        ),
        t,
    );

    // 6
    let t = Instant::now();
    let oracle = brute_force_oracle(&small_f, 200, 0).unwrap();
    let gap6 = rel(small_r.energy, oracle);
    report.record(
        6,
        gap6 <= 1e-6,
        format!(
            "m = 32: solver {:?}, 200-start oracle {oracle:?}, rel diff {gap6:.2e} (<= 1e-6)",
            small_r.energy
        ),
        t,
    );

    // 7
    let c_omega = outcome.limit.energy;
    let cs: Vec<f64> = outcome.records.iter().map(|r| r.c_lambda).collect();
    let last = outcome.records.last().unwrap();
    let increasing = strictly_increasing(&cs);
    let below = cs.iter().filter(|&&c| c > c_omega).count();
    let gap7 = (c_omega - last.c_lambda) / c_omega;
    let pass7 = outcome.all_converged()
        && increasing
        && below == 0
        && gap7.abs() < 2e-2
        && gap7 >= 0.0
        && last.tail_mass < 1e-2;
    report.record(
        7,
        pass7,
        format!(
            "c(Omega) = {c_omega:.6e}, strictly increasing {increasing}, rows above c(Omega) {below}, gap at 1e5 {gap7:+.4} (in [0, 0.02)), tail {:.2e} (< 1e-2), all converged {} (sweep {:.1?})",
            last.tail_mass,
            outcome.all_converged(),
            sweep_time
        ),
        t7,
    );

    // 8
    let t = Instant::now();
    let mut pass8 = true;
    let mut worst_t = 0.0f64;
    for (pair, fields) in outcome.records.windows(2).zip(outcome.fields.windows(2)) {
        let cmp = nehari_comparison_check(
            &fields[1],
            &cfg.problem(pair[0].lambda),
            &cfg.problem(pair[1].lambda),
        )
        .unwrap();
        worst_t = worst_t.max(cmp.t);
        pass8 &= cmp.t < 1.0 && cmp.energy < pair[1].c_lambda;
    }
    report.record(
        8,
        pass8,
        format!(
            "{} adjacent pairs, max t {worst_t:.6} (< 1), J_mu(t u) < c_lambda",
            cs.len() - 1
        ),
        t,
    );

    // 9
    let t = Instant::now();
    let q = QuadratureOptions::default();
    let eps = log_grid(1e-6, 1e-1, 8);
    let with_delta = bubble_energy_bound(8, 50.0, &eps, BubbleSpec::DEFAULT_CUTOFF, q).unwrap();
    let without = bubble_energy_bound(8, 0.0, &eps, BubbleSpec::DEFAULT_CUTOFF, q).unwrap();
    let c_n = bubble_normalization(8);
    let s = sobolev_constant(8, c_n, q).unwrap();
    let eps_spread = s
        .by_epsilon
        .iter()
        .map(|v| rel(*v, s.value))
        .fold(0.0, f64::max);
    let cn_values: Vec<f64> = [1.0, 0.5, 2.0, 8.0]
        .iter()
        .map(|&c| sobolev_constant(8, c, q).unwrap().value)
        .collect();
    let cn_exact = cn_values.iter().all(|v| *v == cn_values[0]);
    let cn_spread = cn_values
        .iter()
        .chain([&s.value])
        .map(|v| rel(*v, s.value))
        .fold(0.0, f64::max);
    let quad_tol = 1e-10 * with_delta.threshold;
    let pass9 = with_delta.margin > 0.0
        && with_delta.relative_margin >= 1e-3
        && without.margin <= quad_tol
        && eps_spread <= 1e-8
        && cn_exact
        && cn_spread <= 4.0 * f64::EPSILON;
    report.record(
        9,
        pass9,
        format!(
            "delta 50: margin {:.3e}, relative {:.3e} (>= 1e-3); delta 0: margin {:.3e} (<= {quad_tol:.1e}); S = {:.12}, oracle {:.12}, eps spread {eps_spread:.1e}, c_N spread {cn_spread:.1e} (power-of-two c_N bitwise equal {cn_exact})",
            with_delta.margin,
            with_delta.relative_margin,
            without.margin,
            s.value,
            common::sobolev_closed_form(8)
        ),
        t,
    );

    // 10
    let t = Instant::now();
    let fit_eps = log_grid(1e-4, 1e-2, 10);
    let e9 = l2_mass_scaling_fit(9, &fit_eps, q).unwrap().exponent;
    let e8 = l2_mass_scaling_fit(8, &fit_eps, q).unwrap().exponent;
    report.record(
        10,
        (e9 - 4.0).abs() <= 0.15 && (e8 - 4.0).abs() <= 0.15,
        format!("N = 9 exponent {e9:.4}, N = 8 exponent after |ln eps| {e8:.4} (4 +- 0.15)"),
        t,
    );

    // 11
    let t = Instant::now();
    let crit = SweepConfig {
        dim: 8,
        p: critical_exponent(8),
        lambdas: vec![1e3, 1e4, 1e5],
        ..SweepConfig::default()
    };
    let out11 = run_sweep(&crit).unwrap();
    let (checked11, worst11) = sweep_identities(&crit, &out11);
    let cs11: Vec<f64> = out11.records.iter().map(|r| r.c_lambda).collect();
    let c_omega11 = out11.limit.energy;
    let threshold = s.threshold(8);
    let inc11 = strictly_increasing(&cs11);
    let below11 = cs11.iter().all(|&c| c <= c_omega11);
    let last11 = out11.records.last().unwrap();
    let gap11 = (c_omega11 - last11.c_lambda) / c_omega11;
    let pass11 = out11.all_converged()
        && checked11 == 4
        && worst11 <= 1e-10
        && inc11
        && below11
        && (0.0..2e-2).contains(&gap11)
        && last11.tail_mass < 1e-2
        && c_omega11 < threshold;
    report.record(
        11,
        pass11,
        format!(
            "c_lambda = {cs11:?}, c(Omega) = {c_omega11:?} < (2/N) S^(N/4) = {threshold:.6}; identities {worst11:.1e}, strictly increasing {inc11}, <= c(Omega) {below11}, gap {gap11:.2e}, tail {:.2e}",
            last11.tail_mass
        ),
        t,
    );

    // 12
    let t = Instant::now();
    let reference = render(&outcome.records, OutputFormat::Csv).unwrap();
    let mut identical = true;
    for parallel in [false, true, false] {
        let again = run_sweep(&SweepConfig {
            parallel,
            ..cfg.clone()
        })
        .unwrap();
        identical &= render(&again.records, OutputFormat::Csv)
            .unwrap()
            .as_bytes()
            == reference.as_bytes();
    }
    report.record(
        12,
        identical,
        format!(
            "3 reruns (serial, parallel, serial) byte-identical to the parallel run: {identical}"
        ),
        t,
    );

    assert!(
        report.failed.is_empty(),
        "failed criteria: {:?}",
        report.failed
    );
}
