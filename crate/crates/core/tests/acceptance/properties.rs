use crate::common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steepwell::radial::{apply_laplacian, inner_l2, lp_norm};
use steepwell::sampling::{random_nodal_field, random_smooth_field};
use steepwell::{
    estimate_embedding_constant, mu_l0, mu_l_lambda, solve_ground_state, DerivedConstants,
    EigenOptions, EnergyFunctional, ProblemSpec, RadialField, RadialGrid, SolveOptions,
};

fn grid() -> Arc<RadialGrid> {
    RadialGrid::new(5, 4.0, 384).unwrap()
}

fn field(seed: u64, smooth: bool) -> RadialField {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if smooth {
        random_smooth_field(&g, &mut rng, 24)
    } else {
        random_nodal_field(&g, &mut rng)
    }
}

fn functional(lambda: f64) -> EnergyFunctional {
    ProblemSpec::with_defaults(lambda)
        .functional(&grid())
        .unwrap()
}

fn c1() -> f64 {
    static C1: OnceLock<f64> = OnceLock::new();
    *C1.get_or_init(|| {
        let ball = RadialGrid::new(5, 1.0, 512).unwrap();
        let mu = mu_l0(&ball, 50.0, EigenOptions::default()).unwrap();
        DerivedConstants::new(&ProblemSpec::with_defaults(1e4), mu, None).c1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_matches_central_difference(seed in any::<u64>(), lambda in 5e2f64..1e5) {
        let f = functional(lambda);
        let u = field(seed, true);
        let v = field(seed ^ 0x5eed, true);
        let g = f.gradient(&u).unwrap();
        let analytic = inner_l2(f.grid(), &g, &v).unwrap();
        let energy = |x: &[f64]| f.energy(&RadialField::new(Arc::clone(f.grid()), x.to_vec()).unwrap()).unwrap();
        let fd = common::central_difference(energy, u.values(), v.values(), 1e-5);
        prop_assert!((analytic - fd).abs() <= 1e-6 * analytic.abs().max(1.0), "{analytic} vs {fd}");
    }

    #[test]
    fn norm_ordering(seed in any::<u64>(), smooth in any::<bool>(), lambda in 1e4f64..1e6) {
        let f = functional(lambda);
        let u = field(seed, smooth);
        let n = f.norm(&u).unwrap();
        let n0 = f.positive_part_norm(&u).unwrap();
        prop_assert!(n <= n0 * (1.0 + 1e-12));
        prop_assert!(c1() * n0 <= n * (1.0 + 1e-12));
    }

    #[test]
    fn nehari_projection(seed in any::<u64>(), smooth in any::<bool>()) {
        let f = functional(1e3);
        let u = field(seed, smooth);
        let t = f.nehari_scale(&u).unwrap();
        let tu = u.scaled(t);
        let q = f.quadratic_value(&tu).unwrap();
        let lp = lp_norm(f.grid(), &tu, f.p()).unwrap().powf(f.p());
        prop_assert!((q - lp).abs() <= 1e-12 * q);
        let j = f.energy(&tu).unwrap();
        prop_assert!((j - (0.5 - 1.0 / f.p()) * q).abs() <= 1e-12 * q);
        let ts = f.nehari_scale(&tu).unwrap();
        prop_assert!((ts - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneity(seed in any::<u64>(), c in -50f64..50.0, p in 2.0f64..10.0) {
        let g = grid();
        let u = field(seed, false);
        let a = lp_norm(&g, &u.scaled(c), p).unwrap();
        let b = c.abs() * lp_norm(&g, &u, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE));
        let l2 = lp_norm(&g, &u, 2.0).unwrap();
        let ip = inner_l2(&g, &u, &u).unwrap();
        prop_assert!((l2 * l2 - ip).abs() <= 1e-12 * ip);
        let q = functional(1e3);
        let s = q.sobolev_quotient(&u).unwrap();
        prop_assert!((q.sobolev_quotient(&u.scaled(c.abs() + 0.5)).unwrap() - s).abs() <= 1e-12 * s.abs());
    }

    #[test]
    fn green_identity(seed in any::<u64>()) {
        let g = grid();
        let u = field(seed, false);
        let v = field(seed.wrapping_add(1), false);
        let lu = apply_laplacian(&g, &u).unwrap();
        let lv = apply_laplacian(&g, &v).unwrap();
        let a = inner_l2(&g, &lu, &v).unwrap();
        let b = inner_l2(&g, &u, &lv).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (a.abs() + b.abs()).max(1.0));
        prop_assert!(inner_l2(&g, &lu, &u).unwrap() <= 0.0);
    }
}

#[test]
fn laplacian_exact_on_quadratics() {
    let g = grid();
    let u = RadialField::from_fn(Arc::clone(&g), |r| r * r).unwrap();
    let lu = apply_laplacian(&g, &u).unwrap();
    for v in &lu.values()[..g.len() - 1] {
        assert!((v - 10.0).abs() < 1e-9, "{v}");
    }
}

#[test]
fn weighted_sum_is_ball_volume() {
    let m = 1024;
    let g = RadialGrid::new(5, 1.0, m).unwrap();
    let total: f64 = g.weights().iter().sum();
    let exact = steepwell::radial::ball_volume(5, 1.0);
    assert!(
        (total - exact).abs() / exact < 5.0 * g.spacing(),
        "{total} vs {exact}"
    );
    let half = steepwell::radial::ball_volume(5, 1.0 - 0.5 * g.spacing());
    assert!((total - half).abs() / half < 10.0 * g.spacing().powi(2));
}

#[test]
fn eigenvalue_grows_with_lambda() {
    let g = RadialGrid::new(5, 4.0, 512).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for lambda in [1e2, 1e3, 1e4, 1e5] {
        let mu = mu_l_lambda(
            &g,
            &ProblemSpec::with_defaults(lambda),
            EigenOptions::default(),
        )
        .unwrap()
        .value;
        assert!(mu > prev);
        prev = mu;
    }
}

#[test]
fn sampled_sigma_bounds_ground_energy() {
    let g = RadialGrid::new(5, 4.0, 512).unwrap();
    for lambda in [1e3, 1e4] {
        let spec = ProblemSpec::with_defaults(lambda);
        let f = spec.functional(&g).unwrap();
        let gs = solve_ground_state(&g, &spec, None, SolveOptions::default()).unwrap();
        let eig = mu_l_lambda(&g, &spec, EigenOptions::default()).unwrap();
        let est = estimate_embedding_constant(&f, 200, &[gs.field.clone(), eig.field], 3).unwrap();
        let p = spec.p;
        assert!(est.sigma_hat > 0.0 && gs.energy > 0.0);
        assert!((p - 2.0) / (2.0 * p) * est.sigma_hat <= gs.energy * (1.0 + 1e-12));
        let reported = DerivedConstants::new(&spec, 357.66, Some(&est))
            .sigma
            .unwrap();
        assert_eq!(reported, est.sigma_hat);
    }
}

#[test]
fn sweep_tails_and_gaps_shrink() {
    let cfg = steepwell::experiments::SweepConfig {
        mesh: 512,
        ball_mesh: 256,
        ..Default::default()
    };
    let out = steepwell::experiments::run_sweep(&cfg).unwrap();
    assert!(out.all_converged());
    for w in out.records.windows(2) {
        assert!(w[1].p_tail_mass < w[0].p_tail_mass);
        assert!(w[1].energy_gap <= w[0].energy_gap);
        assert!(w[1].l2_dist_to_limit < w[0].l2_dist_to_limit);
    }
}
