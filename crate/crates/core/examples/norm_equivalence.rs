//! Checks `C₁‖u‖_{λ,0} ≤ ‖u‖_λ ≤ ‖u‖_{λ,0}` on seeded random fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steepwell::sampling::random_smooth_field;
use steepwell::{mu_l0, mu_l_lambda, DerivedConstants, EigenOptions, ProblemSpec, RadialGrid};

fn main() -> steepwell::Result<()> {
    let opts = EigenOptions::default();
    let ball = RadialGrid::new(5, 1.0, 1024)?;
    let grid = RadialGrid::new(5, 4.0, 2048)?;
    let base = ProblemSpec::with_defaults(1e2);
    let mu0 = mu_l0(&ball, base.delta, opts)?;
    let constants = DerivedConstants::new(&base, mu0, None);
    println!("mu(L0) = {mu0:.6}  C1 = {:.6}", constants.c1);

    for lambda in [1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5] {
        let spec = base.with_lambda(lambda);
        let mu = mu_l_lambda(&grid, &spec, opts)?.value;
        if mu <= mu0 / 2.0 {
            println!("lambda = {lambda:8.0e}  mu(L_lambda) = {mu:9.4}  skipped");
            continue;
        }
        let functional = spec.functional(&grid)?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..500 {
            let u = random_smooth_field(&grid, &mut rng, 32);
            let ratio = functional.norm(&u)? / functional.positive_part_norm(&u)?;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        println!("lambda = {lambda:8.0e}  mu(L_lambda) = {mu:9.4}  ratio in [{lo:.6}, {hi:.6}]");
    }
    Ok(())
}
