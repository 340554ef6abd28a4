//! Principal eigenvalues: `μ₀` on the unit ball with mesh refinement, then
//! `μ(L_λ)` on the truncated whole space along a λ sweep.

use steepwell::spectral::exterior_mass_fraction;
use steepwell::{
    ess_spectrum_lower_bound, mu_l_lambda, mu_zero, EigenOptions, ProblemSpec, RadialGrid,
};

fn main() -> steepwell::Result<()> {
    let opts = EigenOptions::default();
    let mut mu0 = 0.0;
    for m in [256, 512, 1024] {
        let ball = RadialGrid::new(5, 1.0, m)?;
        let e = mu_zero(&ball, opts)?;
        println!(
            "m = {m:5}  mu0 = {:.10}  residual = {:.2e}  iterations = {}",
            e.value, e.residual, e.iterations
        );
        mu0 = e.value;
    }
    let delta = 50.0;
    println!("mu(L0) = {:.6}", mu0 - delta);

    let grid = RadialGrid::new(5, 4.0, 2048)?;
    for lambda in [1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5] {
        let spec = ProblemSpec::with_defaults(lambda);
        let e = mu_l_lambda(&grid, &spec, opts)?;
        println!(
            "lambda = {lambda:8.0e}  mu(L_lambda) = {:12.6}  ess bound = {:10.1}  exterior mass = {:.3e}  residual = {:.2e}  iterations = {}",
            e.value,
            ess_spectrum_lower_bound(&spec),
            exterior_mass_fraction(&e.field, 1.0),
            e.residual,
            e.iterations
        );
    }
    Ok(())
}
