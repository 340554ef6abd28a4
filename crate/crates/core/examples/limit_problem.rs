//! Limit problem on the unit ball under mesh refinement, subcritical and critical.

use steepwell::{
    critical_exponent, solve_limit_problem, EnergyFunctional, RadialGrid, SolveOptions,
};

fn main() -> steepwell::Result<()> {
    let opts = SolveOptions::default();
    for (dim, p) in [(5, 3.0), (8, critical_exponent(8))] {
        println!("N = {dim}, p = {p}");
        for m in [256, 512, 1024] {
            let ball = RadialGrid::new(dim, 1.0, m)?;
            let r = solve_limit_problem(&ball, 50.0, p, opts)?;
            let f = EnergyFunctional::limit(&ball, 50.0, p)?;
            println!(
                "  m = {m:5}  c(Omega) = {:.10e}  identity defect = {:.1e}  residual = {:.1e}  iterations = {}  u(r1) = {:.4e}",
                r.energy,
                r.energy_identity_defect(&f),
                r.residual,
                r.iterations,
                r.field.values()[0]
            );
        }
    }
    Ok(())
}
