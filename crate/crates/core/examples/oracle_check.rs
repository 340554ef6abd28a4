//! Cross-checks the preconditioned solver against the multi-start brute-force
//! oracle on a small grid.

use std::time::Instant;

use steepwell::solver::minimize_on_nehari;
use steepwell::{brute_force_oracle, ProblemSpec, RadialGrid, SolveOptions};

fn main() -> steepwell::Result<()> {
    let grid = RadialGrid::new(5, 4.0, 32)?;
    let functional = ProblemSpec::with_defaults(1e3).functional(&grid)?;
    let solved = minimize_on_nehari(&functional, None, SolveOptions::default())?;
    let t = Instant::now();
    let oracle = brute_force_oracle(&functional, 200, 2024)?;
    println!(
        "solver energy  = {:.15e}  (residual {:.2e}, {} iterations)",
        solved.energy, solved.residual, solved.iterations
    );
    println!(
        "oracle energy  = {:.15e}  (200 starts, {:.2?})",
        oracle,
        t.elapsed()
    );
    println!(
        "relative diff  = {:.3e}",
        (solved.energy - oracle).abs() / oracle
    );
    Ok(())
}
