//! Ground states of the whole-space problem along a λ sweep, compared with the
//! limit problem on the unit ball.

use std::time::Instant;

use steepwell::spectral::exterior_fraction;
use steepwell::{solve_ground_state, solve_limit_problem, ProblemSpec, RadialGrid, SolveOptions};

fn main() -> steepwell::Result<()> {
    let opts = SolveOptions::default();
    let t = Instant::now();
    let ball = RadialGrid::new(5, 1.0, 1024)?;
    let limit = solve_limit_problem(&ball, 50.0, 3.0, opts)?;
    println!(
        "c(Omega) = {:.10e}  residual = {:.2e}  iterations = {}  ({:.2?})",
        limit.energy,
        limit.residual,
        limit.iterations,
        t.elapsed()
    );

    let grid = RadialGrid::new(5, 4.0, 2048)?;
    for lambda in [1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5] {
        let t = Instant::now();
        let spec = ProblemSpec::with_defaults(lambda);
        let r = solve_ground_state(&grid, &spec, None, opts)?;
        println!(
            "lambda = {lambda:8.0e}  c = {:.10e}  gap = {:+.4}  tail = {:.3e}  residual = {:.2e}  iterations = {}  converged = {}  ({:.2?})",
            r.energy,
            (limit.energy - r.energy) / limit.energy,
            exterior_fraction(&r.field, 1.0, 2.0),
            r.residual,
            r.iterations,
            r.converged,
            t.elapsed()
        );
    }
    Ok(())
}
