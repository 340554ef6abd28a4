//! Critical exponent `p = 2N/(N − 4)` in dimension 8: a short λ sweep against the
//! bubble threshold `(2/N) S^{N/4}`.

use steepwell::bubble::{bubble_normalization, sobolev_constant, QuadratureOptions};
use steepwell::critical_exponent;
use steepwell::experiments::{run_sweep, SweepConfig};

fn main() -> steepwell::Result<()> {
    let dim = 8;
    let cfg = SweepConfig {
        dim,
        p: critical_exponent(dim),
        lambdas: vec![1e3, 1e4, 1e5],
        ..SweepConfig::default()
    };
    let outcome = run_sweep(&cfg)?;
    let threshold = sobolev_constant(dim, bubble_normalization(dim), QuadratureOptions::default())?
        .threshold(dim);
    println!(
        "c(Omega) = {:?}  threshold = {threshold:?}",
        outcome.limit.energy
    );
    for r in &outcome.records {
        println!(
            "lambda = {:8.0e}  c = {:?}  gap = {:+.3e}  tail = {:.3e}  converged = {}",
            r.lambda, r.c_lambda, r.energy_gap, r.tail_mass, r.converged
        );
    }
    Ok(())
}
