//! Default λ sweep: limit problem once, then one row per λ, emitted as CSV.

use steepwell::experiments::{emit, nehari_comparison_check, run_sweep, OutputFormat, SweepConfig};

fn main() -> steepwell::Result<()> {
    let cfg = SweepConfig::default();
    let outcome = run_sweep(&cfg)?;
    println!(
        "c(Omega) = {:?}  converged = {}",
        outcome.limit.energy, outcome.limit.converged
    );
    emit(&outcome.records, OutputFormat::Csv, None)?;

    for (pair, fields) in outcome.records.windows(2).zip(outcome.fields.windows(2)) {
        let (mu, lambda) = (cfg.problem(pair[0].lambda), cfg.problem(pair[1].lambda));
        let cmp = nehari_comparison_check(&fields[1], &mu, &lambda)?;
        println!(
            "mu = {:8.0e} < lambda = {:8.0e}: t = {:.6}  J_mu(t u) = {:.6e}  c_lambda = {:.6e}",
            mu.lambda, lambda.lambda, cmp.t, cmp.energy, pair[1].c_lambda
        );
    }
    Ok(())
}
