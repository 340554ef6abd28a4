//! Best Sobolev constant and the energy of projected, cut-off bubbles on the unit
//! ball in dimension 8.

use steepwell::bubble::{
    bubble_energy_bound, bubble_normalization, l2_mass_scaling_fit, log_grid, sobolev_constant,
    BubbleSpec, QuadratureOptions,
};

fn main() -> steepwell::Result<()> {
    let q = QuadratureOptions::default();
    let dim = 8;
    let s = sobolev_constant(dim, bubble_normalization(dim), q)?;
    println!(
        "S = {:.12}  threshold (2/N) S^(N/4) = {:.6}",
        s.value,
        s.threshold(dim)
    );

    let eps = log_grid(1e-6, 1e-1, 8);
    for (label, cutoff) in [
        ("default", BubbleSpec::DEFAULT_CUTOFF),
        ("narrow", (0.5, 0.9)),
    ] {
        for delta in [50.0, 0.0] {
            let b = bubble_energy_bound(dim, delta, &eps, cutoff, q)?;
            println!(
                "{label:8} cutoff {cutoff:?} delta = {delta:4}: min energy = {:.10}  margin = {:.3e}  relative = {:.3e}  at eps = {:.3e}  skipped = {}",
                b.min_energy, b.margin, b.relative_margin, b.argmin_epsilon, b.skipped.len()
            );
        }
    }

    for d in [8, 9] {
        let fit = l2_mass_scaling_fit(d, &log_grid(1e-4, 1e-2, 10), q)?;
        println!("N = {d}: fitted L2 mass exponent = {:.4}", fit.exponent);
    }
    Ok(())
}
