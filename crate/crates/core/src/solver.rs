//! Least-energy solutions by Nehari-projected Sobolev-gradient descent.
//!
//! Each step maps the nodal energy gradient through `(A + M)⁻¹`, moves against it,
//! and rescales the trial field back onto the Nehari manifold. On the manifold
//! `J = (½ − 1/p)(Q / ‖u‖_p²)^{p/(p−2)}`, so the projected energy is evaluated
//! from the scale-invariant quotient without the cancellation in `½Q − ‖u‖_p^p/p`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::banded::BandCholesky;
use crate::error::{Error, Result};
use crate::model::{EnergyFunctional, ProblemSpec};
use crate::radial::{RadialField, RadialGrid};
use crate::sampling::random_nodal_field;
use crate::spectral::{
    check_delta, mu_zero, operator_scale, principal_eigen, require_ball, EigenOptions,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Bound on the relative residual `‖J'(u)‖_{(A+M)⁻¹} / ‖u‖_λ`.
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
    pub max_restarts: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 5000,
            armijo: 1e-4,
            stagnation_window: 5,
            stagnation_tol: 1e-12,
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub field: RadialField,
    pub energy: f64,
    /// Relative dual residual, see [`SolveOptions::tol`].
    pub residual: f64,
    pub iterations: usize,
    pub nehari_defect: f64,
    pub converged: bool,
    /// Projected energy after every accepted step, starting with the initial field.
    pub energy_trace: Vec<f64>,
}

impl GroundStateResult {
    /// `|Q(u,u) − 2p c / (p − 2)| / Q(u,u)`.
    pub fn energy_identity_defect(&self, functional: &EnergyFunctional) -> f64 {
        let q = functional.quadratic(self.field.values());
        let p = functional.p();
        (q - 2.0 * p * self.energy / (p - 2.0)).abs() / q
    }

    /// `|c − (½ − 1/p)‖u‖_p^p| / c`.
    pub fn manifold_energy_defect(&self, functional: &EnergyFunctional) -> f64 {
        let p = functional.p();
        let lp = functional.power_sum(self.field.values());
        (self.energy - (0.5 - 1.0 / p) * lp).abs() / self.energy.abs()
    }
}

fn preconditioner(functional: &EnergyFunctional) -> Result<BandCholesky> {
    let form = functional.form();
    form.matrix().plus_diagonal(1.0, form.mass()).cholesky()
}

fn dual_norm_squared(
    functional: &EnergyFunctional,
    k: &BandCholesky,
    g: &[f64],
) -> (f64, Vec<f64>) {
    let mg: Vec<f64> = g
        .iter()
        .zip(functional.form().mass())
        .map(|(a, w)| a * w)
        .collect();
    let s = k.solve(&mg);
    let d = mg.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>();
    (d.max(0.0), s)
}

/// `⟨g, (A + M)⁻¹ g⟩^{1/2}` for the nodal energy gradient `g` at `u`.
pub fn residual_norm(functional: &EnergyFunctional, u: &RadialField) -> Result<f64> {
    u.check_grid(functional.grid())?;
    let k = preconditioner(functional)?;
    let g = functional.gradient_values(u.values());
    Ok(dual_norm_squared(functional, &k, &g).0.sqrt())
}

fn project(functional: &EnergyFunctional, v: &[f64]) -> Result<Vec<f64>> {
    let t = functional.nehari_scale_values(v)?;
    Ok(v.iter().map(|x| x * t).collect())
}

fn normalize_sign(u: &mut [f64]) {
    if u.first().is_some_and(|&v| v < 0.0) {
        u.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Minimizes `J` over the discrete Nehari manifold of `functional`.
///
/// Starts from `init` when it projects, otherwise from the principal eigenfunction
/// of the form. Non-convergence is reported through `converged = false`.
pub fn minimize_on_nehari(
    functional: &EnergyFunctional,
    init: Option<&RadialField>,
    opts: SolveOptions,
) -> Result<GroundStateResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    let grid = functional.grid();
    let k = preconditioner(functional)?;
    let mut start = None;
    if let Some(f) = init {
        f.check_grid(grid)?;
        start = project(functional, f.values()).ok();
    }
    let mut restarts = 0;
    let mut u = loop {
        if let Some(s) = start.take() {
            break s;
        }
        if restarts >= opts.max_restarts {
            return Err(Error::IndefiniteForm {
                value: functional.quadratic(init.map_or(&[][..], |f| f.values())),
            });
        }
        restarts += 1;
        let eig = principal_eigen(functional.form(), EigenOptions::default())?;
        if eig.value <= 0.0 {
            return Err(Error::IndefiniteForm { value: eig.value });
        }
        start = project(functional, eig.field.values()).ok();
    };

    let mut energy = functional.projected_energy_values(&u)?;
    let mut trace = vec![energy];
    let mut iterations = 0;
    let mut residual;
    let mut converged = false;
    loop {
        let g = functional.gradient_values(&u);
        let (d2, s) = dual_norm_squared(functional, &k, &g);
        residual = d2.sqrt() / functional.quadratic(&u).sqrt();
        if residual <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter || stagnated(&trace, opts) {
            break;
        }
        let slack = 8.0 * f64::EPSILON * energy.abs();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a - alpha * b).collect();
            if let Ok(e) = functional.projected_energy_values(&trial) {
                if e <= energy - opts.armijo * alpha * d2 + slack {
                    if let Ok(v) = project(functional, &trial) {
                        accepted = Some((v, e));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((v, e)) = accepted else { break };
        u = v;
        energy = e.min(energy);
        trace.push(e);
        iterations += 1;
    }

    normalize_sign(&mut u);
    let q = functional.quadratic(&u);
    let lp = functional.power_sum(&u);
    let p = functional.p();
    let energy = 0.5 * q - lp / p;
    Ok(GroundStateResult {
        field: RadialField::new(Arc::clone(grid), u)?,
        energy,
        residual,
        iterations,
        nehari_defect: (q - lp).abs() / q,
        converged,
        energy_trace: trace,
    })
}

fn stagnated(trace: &[f64], opts: SolveOptions) -> bool {
    let w = opts.stagnation_window;
    if trace.len() <= w {
        return false;
    }
    let last = trace[trace.len() - 1];
    let before = trace[trace.len() - 1 - w];
    (before - last).abs() <= opts.stagnation_tol * last.abs()
}

/// Ground state of the whole-space problem on the truncated grid.
pub fn solve_ground_state(
    grid: &Arc<RadialGrid>,
    spec: &ProblemSpec,
    init: Option<&RadialField>,
    opts: SolveOptions,
) -> Result<GroundStateResult> {
    let functional = spec.functional(grid)?;
    minimize_on_nehari(&functional, init, opts)
}

/// Ground state of the limit problem on the unit ball with Navier conditions.
pub fn solve_limit_problem(
    grid_on_ball: &Arc<RadialGrid>,
    delta: f64,
    p: f64,
    opts: SolveOptions,
) -> Result<GroundStateResult> {
    require_ball(grid_on_ball)?;
    crate::model::validate_exponent(grid_on_ball.dim(), p)?;
    let mu0 = mu_zero(grid_on_ball, EigenOptions::default())?.value;
    check_delta(delta, mu0)?;
    let functional = EnergyFunctional::limit(grid_on_ball, delta, p)?;
    minimize_on_nehari(&functional, None, opts)
}

/// Largest grid the brute-force oracle accepts.
pub const ORACLE_MAX_NODES: usize = 48;

/// Minimum over `starts` seeded random initializations of plain projected
/// gradient descent with a fixed step `1 / ‖M⁻¹A‖_∞`.
pub fn brute_force_oracle(functional: &EnergyFunctional, starts: usize, seed: u64) -> Result<f64> {
    let grid = functional.grid();
    if grid.len() > ORACLE_MAX_NODES {
        return Err(Error::InvalidGrid(format!(
            "{grid} too large for the brute-force oracle (m <= {ORACLE_MAX_NODES})"
        )));
    }
    if starts == 0 {
        return Err(Error::Config("oracle needs at least one start".into()));
    }
    let form = functional.form();
    let step = 1.0 / (operator_scale(form.matrix(), form.mass()) + 1.0);
    let energies: Vec<f64> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let v = random_nodal_field(grid, &mut rng);
            plain_descent(functional, v.values(), step).unwrap_or(f64::INFINITY)
        })
        .collect();
    let best = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::IndefiniteForm { value: f64::NAN })
    }
}

fn plain_descent(functional: &EnergyFunctional, start: &[f64], step: f64) -> Result<f64> {
    const MAX_STEPS: usize = 400_000;
    let mut u = project(functional, start)?;
    let mass = functional.form().mass();
    for _ in 0..MAX_STEPS {
        let g = functional.gradient_values(&u);
        let gn: f64 = g
            .iter()
            .zip(mass)
            .map(|(a, w)| w * a * a)
            .sum::<f64>()
            .sqrt();
        let un: f64 = u
            .iter()
            .zip(mass)
            .map(|(a, w)| w * a * a)
            .sum::<f64>()
            .sqrt();
        if gn <= 1e-11 * un / step {
            break;
        }
        let v: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        u = project(functional, &v)?;
    }
    functional.projected_energy_values(&u)
}
