//! Principal eigenvalues of the pencil `(A, M)` for the assembled forms.
//!
//! The solver runs a few steps of inverse iteration at a shift below the spectrum,
//! then moves the shift just below the current Rayleigh quotient. The moved shift
//! is used only if `A − sM` is positive definite, which certifies that no smaller
//! eigenvalue was skipped.

use std::sync::Arc;

use crate::banded::{BandCholesky, SymBandMatrix};
use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use crate::radial::{assemble_constant_weight_form, QuadraticForm, RadialField, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// Principal eigenpair of a form.
///
/// `residual` is the normwise backward error
/// `‖M⁻¹(Au − μMu)‖_M / (‖M⁻¹A‖_∞ + |μ|)` with `‖u‖_M = 1`. Convergence also
/// requires the Rayleigh quotient to be stationary to `tol` relative, or to have
/// reached its roundoff floor below `√tol` relative.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub field: RadialField,
    pub residual: f64,
    pub iterations: usize,
}

const INVERSE_STEPS: usize = 3;
const CERTIFY_GAP: f64 = 1e-3;

struct Pencil<'a> {
    matrix: &'a SymBandMatrix,
    mass: &'a [f64],
    quotient: &'a dyn Fn(&[f64]) -> f64,
    shift: f64,
    scale: f64,
    base: BandCholesky,
}

impl Pencil<'_> {
    fn mass_norm(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.mass)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    fn normalize(&self, x: &mut [f64]) {
        let n = self.mass_norm(x);
        let s = if x[0] < 0.0 { -1.0 / n } else { 1.0 / n };
        x.iter_mut().for_each(|v| *v *= s);
    }

    fn mass_times(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.mass).map(|(v, w)| v * w).collect()
    }

    /// Backward error `‖M⁻¹(A − ρM)x‖_M / (‖M⁻¹A‖_∞ + |ρ|)` for `‖x‖_M = 1`.
    fn residual(&self, x: &[f64], rho: f64) -> f64 {
        let ax = self.matrix.matvec(x);
        let r: f64 = ax
            .iter()
            .zip(x)
            .zip(self.mass)
            .map(|((a, v), w)| (a / w - rho * v).powi(2) * w)
            .sum();
        r.sqrt() / (self.scale + rho.abs())
    }
}

pub(crate) fn operator_scale(matrix: &SymBandMatrix, mass: &[f64]) -> f64 {
    let n = matrix.dim();
    let bw = matrix.bandwidth();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(bw);
            let hi = (i + bw).min(n - 1);
            (lo..=hi).map(|j| matrix.get(i, j).abs()).sum::<f64>() / mass[i]
        })
        .fold(0.0, f64::max)
}

fn bump_start(grid: &RadialGrid) -> Vec<f64> {
    let x: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| (1.0 - r * r).max(0.0).powi(2))
        .collect();
    if x.iter().any(|&v| v > 0.0) {
        x
    } else {
        vec![1.0; grid.len()]
    }
}

fn pencil_eigen(
    grid: &Arc<RadialGrid>,
    matrix: &SymBandMatrix,
    quotient: &dyn Fn(&[f64]) -> f64,
    shift: f64,
    opts: EigenOptions,
) -> Result<EigenPair> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!(
            "eigen tolerance {} must be positive",
            opts.tol
        )));
    }
    let mass = grid.weights();
    let base = matrix.plus_diagonal(-shift, mass).cholesky()?;
    let pencil = Pencil {
        matrix,
        mass,
        quotient,
        shift,
        scale: operator_scale(matrix, mass),
        base,
    };
    let mut x = bump_start(grid);
    pencil.normalize(&mut x);
    let mut iterations = 0;
    for _ in 0..INVERSE_STEPS {
        x = pencil.base.solve(&pencil.mass_times(&x));
        pencil.normalize(&mut x);
        iterations += 1;
    }
    let outcome = certified_iteration(&pencil, x.clone(), &mut iterations, opts);
    let (x, rho, residual) = match outcome {
        Some(found) => found,
        None => fixed_shift_iteration(&pencil, x, &mut iterations, opts)?,
    };
    let field = RadialField::new(Arc::clone(grid), x)?;
    Ok(EigenPair {
        value: rho,
        field,
        residual,
        iterations,
    })
}

/// Inverse iteration at `s = ρ − gap` just below the current Rayleigh quotient.
/// A successful Cholesky factorization of `A − sM` certifies that no eigenvalue
/// lies below `s`.
fn certified_iteration(
    pencil: &Pencil<'_>,
    mut x: Vec<f64>,
    iterations: &mut usize,
    opts: EigenOptions,
) -> Option<(Vec<f64>, f64, f64)> {
    let rho = (pencil.quotient)(&x);
    let s = rho - CERTIFY_GAP * (rho - pencil.shift);
    let factor = pencil
        .matrix
        .plus_diagonal(-s, pencil.mass)
        .cholesky()
        .ok()?;
    let mut watch = Stationarity::new(opts.tol);
    watch.accept(rho, f64::INFINITY);
    while *iterations < opts.max_iter {
        x = factor.solve(&pencil.mass_times(&x));
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        pencil.normalize(&mut x);
        *iterations += 1;
        let rho = (pencil.quotient)(&x);
        let res = pencil.residual(&x, rho);
        if watch.accept(rho, res) {
            return Some((x, rho, res));
        }
    }
    None
}

/// `ρ` is stationary when its change is below `tol` relative, or when the change
/// has stopped shrinking (roundoff floor) and is below `√tol` relative.
struct Stationarity {
    tol: f64,
    prev: f64,
    prev_change: f64,
}

impl Stationarity {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            prev: f64::NAN,
            prev_change: f64::INFINITY,
        }
    }

    fn accept(&mut self, rho: f64, res: f64) -> bool {
        let change = (rho - self.prev).abs();
        let scale = rho.abs().max(1.0);
        let floor = change >= self.prev_change && change <= self.tol.sqrt() * scale;
        let ok = res <= self.tol && (change <= self.tol * scale || floor);
        self.prev = rho;
        self.prev_change = change;
        ok
    }
}

fn fixed_shift_iteration(
    pencil: &Pencil<'_>,
    mut x: Vec<f64>,
    iterations: &mut usize,
    opts: EigenOptions,
) -> Result<(Vec<f64>, f64, f64)> {
    let mut watch = Stationarity::new(opts.tol);
    let mut rho = (pencil.quotient)(&x);
    let mut res = pencil.residual(&x, rho);
    while *iterations < opts.max_iter {
        if watch.accept(rho, res) {
            return Ok((x, rho, res));
        }
        x = pencil.base.solve(&pencil.mass_times(&x));
        pencil.normalize(&mut x);
        *iterations += 1;
        rho = (pencil.quotient)(&x);
        res = pencil.residual(&x, rho);
    }
    if watch.accept(rho, res) {
        return Ok((x, rho, res));
    }
    Err(Error::NonConvergence {
        iterations: *iterations,
        residual: res,
    })
}

/// Smallest eigenvalue of `Q(u, u) / Σ w u²`.
pub fn principal_eigen(form: &QuadraticForm, opts: EigenOptions) -> Result<EigenPair> {
    let grid = form.grid();
    let min_w = form.weight().iter().cloned().fold(f64::INFINITY, f64::min);
    let quotient = |x: &[f64]| form.eval_values(x, x) / grid.weighted_dot(x, x);
    pencil_eigen(grid, form.matrix(), &quotient, min_w - 1.0, opts)
}

/// Smallest eigenvalue of the discrete Dirichlet Laplacian `−Δ_h`.
pub fn dirichlet_laplacian_eigen(grid: &Arc<RadialGrid>, opts: EigenOptions) -> Result<EigenPair> {
    let a = grid.dirichlet_laplacian_matrix();
    let quotient = |x: &[f64]| {
        let ax = a.matvec(x);
        x.iter().zip(&ax).map(|(u, v)| u * v).sum::<f64>() / grid.weighted_dot(x, x)
    };
    pencil_eigen(grid, &a, &quotient, -1.0, opts)
}

pub(crate) fn require_ball(grid: &RadialGrid) -> Result<()> {
    if (grid.r_max() - 1.0).abs() > 1e-14 {
        return Err(Error::InvalidGrid(format!(
            "{grid} is not the unit ball (r_max must be 1)"
        )));
    }
    Ok(())
}

/// `μ₀`: principal eigenvalue of `Δ²` on the unit ball with Navier conditions.
pub fn mu_zero(grid_on_ball: &Arc<RadialGrid>, opts: EigenOptions) -> Result<EigenPair> {
    require_ball(grid_on_ball)?;
    principal_eigen(&assemble_constant_weight_form(grid_on_ball, 0.0)?, opts)
}

/// `μ(L₀) = μ₀ − δ`; rejects `δ ≥ μ₀`.
pub fn mu_l0(grid_on_ball: &Arc<RadialGrid>, delta: f64, opts: EigenOptions) -> Result<f64> {
    let mu0 = mu_zero(grid_on_ball, opts)?.value;
    check_delta(delta, mu0)?;
    Ok(mu0 - delta)
}

pub fn check_delta(delta: f64, mu0: f64) -> Result<()> {
    if delta >= mu0 {
        return Err(Error::Config(format!(
            "delta {delta} >= mu0 {mu0:.2} violates 0 < delta < mu0"
        )));
    }
    Ok(())
}

/// `μ(L_λ)` on the truncated whole-space grid.
pub fn mu_l_lambda(
    grid: &Arc<RadialGrid>,
    spec: &ProblemSpec,
    opts: EigenOptions,
) -> Result<EigenPair> {
    principal_eigen(&spec.form(grid)?, opts)
}

/// `λM₀ − δ`.
pub fn ess_spectrum_lower_bound(spec: &ProblemSpec) -> f64 {
    spec.lambda * spec.potential.m0() - spec.delta
}

/// `Σ_{r_i > radius} w_i u_i² / Σ w_i u_i²`.
pub fn exterior_mass_fraction(u: &RadialField, radius: f64) -> f64 {
    exterior_fraction(u, radius, 2.0)
}

/// `Σ_{r_i > radius} w_i |u_i|^q / Σ w_i |u_i|^q`.
pub fn exterior_fraction(u: &RadialField, radius: f64, q: f64) -> f64 {
    let grid = u.grid();
    let (mut outside, mut total) = (0.0, 0.0);
    for ((r, w), v) in grid.nodes().iter().zip(grid.weights()).zip(u.values()) {
        let t = w * v.abs().powf(q);
        total += t;
        if *r > radius {
            outside += t;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}
