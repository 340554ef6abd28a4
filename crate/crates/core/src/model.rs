//! Problem data: the well potential, `V_λ = λV − δ`, the energy functional and its
//! gradient, the Nehari projection and the closed-form constants.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::radial::{assemble_bilaplacian_form, QuadraticForm, RadialField, RadialGrid};
use crate::sampling::random_smooth_field;

/// `2N / (N − 4)`.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 4.0)
}

/// Radial well: zero on the unit ball, a linear ramp of width `w` up to `V_∞`, then flat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub v_inf: f64,
    pub ramp_width: f64,
}

impl PotentialSpec {
    pub const WELL_RADIUS: f64 = 1.0;

    pub fn new(v_inf: f64, ramp_width: f64) -> Result<Self> {
        if !(v_inf > 0.0 && v_inf.is_finite()) {
            return Err(Error::Config(format!("vinf {v_inf} must be positive")));
        }
        if !(ramp_width > 0.0 && ramp_width.is_finite()) {
            return Err(Error::Config(format!(
                "ramp width {ramp_width} must be positive"
            )));
        }
        Ok(Self { v_inf, ramp_width })
    }

    /// `V(r)`; errors on negative `r`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Config(format!("potential evaluated at r = {r}")));
        }
        Ok(self.value(r))
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        let s = (r - Self::WELL_RADIUS) / self.ramp_width;
        self.v_inf * s.clamp(0.0, 1.0)
    }

    /// `M₀ = V_∞ / 2`.
    pub fn m0(&self) -> f64 {
        0.5 * self.v_inf
    }

    /// Radius with `{V ≤ M₀} ⊂ B_R`; the ramp midpoint.
    pub fn big_r(&self) -> f64 {
        Self::WELL_RADIUS + 0.5 * self.ramp_width
    }
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            v_inf: 1.0,
            ramp_width: 0.5,
        }
    }
}

/// Parameters of `Δ²u + (λV − δ)u = |u|^{p−2}u` in `R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub potential: PotentialSpec,
    pub lambda: f64,
    pub delta: f64,
    pub p: f64,
    pub dim: usize,
}

impl ProblemSpec {
    pub fn new(
        potential: PotentialSpec,
        lambda: f64,
        delta: f64,
        p: f64,
        dim: usize,
    ) -> Result<Self> {
        let spec = Self {
            potential,
            lambda,
            delta,
            p,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Defaults: `N = 5`, `p = 3`, `V_∞ = 1`, `w = 0.5`, `δ = 50`.
    pub fn with_defaults(lambda: f64) -> Self {
        Self {
            potential: PotentialSpec::default(),
            lambda,
            delta: 50.0,
            p: 3.0,
            dim: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_exponent(self.dim, self.p)?;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda {} must be positive",
                self.lambda
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta {} must be positive",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    pub fn is_critical(&self) -> bool {
        (self.p - critical_exponent(self.dim)).abs() < 1e-12
    }

    /// `V_λ(r) = λV(r) − δ`.
    pub fn shifted_potential(&self, r: f64) -> f64 {
        self.lambda * self.potential.value(r) - self.delta
    }

    pub fn weight_on(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.nodes()
            .iter()
            .map(|&r| self.shifted_potential(r))
            .collect()
    }

    pub fn form(&self, grid: &Arc<RadialGrid>) -> Result<QuadraticForm> {
        check_dim(grid, self.dim)?;
        assemble_bilaplacian_form(
            grid,
            &self.weight_on(grid),
            format!(
                "lambda V - delta (lambda={}, delta={})",
                self.lambda, self.delta
            ),
        )
    }

    pub fn functional(&self, grid: &Arc<RadialGrid>) -> Result<EnergyFunctional> {
        Ok(EnergyFunctional::new(self.form(grid)?, self.p))
    }
}

/// Checks `2 < p ≤ 2N/(N−4)`, with `p = 2N/(N−4)` only for `N ≥ 8`.
pub fn validate_exponent(dim: usize, p: f64) -> Result<()> {
    if dim < 5 {
        return Err(Error::Config(format!("dim {dim} < 5")));
    }
    let crit = critical_exponent(dim);
    if !(p > 2.0) || p > crit + 1e-12 {
        return Err(Error::Config(format!(
            "p {p} outside (2, {crit}] for dim {dim}"
        )));
    }
    if (p - crit).abs() <= 1e-12 && dim < 8 {
        return Err(Error::Config(format!(
            "critical exponent p = {crit} requires dim >= 8 (dim {dim})"
        )));
    }
    Ok(())
}

fn check_dim(grid: &RadialGrid, dim: usize) -> Result<()> {
    if grid.dim() != dim {
        return Err(Error::GridMismatch {
            expected: format!("dimension {dim}"),
            found: grid.to_string(),
        });
    }
    Ok(())
}

/// `V(r)` at `r`.
pub fn evaluate_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    spec.evaluate(r)
}

/// `Λ₀ = (M₀ + δ) / M₀` with `M₀ = V_∞ / 2`.
pub fn lambda_threshold(spec: &ProblemSpec) -> f64 {
    let m0 = spec.potential.m0();
    (m0 + spec.delta) / m0
}

/// Constants that are independent of `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub m0: f64,
    pub big_r: f64,
    pub lambda0: f64,
    /// `sqrt(μ(L₀) / (μ(L₀) + 2δ))`.
    pub c1: f64,
    pub c2: f64,
    /// `Λ̂^{p/(p−2)}`; `None` until an embedding estimate is supplied.
    pub sigma: Option<f64>,
}

impl DerivedConstants {
    pub fn new(spec: &ProblemSpec, mu_l0: f64, embedding: Option<&EmbeddingEstimate>) -> Self {
        Self {
            m0: spec.potential.m0(),
            big_r: spec.potential.big_r(),
            lambda0: lambda_threshold(spec),
            c1: (mu_l0 / (mu_l0 + 2.0 * spec.delta)).sqrt(),
            c2: 1.0,
            sigma: embedding.map(|e| e.sigma_hat),
        }
    }
}

/// `J(u) = ½ Q(u, u) − (1/p) Σ w |u|^p` for an assembled form `Q`.
///
/// The same type serves the whole-space functional (weight `λV − δ`) and the
/// limit functional on the ball (weight `−δ`).
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    form: QuadraticForm,
    p: f64,
}

impl EnergyFunctional {
    pub fn new(form: QuadraticForm, p: f64) -> Self {
        Self { form, p }
    }

    /// Limit functional on the well with weight `−δ`.
    pub fn limit(grid: &Arc<RadialGrid>, delta: f64, p: f64) -> Result<Self> {
        let form = assemble_bilaplacian_form(
            grid,
            &vec![-delta; grid.len()],
            format!("-delta (delta={delta})"),
        )?;
        Ok(Self { form, p })
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.form.grid()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub(crate) fn quadratic(&self, u: &[f64]) -> f64 {
        self.form.eval_values(u, u)
    }

    pub(crate) fn power_sum(&self, u: &[f64]) -> f64 {
        self.grid().weighted_power_sum(u, self.p)
    }

    /// `Q(u, u)`.
    pub fn quadratic_value(&self, u: &RadialField) -> Result<f64> {
        u.check_grid(self.grid())?;
        Ok(self.quadratic(u.values()))
    }

    pub fn energy(&self, u: &RadialField) -> Result<f64> {
        u.check_grid(self.grid())?;
        let q = self.quadratic(u.values());
        if q < 0.0 {
            return Err(Error::IndefiniteForm { value: q });
        }
        Ok(0.5 * q - self.power_sum(u.values()) / self.p)
    }

    pub(crate) fn gradient_values(&self, u: &[f64]) -> Vec<f64> {
        let mut g = self.form.apply_values(u);
        let q = self.p - 2.0;
        for (gi, &ui) in g.iter_mut().zip(u) {
            *gi -= ui.abs().powf(q) * ui;
        }
        g
    }

    /// Nodal gradient `g` with `Σ w g v = Q(u, v) − Σ w |u|^{p−2} u v`.
    pub fn gradient(&self, u: &RadialField) -> Result<RadialField> {
        u.check_grid(self.grid())?;
        let q = self.quadratic(u.values());
        if q < 0.0 {
            return Err(Error::IndefiniteForm { value: q });
        }
        Ok(u.with_values(self.gradient_values(u.values())))
    }

    pub(crate) fn nehari_scale_values(&self, u: &[f64]) -> Result<f64> {
        let lp = self.power_sum(u);
        if lp == 0.0 {
            return Err(Error::ZeroField);
        }
        let q = self.quadratic(u);
        if !(q > 0.0) {
            return Err(Error::IndefiniteForm { value: q });
        }
        Ok((q / lp).powf(1.0 / (self.p - 2.0)))
    }

    /// The unique `t > 0` with `Q(tu, tu) = Σ w |tu|^p`.
    pub fn nehari_scale(&self, u: &RadialField) -> Result<f64> {
        u.check_grid(self.grid())?;
        self.nehari_scale_values(u.values())
    }

    /// `Q(u, u) / ‖u‖_p²`, invariant under scaling.
    pub fn sobolev_quotient(&self, u: &RadialField) -> Result<f64> {
        u.check_grid(self.grid())?;
        self.quotient_values(u.values())
    }

    pub(crate) fn quotient_values(&self, u: &[f64]) -> Result<f64> {
        let lp = self.power_sum(u);
        if lp == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(self.quadratic(u) / lp.powf(2.0 / self.p))
    }

    /// `J(t u)` at the Nehari scale, computed from the scale-invariant quotient:
    /// `(½ − 1/p) (Q / ‖u‖_p²)^{p/(p−2)}`.
    pub(crate) fn projected_energy_values(&self, u: &[f64]) -> Result<f64> {
        let ratio = self.quotient_values(u)?;
        if !(ratio > 0.0) {
            return Err(Error::IndefiniteForm { value: ratio });
        }
        Ok((0.5 - 1.0 / self.p) * ratio.powf(self.p / (self.p - 2.0)))
    }

    /// `‖u‖_λ = Q(u, u)^{1/2}`.
    pub fn norm(&self, u: &RadialField) -> Result<f64> {
        let q = self.quadratic_value(u)?;
        if q < 0.0 {
            return Err(Error::IndefiniteForm { value: q });
        }
        Ok(q.sqrt())
    }

    /// `‖u‖_{λ,0}`: the form with the weight replaced by its positive part.
    pub fn positive_part_norm(&self, u: &RadialField) -> Result<f64> {
        u.check_grid(self.grid())?;
        let grid = self.grid();
        let lu = grid.laplacian_values(u.values());
        let s: f64 = grid
            .weights()
            .iter()
            .zip(&lu)
            .zip(u.values())
            .zip(self.form.weight())
            .map(|(((w, l), x), wt)| w * (l * l + wt.max(0.0) * x * x))
            .sum();
        Ok(s.sqrt())
    }
}

/// Discrete `H²` norm `(Σ w ((Δ_h u)² + u²))^{1/2}`.
pub fn h2_norm(grid: &RadialGrid, u: &RadialField) -> Result<f64> {
    u.check_grid(grid)?;
    let lu = grid.laplacian_values(u.values());
    Ok((grid.weighted_dot(&lu, &lu) + grid.weighted_dot(u.values(), u.values())).sqrt())
}

/// Sampled embedding constant `Λ̂ = min Q(u,u)/‖u‖_p²` and `σ̂ = Λ̂^{p/(p−2)}`.
///
/// `Λ̂` is the minimum over a finite trial set, hence an upper estimate of the
/// discrete constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingEstimate {
    pub lambda_hat: f64,
    pub sigma_hat: f64,
    pub trials: usize,
}

pub fn sigma_from_embedding(lambda_hat: f64, p: f64) -> f64 {
    lambda_hat.powf(p / (p - 2.0))
}

pub fn estimate_embedding_constant(
    functional: &EnergyFunctional,
    trials: usize,
    extra: &[RadialField],
    seed: u64,
) -> Result<EmbeddingEstimate> {
    if trials < 100 {
        return Err(Error::Config(format!("{trials} trials < 100")));
    }
    let grid = functional.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let modes = rng.gen_range(1..8);
        let u = random_smooth_field(grid, &mut rng, modes);
        best = best.min(ratio_checked(functional, u.values())?);
    }
    for u in extra {
        u.check_grid(grid)?;
        best = best.min(ratio_checked(functional, u.values())?);
    }
    Ok(EmbeddingEstimate {
        lambda_hat: best,
        sigma_hat: sigma_from_embedding(best, functional.p()),
        trials: trials + extra.len(),
    })
}

fn ratio_checked(functional: &EnergyFunctional, u: &[f64]) -> Result<f64> {
    let q = functional.quadratic(u);
    if q < 0.0 {
        return Err(Error::IndefiniteForm { value: q });
    }
    functional.quotient_values(u)
}
