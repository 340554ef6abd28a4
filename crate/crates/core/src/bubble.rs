//! Extremal profiles `U_ε = c_N (ε / (ε² + r²))^{(N−4)/2}` for the critical
//! embedding, their cut-off versions `u_ε = ηU_ε` on the unit ball, the best
//! constant `S`, and the energy test `J(t_ε u_ε) < (2/N) S^{N/4}`.
//!
//! Radial integrals use composite Gauss–Legendre panels on a mesh that is geometric
//! relative to `ε`, with the power-law tail beyond `R_quad` summed as a binomial
//! series. The energy test is evaluated through the deficits
//! `x = (ΔA − δB) / A_∞`, `y = ΔC / C_∞`, which stay accurate when the energies
//! agree with the threshold to many digits.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::critical_exponent;
use crate::radial::{unit_sphere_area, RadialGrid};
use crate::spectral::{check_delta, mu_zero, EigenOptions};

/// `c_N = [N(N−4)(N²−4)]^{(N−4)/8}`, for which `Δ²U_1 = U_1^{2**−1}`.
pub fn bubble_normalization(dim: usize) -> f64 {
    let n = dim as f64;
    (n * (n - 4.0) * (n * n - 4.0)).powf((n - 4.0) / 8.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleSpec {
    pub dim: usize,
    pub epsilon: f64,
    pub c_n: f64,
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
}

impl BubbleSpec {
    pub const DEFAULT_CUTOFF: (f64, f64) = (0.3, 0.99);

    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        let (r0, r1) = Self::DEFAULT_CUTOFF;
        Self::with_cutoff(dim, epsilon, bubble_normalization(dim), r0, r1)
    }

    pub fn with_cutoff(dim: usize, epsilon: f64, c_n: f64, r0: f64, r1: f64) -> Result<Self> {
        if dim < 5 {
            return Err(Error::Config(format!("dim {dim} < 5")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon {epsilon} must be positive")));
        }
        if !(c_n > 0.0 && c_n.is_finite()) {
            return Err(Error::Config(format!("c_N {c_n} must be positive")));
        }
        if !(0.0 < r0 && r0 < r1 && r1 < 1.0) {
            return Err(Error::Config(format!(
                "cutoff radii need 0 < {r0} < {r1} < 1"
            )));
        }
        Ok(Self {
            dim,
            epsilon,
            c_n,
            cutoff_inner: r0,
            cutoff_outer: r1,
        })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    fn k(&self) -> f64 {
        (self.dim as f64 - 4.0) / 2.0
    }

    /// `(U, U', ΔU)` at `r`.
    fn profile_jet(&self, r: f64) -> (f64, f64, f64) {
        let k = self.k();
        let e = self.epsilon;
        let s = e * e + r * r;
        let amp = self.c_n * e.powf(k);
        let u = amp * s.powf(-k);
        let du = -2.0 * k * r * amp * s.powf(-k - 1.0);
        // ΔU = −4k ε^k s^{−k−2} (s + (k+1) ε²) since 2k = N − 4
        let lap = -4.0 * k * amp * s.powf(-k - 2.0) * (s + (k + 1.0) * e * e);
        (u, du, lap)
    }

    /// `Δ(ηU)` at `r`.
    fn cut_laplacian(&self, r: f64) -> f64 {
        let (u, du, lap) = self.profile_jet(r);
        let (eta, d1, d2) = cutoff_jet(r, self.cutoff_inner, self.cutoff_outer);
        let n = self.dim as f64;
        eta * lap + 2.0 * d1 * du + u * (d2 + (n - 1.0) / r * d1)
    }
}

pub fn bubble_profile(spec: &BubbleSpec, r: f64) -> f64 {
    spec.c_n * (spec.epsilon / (spec.epsilon * spec.epsilon + r * r)).powf(spec.k())
}

/// Analytic `ΔU_ε(r)`.
pub fn bubble_laplacian(spec: &BubbleSpec, r: f64) -> f64 {
    spec.profile_jet(r).2
}

/// `u_ε(r) = η(r) U_ε(r)`.
pub fn cut_bubble(spec: &BubbleSpec, r: f64) -> f64 {
    smooth_cutoff(r, spec.cutoff_inner, spec.cutoff_outer) * bubble_profile(spec, r)
}

/// `Δu_ε(r)`.
pub fn cut_bubble_laplacian(spec: &BubbleSpec, r: f64) -> f64 {
    spec.cut_laplacian(r)
}

/// `1` on `[0, r0]`, `0` on `[r1, ∞)`, quintic blend `1 − (10s³ − 15s⁴ + 6s⁵)` between.
pub fn smooth_cutoff(r: f64, r0: f64, r1: f64) -> f64 {
    cutoff_jet(r, r0, r1).0
}

fn cutoff_jet(r: f64, r0: f64, r1: f64) -> (f64, f64, f64) {
    if r <= r0 {
        return (1.0, 0.0, 0.0);
    }
    if r >= r1 {
        return (0.0, 0.0, 0.0);
    }
    let l = r1 - r0;
    let s = (r - r0) / l;
    let b = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    let db = 30.0 * s * s * (1.0 - s) * (1.0 - s) / l;
    let ddb = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (l * l);
    (1.0 - b, -db, -ddb)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Geometric panel growth ratio.
    pub ratio: f64,
    /// Inner edge of the geometric mesh, as a multiple of `ε`.
    pub inner: f64,
    /// Panels on the cutoff transition `[r0, r1]`.
    pub transition_panels: usize,
    pub r_quad: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            order: 24,
            ratio: 2.0,
            inner: 1.0 / 64.0,
            transition_panels: 32,
            r_quad: 1e3,
        }
    }
}

struct Quadrature {
    rule: GaussLegendre,
    opts: QuadratureOptions,
}

impl Quadrature {
    fn new(opts: QuadratureOptions) -> Result<Self> {
        let order = NonZeroUsize::new(opts.order)
            .ok_or_else(|| Error::Config("quadrature order must be positive".into()))?;
        if !(opts.ratio > 1.0)
            || !(opts.inner > 0.0)
            || opts.transition_panels == 0
            || !(opts.r_quad > 1.0)
        {
            return Err(Error::Config(format!(
                "invalid quadrature options {opts:?}"
            )));
        }
        Ok(Self {
            rule: GaussLegendre::new(order),
            opts,
        })
    }

    /// Breakpoints `a < ε·inner·ratio^j < b` plus `a` and `b`.
    fn geometric(&self, a: f64, b: f64, eps: f64) -> Vec<f64> {
        let mut pts = vec![a];
        let mut x = eps * self.opts.inner;
        while x <= a {
            x *= self.opts.ratio;
        }
        while x < b {
            pts.push(x);
            x *= self.opts.ratio;
        }
        pts.push(b);
        pts
    }

    fn integrate(&self, pts: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        pts.windows(2)
            .map(|w| self.rule.integrate(w[0], w[1], &f))
            .sum()
    }

    fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }
}

/// `∫_R^∞ (r² + ε²)^{−m} r^{N−1} dr` as a binomial series in `ε²/R²`, with the
/// first omitted term as error estimate.
fn power_tail(m: f64, eps: f64, r: f64, dim: usize) -> (f64, f64) {
    let n = dim as f64;
    let q = (eps / r).powi(2);
    let mut coeff = 1.0;
    let mut sum = 0.0;
    let mut term = f64::INFINITY;
    for j in 0..200 {
        let jf = j as f64;
        term = coeff * q.powi(j) * r.powf(n - 2.0 * m) / (2.0 * m + 2.0 * jf - n);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coeff *= -(m + jf) / (jf + 1.0);
    }
    (sum, term.abs())
}

/// Whole-space integrals of `U_ε` (times `ω_{N−1}`) over `[a, ∞)`:
/// `(∫|ΔU|², ∫U^{2**}, tail error estimate)`.
fn profile_integrals_from(spec: &BubbleSpec, a: f64, quad: &Quadrature) -> (f64, f64, f64) {
    let n = spec.dim as f64;
    let ps = critical_exponent(spec.dim);
    let omega = unit_sphere_area(spec.dim);
    let rq = quad.opts.r_quad;
    let pts = quad.geometric(a, rq, spec.epsilon);
    let lap2 = quad.integrate(&pts, |r| spec.profile_jet(r).2.powi(2) * r.powf(n - 1.0));
    let up = quad.integrate(&pts, |r| bubble_profile(spec, r).powf(ps) * r.powf(n - 1.0));

    let k = spec.k();
    let e = spec.epsilon;
    let c2 = spec.c_n * spec.c_n;
    // |ΔU|² = 16k² c² ε^{2k} [s^{−2k−2} + 2(k+1)ε² s^{−2k−3} + (k+1)²ε⁴ s^{−2k−4}]
    let pre = 16.0 * k * k * c2 * e.powf(2.0 * k);
    let t1 = power_tail(2.0 * k + 2.0, e, rq, spec.dim);
    let t2 = power_tail(2.0 * k + 3.0, e, rq, spec.dim);
    let t3 = power_tail(2.0 * k + 4.0, e, rq, spec.dim);
    let a1 = 2.0 * (k + 1.0) * e * e;
    let a2 = (k + 1.0).powi(2) * e.powi(4);
    let lap_tail = pre * (t1.0 + a1 * t2.0 + a2 * t3.0);
    let lap_err = pre * (t1.1 + a1 * t2.1 + a2 * t3.1);
    // U^{2**} = c^{2**} ε^N s^{−N}
    let pre_u = spec.c_n.powf(ps) * e.powf(n);
    let tu = power_tail(n, e, rq, spec.dim);
    let err = (lap_err / (lap2 + lap_tail)).max(tu.1 / (up + pre_u * tu.0));
    (omega * (lap2 + lap_tail), omega * (up + pre_u * tu.0), err)
}

/// The best constant with its per-`ε` evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevConstant {
    pub value: f64,
    /// `S` evaluated at `ε = ½, 1, 2`.
    pub by_epsilon: [f64; 3],
    pub lap_integral: f64,
    pub power_integral: f64,
}

impl SobolevConstant {
    /// `(2/N) S^{N/4}`.
    pub fn threshold(&self, dim: usize) -> f64 {
        2.0 / dim as f64 * self.value.powf(dim as f64 / 4.0)
    }
}

const TAIL_TOL: f64 = 1e-10;
const EPSILON_AGREEMENT: f64 = 1e-8;

/// `S = ∫|ΔU_1|² / (∫U_1^{2**})^{2/2**}`, rechecked at `ε = ½` and `ε = 2`.
pub fn sobolev_constant(dim: usize, c_n: f64, opts: QuadratureOptions) -> Result<SobolevConstant> {
    let quad = Quadrature::new(opts)?;
    let ps = critical_exponent(dim);
    let mut by_epsilon = [0.0; 3];
    let mut unit = (0.0, 0.0);
    for (slot, eps) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let spec = BubbleSpec {
            dim,
            epsilon: eps,
            c_n,
            cutoff_inner: 0.5,
            cutoff_outer: 0.9,
        };
        let (a, c, err) = profile_integrals_from(&spec, 0.0, &quad);
        if err > TAIL_TOL {
            return Err(Error::Quadrature(format!(
                "tail error {err:e} at epsilon {eps}"
            )));
        }
        by_epsilon[slot] = a / c.powf(2.0 / ps);
        if eps == 1.0 {
            unit = (a, c);
        }
    }
    let value = by_epsilon[1];
    for s in by_epsilon {
        if (s - value).abs() > EPSILON_AGREEMENT * value {
            return Err(Error::Quadrature(format!(
                "S depends on epsilon: {by_epsilon:?}"
            )));
        }
    }
    Ok(SobolevConstant {
        value,
        by_epsilon,
        lap_integral: unit.0,
        power_integral: unit.1,
    })
}

/// Integrals of `u_ε = ηU_ε` relative to the uncut profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleIntegrals {
    pub epsilon: f64,
    /// `∫_{R^N} |ΔU_ε|²`.
    pub lap_full: f64,
    /// `∫_{R^N} U_ε^{2**}`.
    pub power_full: f64,
    /// `∫|Δu_ε|² − ∫|ΔU_ε|²`.
    pub lap_deficit: f64,
    /// `∫u_ε^{2**} − ∫U_ε^{2**}`.
    pub power_deficit: f64,
    /// `∫u_ε²`.
    pub mass: f64,
}

impl BubbleIntegrals {
    pub fn lap(&self) -> f64 {
        self.lap_full + self.lap_deficit
    }

    pub fn power(&self) -> f64 {
        self.power_full + self.power_deficit
    }

    /// `t_ε = ((∫|Δu_ε|² − δ∫u_ε²) / ∫u_ε^{2**})^{1/(2**−2)}`; `None` if the numerator is not positive.
    pub fn t_epsilon(&self, dim: usize, delta: f64) -> Option<f64> {
        let num = self.lap() - delta * self.mass;
        (num > 0.0).then(|| (num / self.power()).powf(1.0 / (critical_exponent(dim) - 2.0)))
    }

    /// `J_Ω(t_ε u_ε) = (2/N) (∫|Δu_ε|² − δ∫u_ε²)^{N/4} / (∫u_ε^{2**})^{(N−4)/4}`.
    pub fn projected_energy(&self, dim: usize, delta: f64) -> Option<f64> {
        let n = dim as f64;
        let num = self.lap() - delta * self.mass;
        (num > 0.0).then(|| 2.0 / n * num.powf(n / 4.0) / self.power().powf((n - 4.0) / 4.0))
    }

    /// `1 − J_Ω(t_ε u_ε) / ((2/N) S_ε^{N/4})`, with `S_ε` from the uncut integrals.
    pub fn relative_margin(&self, dim: usize, delta: f64) -> Option<f64> {
        let n = dim as f64;
        let x = (self.lap_deficit - delta * self.mass) / self.lap_full;
        let y = self.power_deficit / self.power_full;
        (x > -1.0).then(|| -((n / 4.0) * x.ln_1p() - ((n - 4.0) / 4.0) * y.ln_1p()).exp_m1())
    }
}

pub fn bubble_integrals(spec: &BubbleSpec, opts: QuadratureOptions) -> Result<BubbleIntegrals> {
    let quad = Quadrature::new(opts)?;
    let n = spec.dim as f64;
    let ps = critical_exponent(spec.dim);
    let omega = unit_sphere_area(spec.dim);
    let (r0, r1) = (spec.cutoff_inner, spec.cutoff_outer);
    let (lap_full, power_full, err) = profile_integrals_from(spec, 0.0, &quad);
    if err > TAIL_TOL {
        return Err(Error::Quadrature(format!(
            "tail error {err:e} at epsilon {}",
            spec.epsilon
        )));
    }
    let (lap_out, power_out, _) = profile_integrals_from(spec, r0, &quad);
    let band = Quadrature::uniform(r0, r1, opts.transition_panels);
    let lap_band =
        omega * quad.integrate(&band, |r| spec.cut_laplacian(r).powi(2) * r.powf(n - 1.0));
    let power_band = omega
        * quad.integrate(&band, |r| {
            cut_bubble(spec, r).abs().powf(ps) * r.powf(n - 1.0)
        });
    let mut inner = quad.geometric(0.0, r0, spec.epsilon);
    inner.extend_from_slice(&band[1..]);
    let mass = omega * quad.integrate(&inner, |r| cut_bubble(spec, r).powi(2) * r.powf(n - 1.0));
    Ok(BubbleIntegrals {
        epsilon: spec.epsilon,
        lap_full,
        power_full,
        lap_deficit: lap_band - lap_out,
        power_deficit: power_band - power_out,
        mass,
    })
}

/// `ε` values from `lo` to `hi` inclusive, `per_decade` per factor of ten.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleBound {
    pub min_energy: f64,
    pub threshold: f64,
    /// `threshold − min_energy`.
    pub margin: f64,
    pub relative_margin: f64,
    pub argmin_epsilon: f64,
    /// `(ε, J_Ω(t_ε u_ε), relative margin)` for every evaluated `ε`.
    pub samples: Vec<(f64, f64, f64)>,
    /// `ε` values with `∫|Δu_ε|² ≤ δ∫u_ε²`.
    pub skipped: Vec<f64>,
    pub sobolev: SobolevConstant,
}

/// Minimizes `J_Ω(t_ε u_ε)` over the `ε` grid and compares with `(2/N) S^{N/4}`.
pub fn bubble_energy_bound(
    dim: usize,
    delta: f64,
    epsilon_grid: &[f64],
    cutoff: (f64, f64),
    opts: QuadratureOptions,
) -> Result<BubbleBound> {
    if dim < 8 {
        return Err(Error::Config(format!(
            "bubble bound needs dim >= 8 (dim {dim})"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::Config(format!("delta {delta} must be non-negative")));
    }
    if epsilon_grid.len() < 20 {
        return Err(Error::Config(format!(
            "epsilon grid has {} points, need at least 20",
            epsilon_grid.len()
        )));
    }
    let ball = RadialGrid::new(dim, 1.0, 512)?;
    let mu0 = mu_zero(&ball, EigenOptions::default())?.value;
    check_delta(delta, mu0)?;
    let c_n = bubble_normalization(dim);
    let base = BubbleSpec::with_cutoff(dim, epsilon_grid[0], c_n, cutoff.0, cutoff.1)?;
    let sobolev = sobolev_constant(dim, c_n, opts)?;
    let threshold = sobolev.threshold(dim);
    let evaluated: Vec<Result<(f64, Option<(f64, f64)>)>> = epsilon_grid
        .par_iter()
        .map(|&eps| {
            let b = bubble_integrals(&base.with_epsilon(eps), opts)?;
            Ok((
                eps,
                b.projected_energy(dim, delta)
                    .zip(b.relative_margin(dim, delta)),
            ))
        })
        .collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for item in evaluated {
        match item? {
            (eps, Some((e, m))) => samples.push((eps, e, m)),
            (eps, None) => skipped.push(eps),
        }
    }
    let best = samples
        .iter()
        .copied()
        .fold(None::<(f64, f64, f64)>, |acc, s| match acc {
            Some(a) if a.2 >= s.2 => Some(a),
            _ => Some(s),
        })
        .ok_or_else(|| Error::Config("every epsilon was skipped".into()))?;
    Ok(BubbleBound {
        min_energy: best.1,
        threshold,
        margin: threshold * best.2,
        relative_margin: best.2,
        argmin_epsilon: best.0,
        samples,
        skipped,
        sobolev,
    })
}

/// Slope of `log ∫u_ε²` against `log ε`; for `N = 8` the mass is divided by `|ln ε|`
/// first.
#[derive(Debug, Clone, PartialEq)]
pub struct MassScalingFit {
    pub exponent: f64,
    pub masses: Vec<(f64, f64)>,
}

pub fn l2_mass_scaling_fit(
    dim: usize,
    epsilon_grid: &[f64],
    opts: QuadratureOptions,
) -> Result<MassScalingFit> {
    if dim < 8 {
        return Err(Error::Config(format!(
            "mass scaling needs dim >= 8 (dim {dim})"
        )));
    }
    if epsilon_grid.len() < 2 {
        return Err(Error::Config(
            "mass scaling needs at least two epsilon values".into(),
        ));
    }
    let base = BubbleSpec::new(dim, epsilon_grid[0])?;
    let masses = epsilon_grid
        .par_iter()
        .map(|&eps| Ok((eps, bubble_integrals(&base.with_epsilon(eps), opts)?.mass)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = masses
        .iter()
        .map(|&(e, m)| {
            let y = if dim == 8 { m / e.ln().abs() } else { m };
            (e.ln(), y.ln())
        })
        .collect();
    Ok(MassScalingFit {
        exponent: least_squares_slope(&pts),
        masses,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
