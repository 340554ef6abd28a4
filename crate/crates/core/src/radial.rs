//! Radial discretization on `[0, r_max]` for functions on `R^N`.
//!
//! Interior nodes sit at `r_i = i h`, `i = 1..=m`, with `h = r_max / (m + 1)`.
//! The Laplacian is a conservative three-point stencil
//!
//! ```text
//! (Δ_h u)_i = [a_{i+1/2} (u_{i+1} - u_i) - a_{i-1/2} (u_i - u_{i-1})] / (h² i^{N-1})
//! ```
//!
//! with flux coefficients `a_{i+1/2} = 2N Σ_{k≤i} k^{N-1} / (2i + 1)`. This choice
//! gives `a_{1/2} = 0` (zero flux through the origin, the even-extension closure),
//! reproduces `Δ r² = 2N` exactly, and makes `Δ_h` self-adjoint for the volume
//! weights `w_i = ω_{N-1} r_i^{N-1} h`. The outer closure is `u_{m+1} = 0`.
//!
//! Because `Δ_h` is self-adjoint in the weighted inner product, the bilaplacian form
//! `Σ w_i (Δ_h u)_i (Δ_h v)_i` has operator `Δ_h ∘ Δ_h`, and applying the
//! Dirichlet closure to both factors realizes the Navier conditions `u = Δu = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::banded::SymBandMatrix;
use crate::error::{Error, Result};

/// `Γ(n / 2)` for a positive integer `n`.
pub fn gamma_half_integer(n: usize) -> f64 {
    assert!(n > 0);
    let (mut value, mut x) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = n as f64 / 2.0;
    while x < target - 1e-12 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area of the unit sphere `S^{N-1}`: `2 π^{N/2} / Γ(N/2)`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim)
}

/// Volume of the ball of radius `r` in `R^N`.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    unit_sphere_area(dim) * r.powi(dim as i32) / dim as f64
}

/// Uniform radial mesh with volume weights and the Laplacian stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    r_max: f64,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lap_lower: Vec<f64>,
    lap_upper: Vec<f64>,
}

impl RadialGrid {
    pub const MIN_DIM: usize = 5;
    pub const MIN_NODES: usize = 8;

    pub fn new(dim: usize, r_max: f64, m: usize) -> Result<Arc<Self>> {
        if dim < Self::MIN_DIM {
            return Err(Error::InvalidGrid(format!("dimension {dim} < 5")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "r_max {r_max} must be positive"
            )));
        }
        if m < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!("{m} interior nodes < 8")));
        }
        let h = r_max / (m + 1) as f64;
        let omega = unit_sphere_area(dim);
        let e = (dim - 1) as i32;
        let nodes: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
        let weights = nodes.iter().map(|r| omega * r.powi(e) * h).collect();

        // t_i = Σ_{k≤i} (k/i)^{N-1}, so a_{i+1/2} / i^{N-1} = 2N t_i / (2i + 1).
        let two_n = 2.0 * dim as f64;
        let h2 = h * h;
        let mut lap_lower = vec![0.0; m];
        let mut lap_upper = vec![0.0; m];
        let mut t_prev = 0.0;
        for i in 1..=m {
            let fi = i as f64;
            let ratio = ((fi - 1.0) / fi).powi(e);
            let s_prev_scaled = t_prev * ratio;
            let t = 1.0 + s_prev_scaled;
            lap_upper[i - 1] = two_n * t / ((2.0 * fi + 1.0) * h2);
            lap_lower[i - 1] = if i == 1 {
                0.0
            } else {
                two_n * s_prev_scaled / ((2.0 * fi - 1.0) * h2)
            };
            t_prev = t;
        }
        Ok(Arc::new(Self {
            dim,
            r_max,
            h,
            nodes,
            weights,
            lap_lower,
            lap_upper,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Coefficient of `u_{i-1}` and `u_{i+1}` in row `i` of `Δ_h`.
    pub fn laplacian_coefficients(&self) -> (&[f64], &[f64]) {
        (&self.lap_lower, &self.lap_upper)
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.dim == other.dim
            && self.nodes.len() == other.nodes.len()
            && self.r_max.to_bits() == other.r_max.to_bits()
    }

    fn check(&self, other: &RadialGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }

    /// Discrete Laplacian on raw nodal values (no grid check).
    pub fn laplacian_values(&self, u: &[f64]) -> Vec<f64> {
        let m = self.len();
        assert_eq!(u.len(), m);
        (0..m)
            .map(|i| {
                let left = if i == 0 {
                    0.0
                } else {
                    self.lap_lower[i] * (u[i - 1] - u[i])
                };
                let right_val = if i + 1 < m { u[i + 1] } else { 0.0 };
                left + self.lap_upper[i] * (right_val - u[i])
            })
            .collect()
    }

    /// `Σ w_i a_i b_i` on raw values.
    pub fn weighted_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a)
            .zip(b)
            .map(|((w, x), y)| w * x * y)
            .sum()
    }

    /// `Σ w_i |a_i|^p` on raw values.
    pub fn weighted_power_sum(&self, a: &[f64], p: f64) -> f64 {
        self.weights
            .iter()
            .zip(a)
            .map(|(w, x)| w * x.abs().powf(p))
            .sum()
    }

    /// Symmetric tridiagonal matrix of `-M Δ_h` (the Dirichlet Laplacian form).
    pub fn dirichlet_laplacian_matrix(&self) -> SymBandMatrix {
        let m = self.len();
        let mut a = SymBandMatrix::zeros(m, 1);
        for i in 0..m {
            let w = self.weights[i];
            a.add(i, i, w * (self.lap_lower[i] + self.lap_upper[i]));
            if i + 1 < m {
                a.add(i, i + 1, -w * self.lap_upper[i]);
            }
        }
        a
    }
}

impl fmt::Display for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RadialGrid(N={}, r_max={}, m={})",
            self.dim,
            self.r_max,
            self.len()
        )
    }
}

/// Nodal values of a radial function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.to_string(),
                found: format!("{} values", values.len()),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn check_grid(&self, grid: &RadialGrid) -> Result<()> {
        grid.check(&self.grid)
    }
}

/// Discrete `Δu` with the origin and outer closures.
pub fn apply_laplacian(grid: &RadialGrid, u: &RadialField) -> Result<RadialField> {
    u.check_grid(grid)?;
    Ok(u.with_values(grid.laplacian_values(&u.values)))
}

/// `Σ w_i u_i v_i`.
pub fn inner_l2(grid: &RadialGrid, u: &RadialField, v: &RadialField) -> Result<f64> {
    u.check_grid(grid)?;
    v.check_grid(grid)?;
    Ok(grid.weighted_dot(&u.values, &v.values))
}

/// `(Σ w_i |u_i|^p)^{1/p}` for `p ≥ 1`.
pub fn lp_norm(grid: &RadialGrid, u: &RadialField, p: f64) -> Result<f64> {
    u.check_grid(grid)?;
    if !(p >= 1.0) {
        return Err(Error::Config(format!("lp_norm exponent {p} < 1")));
    }
    Ok(grid.weighted_power_sum(&u.values, p).powf(1.0 / p))
}

/// Boundary treatment carried by an assembled form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClosure {
    /// `u = Δu = 0` at `r_max`.
    NavierOuter,
    /// Even extension through `r = 0`.
    SymmetricOrigin,
}

/// `Q(u, v) = Σ w_i (Δ_h u)_i (Δ_h v)_i + Σ w_i W_i u_i v_i` as a pentadiagonal matrix.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    grid: Arc<RadialGrid>,
    matrix: SymBandMatrix,
    weight: Vec<f64>,
    closures: [BoundaryClosure; 2],
    weight_description: String,
}

impl QuadraticForm {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Stiffness matrix `Δ_h^T M Δ_h + M W`.
    pub fn matrix(&self) -> &SymBandMatrix {
        &self.matrix
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn closures(&self) -> [BoundaryClosure; 2] {
        self.closures
    }

    pub fn weight_description(&self) -> &str {
        &self.weight_description
    }

    /// Mass matrix diagonal (the quadrature weights).
    pub fn mass(&self) -> &[f64] {
        self.grid.weights()
    }

    /// `Q(u, v)` on raw values, evaluated through `Δ_h` rather than the matrix.
    pub fn eval_values(&self, u: &[f64], v: &[f64]) -> f64 {
        let lu = self.grid.laplacian_values(u);
        let lv = if std::ptr::eq(u, v) {
            lu.clone()
        } else {
            self.grid.laplacian_values(v)
        };
        let w = self.grid.weights();
        let mut s = 0.0;
        for i in 0..u.len() {
            s += w[i] * (lu[i] * lv[i] + self.weight[i] * u[i] * v[i]);
        }
        s
    }

    pub fn eval(&self, u: &RadialField, v: &RadialField) -> Result<f64> {
        u.check_grid(&self.grid)?;
        v.check_grid(&self.grid)?;
        Ok(self.eval_values(&u.values, &v.values))
    }

    /// Nodal operator `Δ_h Δ_h u + W u`, i.e. `M^{-1} A u`.
    pub fn apply_values(&self, u: &[f64]) -> Vec<f64> {
        let lu = self.grid.laplacian_values(u);
        let mut out = self.grid.laplacian_values(&lu);
        for ((o, w), x) in out.iter_mut().zip(&self.weight).zip(u) {
            *o += w * x;
        }
        out
    }

    /// Same form with `shift` added to the zeroth-order weight.
    pub fn shifted(&self, shift: f64) -> Self {
        let weight: Vec<f64> = self.weight.iter().map(|w| w + shift).collect();
        let matrix = self.matrix.plus_diagonal(shift, self.grid.weights());
        Self {
            grid: Arc::clone(&self.grid),
            matrix,
            weight,
            closures: self.closures,
            weight_description: format!("{} + {shift}", self.weight_description),
        }
    }
}

/// Assembles the bilaplacian form with zeroth-order weight `W` given nodewise.
pub fn assemble_bilaplacian_form(
    grid: &Arc<RadialGrid>,
    weight: &[f64],
    description: impl Into<String>,
) -> Result<QuadraticForm> {
    let m = grid.len();
    if weight.len() != m {
        return Err(Error::GridMismatch {
            expected: grid.to_string(),
            found: format!("{} weight values", weight.len()),
        });
    }
    if let Some(index) = weight.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let (lower, upper) = grid.laplacian_coefficients();
    let w = grid.weights();
    let mut a = SymBandMatrix::zeros(m, 2);
    for i in 0..m {
        // row i of Δ_h: (col, coeff)
        let mut row = [(usize::MAX, 0.0); 3];
        if i > 0 {
            row[0] = (i - 1, lower[i]);
        }
        row[1] = (i, -(lower[i] + upper[i]));
        if i + 1 < m {
            row[2] = (i + 1, upper[i]);
        }
        for (a_idx, &(j, cj)) in row.iter().enumerate() {
            if j == usize::MAX {
                continue;
            }
            for &(k, ck) in row.iter().skip(a_idx) {
                if k == usize::MAX {
                    continue;
                }
                a.add(j, k, w[i] * cj * ck);
            }
        }
        a.add(i, i, w[i] * weight[i]);
    }
    Ok(QuadraticForm {
        grid: Arc::clone(grid),
        matrix: a,
        weight: weight.to_vec(),
        closures: [
            BoundaryClosure::SymmetricOrigin,
            BoundaryClosure::NavierOuter,
        ],
        weight_description: description.into(),
    })
}

/// Bilaplacian form with a constant zeroth-order weight.
pub fn assemble_constant_weight_form(grid: &Arc<RadialGrid>, c: f64) -> Result<QuadraticForm> {
    assemble_bilaplacian_form(grid, &vec![c; grid.len()], format!("W = {c}"))
}
