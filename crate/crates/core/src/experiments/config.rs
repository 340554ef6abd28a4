//! Flat `key = value` sweep configuration with `#` comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    critical_exponent, lambda_threshold, validate_exponent, PotentialSpec, ProblemSpec,
};
use crate::radial::RadialGrid;
use crate::solver::SolveOptions;
use crate::spectral::{check_delta, mu_zero, EigenOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (csv or json)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

pub const DEFAULT_LAMBDAS: [f64; 7] = [1e2, 3e2, 1e3, 3e3, 1e4, 3e4, 1e5];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dim: usize,
    pub p: f64,
    pub delta: f64,
    pub v_inf: f64,
    pub ramp_width: f64,
    pub lambdas: Vec<f64>,
    pub r_max: f64,
    pub mesh: usize,
    pub ball_mesh: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub parallel: bool,
    pub seed: u64,
    /// Adds the `h2_dist` column.
    pub h2_dist: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            p: 3.0,
            delta: 50.0,
            v_inf: 1.0,
            ramp_width: 0.5,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            r_max: 4.0,
            mesh: 2048,
            ball_mesh: 1024,
            tol: SolveOptions::default().tol,
            max_iter: SolveOptions::default().max_iter,
            output: None,
            format: OutputFormat::Csv,
            parallel: true,
            seed: 0,
            h2_dist: false,
        }
    }
}

impl SweepConfig {
    pub fn potential(&self) -> PotentialSpec {
        PotentialSpec {
            v_inf: self.v_inf,
            ramp_width: self.ramp_width,
        }
    }

    pub fn problem(&self, lambda: f64) -> ProblemSpec {
        ProblemSpec {
            potential: self.potential(),
            lambda,
            delta: self.delta,
            p: self.p,
            dim: self.dim,
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..SolveOptions::default()
        }
    }

    pub fn whole_grid(&self) -> Result<std::sync::Arc<RadialGrid>> {
        RadialGrid::new(self.dim, self.r_max, self.mesh)
    }

    pub fn ball_grid(&self) -> Result<std::sync::Arc<RadialGrid>> {
        RadialGrid::new(self.dim, 1.0, self.ball_mesh)
    }

    /// Static checks plus `δ < μ₀` on the ball grid.
    ///
    /// `λ ≤ Λ₀` is allowed: `Λ₀` is only sufficient for positivity, which the
    /// solvers verify directly.
    pub fn validate(&self) -> Result<()> {
        validate_exponent(self.dim, self.p)?;
        PotentialSpec::new(self.v_inf, self.ramp_width)?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta {} must be positive",
                self.delta
            )));
        }
        if self.lambdas.is_empty() {
            return Err(Error::Config("lambdas is empty".into()));
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::Config("lambdas must be positive".into()));
        }
        if self.lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("lambdas must be strictly increasing".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        self.whole_grid()?;
        let mu0 = mu_zero(&self.ball_grid()?, EigenOptions::default())?.value;
        check_delta(self.delta, mu0)
    }

    pub fn lambda_threshold(&self) -> f64 {
        lambda_threshold(&self.problem(1.0))
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true or false, got '{value}'"
        ))),
    }
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let mut critical = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "dim" => cfg.dim = parse_num(key, value)?,
            "p" => {
                if value == "2**" {
                    critical = true;
                } else {
                    cfg.p = parse_num(key, value)?;
                }
            }
            "delta" => cfg.delta = parse_num(key, value)?,
            "vinf" => cfg.v_inf = parse_num(key, value)?,
            "ramp" => cfg.ramp_width = parse_num(key, value)?,
            "lambdas" => {
                cfg.lambdas = value
                    .split(',')
                    .map(|v| parse_num("lambdas", v.trim()))
                    .collect::<Result<_>>()?
            }
            "rmax" => cfg.r_max = parse_num(key, value)?,
            "mesh" => cfg.mesh = parse_num(key, value)?,
            "ball_mesh" => cfg.ball_mesh = parse_num(key, value)?,
            "tol" => cfg.tol = parse_num(key, value)?,
            "max_iter" => cfg.max_iter = parse_num(key, value)?,
            "out" => cfg.output = Some(PathBuf::from(value)),
            "format" => cfg.format = value.parse()?,
            "parallel" => cfg.parallel = parse_bool(key, value)?,
            "seed" => cfg.seed = parse_num(key, value)?,
            "h2_dist" => cfg.h2_dist = parse_bool(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
    }
    if critical {
        if cfg.dim < 5 {
            return Err(Error::Config(format!("dim {} < 5", cfg.dim)));
        }
        cfg.p = critical_exponent(cfg.dim);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<SweepConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}
