use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use steepwell::bubble::{bubble_energy_bound, log_grid, BubbleSpec, QuadratureOptions};
use steepwell::experiments::{emit, parse_config, run_sweep, OutputFormat, SweepConfig};
use steepwell::{
    critical_exponent, mu_l_lambda, mu_zero, solve_ground_state, solve_limit_problem, EigenOptions,
    Error, GroundStateResult, Result,
};

#[derive(Parser)]
#[command(
    name = "steepwell",
    version,
    about = "Radial biharmonic steep-well ground states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print μ₀, μ(L₀) and μ(L_λ).
    Eig {
        #[arg(long, default_value_t = 1e3)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the limit problem on the unit ball and print c(Ω).
    Limit {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the whole-space problem at one λ.
    Ground {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a λ sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Report the cut-off bubble energy bound.
    Bubble {
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 50.0)]
        delta: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_max: f64,
        #[arg(long, default_value_t = 8)]
        per_decade: usize,
        #[arg(long, num_args = 2, value_names = ["R0", "R1"])]
        cutoff: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    dim: Option<usize>,
    /// Exponent, or `2**` for the critical one.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    vinf: Option<f64>,
    #[arg(long)]
    ramp: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    ball_mesh: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallel: Option<bool>,
}

impl Common {
    fn apply(&self, mut cfg: SweepConfig) -> Result<SweepConfig> {
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$target = v; })*
            };
        }
        set!(dim => dim, delta => delta, vinf => v_inf, ramp => ramp_width, rmax => r_max, mesh => mesh,
             ball_mesh => ball_mesh, tol => tol, max_iter => max_iter, format => format, seed => seed,
             parallel => parallel);
        if let Some(p) = &self.p {
            cfg.p = if p.trim() == "2**" {
                critical_exponent(cfg.dim)
            } else {
                p.parse()
                    .map_err(|_| Error::Config(format!("p: cannot parse '{p}'")))?
            };
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn profile_csv(result: &GroundStateResult) -> String {
    let mut s = String::from("r,u\n");
    for (r, u) in result
        .field
        .grid()
        .nodes()
        .iter()
        .zip(result.field.values())
    {
        let _ = writeln!(s, "{r:?},{u:?}");
    }
    s
}

fn report(label: &str, result: &GroundStateResult, out: Option<&Path>) -> Result<()> {
    println!(
        "{label} = {:?}\nresidual = {:e}\niterations = {}\nnehari_defect = {:e}\nconverged = {}",
        result.energy, result.residual, result.iterations, result.nehari_defect, result.converged
    );
    if let Some(path) = out {
        write_output(Some(path), &profile_csv(result))?;
    }
    if result.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            iterations: result.iterations,
            residual: result.residual,
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eig { lambda, common } => {
            let cfg = common.apply(SweepConfig::default())?;
            let opts = EigenOptions::default();
            let mu0 = mu_zero(&cfg.ball_grid()?, opts)?.value;
            let e = mu_l_lambda(&cfg.whole_grid()?, &cfg.problem(lambda), opts)?;
            println!(
                "mu0 = {mu0:?}\nmu_L0 = {:?}\nlambda = {lambda:?}\nmu_L_lambda = {:?}",
                mu0 - cfg.delta,
                e.value
            );
            Ok(())
        }
        Command::Limit { common } => {
            let cfg = common.apply(SweepConfig::default())?;
            let r = solve_limit_problem(&cfg.ball_grid()?, cfg.delta, cfg.p, cfg.solve_options())?;
            report("c_omega", &r, cfg.output.as_deref())
        }
        Command::Ground { lambda, common } => {
            let cfg = common.apply(SweepConfig {
                lambdas: vec![lambda],
                ..SweepConfig::default()
            })?;
            let r = solve_ground_state(
                &cfg.whole_grid()?,
                &cfg.problem(lambda),
                None,
                cfg.solve_options(),
            )?;
            report("c_lambda", &r, cfg.output.as_deref())
        }
        Command::Sweep { config, common } => {
            let base = match config {
                Some(path) => parse_config(&path)?,
                None => SweepConfig::default(),
            };
            let cfg = common.apply(base)?;
            let outcome = run_sweep(&cfg)?;
            emit(&outcome.records, cfg.format, cfg.output.as_deref())?;
            if outcome.all_converged() {
                Ok(())
            } else {
                let failed = outcome.records.iter().find(|r| !r.converged);
                Err(Error::NonConvergence {
                    iterations: failed.map_or(outcome.limit.iterations, |r| r.iterations),
                    residual: failed.map_or(outcome.limit.residual, |r| r.residual),
                })
            }
        }
        Command::Bubble {
            dim,
            delta,
            eps_min,
            eps_max,
            per_decade,
            cutoff,
            out,
        } => {
            if !(eps_min > 0.0 && eps_min < eps_max) {
                return Err(Error::Config(format!(
                    "need 0 < eps_min < eps_max ({eps_min}, {eps_max})"
                )));
            }
            let cutoff = cutoff.map_or(BubbleSpec::DEFAULT_CUTOFF, |c| (c[0], c[1]));
            let eps = log_grid(eps_min, eps_max, per_decade);
            let b = bubble_energy_bound(dim, delta, &eps, cutoff, QuadratureOptions::default())?;
            println!(
                "sobolev = {:?}\nthreshold = {:?}\nmin_energy = {:?}\nmargin = {:e}\nrelative_margin = {:e}\nargmin_epsilon = {:e}\nskipped = {}",
                b.sobolev.value, b.threshold, b.min_energy, b.margin, b.relative_margin, b.argmin_epsilon, b.skipped.len()
            );
            if let Some(path) = out {
                let mut s = String::from("epsilon,energy,relative_margin\n");
                for (e, j, m) in &b.samples {
                    let _ = writeln!(s, "{e:?},{j:?},{m:?}");
                }
                write_output(Some(&path), &s)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
