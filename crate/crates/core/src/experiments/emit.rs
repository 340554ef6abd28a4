//! CSV and JSON rendering of sweep records.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::config::OutputFormat;
use crate::experiments::sweep::SweepRecord;

pub const CSV_HEADER: &str =
    "lambda,c_lambda,mu_L_lambda,tail_mass,p_tail_mass,l2_dist_to_limit,energy_gap,iterations,residual,converged";

/// Renders rows in ascending `λ`; floats use Rust's shortest round-trip form
/// (`{:?}`, exponent notation for very small or large magnitudes).
pub fn render(records: &[SweepRecord], format: OutputFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    let mut rows = records.to_vec();
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    match format {
        OutputFormat::Csv => {
            let with_h2 = rows.iter().any(|r| r.h2_dist.is_some());
            let mut out = String::from(CSV_HEADER);
            if with_h2 {
                out.push_str(",h2_dist");
            }
            out.push('\n');
            for r in &rows {
                let _ = write!(
                    out,
                    "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{:?},{}",
                    r.lambda,
                    r.c_lambda,
                    r.mu_l_lambda,
                    r.tail_mass,
                    r.p_tail_mass,
                    r.l2_dist_to_limit,
                    r.energy_gap,
                    r.iterations,
                    r.residual,
                    r.converged
                );
                if with_h2 {
                    match r.h2_dist {
                        Some(v) => {
                            let _ = write!(out, ",{v:?}");
                        }
                        None => out.push(','),
                    }
                }
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&rows)
                .map_err(|e| Error::Config(format!("json serialization failed: {e}")))?;
            out.push('\n');
            Ok(out)
        }
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(records: &[SweepRecord], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(records, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
