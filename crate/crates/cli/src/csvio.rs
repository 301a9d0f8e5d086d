//! CSV emission and (for tests and downstream tooling) parsing.
//!
//! Floats are printed with 17 significant digits in scientific notation, so
//! parsing a file back reproduces the original values bit for bit.

use crate::{CliError, CliResult};
use purikit::IterationStats;
use std::fmt::Write as _;
use std::path::Path;

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const RESULT_HEADER: &str = "iteration,mean_concurrence,concurrence_std,concurrence_stderr,mean_success,success_std,success_stderr,n_nonzero";

/// Row of an evaluation/optimization result table. The asymptote row uses
/// the literal iteration label `asymptote`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub iteration: Option<usize>,
    pub mean_concurrence: f64,
    pub concurrence_std: f64,
    pub concurrence_stderr: f64,
    pub mean_success: f64,
    pub success_std: f64,
    pub success_stderr: f64,
    pub n_nonzero: usize,
}

impl ResultRow {
    pub fn from_stats(stats: &IterationStats) -> Self {
        Self {
            iteration: Some(stats.iteration),
            mean_concurrence: stats.mean_concurrence,
            concurrence_std: stats.concurrence_std,
            concurrence_stderr: stats.concurrence_stderr,
            mean_success: stats.mean_success,
            success_std: stats.success_std,
            success_stderr: stats.success_stderr,
            n_nonzero: stats.n_nonzero,
        }
    }

    fn write_line(&self, out: &mut String) {
        let label = match self.iteration {
            Some(i) => i.to_string(),
            None => "asymptote".to_string(),
        };
        let _ = writeln!(
            out,
            "{label},{},{},{},{},{},{},{}",
            format_f64(self.mean_concurrence),
            format_f64(self.concurrence_std),
            format_f64(self.concurrence_stderr),
            format_f64(self.mean_success),
            format_f64(self.success_std),
            format_f64(self.success_stderr),
            self.n_nonzero
        );
    }
}

pub fn write_result_table(path: &Path, rows: &[ResultRow]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(RESULT_HEADER);
    out.push('\n');
    for row in rows {
        row.write_line(&mut out);
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_result_table(path: &Path) -> CliResult<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RESULT_HEADER => {}
        other => {
            return Err(CliError::Io(format!(
                "unexpected result-table header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::Io(format!("malformed row '{line}'")));
        }
        let iteration = if fields[0] == "asymptote" {
            None
        } else {
            Some(parse_usize(fields[0])?)
        };
        rows.push(ResultRow {
            iteration,
            mean_concurrence: parse_f64(fields[1])?,
            concurrence_std: parse_f64(fields[2])?,
            concurrence_stderr: parse_f64(fields[3])?,
            mean_success: parse_f64(fields[4])?,
            success_std: parse_f64(fields[5])?,
            success_stderr: parse_f64(fields[6])?,
            n_nonzero: parse_usize(fields[7])?,
        });
    }
    Ok(rows)
}

pub const FIDELITY_HEADER: &str = "iteration,attractor,mean_fidelity,stderr";

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRow {
    pub iteration: usize,
    pub attractor: usize,
    pub mean_fidelity: f64,
    pub stderr: f64,
}

pub fn write_fidelity_table(path: &Path, rows: &[FidelityRow]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(FIDELITY_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.iteration,
            row.attractor,
            format_f64(row.mean_fidelity),
            format_f64(row.stderr)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_fidelity_table(path: &Path) -> CliResult<Vec<FidelityRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == FIDELITY_HEADER => {}
        other => {
            return Err(CliError::Io(format!(
                "unexpected fidelity-table header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Io(format!("malformed row '{line}'")));
        }
        rows.push(FidelityRow {
            iteration: parse_usize(fields[0])?,
            attractor: parse_usize(fields[1])?,
            mean_fidelity: parse_f64(fields[2])?,
            stderr: parse_f64(fields[3])?,
        });
    }
    Ok(rows)
}

pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,count";

pub fn write_histogram(path: &Path, hist: &purikit::Histogram) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, count) in hist.counts.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{count}",
            format_f64(hist.edges[i]),
            format_f64(hist.edges[i + 1])
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_histogram(path: &Path) -> CliResult<Vec<(f64, f64, u64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HISTOGRAM_HEADER => {}
        other => {
            return Err(CliError::Io(format!(
                "unexpected histogram header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Io(format!("malformed row '{line}'")));
        }
        rows.push((
            parse_f64(fields[0])?,
            parse_f64(fields[1])?,
            parse_usize(fields[2])? as u64,
        ));
    }
    Ok(rows)
}

fn parse_f64(s: &str) -> CliResult<f64> {
    s.parse()
        .map_err(|_| CliError::Io(format!("bad float '{s}'")))
}

fn parse_usize(s: &str) -> CliResult<usize> {
    s.parse()
        .map_err(|_| CliError::Io(format!("bad count '{s}'")))
}
