//! Reading sources and hash tables, writing curves.

use std::fs;
use std::io::Write;
use std::path::Path;

use ruq_core::bounds::BoundCurve;
use ruq_core::hash::{parse_custom_table, HashFamily};
use ruq_core::report::fmt_sig;
use ruq_core::{JointSource, Pmf};

use crate::{CliError, CliResult};

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// A joint source in the `a e p` line format.
pub fn read_source(path: &Path) -> CliResult<JointSource> {
    let text = read_text(path)?;
    JointSource::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A seeded hash table: header `M=<int> seeds=<int>`, then one line per seed.
pub fn read_family_table(path: &Path, epsilon_claim: f64) -> CliResult<HashFamily> {
    let text = read_text(path)?;
    parse_custom_table(&text, epsilon_claim).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Comma-separated probabilities.
pub fn parse_pmf(list: &str) -> CliResult<Pmf> {
    let probs = list
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Input(format!("`{t}` is not a number"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Pmf::new(probs)?)
}

/// `R,value` CSV, one row per grid rate. The bytes depend only on the curve
/// and the precision.
pub fn render_curve(curve: &BoundCurve, precision: usize) -> String {
    let mut out = String::from("R,value\n");
    for (r, v) in &curve.rows {
        out.push_str(&fmt_sig(*r, precision));
        out.push(',');
        out.push_str(&fmt_sig(*v, precision));
        out.push('\n');
    }
    out
}

pub fn write_curve(path: &Path, curve: &BoundCurve, precision: usize) -> CliResult<()> {
    let io_err = |source| CliError::Io { path: path.display().to_string(), source };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(render_curve(curve, precision).as_bytes()).map_err(io_err)
}
