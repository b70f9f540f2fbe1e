//! File output: CSV tables and matrices with self-describing `# key = value`
//! headers, and JSON summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// `(key, value)` pairs written as `# key = value` comment lines.
pub type Metadata = Vec<(String, String)>;

/// Common header block: package version, the command that produced the file
/// and the master seed, so any output can be regenerated.
pub fn base_metadata(seed: u64) -> Metadata {
    let cmd: Vec<String> = std::env::args().collect();
    vec![
        ("generator".into(), format!("sgqc {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), cmd.join(" ")),
        ("master_seed".into(), seed.to_string()),
    ]
}

pub fn meta(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn header_block(metadata: &Metadata) -> String {
    let mut s = String::new();
    for (k, v) in metadata {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

/// Column-oriented CSV: one header row of names, then the zipped columns.
/// All columns must have equal length.
pub fn write_table(
    path: &Path,
    metadata: &Metadata,
    names: &[&str],
    columns: &[&[f64]],
) -> Result<()> {
    debug_assert_eq!(names.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut s = header_block(metadata);
    let _ = writeln!(s, "{}", names.join(","));
    for r in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| format!("{:.12e}", c[r])).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Dense row-major matrix as CSV, one matrix row per line, no column header.
pub fn write_matrix(
    path: &Path,
    metadata: &Metadata,
    data: &[f64],
    rows: usize,
    cols: usize,
) -> Result<()> {
    debug_assert_eq!(data.len(), rows * cols);
    let mut s = header_block(metadata);
    for r in 0..rows {
        let line: Vec<String> =
            data[r * cols..(r + 1) * cols].iter().map(|v| format!("{v:.12e}")).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Pretty-printed JSON summary.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
