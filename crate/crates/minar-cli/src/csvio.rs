//! Strict CSV for count series: header row of column names, then one row of
//! comma-separated non-negative integers per time point. Reading accepts LF
//! or CRLF; writing always emits LF.

use std::io::Write;
use std::path::Path;

use minar::process::CountSeries;

use crate::error::{CliError, CliResult};

/// A loaded series together with its column names.
#[derive(Debug, Clone)]
pub struct NamedSeries {
    pub names: Vec<String>,
    pub series: CountSeries,
}

/// Reads a count series; errors carry 1-based file line and column numbers.
pub fn load_csv(path: &Path) -> CliResult<NamedSeries> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: header: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() {
        return Err(CliError::input(format!("{}: empty header row", path.display())));
    }

    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // line 1 is the header
        let record =
            record.map_err(|e| CliError::input(format!("{}: line {line}: {e}", path.display())))?;
        if record.len() != names.len() {
            return Err(CliError::input(format!(
                "{}: line {line}: ragged row ({} columns, header has {})",
                path.display(),
                record.len(),
                names.len()
            )));
        }
        let mut row = Vec::with_capacity(names.len());
        for (c, cell) in record.iter().enumerate() {
            let col = c + 1;
            if cell.starts_with('-') && cell[1..].chars().all(|ch| ch.is_ascii_digit()) {
                return Err(CliError::input(format!(
                    "{}: line {line}, column {col}: negative count {cell}",
                    path.display()
                )));
            }
            let value: u64 = cell.parse().map_err(|_| {
                CliError::input(format!(
                    "{}: line {line}, column {col}: cannot parse {cell:?} as a count",
                    path.display()
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }

    let series = CountSeries::from_rows(&rows)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(NamedSeries { names, series })
}

/// Writes the series with LF line endings; integer cells never need quoting.
pub fn write_csv<W: Write>(w: &mut W, names: &[String], series: &CountSeries) -> std::io::Result<()> {
    write!(w, "{}\n", names.join(","))?;
    for row in series.rows() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        write!(w, "{}\n", cells.join(","))?;
    }
    Ok(())
}

/// Default column names `x1..xN` for synthetic output.
pub fn default_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}
