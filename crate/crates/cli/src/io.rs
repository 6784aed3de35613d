//! Series CSV ingestion and atomic file output.

use std::io::Write;
use std::path::Path;

use drift_arbiter::TimeSeries;

use crate::format::fmt_num;
use crate::CliError;

/// Reads a headed CSV with a `value` column (an optional `t` column is
/// accepted and ignored). Errors carry 1-based line numbers.
pub fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    parse_series(file, &path.display().to_string())
}

pub fn parse_series(reader: impl std::io::Read, source: &str) -> Result<TimeSeries, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{source}: unreadable header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(CliError::Data(format!("{source}: missing header row")));
    }
    let col = headers.iter().position(|h| h == "value").ok_or_else(|| {
        CliError::Data(format!(
            "{source}: line 1: header needs a `value` column, found {:?}",
            headers.iter().collect::<Vec<_>>()
        ))
    })?;
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Data(format!("{source}: line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record.get(col).ok_or_else(|| {
            CliError::Data(format!("{source}: line {line}: missing `value` field"))
        })?;
        let v: f64 = field.parse().map_err(|_| {
            CliError::Data(format!("{source}: line {line}: `{field}` is not a number"))
        })?;
        if !v.is_finite() {
            return Err(CliError::Data(format!(
                "{source}: line {line}: non-finite value `{field}`"
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{source}: no data rows")));
    }
    TimeSeries::new(values).map_err(|e| CliError::Data(format!("{source}: {e}")))
}

/// Writes `t,value` rows.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{t},{}\n", fmt_num(*v)));
    }
    out
}

/// Replaces `path` with `contents` via a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
