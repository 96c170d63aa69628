//! Delimited text matrices and JSON/TOML config files.

use std::fs;
use std::io::Write;
use std::path::Path;

use devar_core::DataMatrix;
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

/// Reads a rectangular numeric table, one sample per row.
pub fn load_matrix(path: &Path, delimiter: u8, has_header: bool) -> CliResult<DataMatrix> {
    let shown = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{shown}: {e}")))?;

    let labels = if has_header {
        let h = reader
            .headers()
            .map_err(|e| CliError::Data(format!("{shown}: {e}")))?;
        Some(h.iter().map(str::to_string).collect::<Vec<_>>())
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = labels.as_ref().map(Vec::len);
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{shown}: {e}")))?;
        let row_no = r + 1;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(CliError::Data(format!(
                    "{shown}: row {row_no} has {} fields, expected {w}",
                    record.len()
                )))
            }
            None => width = Some(record.len()),
            _ => {}
        }
        let mut row = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Data(format!("{shown}: row {row_no}, column {}: cannot parse '{field}'", c + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::Data(format!(
                    "{shown}: row {row_no}, column {}: non-finite value '{field}'",
                    c + 1
                )));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(CliError::Data(format!("{shown}: need at least 2 data rows, found {}", rows.len())));
    }
    let m = DataMatrix::from_rows(&rows).map_err(|e| CliError::Data(format!("{shown}: {e}")))?;
    match labels {
        Some(l) => m.with_labels(l).map_err(|e| CliError::Data(format!("{shown}: {e}"))),
        None => Ok(m),
    }
}

/// Writes `values` as comma-separated rows using shortest round-trip formatting.
pub fn write_matrix(path: &Path, values: &DataMatrix) -> CliResult<()> {
    let mut out = String::with_capacity(values.nrows() * values.ncols() * 20);
    for i in 0..values.nrows() {
        for j in 0..values.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&values.get(i, j).to_string());
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = fs::File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Parses a TOML or JSON config file, chosen by extension (TOML otherwise).
pub fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

pub fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn plain_csv() {
        let f = temp_file("1,2\n3,4\n5,6\n");
        let m = load_matrix(f.path(), b',', false).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 2));
        assert_eq!(m.get(2, 1), 6.0);
        assert!(!m.is_standardized());
    }

    #[test]
    fn header_becomes_labels() {
        let f = temp_file("a\tb\n1\t2\n3\t4\n");
        let m = load_matrix(f.path(), b'\t', true).unwrap();
        assert_eq!(m.labels().unwrap(), ["a", "b"]);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn nan_reports_location() {
        let f = temp_file("1,2\n3,NaN\n");
        let err = load_matrix(f.path(), b',', false).unwrap_err().to_string();
        assert!(err.contains("row 2, column 2"), "{err}");
    }

    #[test]
    fn ragged_and_garbage_rejected() {
        let f = temp_file("1,2\n3\n");
        assert!(load_matrix(f.path(), b',', false).unwrap_err().to_string().contains("row 2"));
        let f = temp_file("1,2\n3,x\n");
        assert!(load_matrix(f.path(), b',', false).unwrap_err().to_string().contains("cannot parse"));
        let f = temp_file("1,2\n");
        assert!(load_matrix(f.path(), b',', false).is_err());
    }

    #[test]
    fn write_then_read_round_trips() {
        let m = DataMatrix::from_fn(4, 3, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_matrix(f.path(), &m).unwrap();
        let back = load_matrix(f.path(), b',', false).unwrap();
        assert_eq!(back.values(), m.values());
    }
}
