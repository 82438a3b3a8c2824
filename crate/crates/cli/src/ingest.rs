//! Delimited-text input and output.

use std::io::{Read, Write};
use std::path::Path;

use consol_core::candidates::ClusterTable;
use thiserror::Error;

use crate::config::{Normalization, SessionConfig};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("input has no header row")]
    NoHeader,
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
}

fn malformed(err: csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    let message = match err.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => err.to_string(),
    };
    IngestError::Malformed { line, message }
}

/// Parses a header row and data rows, clustering by `key_column`.
pub fn read_table<R: Read>(input: R, delimiter: u8, key_column: &str) -> Result<ClusterTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = reader.headers().map_err(malformed)?.iter().map(String::from).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(IngestError::NoHeader);
    }
    let key = header
        .iter()
        .position(|h| h == key_column)
        .ok_or_else(|| IngestError::MissingColumn(key_column.into()))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(malformed)?;
        rows.push(record.iter().map(String::from).collect());
    }
    Ok(ClusterTable::new(header, key, rows))
}

/// Reads the configured input, checks the target columns and applies the
/// normalization.
pub fn ingest(config: &SessionConfig) -> Result<ClusterTable, IngestError> {
    let file = std::fs::File::open(&config.input).map_err(|source| IngestError::Open {
        path: config.input.display().to_string(),
        source,
    })?;
    let mut table = read_table(std::io::BufReader::new(file), config.delimiter as u8, &config.key_column)?;
    let mut columns = Vec::new();
    for name in &config.target_columns {
        columns.push(table.column_index(name).ok_or_else(|| IngestError::MissingColumn(name.clone()))?);
    }
    if config.normalization == Normalization::Lowercase {
        table.lowercase_columns(&columns);
    }
    Ok(table)
}

pub fn write_table<W: Write>(table: &ClusterTable, delimiter: u8, out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    writer.write_record(&table.header)?;
    for row in table.rows() {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_path(path: &Path, delimiter: u8, key_column: &str) -> Result<ClusterTable, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    read_table(std::io::BufReader::new(file), delimiter, key_column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_by_key() {
        let text = "id,name\n1,a\n1,b\n2,c\n2,\"d, e\"\n1,a\n";
        let t = read_table(text.as_bytes(), b',', "id").unwrap();
        assert_eq!(t.row_count(), 5);
        assert_eq!(t.clusters().len(), 2);
        assert_eq!(t.cell(3, 1), "d, e");
    }

    #[test]
    fn empty_keys_are_singletons() {
        let t = read_table("id,v\n,a\n,b\n".as_bytes(), b',', "id").unwrap();
        assert_eq!(t.clusters().len(), 2);
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read_table("id,v\n1,a\n2\n".as_bytes(), b',', "id").unwrap_err();
        match err {
            IngestError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn missing_key_is_fatal() {
        assert!(matches!(
            read_table("a,b\n1,2\n".as_bytes(), b',', "id"),
            Err(IngestError::MissingColumn(_))
        ));
    }

    #[test]
    fn round_trip() {
        let text = "id;v\n1;\"x;y\"\n2;z\n";
        let t = read_table(text.as_bytes(), b';', "id").unwrap();
        let mut out = Vec::new();
        write_table(&t, b';', &mut out).unwrap();
        let back = read_table(out.as_slice(), b';', "id").unwrap();
        assert_eq!(back, t);
    }
}
