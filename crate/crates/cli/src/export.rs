//! Session outputs: standardized table, golden records, decision log and
//! metrics.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use consol_core::candidates::ClusterTable;
use consol_core::consolidate::{golden_values, Metrics};

use crate::ingest::write_table;
use crate::log::write_log;
use crate::session::Session;

pub const STANDARDIZED: &str = "standardized.csv";
pub const GOLDEN: &str = "golden.csv";
pub const DECISIONS: &str = "decisions.jsonl";
pub const METRICS: &str = "metrics.txt";

/// One row per cluster: the key, then the majority value of every other
/// column, empty where the vote is tied.
pub fn golden_table(table: &ClusterTable) -> (Vec<String>, Vec<Vec<String>>) {
    let others: Vec<usize> = (0..table.header.len()).filter(|&c| c != table.key_column).collect();
    let mut header = vec![table.header[table.key_column].clone()];
    header.extend(others.iter().map(|&c| table.header[c].clone()));
    let votes: Vec<Vec<Option<String>>> = others.iter().map(|&c| golden_values(table, c)).collect();
    let rows = (0..table.clusters().len())
        .map(|cluster| {
            let mut row = vec![table.key_of_cluster(cluster).to_string()];
            row.extend(votes.iter().map(|v| v[cluster].clone().unwrap_or_default()));
            row
        })
        .collect();
    (header, rows)
}

pub fn write_golden<W: Write>(table: &ClusterTable, delimiter: u8, out: W) -> Result<()> {
    let (header, rows) = golden_table(table);
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    writer.write_record(&header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn create(dir: &Path, name: &str, force: bool) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    if path.exists() && !force {
        bail!("{} exists; pass --force to overwrite", path.display());
    }
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Writes every output into `dir` and returns the paths written. Existing
/// files are only replaced with `force`.
pub fn export(session: &Session, metrics: Option<&Metrics>, dir: &Path, force: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut names = vec![STANDARDIZED, GOLDEN, DECISIONS];
    if metrics.is_some() {
        names.push(METRICS);
    }
    if !force {
        for name in &names {
            if dir.join(name).exists() {
                bail!("{} exists; pass --force to overwrite", dir.join(name).display());
            }
        }
    }
    let delimiter = session.config().delimiter as u8;
    write_table(session.table(), delimiter, create(dir, STANDARDIZED, force)?)?;
    write_golden(session.table(), delimiter, create(dir, GOLDEN, force)?)?;
    write_log(create(dir, DECISIONS, force)?, session.log())?;
    if let Some(m) = metrics {
        let mut out = create(dir, METRICS, force)?;
        write!(out, "{m}")?;
        out.flush()?;
    }
    Ok(names.iter().map(|n| dir.join(n)).collect())
}
