//! Append-only decision log, one JSON record per line.

use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use consol_core::apply::{ChangeSummary, Direction, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Approved,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKind {
    LhsToRhs,
    RhsToLhs,
}

impl From<Direction> for DirectionKind {
    fn from(d: Direction) -> Self {
        match d {
            Direction::LhsToRhs => DirectionKind::LhsToRhs,
            Direction::RhsToLhs => DirectionKind::RhsToLhs,
        }
    }
}

impl From<DirectionKind> for Direction {
    fn from(d: DirectionKind) -> Self {
        match d {
            DirectionKind::LhsToRhs => Direction::LhsToRhs,
            DirectionKind::RhsToLhs => Direction::RhsToLhs,
        }
    }
}

/// Builds a verdict; approvals need a direction, rejections must not carry one.
pub fn verdict_of(kind: VerdictKind, direction: Option<DirectionKind>) -> Result<Verdict> {
    match (kind, direction) {
        (VerdictKind::Approved, Some(d)) => Ok(Verdict::Approved(d.into())),
        (VerdictKind::Approved, None) => bail!("an approval needs a direction"),
        (VerdictKind::Rejected, None) => Ok(Verdict::Rejected),
        (VerdictKind::Rejected, Some(_)) => bail!("a rejection takes no direction"),
    }
}

pub fn split_verdict(v: Verdict) -> (VerdictKind, Option<DirectionKind>) {
    match v {
        Verdict::Approved(d) => (VerdictKind::Approved, Some(d.into())),
        Verdict::Rejected => (VerdictKind::Rejected, None),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells_rewritten: usize,
    pub replacements_removed: usize,
    pub replacements_rerouted: usize,
}

impl From<ChangeSummary> for Summary {
    fn from(s: ChangeSummary) -> Self {
        Summary {
            cells_rewritten: s.cells_rewritten,
            replacements_removed: s.replacements_removed,
            replacements_rerouted: s.replacements_rerouted,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    pub column: String,
    pub group_key: String,
    pub group_size: usize,
    pub sample: Vec<(String, String)>,
    pub verdict: VerdictKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionKind>,
    pub summary: Summary,
    pub timestamp: u64,
}

impl LogRecord {
    pub fn verdict(&self) -> Result<Verdict> {
        verdict_of(self.verdict, self.direction)
    }
}

pub fn write_record<W: Write>(out: &mut W, record: &LogRecord) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_log<W: Write>(mut out: W, records: &[LogRecord]) -> Result<()> {
    for r in records {
        write_record(&mut out, r)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a log, checking that sequence numbers strictly increase. Blank
/// lines are skipped.
pub fn read_log<R: BufRead>(input: R) -> Result<Vec<LogRecord>> {
    let mut out: Vec<LogRecord> = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LogRecord =
            serde_json::from_str(&line).with_context(|| format!("decision log line {}", n + 1))?;
        record.verdict().with_context(|| format!("decision log line {}", n + 1))?;
        if let Some(prev) = out.last() {
            if record.seq <= prev.seq {
                bail!("decision log line {}: sequence {} after {}", n + 1, record.seq, prev.seq);
            }
        }
        out.push(record);
    }
    Ok(out)
}
