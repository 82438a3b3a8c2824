//! The review session: columns in order, largest group first, until the
//! budget runs out or the groups do.

use std::collections::BTreeSet;

use anyhow::{anyhow, Result};
use consol_core::apply::{apply_decision, Verdict};
use consol_core::candidates::{ClusterTable, ReplacementKey, ReplacementStore};
use consol_core::consolidate::{evaluate, LabeledPair, Metrics};
use consol_core::grouping::{Corpus, IncrementalGrouper};
use serde::Serialize;
use thiserror::Error;

use crate::config::SessionConfig;
use crate::log::{split_verdict, LogRecord};

/// Sample pairs shown per group.
pub const SAMPLE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupCard {
    pub seq: u64,
    pub column: String,
    pub group_key: String,
    pub pivot_text: String,
    pub size: usize,
    pub sample: Vec<(String, String)>,
}

/// Why no more groups are offered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    GroupsExhausted,
    BudgetExhausted,
    Stopped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionStatus {
    pub column: Option<String>,
    pub column_index: usize,
    pub columns: Vec<String>,
    pub budget: usize,
    pub budget_remaining: usize,
    pub decisions: usize,
    pub complete: bool,
    pub end: Option<EndReason>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("no group is awaiting a decision")]
    NoPendingGroup,
    #[error("decision for sequence {got}, but the pending group is {expected}")]
    Stale { expected: u64, got: u64 },
    #[error("{0}")]
    Apply(String),
}

struct Pending {
    card: GroupCard,
    members: Vec<ReplacementKey>,
}

pub struct Session {
    config: SessionConfig,
    original: ClusterTable,
    table: ClusterTable,
    columns: Vec<usize>,
    col: usize,
    store: Option<ReplacementStore>,
    grouper: Option<IncrementalGrouper>,
    pending: Option<Pending>,
    retired: BTreeSet<ReplacementKey>,
    used: Vec<usize>,
    log: Vec<LogRecord>,
    stopped: bool,
    last_end: EndReason,
}

impl Session {
    pub fn new(table: ClusterTable, config: SessionConfig) -> Result<Self> {
        config.validate()?;
        let columns = config
            .target_columns
            .iter()
            .map(|c| table.column_index(c).ok_or_else(|| anyhow!("column {c:?} not found")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Session {
            used: vec![0; columns.len()],
            original: table.clone(),
            table,
            columns,
            col: 0,
            store: None,
            grouper: None,
            pending: None,
            retired: BTreeSet::new(),
            log: Vec::new(),
            stopped: false,
            last_end: EndReason::GroupsExhausted,
            config,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn table(&self) -> &ClusterTable {
        &self.table
    }

    pub fn original(&self) -> &ClusterTable {
        &self.original
    }

    pub fn log(&self) -> &[LogRecord] {
        &self.log
    }

    pub fn store(&self) -> Option<&ReplacementStore> {
        self.store.as_ref()
    }

    fn global_left(&self) -> usize {
        self.config
            .global_budget
            .map_or(usize::MAX, |g| g.saturating_sub(self.log.len()))
    }

    fn end(&self) -> Option<EndReason> {
        if self.stopped {
            Some(EndReason::Stopped)
        } else if self.global_left() == 0 {
            Some(EndReason::BudgetExhausted)
        } else if self.col >= self.columns.len() {
            Some(self.last_end)
        } else {
            None
        }
    }

    pub fn status(&self) -> SessionStatus {
        let end = self.end();
        let complete = end.is_some();
        let remaining = if complete {
            0
        } else {
            (self.config.budget - self.used[self.col]).min(self.global_left())
        };
        SessionStatus {
            column: (!complete).then(|| self.table.header[self.columns[self.col]].clone()),
            column_index: self.col,
            columns: self.config.target_columns.clone(),
            budget: self.config.budget,
            budget_remaining: remaining,
            decisions: self.log.len(),
            complete,
            end,
        }
    }

    /// Ends the session; no further groups are offered.
    pub fn stop(&mut self) {
        self.stopped = true;
        self.pending = None;
    }

    fn next_column(&mut self, why: EndReason) {
        self.last_end = why;
        self.col += 1;
        self.store = None;
        self.grouper = None;
        self.retired.clear();
    }

    fn new_epoch(&mut self) {
        let store = self.store.as_ref().expect("store is built before grouping");
        let pairs: Vec<(String, String)> = store.keys().filter(|k| !self.retired.contains(*k)).cloned().collect();
        let corpus = Corpus::new(pairs, self.config.grouping());
        self.grouper = Some(IncrementalGrouper::new(corpus, self.config.min_group_size));
    }

    /// The group awaiting a decision, computing it if needed.
    pub fn next_group(&mut self) -> Option<GroupCard> {
        loop {
            if let Some(p) = &self.pending {
                return Some(p.card.clone());
            }
            if self.end().is_some() {
                return None;
            }
            if self.used[self.col] >= self.config.budget {
                self.next_column(EndReason::BudgetExhausted);
                continue;
            }
            let column = self.columns[self.col];
            if self.store.is_none() {
                self.store = Some(ReplacementStore::build(&self.table, column, self.config.token_level));
            }
            if self.grouper.is_none() {
                self.new_epoch();
            }
            let grouper = self.grouper.as_mut().expect("grouper was just built");
            let Some(group) = grouper.next_group() else {
                self.next_column(EndReason::GroupsExhausted);
                continue;
            };
            let replacements = &grouper.corpus().replacements;
            let members: Vec<ReplacementKey> = group
                .members
                .iter()
                .map(|&m| replacements[m].clone())
                .filter(|k| !self.retired.contains(k))
                .collect();
            if members.len() < self.config.min_group_size.max(1) {
                continue;
            }
            let card = GroupCard {
                seq: self.log.last().map_or(1, |r| r.seq + 1),
                column: self.table.header[column].clone(),
                group_key: group.key,
                pivot_text: group.pivot_text,
                size: members.len(),
                sample: members.iter().take(SAMPLE_CAP).cloned().collect(),
            };
            self.pending = Some(Pending { card, members });
        }
    }

    pub fn pending_members(&self) -> Option<&[ReplacementKey]> {
        self.pending.as_ref().map(|p| p.members.as_slice())
    }

    /// Applies a verdict to the pending group and logs it.
    pub fn decide(&mut self, seq: u64, verdict: Verdict, timestamp: u64) -> Result<LogRecord, DecideError> {
        let expected = self.pending.as_ref().ok_or(DecideError::NoPendingGroup)?.card.seq;
        if seq != expected {
            return Err(DecideError::Stale { expected, got: seq });
        }
        let Pending { card, members } = self.pending.take().expect("checked above");
        let store = self.store.as_mut().expect("a pending group has a store");
        let summary = match apply_decision(&members, verdict, &mut self.table, store) {
            Ok(s) => s,
            Err(e) => {
                self.pending = Some(Pending { card, members });
                return Err(DecideError::Apply(e.to_string()));
            }
        };
        match verdict {
            Verdict::Approved(_) => self.grouper = None,
            Verdict::Rejected => {
                for (l, r) in members {
                    self.retired.insert((r.clone(), l.clone()));
                    self.retired.insert((l, r));
                }
            }
        }
        self.used[self.col] += 1;
        let (verdict, direction) = split_verdict(verdict);
        let record = LogRecord {
            seq: card.seq,
            column: card.column,
            group_key: card.group_key,
            group_size: card.size,
            sample: card.sample,
            verdict,
            direction,
            summary: summary.into(),
            timestamp,
        };
        self.log.push(record.clone());
        Ok(record)
    }

    /// Pair-level metrics of the current table against the labels.
    pub fn metrics(&self, labels: &[LabeledPair]) -> Result<Metrics> {
        let name = self.config.labels_column();
        let column = self
            .table
            .column_index(name)
            .ok_or_else(|| anyhow!("labels column {name:?} not found"))?;
        Ok(evaluate(labels, &self.original, &self.table, column)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use consol_core::apply::Direction;

    fn session(budget: usize) -> Session {
        let rows = [
            ("1", "Lee, Mary"),
            ("1", "Mary Lee"),
            ("2", "Smith, James"),
            ("2", "James Smith"),
            ("3", "Brown, Ann"),
            ("3", "Ann Brown"),
        ];
        let table = ClusterTable::new(
            vec!["id".into(), "name".into()],
            0,
            rows.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect(),
        );
        Session::new(table, SessionConfig::new("unused.csv", "id", &["name"], budget)).unwrap()
    }

    #[test]
    fn approve_standardizes_and_logs() {
        let mut s = session(5);
        let card = s.next_group().unwrap();
        assert_eq!(card.seq, 1);
        assert_eq!(card.size, 3);
        let (l, _) = s.pending_members().unwrap()[0].clone();
        let direction = if l.contains(',') { Direction::LhsToRhs } else { Direction::RhsToLhs };
        let record = s.decide(1, Verdict::Approved(direction), 10).unwrap();
        assert_eq!(record.summary.cells_rewritten, 3);
        assert_eq!(s.table().cell(0, 1), "Mary Lee");
        assert!(s.next_group().is_none());
        assert_eq!(s.status().end, Some(EndReason::GroupsExhausted));
    }

    #[test]
    fn stale_and_double_submit() {
        let mut s = session(5);
        assert_eq!(s.decide(1, Verdict::Rejected, 0), Err(DecideError::NoPendingGroup));
        let card = s.next_group().unwrap();
        assert!(matches!(s.decide(card.seq + 1, Verdict::Rejected, 0), Err(DecideError::Stale { .. })));
        s.decide(card.seq, Verdict::Rejected, 0).unwrap();
        assert!(s.decide(card.seq, Verdict::Rejected, 0).is_err());
    }

    #[test]
    fn rejected_pairs_are_not_offered_again() {
        let mut s = session(10);
        let mut seen = BTreeSet::new();
        while let Some(card) = s.next_group() {
            for m in s.pending_members().unwrap() {
                assert!(seen.insert(m.clone()));
                assert!(!seen.contains(&(m.1.clone(), m.0.clone())));
            }
            s.decide(card.seq, Verdict::Rejected, 0).unwrap();
        }
        assert_eq!(s.table(), s.original());
    }

    #[test]
    fn budget_limits_decisions() {
        let mut s = session(1);
        let card = s.next_group().unwrap();
        assert_eq!(s.status().budget_remaining, 1);
        s.decide(card.seq, Verdict::Rejected, 0).unwrap();
        assert!(s.next_group().is_none());
        assert_eq!(s.log().len(), 1);
        assert_eq!(s.status().end, Some(EndReason::BudgetExhausted));
    }
}
