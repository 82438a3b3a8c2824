//! Applying approved groups to the table while keeping replacement sets in
//! sync.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::candidates::{tokenize, ClusterTable, Occurrence, ReplacementKey, ReplacementStore, TokenSpan};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    LhsToRhs,
    RhsToLhs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Approved(Direction),
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub group_key: String,
    pub verdict: Verdict,
    pub timestamp: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChangeSummary {
    /// Distinct cells whose value changed.
    pub cells_rewritten: usize,
    /// Replacements whose sets emptied out.
    pub replacements_removed: usize,
    /// Occurrence entries added to other replacements.
    pub replacements_rerouted: usize,
}

/// Byte ranges of whitespace-separated tokens.
fn token_ranges(s: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (b, c) in s.char_indices() {
        if c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st, b));
            }
        } else if start.is_none() {
            start = Some(b);
        }
    }
    if let Some(st) = start {
        out.push((st, s.len()));
    }
    out
}

fn span_text(cell: &str, span: TokenSpan) -> Option<String> {
    let toks = tokenize(cell);
    let end = (span.start + span.len) as usize;
    (end <= toks.len()).then(|| toks[span.start as usize..end].join(" "))
}

fn holds(table: &ClusterTable, column: usize, occ: &Occurrence, value: &str) -> bool {
    let cell = table.cell(occ.row, column);
    match occ.span {
        None => cell == value,
        Some(span) => span_text(cell, span).as_deref() == Some(value),
    }
}

struct Tracker {
    present_before: BTreeMap<ReplacementKey, bool>,
    rows: BTreeSet<usize>,
    dirty: BTreeSet<usize>,
    rerouted: usize,
}

impl Tracker {
    fn touch(&mut self, store: &ReplacementStore, key: &ReplacementKey) {
        if !self.present_before.contains_key(key) {
            self.present_before.insert(key.clone(), store.contains(key));
        }
    }
}

/// Sets a cell and moves its pairwise occurrences from the old value to the
/// new one against every other cell of the cluster.
fn rewrite_cell(
    table: &mut ClusterTable,
    store: &mut ReplacementStore,
    row: usize,
    new: String,
    tr: &mut Tracker,
) {
    let col = store.column();
    let old = table.cell(row, col).to_string();
    if old == new {
        return;
    }
    let cluster = table.cluster_of(row);
    let others: Vec<usize> = table.clusters()[cluster].iter().copied().filter(|&k| k != row).collect();
    for k in others {
        let vk = table.cell(k, col).to_string();
        if vk.is_empty() {
            continue;
        }
        if vk != old && !old.is_empty() {
            let fwd = (old.clone(), vk.clone());
            let back = (vk.clone(), old.clone());
            tr.touch(store, &fwd);
            tr.touch(store, &back);
            store.remove(&fwd, &Occurrence::cell(row));
            store.remove(&back, &Occurrence::cell(k));
        }
        if vk != new && !new.is_empty() {
            let fwd = (new.clone(), vk.clone());
            let back = (vk, new.clone());
            tr.touch(store, &fwd);
            tr.touch(store, &back);
            store.insert(fwd, Occurrence::cell(row));
            store.insert(back, Occurrence::cell(k));
            tr.rerouted += 2;
        }
    }
    table.set_cell(row, col, new);
    tr.rows.insert(row);
    tr.dirty.insert(cluster);
}

/// Orients members for the chosen direction.
pub fn oriented(members: &[ReplacementKey], direction: Direction) -> Vec<ReplacementKey> {
    members
        .iter()
        .map(|(l, r)| match direction {
            Direction::LhsToRhs => (l.clone(), r.clone()),
            Direction::RhsToLhs => (r.clone(), l.clone()),
        })
        .collect()
}

/// Rewrites every occurrence of every member, `lhs` to `rhs` (or the reverse).
///
/// Fails without changing anything if an occurrence no longer matches the
/// table.
pub fn apply_group(
    members: &[ReplacementKey],
    direction: Direction,
    table: &mut ClusterTable,
    store: &mut ReplacementStore,
) -> Result<ChangeSummary> {
    let col = store.column();
    let members = oriented(members, direction);
    let mut ops: Vec<(ReplacementKey, Occurrence)> = Vec::new();
    for key in &members {
        for occ in store.get(&key.0, &key.1).unwrap_or(&[]) {
            if !holds(table, col, occ, &key.0) {
                return Err(Error::OccurrenceMismatch {
                    row: occ.row,
                    expected: key.0.clone(),
                    found: table.cell(occ.row, col).to_string(),
                });
            }
            ops.push((key.clone(), *occ));
        }
    }

    let mut tr = Tracker {
        present_before: BTreeMap::new(),
        rows: BTreeSet::new(),
        dirty: BTreeSet::new(),
        rerouted: 0,
    };

    for (key, occ) in ops.iter().filter(|(_, o)| o.span.is_none()) {
        if store.has(key, occ) && holds(table, col, occ, &key.0) {
            rewrite_cell(table, store, occ.row, key.1.clone(), &mut tr);
        }
    }

    // Token spans, rightmost first within a cell so earlier spans stay put.
    let mut spans: Vec<(usize, TokenSpan, &ReplacementKey)> = ops
        .iter()
        .filter_map(|(k, o)| o.span.map(|s| (o.row, s, k)))
        .collect();
    spans.sort_by(|a, b| (a.0, b.1).cmp(&(b.0, a.1)));
    for (row, span, key) in spans {
        let occ = Occurrence { row, span: Some(span) };
        if !store.has(key, &occ) || !holds(table, col, &occ, &key.0) {
            continue;
        }
        let cell = table.cell(row, col);
        let ranges = token_ranges(cell);
        let from = ranges[span.start as usize].0;
        let to = ranges[(span.start + span.len) as usize - 1].1;
        let mut updated = String::with_capacity(cell.len());
        updated.push_str(&cell[..from]);
        updated.push_str(&key.1);
        updated.push_str(&cell[to..]);
        rewrite_cell(table, store, row, updated, &mut tr);
    }

    let dirty: Vec<usize> = tr.dirty.iter().copied().collect();
    for c in dirty {
        let keys: Vec<ReplacementKey> = store.token_keys(c).cloned().collect();
        for k in &keys {
            tr.touch(store, k);
        }
        let (_, added) = store.regenerate_tokens(table, c);
        tr.rerouted += added;
    }

    let removed = tr
        .present_before
        .iter()
        .filter(|(k, &before)| before && !store.contains(k))
        .count();
    Ok(ChangeSummary {
        cells_rewritten: tr.rows.len(),
        replacements_removed: removed,
        replacements_rerouted: tr.rerouted,
    })
}

/// Applies an approval; rejections change nothing.
pub fn apply_decision(
    members: &[ReplacementKey],
    verdict: Verdict,
    table: &mut ClusterTable,
    store: &mut ReplacementStore,
) -> Result<ChangeSummary> {
    match verdict {
        Verdict::Approved(direction) => apply_group(members, direction, table, store),
        Verdict::Rejected => Ok(ChangeSummary::default()),
    }
}
