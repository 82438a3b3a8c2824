//! Clustered tables, candidate replacement generation and replacement sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::{Error, Result};

/// Rows grouped into clusters of duplicates by an exact key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterTable {
    pub header: Vec<String>,
    pub key_column: usize,
    rows: Vec<Vec<String>>,
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
}

impl ClusterTable {
    /// Clusters appear in first-appearance order of their key. Rows with an
    /// empty key are singletons.
    pub fn new(header: Vec<String>, key_column: usize, rows: Vec<Vec<String>>) -> Self {
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut cluster_of = Vec::with_capacity(rows.len());
        let mut by_key: HashMap<String, usize> = HashMap::new();
        for (r, row) in rows.iter().enumerate() {
            let key = &row[key_column];
            let c = if key.is_empty() {
                clusters.push(Vec::new());
                clusters.len() - 1
            } else {
                *by_key.entry_ref(key.as_str()).or_insert_with(|| {
                    clusters.push(Vec::new());
                    clusters.len() - 1
                })
            };
            clusters[c].push(r);
            cluster_of.push(c);
        }
        ClusterTable {
            header,
            key_column,
            rows,
            clusters,
            cluster_of,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, row: usize) -> usize {
        self.cluster_of[row]
    }

    pub fn cell(&self, row: usize, column: usize) -> &str {
        &self.rows[row][column]
    }

    pub fn set_cell(&mut self, row: usize, column: usize, value: String) {
        self.rows[row][column] = value;
    }

    pub fn key_of_cluster(&self, cluster: usize) -> &str {
        self.cell(self.clusters[cluster][0], self.key_column)
    }

    /// Lowercase every value of the given columns.
    pub fn lowercase_columns(&mut self, columns: &[usize]) {
        for row in self.rows.iter_mut() {
            for &c in columns {
                row[c] = row[c].to_lowercase();
            }
        }
    }
}

/// A run of whitespace-separated tokens inside a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenSpan {
    pub start: u32,
    pub len: u32,
}

/// Where a replacement was observed: a whole cell, or a token span in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub row: usize,
    pub span: Option<TokenSpan>,
}

impl Occurrence {
    pub fn cell(row: usize) -> Self {
        Occurrence { row, span: None }
    }
}

pub type ReplacementKey = (String, String);
pub type ReplacementSets = BTreeMap<ReplacementKey, Vec<Occurrence>>;

pub fn tokenize(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// A maximal unaligned stretch between two consecutive LCS anchors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gap {
    pub a_start: usize,
    pub a_len: usize,
    pub b_start: usize,
    pub b_len: usize,
}

/// Token-level LCS alignment. Ties prefer the match with the smaller index
/// in `a`.
pub fn lcs_align<T: PartialEq>(a: &[T], b: &[T]) -> Vec<Gap> {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut dp = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i * w + j] = if a[i] == b[j] {
                dp[(i + 1) * w + j + 1] + 1
            } else {
                dp[(i + 1) * w + j].max(dp[i * w + j + 1])
            };
        }
    }
    let mut gaps = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (mut gi, mut gj) = (0, 0);
    let flush = |gi: usize, gj: usize, i: usize, j: usize, gaps: &mut Vec<Gap>| {
        if i > gi || j > gj {
            gaps.push(Gap {
                a_start: gi,
                a_len: i - gi,
                b_start: gj,
                b_len: j - gj,
            });
        }
    };
    while i < n && j < m {
        if a[i] == b[j] {
            flush(gi, gj, i, j, &mut gaps);
            i += 1;
            j += 1;
            gi = i;
            gj = j;
        } else if dp[(i + 1) * w + j] >= dp[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    flush(gi, gj, n, m, &mut gaps);
    gaps
}

fn join(tokens: &[&str]) -> String {
    tokens.join(" ")
}

fn pairwise_for_cluster(
    table: &ClusterTable,
    column: usize,
    rows: &[usize],
    out: &mut Vec<(ReplacementKey, Occurrence)>,
) {
    for &a in rows {
        let va = table.cell(a, column);
        if va.is_empty() {
            continue;
        }
        for &b in rows {
            let vb = table.cell(b, column);
            if a == b || vb.is_empty() || va == vb {
                continue;
            }
            out.push(((va.into(), vb.into()), Occurrence::cell(a)));
        }
    }
}

fn tokens_for_cluster(
    table: &ClusterTable,
    column: usize,
    rows: &[usize],
    out: &mut Vec<(ReplacementKey, Occurrence)>,
) {
    for (pos, &a) in rows.iter().enumerate() {
        for &b in &rows[pos + 1..] {
            let (va, vb) = (table.cell(a, column), table.cell(b, column));
            if va == vb {
                continue;
            }
            let (ta, tb) = (tokenize(va), tokenize(vb));
            for g in lcs_align(&ta, &tb) {
                if g.a_len == 0 || g.b_len == 0 || (g.a_len == ta.len() && g.b_len == tb.len()) {
                    continue;
                }
                let lhs = join(&ta[g.a_start..g.a_start + g.a_len]);
                let rhs = join(&tb[g.b_start..g.b_start + g.b_len]);
                if lhs == rhs {
                    continue;
                }
                let span_a = TokenSpan {
                    start: g.a_start as u32,
                    len: g.a_len as u32,
                };
                let span_b = TokenSpan {
                    start: g.b_start as u32,
                    len: g.b_len as u32,
                };
                out.push((
                    (lhs.clone(), rhs.clone()),
                    Occurrence {
                        row: a,
                        span: Some(span_a),
                    },
                ));
                out.push((
                    (rhs, lhs),
                    Occurrence {
                        row: b,
                        span: Some(span_b),
                    },
                ));
            }
        }
    }
}

fn collect(items: Vec<(ReplacementKey, Occurrence)>) -> ReplacementSets {
    let mut sets = ReplacementSets::new();
    for (key, occ) in items {
        sets.entry(key).or_default().push(occ);
    }
    for v in sets.values_mut() {
        v.sort();
    }
    sets
}

/// Both directions of every non-identical same-cluster value pair.
pub fn generate_pairwise(table: &ClusterTable, column: usize) -> ReplacementSets {
    let mut items = Vec::new();
    for rows in table.clusters() {
        pairwise_for_cluster(table, column, rows, &mut items);
    }
    collect(items)
}

/// Both directions of every aligned non-identical token gap.
pub fn generate_token_level(table: &ClusterTable, column: usize) -> ReplacementSets {
    let mut items = Vec::new();
    for rows in table.clusters() {
        tokens_for_cluster(table, column, rows, &mut items);
    }
    collect(items)
}

/// Replacement sets for one column, kept in sync with the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplacementStore {
    column: usize,
    token_level: bool,
    sets: ReplacementSets,
    token_keys: Vec<BTreeSet<ReplacementKey>>,
}

impl ReplacementStore {
    pub fn build(table: &ClusterTable, column: usize, token_level: bool) -> Self {
        let mut store = ReplacementStore {
            column,
            token_level,
            sets: ReplacementSets::new(),
            token_keys: vec![BTreeSet::new(); table.clusters().len()],
        };
        for c in 0..table.clusters().len() {
            let mut items = Vec::new();
            pairwise_for_cluster(table, column, &table.clusters()[c], &mut items);
            for (key, occ) in items {
                store.insert(key, occ);
            }
            store.add_token_candidates(table, c);
        }
        store
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn token_level(&self) -> bool {
        self.token_level
    }

    pub fn sets(&self) -> &ReplacementSets {
        &self.sets
    }

    pub fn get(&self, lhs: &str, rhs: &str) -> Option<&[Occurrence]> {
        self.sets
            .get(&(String::from(lhs), String::from(rhs)))
            .map(|v| v.as_slice())
    }

    pub fn contains(&self, key: &ReplacementKey) -> bool {
        self.sets.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &ReplacementKey> + '_ {
        self.sets.keys()
    }

    pub(crate) fn insert(&mut self, key: ReplacementKey, occ: Occurrence) {
        let v = self.sets.entry(key).or_default();
        let at = v.partition_point(|o| *o < occ);
        v.insert(at, occ);
    }

    /// Removes one instance of `occ`; drops the key when its set empties.
    pub(crate) fn remove(&mut self, key: &ReplacementKey, occ: &Occurrence) -> bool {
        let Some(v) = self.sets.get_mut(key) else {
            return false;
        };
        let Ok(at) = v.binary_search(occ) else {
            return false;
        };
        v.remove(at);
        if v.is_empty() {
            self.sets.remove(key);
        }
        true
    }

    pub(crate) fn token_keys(&self, cluster: usize) -> impl Iterator<Item = &ReplacementKey> + '_ {
        self.token_keys[cluster].iter()
    }

    pub(crate) fn has(&self, key: &ReplacementKey, occ: &Occurrence) -> bool {
        self.sets
            .get(key)
            .is_some_and(|v| v.binary_search(occ).is_ok())
    }

    fn add_token_candidates(&mut self, table: &ClusterTable, cluster: usize) -> usize {
        if !self.token_level {
            return 0;
        }
        let mut items = Vec::new();
        tokens_for_cluster(table, self.column, &table.clusters()[cluster], &mut items);
        let added = items.len();
        for (key, occ) in items {
            self.token_keys[cluster].insert(key.clone());
            self.insert(key, occ);
        }
        added
    }

    /// Drops every token-span occurrence of the cluster and regenerates them
    /// from the current values. Returns (removed, added) entry counts.
    pub(crate) fn regenerate_tokens(&mut self, table: &ClusterTable, cluster: usize) -> (usize, usize) {
        let keys = core::mem::take(&mut self.token_keys[cluster]);
        let rows = &table.clusters()[cluster];
        let mut removed = 0;
        for key in keys {
            if let Some(v) = self.sets.get_mut(&key) {
                let before = v.len();
                v.retain(|o| o.span.is_none() || !rows.contains(&o.row));
                removed += before - v.len();
                if v.is_empty() {
                    self.sets.remove(&key);
                }
            }
        }
        let added = self.add_token_candidates(table, cluster);
        (removed, added)
    }

    /// Checks that every occurrence still describes the table.
    pub fn check_soundness(&self, table: &ClusterTable) -> Result<()> {
        for ((lhs, rhs), occs) in &self.sets {
            for occ in occs {
                let cell = table.cell(occ.row, self.column);
                let found: String = match occ.span {
                    None => cell.into(),
                    Some(span) => {
                        let toks = tokenize(cell);
                        let end = (span.start + span.len) as usize;
                        if end > toks.len() {
                            cell.into()
                        } else {
                            join(&toks[span.start as usize..end])
                        }
                    }
                };
                let partner = table.clusters()[table.cluster_of(occ.row)]
                    .iter()
                    .any(|&r| {
                        let other = table.cell(r, self.column);
                        r != occ.row
                            && match occ.span {
                                None => other == rhs,
                                Some(_) => other.contains(rhs.as_str()),
                            }
                    });
                if &found != lhs || !partner {
                    return Err(Error::OccurrenceMismatch {
                        row: occ.row,
                        expected: lhs.clone(),
                        found,
                    });
                }
            }
        }
        Ok(())
    }

    /// A freshly generated store for the current table contents.
    pub fn regenerated(&self, table: &ClusterTable) -> Self {
        ReplacementStore::build(table, self.column, self.token_level)
    }
}
