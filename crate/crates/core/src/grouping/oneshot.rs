use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{search_pivot, sort_groups, Corpus, Group, LabelId, Materialized, SearchStats};

/// Pivot path of every graph of a materialized partition, searched with no
/// threshold.
pub(crate) fn all_pivots(corpus: &Corpus, mat: &mut Materialized, stats: &mut SearchStats) -> Vec<Vec<LabelId>> {
    (0..mat.graphs.len())
        .map(|g| {
            let params = mat.search_params(&corpus.config, g);
            search_pivot(g as u32, &mat.graphs, &mat.index, &mut mat.lower, params, stats)
                .expect("every graph has a transformation path")
                .path
        })
        .collect()
}

pub(crate) fn groups_of_partition(corpus: &Corpus, p: usize, mat: &Materialized, pivots: Vec<Vec<LabelId>>) -> Vec<Group> {
    let mut by_pivot: BTreeMap<Vec<LabelId>, Vec<usize>> = BTreeMap::new();
    for (local, path) in pivots.into_iter().enumerate() {
        by_pivot.entry(path).or_default().push(local);
    }
    by_pivot
        .into_iter()
        .map(|(path, locals)| corpus.make_group(p, mat, &path, locals))
        .collect()
}

/// Groups every replacement by its own pivot path, largest group first.
pub fn one_shot_grouping(corpus: &Corpus) -> Vec<Group> {
    one_shot_with_stats(corpus).0
}

pub fn one_shot_with_stats(corpus: &Corpus) -> (Vec<Group>, SearchStats) {
    let mut stats = SearchStats::default();
    let mut groups = Vec::new();
    for p in 0..corpus.partitions.len() {
        let mut mat = corpus.materialize(p);
        let pivots = all_pivots(corpus, &mut mat, &mut stats);
        groups.extend(groups_of_partition(corpus, p, &mat, pivots));
    }
    groups.extend(corpus.unindexed.iter().map(|&n| corpus.unindexed_group(n)));
    sort_groups(&mut groups);
    (groups, stats)
}
