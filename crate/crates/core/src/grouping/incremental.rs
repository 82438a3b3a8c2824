//! Largest-group-first generation with per-graph support bounds.
//!
//! Partitions are materialized lazily. Within one grouper the index is never
//! shrunk: emitted groups are only retired from the output, so the groups
//! produced are exactly the one-shot grouping of the corpus, in
//! non-increasing size. Equal-size groups come out in discovery order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashMap;

use super::oneshot::{all_pivots, groups_of_partition};
use super::{search_pivot, Corpus, Group, LabelId, Materialized, SearchResult, SearchStats};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IncrementalStats {
    /// Graphs taken from the bound queue and searched.
    pub visited: u64,
    pub materialized: usize,
    pub search: SearchStats,
}

type ReadyKey = (Reverse<usize>, String, String);

pub struct IncrementalGrouper {
    corpus: Corpus,
    mats: Vec<Option<Materialized>>,
    /// Unresolved graphs by descending upper bound, then id.
    queue: BTreeSet<(Reverse<u32>, usize)>,
    up: Vec<u32>,
    resolved: Vec<bool>,
    pivot_ids: HashMap<(usize, Vec<LabelId>), usize>,
    pivot_members: Vec<Vec<usize>>,
    ready: BTreeMap<ReadyKey, Group>,
    min_group_size: usize,
    stats: IncrementalStats,
}

impl IncrementalGrouper {
    pub fn new(corpus: Corpus, min_group_size: usize) -> Self {
        let n = corpus.len();
        let mut up = vec![0; n];
        let mut queue = BTreeSet::new();
        for part in &corpus.partitions {
            for &gid in &part.members {
                up[gid] = part.members.len() as u32;
                queue.insert((Reverse(up[gid]), gid));
            }
        }
        let mut ready = BTreeMap::new();
        for &gid in &corpus.unindexed {
            let g = corpus.unindexed_group(gid);
            ready.insert(ready_key(&g), g);
        }
        IncrementalGrouper {
            mats: (0..corpus.partitions.len()).map(|_| None).collect(),
            corpus,
            queue,
            up,
            resolved: vec![false; n],
            pivot_ids: HashMap::new(),
            pivot_members: Vec::new(),
            ready,
            min_group_size: min_group_size.max(1),
            stats: IncrementalStats::default(),
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn stats(&self) -> IncrementalStats {
        self.stats
    }

    /// Current upper bound on the pivot support of replacement `gid`.
    pub fn upper_bound(&self, gid: usize) -> u32 {
        self.up[gid]
    }

    pub fn materialized(&self, partition: usize) -> Option<&Materialized> {
        self.mats[partition].as_ref()
    }

    fn materialize(&mut self, p: usize) {
        let mut mat = self.corpus.materialize(p);
        self.stats.materialized += 1;
        let members = self.corpus.partitions[p].members.clone();
        for &gid in &members {
            self.queue.remove(&(Reverse(self.up[gid]), gid));
        }
        if mat.in_sample.is_some() {
            let pivots = all_pivots(&self.corpus, &mut mat, &mut self.stats.search);
            for g in groups_of_partition(&self.corpus, p, &mat, pivots) {
                self.ready.insert(ready_key(&g), g);
            }
            for &gid in &members {
                self.resolved[gid] = true;
            }
        } else {
            for (local, &gid) in members.iter().enumerate() {
                self.up[gid] = mat.upper[local];
                self.queue.insert((Reverse(self.up[gid]), gid));
            }
        }
        self.mats[p] = Some(mat);
    }

    fn search(&mut self, p: usize, local: usize, threshold: u32) -> Option<SearchResult> {
        let gid = self.corpus.partitions[p].members[local];
        let mat = self.mats[p].as_mut().expect("materialized");
        let mut params = mat.search_params(&self.corpus.config, local);
        params.threshold = threshold;
        params.upper_bound = Some(self.up[gid]);
        search_pivot(
            local as u32,
            &mat.graphs,
            &mat.index,
            &mut mat.lower,
            params,
            &mut self.stats.search,
        )
    }

    fn assign(&mut self, p: usize, local: usize, path: Vec<LabelId>) -> (usize, bool) {
        let gid = self.corpus.partitions[p].members[local];
        self.resolved[gid] = true;
        let next = self.pivot_members.len();
        let (pid, fresh) = match self.pivot_ids.get(&(p, path.clone())) {
            Some(&pid) => (pid, false),
            None => {
                self.pivot_ids.insert((p, path), next);
                self.pivot_members.push(Vec::new());
                (next, true)
            }
        };
        self.pivot_members[pid].push(local);
        (pid, fresh)
    }

    /// Resolves the pivot of every graph sharing a newly found pivot, so the
    /// groups of all pivots found become complete.
    fn resolve(&mut self, p: usize, local: usize, found: SearchResult) {
        let mut fresh_paths = Vec::new();
        let (pid, _) = self.assign(p, local, found.path.clone());
        fresh_paths.push((pid, found.path));
        let mut work = vec![(found.members, found.support)];
        while let Some((members, support)) = work.pop() {
            for h in members {
                let gid = self.corpus.partitions[p].members[h as usize];
                if self.resolved[gid] {
                    continue;
                }
                self.queue.remove(&(Reverse(self.up[gid]), gid));
                let r = self
                    .search(p, h as usize, support - 1)
                    .expect("a graph sharing a path has a pivot at least as supported");
                let (pid, fresh) = self.assign(p, h as usize, r.path.clone());
                if fresh {
                    fresh_paths.push((pid, r.path));
                    work.push((r.members, r.support));
                }
            }
        }
        let mat = self.mats[p].as_ref().expect("materialized");
        for (pid, path) in fresh_paths {
            let locals = core::mem::take(&mut self.pivot_members[pid]);
            let g = self.corpus.make_group(p, mat, &path, locals);
            self.ready.insert(ready_key(&g), g);
        }
    }

    /// The largest group not yet returned, or `None` when the remaining
    /// groups are exhausted or smaller than the minimum size.
    pub fn next_group(&mut self) -> Option<Group> {
        loop {
            let tau = self.ready.keys().next().map_or(0, |k| k.0 .0 as u32);
            let Some(&(Reverse(up), gid)) = self.queue.iter().next() else {
                break;
            };
            if tau >= up {
                break;
            }
            let (p, local) = self.corpus.location[gid].expect("queued graphs are indexed");
            if self.mats[p].is_none() {
                self.materialize(p);
                continue;
            }
            self.queue.remove(&(Reverse(up), gid));
            self.stats.visited += 1;
            match self.search(p, local, tau) {
                Some(found) => self.resolve(p, local, found),
                None => {
                    self.up[gid] = tau;
                    self.queue.insert((Reverse(tau), gid));
                }
            }
        }
        let key = self.ready.keys().next()?.clone();
        if key.0 .0 < self.min_group_size {
            return None;
        }
        self.ready.remove(&key)
    }
}

impl Iterator for IncrementalGrouper {
    type Item = Group;

    fn next(&mut self) -> Option<Group> {
        self.next_group()
    }
}

fn ready_key(g: &Group) -> ReadyKey {
    (Reverse(g.size()), g.pivot_text.clone(), g.key.clone())
}
