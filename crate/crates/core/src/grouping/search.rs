//! Depth-first pivot path search with local and global thresholds.

use alloc::boxed::Box;
use alloc::vec::Vec;
use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

use super::index::{graph_count, intersect, Entry, IndexedGraph, InvertedIndex, LabelId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchParams {
    /// Only paths supported by more graphs than this are reported.
    pub threshold: u32,
    pub max_len: Option<usize>,
    pub early_termination: bool,
    /// Stop as soon as a path reaches this support.
    pub upper_bound: Option<u32>,
    /// The searched graph is not in the index but counts towards support.
    pub implicit_self: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            threshold: 0,
            max_len: None,
            early_termination: true,
            upper_bound: None,
            implicit_self: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub path: Vec<LabelId>,
    pub support: u32,
    /// Graphs containing the path, excluding an implicit self.
    pub members: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub searches: u64,
    pub extensions: u64,
}

#[derive(Clone, Copy)]
struct Child {
    count: u32,
    /// Position among the node's out-edges, which are in label-rank order.
    rank: usize,
    f: LabelId,
    j: u16,
    slot: usize,
}

impl PartialEq for Child {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Child {}

impl PartialOrd for Child {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Larger count first, then lower rank.
impl Ord for Child {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count, Reverse(self.rank)).cmp(&(other.count, Reverse(other.rank)))
    }
}

#[derive(Default)]
struct Level {
    pool: Vec<Vec<Entry>>,
    pending: Vec<Child>,
    ready: BinaryHeap<Child>,
}

struct Dfs<'a> {
    graphs: &'a [IndexedGraph],
    index: &'a InvertedIndex,
    lower: &'a mut [u32],
    g: u32,
    params: SearchParams,
    implicit: u32,
    best: u32,
    best_path: Vec<LabelId>,
    best_members: Vec<u32>,
    path: Vec<LabelId>,
    levels: Vec<Level>,
    stop: bool,
    stats: &'a mut SearchStats,
    seen: Vec<Vec<Seen>>,
    stored: usize,
    key: Vec<u64>,
    /// Per node, the best bottleneck label count over paths to the sink.
    reach: Vec<u32>,
    /// Per node, the fewest edges to the sink.
    hops: Vec<u16>,
}

impl Dfs<'_> {
    fn promising(&self, count: u32) -> bool {
        !self.params.early_termination || (count > self.best && count >= self.lower[self.g as usize])
    }

    fn visit(&mut self, node: u16, depth: usize, parent: Option<&[Entry]>, count: u32) {
        let graphs = self.graphs;
        let index = self.index;
        let graph = &graphs[self.g as usize];
        if self.levels.len() <= depth {
            self.levels.push(Level::default());
        }
        let mut level = core::mem::take(&mut self.levels[depth]);
        level.pending.clear();
        level.ready.clear();
        let last = self.params.max_len.is_some_and(|m| depth + 1 >= m);
        let room = self.params.max_len.map_or(usize::from(u16::MAX), |m| m - depth - 1);
        for (rank, &(f, j)) in graph.out(node).iter().enumerate() {
            if usize::from(self.hops[usize::from(j)]) > room {
                continue;
            }
            let cap = count.min(index.count(f) + self.implicit);
            if self.promising(cap.min(self.reach[usize::from(j)])) {
                level.pending.push(Child { count: cap, rank, f, j, slot: 0 });
            }
        }
        level.pending.sort_by_key(|c| (Reverse(c.count), c.rank));

        // Children are intersected lazily: a computed child is visited once
        // no pending one can beat it.
        let mut next = 0;
        let mut slots = 0;
        while !self.stop {
            let take_ready = match (level.ready.peek(), level.pending.get(next)) {
                (None, None) => break,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(r), Some(p)) => (r.count, Reverse(r.rank)) > (p.count, Reverse(p.rank)),
            };
            if !take_ready {
                let mut child = level.pending[next];
                next += 1;
                if !self.promising(child.count.min(self.reach[usize::from(child.j)])) {
                    continue;
                }
                self.stats.extensions += 1;
                if level.pool.len() <= slots {
                    level.pool.push(Vec::new());
                }
                let buf = &mut level.pool[slots];
                match parent {
                    None => {
                        buf.clear();
                        buf.extend_from_slice(index.roots(child.f));
                    }
                    Some(p) => intersect(p, index.list(child.f), buf),
                }
                child.count = graph_count(buf) + self.implicit;
                child.slot = slots;
                slots += 1;
                if self.promising(child.count.min(self.reach[usize::from(child.j)])) {
                    level.ready.push(child);
                }
                continue;
            }
            let child = level.ready.pop().expect("peeked");
            if !self.promising(child.count.min(self.reach[usize::from(child.j)])) {
                continue;
            }
            let list = level.pool[child.slot].as_slice();
            if child.j == graph.sink {
                self.complete(child.f, list);
            } else if !last && (!self.params.early_termination || self.first_visit(child.j, depth + 1, list)) {
                self.path.push(child.f);
                self.visit(child.j, depth + 1, Some(list), child.count);
                self.path.pop();
            }
        }
        self.levels[depth] = level;
    }

    fn complete(&mut self, f: LabelId, list: &[Entry]) {
        let graphs = self.graphs;
        let members: Vec<u32> = list
            .iter()
            .filter(|e| e.j == graphs[e.graph as usize].sink)
            .map(|e| e.graph)
            .collect();
        let support = members.len() as u32 + self.implicit;
        if self.params.early_termination {
            let shared = support - self.implicit;
            for &m in &members {
                let lo = &mut self.lower[m as usize];
                *lo = (*lo).max(shared);
            }
            let own = &mut self.lower[self.g as usize];
            *own = (*own).max(support);
        }
        if support > self.best {
            self.best = support;
            self.best_path.clear();
            self.best_path.extend_from_slice(&self.path);
            self.best_path.push(f);
            self.best_members = members;
            if self.params.upper_bound.is_some_and(|ub| self.best >= ub) {
                self.stop = true;
            }
        }
    }
}

impl Dfs<'_> {
    /// Records reaching `node` with the graphs and nodes in `list`. A state
    /// covered by one seen before at no greater depth has nothing better to
    /// offer: every completion of it completes the earlier state with at
    /// least the same support.
    fn first_visit(&mut self, node: u16, depth: usize, list: &[Entry]) -> bool {
        self.key.clear();
        self.key.extend(list.iter().map(|e| (u64::from(e.graph) << 16) | u64::from(e.j)));
        self.key.sort_unstable();
        self.key.dedup();
        let sig = self.key.iter().fold(0u64, |acc, k| acc | signature_bit(*k));
        let states = &mut self.seen[usize::from(node)];
        for st in states.iter_mut() {
            if sig & !st.sig != 0 || st.entries.len() < self.key.len() || !is_subset(&self.key, &st.entries) {
                continue;
            }
            if st.depth <= depth {
                return false;
            }
            if st.entries.len() == self.key.len() {
                st.depth = depth;
                return true;
            }
        }
        if self.stored < MAX_SEEN && states.len() < MAX_PER_NODE {
            self.stored += self.key.len() + 1;
            states.push(Seen {
                depth,
                sig,
                entries: self.key.clone().into_boxed_slice(),
            });
        }
        true
    }
}

struct Seen {
    depth: usize,
    sig: u64,
    entries: Box<[u64]>,
}

fn signature_bit(key: u64) -> u64 {
    1 << (key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 58)
}

/// Both sorted.
fn is_subset(small: &[u64], large: &[u64]) -> bool {
    let mut rest = large;
    for &x in small {
        match rest.binary_search(&x) {
            Ok(i) => rest = &rest[i + 1..],
            Err(_) => return false,
        }
    }
    true
}

const MAX_PER_NODE: usize = 256;

fn suffix_bounds(graph: &IndexedGraph, index: &InvertedIndex, implicit: u32) -> Vec<u32> {
    let sink = graph.sink;
    let mut reach = alloc::vec![0u32; usize::from(sink) + 1];
    reach[usize::from(sink)] = u32::MAX;
    for i in (1..sink).rev() {
        reach[usize::from(i)] = graph
            .out(i)
            .iter()
            .map(|&(f, j)| (index.count(f) + implicit).min(reach[usize::from(j)]))
            .max()
            .unwrap_or(0);
    }
    reach
}

fn hops_to_sink(graph: &IndexedGraph) -> Vec<u16> {
    let sink = graph.sink;
    let mut hops = alloc::vec![u16::MAX; usize::from(sink) + 1];
    hops[usize::from(sink)] = 0;
    for i in (1..sink).rev() {
        hops[usize::from(i)] = graph
            .out(i)
            .iter()
            .map(|&(_, j)| hops[usize::from(j)].saturating_add(1))
            .min()
            .unwrap_or(u16::MAX);
    }
    hops
}
const MAX_SEEN: usize = 1 << 24;

/// Finds the first path from node 1 to the sink of graph `g` with the
/// largest support above `params.threshold`. Extensions are tried in
/// descending order of remaining support, ties in label-rank order.
///
/// `lower` holds per-graph lower bounds on pivot support; with early
/// termination they prune the search and are raised for every graph sharing
/// a complete path.
pub fn search_pivot(
    g: u32,
    graphs: &[IndexedGraph],
    index: &InvertedIndex,
    lower: &mut [u32],
    params: SearchParams,
    stats: &mut SearchStats,
) -> Option<SearchResult> {
    stats.searches += 1;
    let implicit = u32::from(params.implicit_self);
    let total = index.total() + implicit;
    let mut dfs = Dfs {
        graphs,
        index,
        lower,
        g,
        params,
        implicit,
        best: params.threshold,
        best_path: Vec::new(),
        best_members: Vec::new(),
        path: Vec::new(),
        levels: Vec::new(),
        stop: false,
        stats,
        seen: (0..=graphs[g as usize].sink).map(|_| Vec::new()).collect(),
        stored: 0,
        key: Vec::new(),
        reach: suffix_bounds(&graphs[g as usize], index, implicit),
        hops: hops_to_sink(&graphs[g as usize]),
    };
    if params.upper_bound.is_some_and(|ub| ub <= params.threshold) {
        return None;
    }
    dfs.visit(1, 0, None, total);
    if dfs.best_path.is_empty() {
        return None;
    }
    Some(SearchResult {
        path: dfs.best_path,
        support: dfs.best,
        members: dfs.best_members,
    })
}
