//! Interned labels, compact graphs and the inverted index over labels.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::dsl::StringFunction;

pub type LabelId = u32;

/// `<graph, i, j>`: edge `(i, j)` of `graph` carries the label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub graph: u32,
    pub i: u16,
    pub j: u16,
}

impl Entry {
    pub fn new(graph: u32, i: u16, j: u16) -> Self {
        Entry { graph, i, j }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LabelTable {
    ids: HashMap<StringFunction, LabelId>,
    labels: Vec<StringFunction>,
    texts: Vec<String>,
    rank: Vec<u32>,
}

impl LabelTable {
    pub fn intern(&mut self, f: StringFunction) -> LabelId {
        if let Some(&id) = self.ids.get(&f) {
            return id;
        }
        let id = self.labels.len() as LabelId;
        self.labels.push(f.clone());
        self.ids.insert(f, id);
        id
    }

    pub fn lookup(&self, f: &StringFunction) -> Option<LabelId> {
        self.ids.get(f).copied()
    }

    /// Computes texts and the canonical rank of every interned label.
    pub fn finalize(&mut self) {
        self.texts = self.labels.iter().map(|f| alloc::format!("{f}")).collect();
        let mut order: Vec<LabelId> = (0..self.labels.len() as LabelId).collect();
        order.sort_by(|&a, &b| {
            let (fa, fb) = (&self.labels[a as usize], &self.labels[b as usize]);
            fa.kind_rank()
                .cmp(&fb.kind_rank())
                .then_with(|| self.texts[a as usize].cmp(&self.texts[b as usize]))
        });
        self.rank = vec![0; self.labels.len()];
        for (r, id) in order.into_iter().enumerate() {
            self.rank[id as usize] = r as u32;
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: LabelId) -> &StringFunction {
        &self.labels[id as usize]
    }

    pub fn text(&self, id: LabelId) -> &str {
        &self.texts[id as usize]
    }

    pub fn rank(&self, id: LabelId) -> u32 {
        self.rank[id as usize]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }
}

/// A transformation graph with interned labels. Out-edges of each node are
/// ordered by label rank, so programs are explored in the same order in
/// every graph.
#[derive(Clone, Debug)]
pub struct IndexedGraph {
    pub sink: u16,
    offsets: Vec<u32>,
    edges: Vec<(LabelId, u16)>,
}

impl IndexedGraph {
    /// `raw` holds `(i, j, label)` triples with 1-based nodes.
    pub fn new(sink: u16, mut raw: Vec<(u16, u16, LabelId)>, rank: &[u32]) -> Self {
        raw.sort_unstable_by_key(|&(i, j, f)| (i, rank[f as usize], j));
        raw.dedup();
        let mut offsets = vec![0u32; sink as usize + 2];
        for &(i, _, _) in &raw {
            offsets[i as usize + 1] += 1;
        }
        for k in 1..offsets.len() {
            offsets[k] += offsets[k - 1];
        }
        let edges = raw.into_iter().map(|(_, j, f)| (f, j)).collect();
        IndexedGraph {
            sink,
            offsets,
            edges,
        }
    }

    pub fn out(&self, i: u16) -> &[(LabelId, u16)] {
        let i = i as usize;
        &self.edges[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Every `(i, j, label)`.
    pub fn triples(&self) -> impl Iterator<Item = (u16, u16, LabelId)> + '_ {
        (1..self.sink).flat_map(move |i| self.out(i).iter().map(move |&(f, j)| (i, j, f)))
    }

    pub fn label_count(&self) -> usize {
        self.edges.len()
    }

    /// Drops every label not marked in `keep`.
    pub fn retain(&mut self, keep: &[bool]) {
        let mut offsets = vec![0u32; self.offsets.len()];
        let mut edges = Vec::with_capacity(self.edges.len());
        for i in 1..self.sink {
            for &(f, j) in self.out(i) {
                if keep[f as usize] {
                    edges.push((f, j));
                }
            }
            offsets[i as usize + 1] = edges.len() as u32;
        }
        for k in self.sink as usize + 1..offsets.len() {
            offsets[k] = edges.len() as u32;
        }
        self.offsets = offsets;
        self.edges = edges;
    }
}

/// Marks the lowest-ranked label of each set of labels with identical
/// posting lists. Labels with equal lists are interchangeable on every
/// path, and the lowest-ranked one is explored first.
pub fn representatives(index: &InvertedIndex, rank: &[u32]) -> Vec<bool> {
    let mut order: Vec<LabelId> = (0..rank.len() as LabelId).collect();
    order.sort_unstable_by_key(|&f| rank[f as usize]);
    let mut seen: HashMap<&[Entry], ()> = HashMap::new();
    let mut keep = vec![false; rank.len()];
    for f in order {
        let list = index.list(f);
        if !list.is_empty() && seen.insert(list, ()).is_none() {
            keep[f as usize] = true;
        }
    }
    keep
}

#[derive(Clone, Debug, Default)]
pub struct InvertedIndex {
    lists: Vec<Vec<Entry>>,
    counts: Vec<u32>,
    roots: Vec<Vec<Entry>>,
    total: u32,
}

impl InvertedIndex {
    /// Indexes the graphs selected by `include`; graph ids are positions in
    /// `graphs`.
    pub fn build(graphs: &[IndexedGraph], label_count: usize, include: impl Fn(usize) -> bool) -> Self {
        let mut lists: Vec<Vec<Entry>> = vec![Vec::new(); label_count];
        let mut total = 0;
        for (g, graph) in graphs.iter().enumerate() {
            if !include(g) {
                continue;
            }
            total += 1;
            for (i, j, f) in graph.triples() {
                lists[f as usize].push(Entry::new(g as u32, i, j));
            }
        }
        let mut counts = Vec::with_capacity(label_count);
        let mut roots = Vec::with_capacity(label_count);
        for list in lists.iter_mut() {
            list.sort_unstable();
            counts.push(graph_count(list));
            roots.push(list.iter().copied().filter(|e| e.i == 1).collect());
        }
        InvertedIndex {
            lists,
            counts,
            roots,
            total,
        }
    }

    pub fn list(&self, f: LabelId) -> &[Entry] {
        &self.lists[f as usize]
    }

    /// Entries of `f` that start at node 1.
    pub fn roots(&self, f: LabelId) -> &[Entry] {
        &self.roots[f as usize]
    }

    /// Number of distinct graphs in the list of `f`.
    pub fn count(&self, f: LabelId) -> u32 {
        self.counts[f as usize]
    }

    /// Number of indexed graphs.
    pub fn total(&self) -> u32 {
        self.total
    }
}

/// Distinct graphs in a list sorted by graph.
pub fn graph_count(list: &[Entry]) -> u32 {
    let mut n = 0;
    let mut last = u32::MAX;
    for e in list {
        if e.graph != last {
            n += 1;
            last = e.graph;
        }
    }
    n
}

fn gallop(list: &[Entry], from: usize, key: (u32, u16)) -> usize {
    let below = |e: &Entry| (e.graph, e.i) < key;
    let mut lo = from;
    let mut step = 1;
    let mut hi = from;
    while hi < list.len() && below(&list[hi]) {
        lo = hi + 1;
        hi += step;
        step *= 2;
    }
    let hi = hi.min(list.len());
    lo + list[lo..hi].partition_point(below)
}

/// Joins path entries with the list of the next label: `<G, i, m>` and
/// `<G, m, j>` produce `<G, i, j>`. Output is sorted and deduplicated.
pub fn intersect(path: &[Entry], next: &[Entry], out: &mut Vec<Entry>) {
    out.clear();
    let mut pos = 0;
    let mut sorted = true;
    let mut prev = (0, 0);
    for e in path {
        let key = (e.graph, e.j);
        if key < prev {
            pos = 0;
        }
        prev = key;
        pos = gallop(next, pos, key);
        let mut p = pos;
        while p < next.len() && next[p].graph == e.graph && next[p].i == e.j {
            let joined = Entry::new(e.graph, e.i, next[p].j);
            if let Some(last) = out.last() {
                if *last >= joined {
                    sorted = false;
                }
            }
            out.push(joined);
            p += 1;
        }
    }
    if !sorted {
        // Only runs within one graph can be out of order.
        let mut start = 0;
        while start < out.len() {
            let g = out[start].graph;
            let end = start + out[start..].partition_point(|e| e.graph == g);
            out[start..end].sort_unstable();
            start = end;
        }
        out.dedup();
    }
}
