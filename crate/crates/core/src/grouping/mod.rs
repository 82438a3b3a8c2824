//! Grouping replacements by shared pivot programs.

pub mod incremental;
pub mod index;
pub mod oneshot;
pub mod search;
pub mod structure;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use hashbrown::HashMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::{Program, StringFunction};
use crate::graph::{
    build_position_index, for_each_label, ConstantScorer, FrequencyScorer, FrequencyTable,
    PositionIndex, UniformScorer, DEFAULT_MAX_CONSTANT_LEN,
};

pub use incremental::{IncrementalGrouper, IncrementalStats};
pub use index::{intersect, representatives, Entry, IndexedGraph, InvertedIndex, LabelId, LabelTable};
pub use oneshot::{one_shot_grouping, one_shot_with_stats};
pub use search::{search_pivot, SearchParams, SearchResult, SearchStats};
pub use structure::{structure_of, structure_partition, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScorerKind {
    Frequency,
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingConfig {
    pub max_path_len: Option<usize>,
    pub early_termination: bool,
    pub refine_by_structure: bool,
    pub max_value_len: usize,
    pub max_constant_len: usize,
    pub constant_score_exponent: f64,
    pub scorer: ScorerKind,
    /// Partitions larger than this estimate pivots on a sample.
    pub sample_threshold: Option<usize>,
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        GroupingConfig {
            max_path_len: Some(6),
            early_termination: true,
            refine_by_structure: true,
            max_value_len: 256,
            max_constant_len: DEFAULT_MAX_CONSTANT_LEN,
            constant_score_exponent: 0.5,
            scorer: ScorerKind::Frequency,
            sample_threshold: None,
            sample_size: 200,
            seed: 0,
        }
    }
}

impl GroupingConfig {
    pub(crate) fn search_params(&self) -> SearchParams {
        SearchParams {
            threshold: 0,
            max_len: self.max_path_len,
            early_termination: self.early_termination,
            upper_bound: None,
            implicit_self: false,
        }
    }
}

/// Replacements sharing a structure; grouped independently of each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub structure: Option<(Structure, Structure)>,
    pub members: Vec<usize>,
}

/// Graphs, labels and index of one partition.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub labels: LabelTable,
    pub graphs: Vec<IndexedGraph>,
    pub index: InvertedIndex,
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
    /// Set when pivots are estimated on a sample.
    pub in_sample: Option<Vec<bool>>,
}

impl Materialized {
    pub fn program(&self, path: &[LabelId]) -> Program {
        Program::new(path.iter().map(|&f| self.labels.label(f).clone()).collect())
    }

    pub fn search_params(&self, config: &GroupingConfig, local: usize) -> SearchParams {
        SearchParams {
            implicit_self: self.in_sample.as_ref().is_some_and(|s| !s[local]),
            ..config.search_params()
        }
    }
}

/// The replacements of one grouping run with their partitions.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub replacements: Vec<(String, String)>,
    pub partitions: Vec<Partition>,
    /// Replacements too long to index; each forms its own group.
    pub unindexed: Vec<usize>,
    /// `(partition, local id)` of every indexed replacement.
    pub location: Vec<Option<(usize, usize)>>,
    pub global: Arc<FrequencyTable>,
    pub config: GroupingConfig,
}

/// Distinct-string substring frequencies over every side of `pairs`.
pub fn global_frequencies(pairs: &[(String, String)], max_constant_len: usize) -> FrequencyTable {
    let chars: Vec<Vec<char>> = pairs
        .iter()
        .flat_map(|(l, r)| [l.chars().collect(), r.chars().collect()])
        .collect();
    FrequencyTable::build(chars.iter().map(|c| c.as_slice()), max_constant_len)
}

impl Corpus {
    pub fn new(replacements: Vec<(String, String)>, config: GroupingConfig) -> Self {
        let global = Arc::new(global_frequencies(&replacements, config.max_constant_len));
        Corpus::with_frequencies(replacements, config, global)
    }

    /// Reuses frequencies computed earlier, e.g. for a whole column session.
    pub fn with_frequencies(
        replacements: Vec<(String, String)>,
        config: GroupingConfig,
        global: Arc<FrequencyTable>,
    ) -> Self {
        let mut indexed = Vec::new();
        let mut unindexed = Vec::new();
        for (n, (l, r)) in replacements.iter().enumerate() {
            let (ll, rl) = (l.chars().count(), r.chars().count());
            if rl == 0 || ll > config.max_value_len || rl > config.max_value_len {
                unindexed.push(n);
            } else {
                indexed.push(n);
            }
        }
        let partitions: Vec<Partition> = if config.refine_by_structure {
            let pairs: Vec<(String, String)> =
                indexed.iter().map(|&n| replacements[n].clone()).collect();
            structure_partition(&pairs)
                .into_iter()
                .map(|(key, members)| Partition {
                    structure: Some(key),
                    members: members.into_iter().map(|m| indexed[m]).collect(),
                })
                .collect()
        } else if indexed.is_empty() {
            Vec::new()
        } else {
            vec![Partition {
                structure: None,
                members: indexed,
            }]
        };
        let mut location = vec![None; replacements.len()];
        for (p, part) in partitions.iter().enumerate() {
            for (local, &gid) in part.members.iter().enumerate() {
                location[gid] = Some((p, local));
            }
        }
        Corpus {
            replacements,
            partitions,
            unindexed,
            location,
            global,
            config,
        }
    }

    pub fn len(&self) -> usize {
        self.replacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replacements.is_empty()
    }

    fn scorer(&self, p: usize) -> Box<dyn ConstantScorer + '_> {
        match self.config.scorer {
            ScorerKind::Uniform => Box::new(UniformScorer),
            ScorerKind::Frequency => {
                let chars: Vec<Vec<char>> = self.partitions[p]
                    .members
                    .iter()
                    .flat_map(|&n| {
                        let (l, r) = &self.replacements[n];
                        [l.chars().collect(), r.chars().collect()]
                    })
                    .collect();
                let local =
                    FrequencyTable::build(chars.iter().map(|c| c.as_slice()), self.config.max_constant_len);
                Box::new(FrequencyScorer {
                    global: &self.global,
                    local,
                    exponent: self.config.constant_score_exponent,
                })
            }
        }
    }

    /// Builds graphs, the inverted index and bounds for partition `p`.
    pub fn materialize(&self, p: usize) -> Materialized {
        let part = &self.partitions[p];
        let scorer = self.scorer(p);
        let mut labels = LabelTable::default();
        let mut positions: HashMap<&str, PositionIndex> = HashMap::new();
        let mut raws: Vec<(u16, Vec<(u16, u16, LabelId)>)> = Vec::with_capacity(part.members.len());
        for &n in &part.members {
            let (s, t) = &self.replacements[n];
            let sc: Vec<char> = s.chars().collect();
            let tc: Vec<char> = t.chars().collect();
            let pidx = positions
                .entry(s.as_str())
                .or_insert_with(|| build_position_index(&sc, scorer.as_ref(), self.config.max_constant_len));
            let mut raw = Vec::new();
            for_each_label(&sc, &tc, pidx, scorer.as_ref(), |i, j, f: StringFunction| {
                raw.push((i as u16, j as u16, labels.intern(f)));
            })
            .expect("indexed replacements have a non-empty target");
            raws.push((tc.len() as u16 + 1, raw));
        }
        labels.finalize();
        let mut graphs: Vec<IndexedGraph> = raws
            .into_iter()
            .map(|(sink, raw)| IndexedGraph::new(sink, raw, labels.ranks()))
            .collect();
        let full = InvertedIndex::build(&graphs, labels.len(), |_| true);
        let keep = representatives(&full, labels.ranks());
        for graph in &mut graphs {
            graph.retain(&keep);
        }
        let n = graphs.len();
        let in_sample = match self.config.sample_threshold {
            Some(th) if n > th => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ (p as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let k = self.config.sample_size.clamp(1, n);
                let mut flags = vec![false; n];
                for i in rand::seq::index::sample(&mut rng, n, k).iter() {
                    flags[i] = true;
                }
                Some(flags)
            }
            _ => None,
        };
        let index = match &in_sample {
            Some(flags) => InvertedIndex::build(&graphs, labels.len(), |g| flags[g]),
            None => full,
        };
        let upper = graphs
            .iter()
            .enumerate()
            .map(|(g, graph)| {
                let implicit = u32::from(in_sample.as_ref().is_some_and(|s| !s[g]));
                upper_bound(graph, &index, implicit)
            })
            .collect();
        Materialized {
            labels,
            graphs,
            index,
            lower: vec![1; n],
            upper,
            in_sample,
        }
    }

    /// Group key: the pivot text, prefixed by the structure when refining.
    pub fn group_key(&self, partition: usize, pivot_text: &str) -> String {
        match &self.partitions[partition].structure {
            Some((l, r)) => format!("[{l}→{r}] {pivot_text}"),
            None => pivot_text.into(),
        }
    }

    pub(crate) fn unindexed_group(&self, n: usize) -> Group {
        let (l, r) = &self.replacements[n];
        let pivot = Program::new(vec![StringFunction::ConstantStr(r.clone())]);
        Group {
            key: format!("unindexed:{l}→{r}"),
            pivot_text: pivot.canonical_text(),
            pivot,
            members: vec![n],
            partition: None,
        }
    }

    pub(crate) fn make_group(&self, p: usize, mat: &Materialized, path: &[LabelId], mut locals: Vec<usize>) -> Group {
        let pivot = mat.program(path);
        let pivot_text = pivot.canonical_text();
        locals.sort_unstable();
        let members = locals.into_iter().map(|l| self.partitions[p].members[l]).collect();
        Group {
            key: self.group_key(p, &pivot_text),
            pivot,
            pivot_text,
            members,
            partition: Some(p),
        }
    }
}

/// `ub[k]` for every position `k` of `t` (index 0 unused): the largest
/// support of any label on an edge covering `k`.
pub fn cover_bounds(graph: &IndexedGraph, index: &InvertedIndex, implicit: u32) -> Vec<u32> {
    let sink = graph.sink as usize;
    let mut edge_max = vec![0u32; (sink + 1) * (sink + 1)];
    for (i, j, f) in graph.triples() {
        let c = index.count(f) + implicit;
        let slot = &mut edge_max[i as usize * (sink + 1) + j as usize];
        *slot = (*slot).max(c);
    }
    let mut ub = vec![0u32; sink];
    for i in 1..sink {
        for j in i + 1..=sink {
            let c = edge_max[i * (sink + 1) + j];
            if c == 0 {
                continue;
            }
            for slot in &mut ub[i..j] {
                *slot = (*slot).max(c);
            }
        }
    }
    ub
}

/// Tightest cover bound: every path crosses each position of `t` once.
pub fn upper_bound(graph: &IndexedGraph, index: &InvertedIndex, implicit: u32) -> u32 {
    cover_bounds(graph, index, implicit)[1..].iter().copied().min().unwrap_or(0)
}

/// A pivot program with every replacement whose own pivot it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub key: String,
    pub pivot: Program,
    pub pivot_text: String,
    /// Replacement ids, ascending.
    pub members: Vec<usize>,
    pub partition: Option<usize>,
}

impl Group {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Largest first, then pivot text, then key.
    pub fn order_key(&self) -> (Reverse<usize>, &str, &str) {
        (Reverse(self.size()), &self.pivot_text, &self.key)
    }
}

pub(crate) fn sort_groups(groups: &mut [Group]) {
    groups.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
}
