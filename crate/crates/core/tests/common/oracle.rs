use std::collections::{BTreeSet, HashMap};

use consol_core::dsl::StringFunction;
use consol_core::graph::{build_graph, TransformationGraph, UniformScorer, DEFAULT_MAX_CONSTANT_LEN};

type State = (usize, Vec<(usize, usize)>);

/// Best support over every path of graph `g`, walking all graphs in
/// lockstep along the same label sequence.
struct Oracle<'a> {
    graphs: &'a [TransformationGraph],
    g: usize,
    memo: HashMap<State, u32>,
}

impl Oracle<'_> {
    fn step(&self, from: &[(usize, usize)], f: &StringFunction) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(h, n) in from {
            let graph = &self.graphs[h];
            for m in n + 1..=graph.sink() {
                if graph.contains(n, m, f) {
                    out.insert((h, m));
                }
            }
        }
        out.into_iter().collect()
    }

    fn best(&mut self, node: usize, others: Vec<(usize, usize)>) -> u32 {
        let sink = self.graphs[self.g].sink();
        if node == sink {
            let done: BTreeSet<usize> = others
                .iter()
                .filter(|&&(h, n)| n == self.graphs[h].sink())
                .map(|&(h, _)| h)
                .collect();
            return done.len() as u32;
        }
        let key = (node, others);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = 0;
        for j in node + 1..=sink {
            for f in self.graphs[self.g].labels(node, j).to_vec() {
                let next = self.step(&key.1, &f);
                best = best.max(self.best(j, next));
            }
        }
        self.memo.insert(key, best);
        best
    }
}

/// Largest support of any path of each pair's graph.
pub fn oracle_supports(pairs: &[(String, String)]) -> Vec<u32> {
    let graphs: Vec<TransformationGraph> = pairs
        .iter()
        .map(|(s, t)| build_graph(s, t, &UniformScorer, DEFAULT_MAX_CONSTANT_LEN).unwrap())
        .collect();
    (0..graphs.len())
        .map(|g| {
            let start = (0..graphs.len()).map(|h| (h, 1)).collect();
            Oracle { graphs: &graphs, g, memo: HashMap::new() }.best(1, start)
        })
        .collect()
}

