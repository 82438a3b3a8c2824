//! Transformation graphs: every program consistent with `s -> t` is a path
//! from node 1 to node `|t| + 1`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use hashbrown::{HashMap, HashSet};

use crate::dsl::{literal_matches, Dir, PositionFunction, StringFunction, Term, REGEX_TERMS};
use crate::{Error, Result};

/// Substrings longer than this are not tracked in frequency tables and are
/// never used as constant-string terms in `MatchPos`.
pub const DEFAULT_MAX_CONSTANT_LEN: usize = 10;

/// Scores constant strings; higher is preferred.
pub trait ConstantScorer {
    fn score(&self, text: &[char]) -> f64;
}

/// Every constant scores the same, so nothing is pruned by score.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformScorer;

impl ConstantScorer for UniformScorer {
    fn score(&self, _text: &[char]) -> f64 {
        1.0
    }
}

/// `freq_struc / freq_global ^ exponent`.
pub fn score_constant(freq_struc: u32, freq_global: u32, exponent: f64) -> Result<f64> {
    if freq_global < freq_struc {
        return Err(Error::InvalidFrequency {
            struc: freq_struc,
            global: freq_global,
        });
    }
    if freq_struc == 0 {
        return Ok(0.0);
    }
    let denom = if exponent == 0.5 {
        libm::sqrt(freq_global as f64)
    } else {
        libm::pow(freq_global as f64, exponent)
    };
    Ok(freq_struc as f64 / denom)
}

/// Number of distinct strings containing each substring up to `max_len` chars.
#[derive(Clone, Debug, Default)]
pub struct FrequencyTable {
    counts: HashMap<Box<[char]>, u32>,
    max_len: usize,
}

impl FrequencyTable {
    pub fn build<'a, I>(strings: I, max_len: usize) -> Self
    where
        I: IntoIterator<Item = &'a [char]>,
    {
        let mut counts: HashMap<Box<[char]>, u32> = HashMap::new();
        let mut seen_strings: HashSet<&'a [char]> = HashSet::new();
        let mut local: HashSet<&'a [char]> = HashSet::new();
        for s in strings {
            if !seen_strings.insert(s) {
                continue;
            }
            local.clear();
            for x in 0..s.len() {
                for len in 1..=max_len.min(s.len() - x) {
                    local.insert(&s[x..x + len]);
                }
            }
            for sub in local.iter() {
                *counts.entry_ref(*sub).or_insert(0) += 1;
            }
        }
        FrequencyTable { counts, max_len }
    }

    pub fn get(&self, text: &[char]) -> u32 {
        self.counts.get(text).copied().unwrap_or(0)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }
}

/// Prefers constants frequent in the structure group but rare overall.
pub struct FrequencyScorer<'a> {
    pub global: &'a FrequencyTable,
    pub local: FrequencyTable,
    pub exponent: f64,
}

impl ConstantScorer for FrequencyScorer<'_> {
    fn score(&self, text: &[char]) -> f64 {
        if text.len() > self.local.max_len() {
            return 0.0;
        }
        score_constant(self.local.get(text), self.global.get(text), self.exponent).unwrap_or(0.0)
    }
}

/// Position functions locating each position of an input string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionIndex {
    /// `at[x]` for `x` in `1..=|s| + 1`; `at[0]` is unused.
    pub at: Vec<Vec<PositionFunction>>,
}

impl PositionIndex {
    pub fn get(&self, x: usize) -> &[PositionFunction] {
        &self.at[x]
    }
}

fn better_constant(a: (f64, &[char]), b: (f64, &[char])) -> bool {
    match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => match a.1.len().cmp(&b.1.len()) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => a.1 < b.1,
        },
    }
}

fn push_match_pos(at: &mut [Vec<PositionFunction>], term: &Term, ms: &[(usize, usize)]) {
    let m = ms.len() as i32;
    for (idx, &(x, y)) in ms.iter().enumerate() {
        let k = idx as i32 + 1;
        for kk in [k, k - m - 1] {
            at[x + 1].push(PositionFunction::MatchPos(term.clone(), kk, Dir::B));
            at[y + 1].push(PositionFunction::MatchPos(term.clone(), kk, Dir::E));
        }
    }
}

pub fn build_position_index(
    s: &[char],
    scorer: &dyn ConstantScorer,
    max_constant_len: usize,
) -> PositionIndex {
    let n = s.len();
    let mut at: Vec<Vec<PositionFunction>> = vec![Vec::new(); n + 2];
    for k in 1..=n + 1 {
        at[k].push(PositionFunction::ConstPos(k as i32));
        at[k].push(PositionFunction::ConstPos(k as i32 - n as i32 - 2));
    }
    for term in REGEX_TERMS.iter() {
        let ms = term.matches(s);
        push_match_pos(&mut at, term, &ms);
    }

    // One constant-string term per position: the best scoring one with a
    // match boundary there.
    let mut best: Vec<Option<(f64, &[char])>> = vec![None; n + 2];
    let mut distinct: HashSet<&[char]> = HashSet::new();
    for x in 0..n {
        for len in 1..=max_constant_len.min(n - x) {
            let sub = &s[x..x + len];
            if !distinct.insert(sub) {
                continue;
            }
            let score = scorer.score(sub);
            for (a, b) in literal_matches(sub, s) {
                for p in [a + 1, b + 1] {
                    let replace = match best[p] {
                        None => true,
                        Some(cur) => better_constant((score, sub), cur),
                    };
                    if replace {
                        best[p] = Some((score, sub));
                    }
                }
            }
        }
    }
    for p in 1..=n + 1 {
        let Some((_, sub)) = best[p] else { continue };
        let ms = literal_matches(sub, s);
        let term = Term::ConstantString(sub.iter().collect());
        let m = ms.len() as i32;
        for (idx, &(x, y)) in ms.iter().enumerate() {
            let k = idx as i32 + 1;
            for kk in [k, k - m - 1] {
                if x + 1 == p {
                    at[p].push(PositionFunction::MatchPos(term.clone(), kk, Dir::B));
                }
                if y + 1 == p {
                    at[p].push(PositionFunction::MatchPos(term.clone(), kk, Dir::E));
                }
            }
        }
    }
    for v in at.iter_mut() {
        v.sort();
        v.dedup();
    }
    PositionIndex { at }
}

/// Streams every label of the graph of `s -> t` as `(i, j, label)` with
/// 1-based nodes. Each label is reported at most once per edge.
pub fn for_each_label<F>(
    s: &[char],
    t: &[char],
    positions: &PositionIndex,
    scorer: &dyn ConstantScorer,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(usize, usize, StringFunction),
{
    if t.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let n = s.len();
    let m = t.len();

    // lce[x][i]: longest common prefix of s[x..] and t[i..]
    let w = m + 1;
    let mut lce = vec![0u16; (n + 1) * w];
    for x in (0..n).rev() {
        for i in (0..m).rev() {
            if s[x] == t[i] {
                lce[x * w + i] = lce[(x + 1) * w + i + 1] + 1;
            }
        }
    }
    // lcs[y][j]: longest common suffix of s[..y] and t[..j]
    let mut lcs = vec![0u16; (n + 1) * w];
    for y in 1..=n {
        for j in 1..=m {
            if s[y - 1] == t[j - 1] {
                lcs[y * w + j] = lcs[(y - 1) * w + j - 1] + 1;
            }
        }
    }

    // Constant scores for every substring of t and the best containing
    // extension on each side.
    let mut sc = vec![0f64; w * w];
    for i in 0..m {
        for j in i + 1..=m {
            sc[i * w + j] = scorer.score(&t[i..j]);
        }
    }
    let mut left = vec![f64::NEG_INFINITY; m + 1];
    for i in 0..m {
        let mut right = f64::NEG_INFINITY;
        for j in (i + 1..=m).rev() {
            let own = sc[i * w + j];
            if left[j] <= own && right <= own {
                emit(i + 1, j + 1, StringFunction::ConstantStr(t[i..j].iter().collect()));
            }
            right = right.max(own);
        }
        for j in i + 1..=m {
            left[j] = left[j].max(sc[i * w + j]);
        }
    }

    for i in 0..m {
        for x in 0..n {
            let common = lce[x * w + i] as usize;
            for len in 1..=common {
                for f in positions.get(x + 1) {
                    for g in positions.get(x + len + 1) {
                        emit(i + 1, i + len + 1, StringFunction::SubStr(f.clone(), g.clone()));
                    }
                }
            }
        }
    }

    for term in REGEX_TERMS.iter() {
        let ms = term.matches(s);
        let cnt = ms.len() as i32;
        for (idx, &(x, y)) in ms.iter().enumerate() {
            let k = idx as i32 + 1;
            for i in 0..m {
                let len = (lce[x * w + i] as usize).min(y - x);
                if len > 0 {
                    for kk in [k, k - cnt - 1] {
                        emit(i + 1, i + len + 1, StringFunction::Prefix(term.clone(), kk));
                    }
                }
            }
            for j in 1..=m {
                let len = (lcs[y * w + j] as usize).min(y - x);
                if len > 0 {
                    for kk in [k, k - cnt - 1] {
                        emit(j - len + 1, j + 1, StringFunction::Suffix(term.clone(), kk));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Orders labels by kind (SubStr, Prefix, Suffix, ConstantStr), then text.
pub fn label_order(a: &StringFunction, b: &StringFunction) -> Ordering {
    a.kind_rank()
        .cmp(&b.kind_rank())
        .then_with(|| alloc::format!("{a}").cmp(&alloc::format!("{b}")))
}

#[derive(Clone, Debug)]
pub struct TransformationGraph {
    pub source: String,
    pub target: String,
    target_len: usize,
    edges: BTreeMap<(usize, usize), Vec<StringFunction>>,
}

impl TransformationGraph {
    /// Number of nodes, `|t| + 1`.
    pub fn node_count(&self) -> usize {
        self.target_len + 1
    }

    pub fn sink(&self) -> usize {
        self.target_len + 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self, i: usize, j: usize) -> &[StringFunction] {
        self.edges.get(&(i, j)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &[StringFunction])> + '_ {
        self.edges.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn contains(&self, i: usize, j: usize, f: &StringFunction) -> bool {
        self.labels(i, j).contains(f)
    }

    /// One line per edge: `i j label1 | label2 | ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((i, j), labels) in &self.edges {
            let _ = write!(out, "{i} {j}");
            for (n, f) in labels.iter().enumerate() {
                out.push_str(if n == 0 { " " } else { " | " });
                let _ = write!(out, "{f}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_graph(
    s: &str,
    t: &str,
    scorer: &dyn ConstantScorer,
    max_constant_len: usize,
) -> Result<TransformationGraph> {
    let sc: Vec<char> = s.chars().collect();
    let tc: Vec<char> = t.chars().collect();
    if tc.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let positions = build_position_index(&sc, scorer, max_constant_len);
    let mut edges: BTreeMap<(usize, usize), Vec<StringFunction>> = BTreeMap::new();
    for i in 1..=tc.len() {
        for j in i + 1..=tc.len() + 1 {
            edges.insert((i, j), Vec::new());
        }
    }
    for_each_label(&sc, &tc, &positions, scorer, |i, j, f| {
        edges.get_mut(&(i, j)).expect("edge exists").push(f);
    })?;
    for labels in edges.values_mut() {
        let mut keyed: Vec<(u8, String, StringFunction)> = labels
            .drain(..)
            .map(|f| (f.kind_rank(), alloc::format!("{f}"), f))
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        keyed.dedup_by(|a, b| a.1 == b.1);
        labels.extend(keyed.into_iter().map(|k| k.2));
    }
    Ok(TransformationGraph {
        source: s.into(),
        target: t.into(),
        target_len: tc.len(),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{eval_string_function, to_chars};

    #[test]
    fn score_examples() {
        assert_eq!(score_constant(4, 16, 0.5).unwrap(), 1.0);
        assert_eq!(score_constant(0, 7, 0.5).unwrap(), 0.0);
        assert!(score_constant(9, 9, 0.5).unwrap() > score_constant(9, 900, 0.5).unwrap());
        assert!((score_constant(9, 900, 0.5).unwrap() - 0.3).abs() < 1e-12);
        assert!(score_constant(1, 0, 0.5).is_err());
        assert_eq!(score_constant(2, 4, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn frequency_counts_distinct_strings() {
        let a = to_chars("abab");
        let b = to_chars("ab");
        let table = FrequencyTable::build([a.as_slice(), b.as_slice(), b.as_slice()], 3);
        assert_eq!(table.get(&to_chars("ab")), 2);
        assert_eq!(table.get(&to_chars("ba")), 1);
        assert_eq!(table.get(&to_chars("abab")), 0);
    }

    #[test]
    fn position_index_basics() {
        let idx = build_position_index(&[], &UniformScorer, 4);
        assert_eq!(idx.at[1], vec![PositionFunction::ConstPos(-1), PositionFunction::ConstPos(1)]);

        let idx = build_position_index(&to_chars("ab"), &UniformScorer, 4);
        assert!(idx.at[2].contains(&PositionFunction::ConstPos(2)));
        assert!(idx.at[2].contains(&PositionFunction::ConstPos(-2)));

        let s = to_chars("Lee, Mary");
        let idx = build_position_index(&s, &UniformScorer, 4);
        assert!(idx.at[6].contains(&PositionFunction::MatchPos(Term::Uppercase, 2, Dir::B)));
        for (x, pfs) in idx.at.iter().enumerate().skip(1) {
            for pf in pfs {
                assert_eq!(crate::dsl::eval_position(pf, &s), Some(x), "{pf}");
            }
        }
    }

    #[test]
    fn graph_edges_and_labels() {
        let g = build_graph("Lee, Mary", "M. Lee", &UniformScorer, 6).unwrap();
        assert_eq!(g.edge_count(), 21);
        let f1 = StringFunction::SubStr(
            PositionFunction::MatchPos(Term::Uppercase, 1, Dir::B),
            PositionFunction::MatchPos(Term::Lowercase, 1, Dir::E),
        );
        assert!(g.contains(4, 7, &f1));
        let s = to_chars("Lee, Mary");
        for ((i, j), labels) in g.edges() {
            let piece: String = g.target.chars().skip(i - 1).take(j - i).collect();
            for f in labels {
                assert!(eval_string_function(f, &s).contains(&piece), "{f} on ({i},{j})");
            }
        }

        let g = build_graph("Street", "St", &UniformScorer, 6).unwrap();
        assert!(g.contains(2, 3, &StringFunction::Prefix(Term::Lowercase, 1)));

        let g = build_graph("x", "y", &UniformScorer, 6).unwrap();
        assert_eq!(g.labels(1, 2), &[StringFunction::ConstantStr("y".into())]);

        assert_eq!(build_graph("x", "", &UniformScorer, 6).unwrap_err(), Error::EmptyTarget);
    }

    #[test]
    fn dump_lists_every_edge() {
        let g = build_graph("a", "ab", &UniformScorer, 6).unwrap();
        let dump = g.dump();
        assert_eq!(dump.lines().count(), 3);
        assert!(dump.starts_with("1 2 SubStr("));
    }
}
