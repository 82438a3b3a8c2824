//! Majority-consensus golden values and pair-level evaluation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::candidates::ClusterTable;
use crate::{Error, Result};

/// Most frequent value, or `None` when the top count is tied.
pub fn majority_consensus<'a, I>(values: I) -> Option<String>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let top = *counts.values().max()?;
    let mut winners = counts.iter().filter(|(_, &c)| c == top);
    let (value, _) = winners.next()?;
    winners.next().is_none().then(|| String::from(*value))
}

/// Golden value of every cluster for `column`.
pub fn golden_values(table: &ClusterTable, column: usize) -> Vec<Option<String>> {
    table
        .clusters()
        .iter()
        .map(|rows| majority_consensus(rows.iter().map(|&r| table.cell(r, column))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairLabel {
    Variant,
    Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledPair {
    pub value_a: String,
    pub value_b: String,
    pub label: PairLabel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp as f64, (self.tp + self.fp) as f64)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp as f64, (self.tp + self.fn_) as f64)
    }

    pub fn mcc(&self) -> Option<f64> {
        let (tp, fp, fn_, tn) = (self.tp as f64, self.fp as f64, self.fn_ as f64, self.tn as f64);
        let den = libm::sqrt((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_));
        ratio(tp * tn - fp * fn_, den)
    }

    pub fn metrics(self) -> Metrics {
        Metrics {
            precision: self.precision(),
            recall: self.recall(),
            mcc: self.mcc(),
            counts: self,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub counts: ConfusionCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub mcc: Option<f64>,
}

struct Shown(Option<f64>);

impl fmt::Display for Shown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v:.4}"),
            None => f.write_str("undefined"),
        }
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counts;
        writeln!(f, "pairs = {}", c.total())?;
        writeln!(f, "tp = {}", c.tp)?;
        writeln!(f, "fp = {}", c.fp)?;
        writeln!(f, "fn = {}", c.fn_)?;
        writeln!(f, "tn = {}", c.tn)?;
        writeln!(f, "precision = {}", Shown(self.precision))?;
        writeln!(f, "recall = {}", Shown(self.recall))?;
        writeln!(f, "mcc = {}", Shown(self.mcc))
    }
}

/// Counts each labeled pair by whether its values became identical.
///
/// A pair is identical when every cell that held either value, in every
/// cluster of `original` where both occur, now holds one common value in
/// `after`.
pub fn evaluate(
    pairs: &[LabeledPair],
    original: &ClusterTable,
    after: &ClusterTable,
    column: usize,
) -> Result<Metrics> {
    let mut counts = ConfusionCounts::default();
    for pair in pairs {
        let mut cells = Vec::new();
        for rows in original.clusters() {
            let a: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| original.cell(r, column) == pair.value_a)
                .collect();
            let b: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| original.cell(r, column) == pair.value_b)
                .collect();
            if !a.is_empty() && !b.is_empty() {
                cells.extend(a);
                cells.extend(b);
            }
        }
        if cells.is_empty() {
            return Err(Error::PairNotColocated(pair.value_a.clone(), pair.value_b.clone()));
        }
        let first = after.cell(cells[0], column);
        let identical = cells.iter().all(|&r| after.cell(r, column) == first);
        match (pair.label, identical) {
            (PairLabel::Variant, true) => counts.tp += 1,
            (PairLabel::Variant, false) => counts.fn_ += 1,
            (PairLabel::Conflict, true) => counts.fp += 1,
            (PairLabel::Conflict, false) => counts.tn += 1,
        }
    }
    Ok(counts.metrics())
}

/// Distinct unordered non-identical value pairs sharing a cluster, sorted.
pub fn pair_population(table: &ClusterTable, column: usize) -> Vec<(String, String)> {
    let mut out = BTreeSet::new();
    for rows in table.clusters() {
        let values: BTreeSet<&str> = rows.iter().map(|&r| table.cell(r, column)).collect();
        let values: Vec<&str> = values.into_iter().collect();
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                out.insert((String::from(*a), String::from(*b)));
            }
        }
    }
    out.into_iter().collect()
}

/// Uniform sample of `n` pairs from [`pair_population`], in population order.
pub fn sample_pairs(table: &ClusterTable, column: usize, n: usize, seed: u64) -> Result<Vec<(String, String)>> {
    let population = pair_population(table, column);
    if n > population.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            population: population.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, population.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| population[i].clone()).collect())
}
