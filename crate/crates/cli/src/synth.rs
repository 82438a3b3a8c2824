//! Synthetic corpora: template-generated replacements for timing, and a
//! labeled table with planted variants for end-to-end runs.

use std::collections::{BTreeMap, BTreeSet};

use anyhow::Result;
use consol_core::apply::{Direction, Verdict};
use consol_core::candidates::{ClusterTable, ReplacementKey};
use consol_core::consolidate::{pair_population, LabeledPair, PairLabel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::reviewer::{Answer, Reviewer};
use crate::session::GroupCard;

const FIRST: [&str; 16] = [
    "ma", "ri", "lo", "ven", "ta", "ker", "ni", "el", "fa", "mi", "sa", "lin", "ra", "ha", "pe", "jo",
];
const LAST: [&str; 16] = [
    "son", "del", "ba", "gor", "dor", "to", "ben", "cu", "wes", "mond", "berg", "ford", "hal", "quin", "rov", "zek",
];
const PLACE: [&str; 12] = [
    "oak", "pine", "ce", "dar", "lake", "hill", "brook", "ash", "wood", "field", "stone", "glen",
];
const TOPIC: [&str; 12] = [
    "Biology", "Chemistry", "Physics", "Geology", "Botany", "Zoology", "Genetics", "Ecology", "Optics",
    "Robotics", "Statistics", "Medicine",
];
const JOURNAL: [&str; 6] = ["Nature", "Science", "Cell", "Lancet", "Neuron", "Blood"];

fn word(rng: &mut ChaCha8Rng, pool: &[&str]) -> String {
    let n = rng.gen_range(2..=3);
    let mut w: String = (0..n).map(|_| *pool.choose(rng).unwrap()).collect();
    w[..1].make_ascii_uppercase();
    w
}

pub const TEMPLATES: usize = 20;

/// One replacement from template `k` (taken modulo [`TEMPLATES`]). The
/// templates have pairwise distinct character-class structures.
pub fn template_pair(rng: &mut ChaCha8Rng, k: usize) -> (String, String) {
    let f = word(rng, &FIRST);
    let l = word(rng, &LAST);
    let m = word(rng, &FIRST);
    let st = word(rng, &PLACE);
    let j = *JOURNAL.choose(rng).unwrap();
    let n = rng.gen_range(1..9999);
    let y = rng.gen_range(1900..2030);
    let mo = rng.gen_range(10..13);
    let d = rng.gen_range(10..29);
    let (a, b, c) = (rng.gen_range(200..999), rng.gen_range(200..999), rng.gen_range(1000..9999));
    let f0 = &f[..1];
    match k % TEMPLATES {
        0 => (format!("{l}, {f}"), format!("{f} {l}")),
        1 => (format!("{l}, {f}"), format!("{f0}. {l}")),
        2 => (format!("{f} {l}"), format!("{l}, {f}")),
        3 => (format!("{f} {l}"), format!("{f0}. {l}")),
        4 => (format!("{n} {st} Street"), format!("{n} {st} St")),
        5 => (format!("{n} {st} Avenue"), format!("{n} {st} Ave.")),
        6 => (format!("{st} Road {n}"), format!("{st} Rd {n}")),
        7 => (format!("{y}-{mo}-{d}"), format!("{mo}/{d}/{y}")),
        8 => (format!("({a}) {b}-{c}"), format!("{a}-{b}-{c}")),
        9 => (format!("Dr. {f} {l}"), format!("{f} {l}")),
        10 => (format!("{f} {l} Jr."), format!("{f} {l}")),
        11 => (format!("{f} {}. {l}", &m[..1]), format!("{f} {l}")),
        12 => (format!("{l} {f}"), format!("{f} {l}")),
        13 => (format!("{f} {l}"), l),
        14 => (format!("{l} ({f})"), l),
        15 => (format!("{j}, vol. {n}"), format!("{j} {n}")),
        16 => (format!("{j} ({y})"), format!("{j}, {y}")),
        17 => (format!("{n} {st} St."), format!("{n} {st} Street")),
        18 => (format!("{f} {l}"), format!("{l} {f0}")),
        _ => (format!("{y}/{mo}/{d}"), format!("{d}.{mo}.{y}")),
    }
}

/// `n` distinct replacements, templates drawn uniformly.
pub fn template_corpus(n: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = rng.gen_range(0..TEMPLATES);
        let p = template_pair(&mut rng, k);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

pub const PLANTED_COLUMNS: [&str; 3] = ["name", "address", "journal"];

/// A table of duplicate clusters whose values are one entity's canonical
/// form, planted variants of it, and now and then another entity's value.
pub struct Planted {
    pub table: ClusterTable,
    /// Per column: every same-cluster value pair with its true label.
    pub labels: BTreeMap<String, Vec<LabeledPair>>,
    /// Per column: canonical forms.
    pub canonical: BTreeMap<String, BTreeSet<String>>,
}

struct Entity {
    canonical: [String; 3],
    variants: [Vec<String>; 3],
}

fn entity(rng: &mut ChaCha8Rng) -> Entity {
    let f = word(rng, &FIRST);
    let l = word(rng, &LAST);
    let f0 = &f[..1];
    let n = rng.gen_range(1..999);
    let st = word(rng, &PLACE);
    let (kind, short) = *[("Street", "St"), ("Avenue", "Ave"), ("Road", "Rd")].choose(rng).unwrap();
    let topic = *TOPIC.choose(rng).unwrap();
    let vol = rng.gen_range(1..60);
    Entity {
        canonical: [
            format!("{f} {l}"),
            format!("{n} {st} {kind}"),
            format!("Journal of {topic}, vol. {vol}"),
        ],
        variants: [
            vec![format!("{l}, {f}"), format!("{f0}. {l}"), format!("{l} {f}")],
            vec![format!("{n} {st} {short}"), format!("{n} {st} {short}.")],
            vec![format!("J. {topic}, vol. {vol}"), format!("Journal of {topic} {vol}")],
        ],
    }
}

fn surname(e: &Entity) -> &str {
    e.canonical[0].rsplit(' ').next().unwrap_or_default()
}

impl Planted {
    pub fn generate(clusters: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entities: Vec<Entity> = Vec::new();
        let mut used = BTreeSet::new();
        while entities.len() < clusters {
            let e = entity(&mut rng);
            if e.canonical.iter().all(|c| !used.contains(c)) {
                used.extend(e.canonical.iter().cloned());
                entities.push(e);
            }
        }
        let mut rows = Vec::new();
        // (column, cluster) -> value -> entity
        let mut owner: BTreeMap<(usize, usize), BTreeMap<String, usize>> = BTreeMap::new();
        for (c, e) in entities.iter().enumerate() {
            let key = format!("C{c:04}");
            let n_rows = rng.gen_range(3..=5);
            let intruder = rng.gen_bool(0.25).then(|| loop {
                let other = rng.gen_range(0..entities.len());
                if other != c && surname(&entities[other]) != surname(e) {
                    break (rng.gen_range(0..3), other);
                }
            });
            for r in 0..n_rows {
                let mut row = vec![key.clone()];
                for col in 0..3 {
                    let (value, who) = match intruder {
                        Some((icol, other)) if icol == col && r == n_rows - 1 => {
                            (entities[other].canonical[col].clone(), other)
                        }
                        _ if r == 0 || rng.gen_bool(0.4) => (e.canonical[col].clone(), c),
                        _ => (e.variants[col].choose(&mut rng).unwrap().clone(), c),
                    };
                    owner.entry((col, c)).or_default().insert(value.clone(), who);
                    row.push(value);
                }
                rows.push(row);
            }
        }
        let mut header = vec!["id".to_string()];
        header.extend(PLANTED_COLUMNS.iter().map(|c| c.to_string()));
        let table = ClusterTable::new(header, 0, rows);

        let mut labels = BTreeMap::new();
        let mut canonical = BTreeMap::new();
        for (col, name) in PLANTED_COLUMNS.iter().enumerate() {
            let mut truth: BTreeMap<(String, String), PairLabel> = BTreeMap::new();
            for ((tc, _), values) in owner.range((col, 0)..(col + 1, 0)) {
                debug_assert_eq!(*tc, col);
                for (a, ea) in values {
                    for (b, eb) in values {
                        if a < b {
                            let label = if ea == eb { PairLabel::Variant } else { PairLabel::Conflict };
                            let prev = truth.insert((a.clone(), b.clone()), label);
                            assert!(prev.is_none_or(|p| p == label), "pair ({a}, {b}) labeled both ways");
                        }
                    }
                }
            }
            let population = pair_population(&table, col + 1);
            let pairs = population
                .into_iter()
                .map(|(a, b)| {
                    let label = truth[&(a.clone(), b.clone())];
                    LabeledPair { value_a: a, value_b: b, label }
                })
                .collect();
            labels.insert(name.to_string(), pairs);
            canonical.insert(
                name.to_string(),
                entities.iter().map(|e| e.canonical[col].clone()).collect(),
            );
        }
        Planted {
            table,
            labels,
            canonical,
        }
    }

    pub fn reviewer(&self) -> Oracle {
        let mut variant = BTreeSet::new();
        for pairs in self.labels.values() {
            for p in pairs.iter().filter(|p| p.label == PairLabel::Variant) {
                variant.insert((p.value_a.clone(), p.value_b.clone()));
                variant.insert((p.value_b.clone(), p.value_a.clone()));
            }
        }
        Oracle {
            variant,
            canonical: self.canonical.clone(),
            clock: 1_700_000_000,
        }
    }
}

/// Approves a group when every member pairs two forms of one entity,
/// pointing the direction at the canonical side for most members.
pub struct Oracle {
    variant: BTreeSet<ReplacementKey>,
    canonical: BTreeMap<String, BTreeSet<String>>,
    clock: u64,
}

impl Oracle {
    pub fn judge(&self, column: &str, members: &[ReplacementKey]) -> Verdict {
        let canon = &self.canonical[column];
        if !members.iter().all(|m| self.variant.contains(m)) {
            return Verdict::Rejected;
        }
        let forward = members.iter().filter(|(_, r)| canon.contains(r)).count();
        let backward = members.iter().filter(|(l, _)| canon.contains(l)).count();
        if backward > forward {
            Verdict::Approved(Direction::RhsToLhs)
        } else {
            Verdict::Approved(Direction::LhsToRhs)
        }
    }
}

impl Reviewer for Oracle {
    fn review(&mut self, card: &GroupCard, members: &[ReplacementKey]) -> Result<Answer> {
        self.clock += 1;
        Ok(Answer::Decide {
            verdict: self.judge(&card.column, members),
            timestamp: self.clock,
        })
    }
}
