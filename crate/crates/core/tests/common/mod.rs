#![allow(dead_code)]

pub mod oracle;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const TINY: [char; 6] = ['a', 'b', 'C', '1', ' ', '-'];

fn tiny_string(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| *TINY.choose(rng).unwrap()).collect()
}

/// A pair over a six-character alphabet, both sides at most 8 characters.
/// Targets are usually assembled from pieces of the source so that
/// programs get shared across pairs.
pub fn tiny_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let s_len = rng.gen_range(1..=8);
    let s = tiny_string(rng, s_len);
    let sc: Vec<char> = s.chars().collect();
    let mut t = String::new();
    if rng.gen_bool(0.25) {
        let t_len = rng.gen_range(1..=8);
        t = tiny_string(rng, t_len);
    } else {
        for _ in 0..rng.gen_range(1..=3) {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(0..sc.len());
                let b = rng.gen_range(a + 1..=sc.len());
                t.extend(&sc[a..b]);
            } else {
                let n = rng.gen_range(1..=2);
                t.push_str(&tiny_string(rng, n));
            }
        }
        t = t.chars().take(8).collect();
    }
    if t == s {
        t.push('-');
        t = t.chars().skip(t.chars().count().saturating_sub(8)).collect();
    }
    (s, t)
}

const FIRST: [&str; 12] = [
    "Mary", "James", "John", "Linda", "Robert", "Susan", "David", "Karen", "Ann", "Peter", "Laura", "Tom",
];
const LAST: [&str; 12] = [
    "Lee", "Smith", "Brown", "Jones", "Garcia", "Miller", "Davis", "Wilson", "Moore", "Clark", "Lewis", "Young",
];
const STREET: [(&str, &str); 5] = [
    ("Street", "St"),
    ("Avenue", "Ave"),
    ("Road", "Rd"),
    ("Boulevard", "Blvd"),
    ("Drive", "Dr"),
];
const ORDINAL: [(&str, &str); 4] = [("1", "1st"), ("2", "2nd"), ("3", "3rd"), ("9", "9th")];

/// A value pair drawn from a handful of name, address and ordinal variant
/// shapes, or random noise.
pub fn realistic_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let f = *FIRST.choose(rng).unwrap();
    let l = *LAST.choose(rng).unwrap();
    let (long, short) = *STREET.choose(rng).unwrap();
    let n = rng.gen_range(1..200);
    let pair = match rng.gen_range(0..8) {
        0 => (format!("{l}, {f}"), format!("{f} {l}")),
        1 => (format!("{l}, {f}"), format!("{}. {l}", &f[..1])),
        2 => (format!("{f} {l}"), format!("{l}, {f}")),
        3 => (format!("{n} Main {long}"), format!("{n} Main {short}")),
        4 => (long.to_string(), short.to_string()),
        5 => {
            let (a, b) = *ORDINAL.choose(rng).unwrap();
            (a.to_string(), b.to_string())
        }
        6 => (format!("{f} {l}"), format!("{} {l}", f.to_uppercase())),
        _ => {
            let a: String = (0..rng.gen_range(1..8)).map(|_| rng.gen_range('a'..='e')).collect();
            let b: String = (0..rng.gen_range(1..8)).map(|_| rng.gen_range('a'..='e')).collect();
            (a, b)
        }
    };
    if pair.0 == pair.1 {
        (pair.0, format!("{}x", pair.1))
    } else {
        pair
    }
}

/// `n` distinct pairs from `gen`.
pub fn distinct_pairs(
    rng: &mut ChaCha8Rng,
    n: usize,
    mut gen: impl FnMut(&mut ChaCha8Rng) -> (String, String),
) -> Vec<(String, String)> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < n * 50 {
        tries += 1;
        let p = gen(rng);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// Pairs whose targets stay within 3 characters: tiny random strings,
/// abbreviations and ordinals.
pub fn short_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    match rng.gen_range(0..4) {
        0 => {
            let (long, short) = *STREET.choose(rng).unwrap();
            (long.to_string(), short.chars().take(3).collect())
        }
        1 => {
            let (a, b) = *ORDINAL.choose(rng).unwrap();
            (a.to_string(), b.to_string())
        }
        _ => {
            let s_len = rng.gen_range(1..=6);
            let s = tiny_string(rng, s_len);
            let t_len = rng.gen_range(1..=3);
            let mut t = if rng.gen_bool(0.5) {
                s.chars().take(t_len).collect()
            } else {
                tiny_string(rng, t_len)
            };
            if t == s {
                t = if s == "-" { "a".into() } else { "-".into() };
            }
            (s, t)
        }
    }
}
