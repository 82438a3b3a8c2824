//! The string-transformation language: terms, position functions, string
//! functions and programs.
//!
//! Strings are handled as slices of `char`. Positions are 1-based and range
//! over `1..=len + 1`, so position `p` sits just before the `p`-th character.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A character class or literal used to locate positions in an input string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `[0-9]+`
    Digits,
    /// `[a-z]+`
    Lowercase,
    /// `[A-Z]+`
    Uppercase,
    /// `\s+`
    Whitespace,
    /// Matches exactly the given literal.
    ConstantString(String),
    /// A character outside every regex class. Only used for structures.
    SingleChar(char),
}

/// The regex-backed terms, in the order they are scanned.
pub const REGEX_TERMS: [Term; 4] = [
    Term::Whitespace,
    Term::Digits,
    Term::Lowercase,
    Term::Uppercase,
];

impl Term {
    pub fn is_regex(&self) -> bool {
        matches!(
            self,
            Term::Digits | Term::Lowercase | Term::Uppercase | Term::Whitespace
        )
    }

    /// The regex class a character belongs to, if any.
    pub fn class_of(c: char) -> Option<Term> {
        match c {
            '0'..='9' => Some(Term::Digits),
            'a'..='z' => Some(Term::Lowercase),
            'A'..='Z' => Some(Term::Uppercase),
            c if c.is_ascii_whitespace() => Some(Term::Whitespace),
            _ => None,
        }
    }

    fn accepts(&self, c: char) -> bool {
        match self {
            Term::Digits => c.is_ascii_digit(),
            Term::Lowercase => c.is_ascii_lowercase(),
            Term::Uppercase => c.is_ascii_uppercase(),
            Term::Whitespace => c.is_ascii_whitespace(),
            Term::ConstantString(_) | Term::SingleChar(_) => false,
        }
    }

    /// All matches of this term in `s` as 0-based half-open ranges.
    ///
    /// Regex terms yield maximal runs; literal terms yield leftmost
    /// non-overlapping occurrences.
    pub fn matches(&self, s: &[char]) -> Vec<(usize, usize)> {
        match self {
            Term::ConstantString(text) => {
                let pat: Vec<char> = text.chars().collect();
                literal_matches(&pat, s)
            }
            Term::SingleChar(c) => literal_matches(&[*c], s),
            _ => {
                let mut out = Vec::new();
                let mut x = 0;
                while x < s.len() {
                    if self.accepts(s[x]) {
                        let start = x;
                        while x < s.len() && self.accepts(s[x]) {
                            x += 1;
                        }
                        out.push((start, x));
                    } else {
                        x += 1;
                    }
                }
                out
            }
        }
    }
}

pub(crate) fn literal_matches(pat: &[char], s: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if pat.is_empty() || pat.len() > s.len() {
        return out;
    }
    let mut x = 0;
    while x + pat.len() <= s.len() {
        if &s[x..x + pat.len()] == pat {
            out.push((x, x + pat.len()));
            x += pat.len();
        } else {
            x += 1;
        }
    }
    out
}

/// Resolve a nonzero, possibly negative, 1-based match index against `m` matches.
/// Returns the 0-based index into the match list.
pub(crate) fn resolve_index(k: i32, m: usize) -> Option<usize> {
    let m = m as i64;
    let k = k as i64;
    if k > 0 && k <= m {
        Some((k - 1) as usize)
    } else if k < 0 && -m <= k {
        Some((m + k) as usize)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// Beginning of the match.
    B,
    /// End of the match.
    E,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositionFunction {
    ConstPos(i32),
    MatchPos(Term, i32, Dir),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StringFunction {
    SubStr(PositionFunction, PositionFunction),
    /// Every non-empty prefix of the `k`-th match of a regex term.
    Prefix(Term, i32),
    /// Every non-empty suffix of the `k`-th match of a regex term.
    Suffix(Term, i32),
    ConstantStr(String),
}

impl StringFunction {
    /// Rank of the variant in the canonical label order.
    pub fn kind_rank(&self) -> u8 {
        match self {
            StringFunction::SubStr(..) => 0,
            StringFunction::Prefix(..) => 1,
            StringFunction::Suffix(..) => 2,
            StringFunction::ConstantStr(_) => 3,
        }
    }
}

/// A sequence of string functions whose outputs are concatenated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program(pub Vec<StringFunction>);

impl Program {
    pub fn new(functions: Vec<StringFunction>) -> Self {
        Program(functions)
    }

    pub fn functions(&self) -> &[StringFunction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Deterministic, injective rendering used for group keys and display.
    pub fn canonical_text(&self) -> String {
        alloc::format!("{self}")
    }
}

pub fn to_chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

/// Evaluate a position function on `s`. Out-of-range requests yield `None`.
pub fn eval_position(pf: &PositionFunction, s: &[char]) -> Option<usize> {
    match pf {
        PositionFunction::ConstPos(k) => {
            let n = s.len() as i64;
            let k = *k as i64;
            if k > 0 && k <= n + 1 {
                Some(k as usize)
            } else if k < 0 && -(n + 1) <= k {
                Some((n + 2 + k) as usize)
            } else {
                None
            }
        }
        PositionFunction::MatchPos(term, k, dir) => {
            if matches!(term, Term::SingleChar(_)) {
                return None;
            }
            let ms = term.matches(s);
            let (x, y) = ms[resolve_index(*k, ms.len())?];
            Some(match dir {
                Dir::B => x + 1,
                Dir::E => y + 1,
            })
        }
    }
}

/// The outputs of `f` on `s` as character slices (constants are materialised).
fn outputs(f: &StringFunction, s: &[char]) -> Vec<Vec<char>> {
    match f {
        StringFunction::ConstantStr(text) => alloc::vec![text.chars().collect()],
        StringFunction::SubStr(l, r) => match (eval_position(l, s), eval_position(r, s)) {
            (Some(l), Some(r)) if l < r => alloc::vec![s[l - 1..r - 1].to_vec()],
            _ => Vec::new(),
        },
        StringFunction::Prefix(term, k) | StringFunction::Suffix(term, k) => {
            if !term.is_regex() {
                return Vec::new();
            }
            let ms = term.matches(s);
            let Some(idx) = resolve_index(*k, ms.len()) else {
                return Vec::new();
            };
            let (x, y) = ms[idx];
            let prefix = matches!(f, StringFunction::Prefix(..));
            (1..=y - x)
                .map(|len| {
                    if prefix {
                        s[x..x + len].to_vec()
                    } else {
                        s[y - len..y].to_vec()
                    }
                })
                .collect()
        }
    }
}

/// The set of strings `f` can produce from `s`. Undefined cases yield the
/// empty set.
pub fn eval_string_function(f: &StringFunction, s: &[char]) -> BTreeSet<String> {
    outputs(f, s).into_iter().map(|o| o.into_iter().collect()).collect()
}

/// Whether `p` can turn `s` into `t`: `t` splits into `|p|` pieces with the
/// `i`-th piece among the outputs of the `i`-th function.
pub fn is_consistent(p: &Program, s: &[char], t: &[char]) -> bool {
    let mut reach = alloc::vec![false; t.len() + 1];
    reach[0] = true;
    for f in p.functions() {
        let outs = outputs(f, s);
        let mut next = alloc::vec![false; t.len() + 1];
        for (pos, _) in reach.iter().enumerate().filter(|(_, r)| **r) {
            for o in &outs {
                if !o.is_empty() && t[pos..].starts_with(o) {
                    next[pos + o.len()] = true;
                }
            }
        }
        reach = next;
    }
    reach[t.len()]
}

fn write_escaped(f: &mut fmt::Formatter<'_>, text: &str, quote: char) -> fmt::Result {
    for c in text.chars() {
        if c == '\\' || c == quote {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Digits => f.write_str("Td"),
            Term::Lowercase => f.write_str("Tl"),
            Term::Uppercase => f.write_str("TC"),
            Term::Whitespace => f.write_str("Tb"),
            Term::ConstantString(text) => {
                f.write_str("Tstr(\"")?;
                write_escaped(f, text, '"')?;
                f.write_str("\")")
            }
            Term::SingleChar(c) => {
                f.write_str("Tch('")?;
                let mut buf = [0u8; 4];
                write_escaped(f, c.encode_utf8(&mut buf), '\'')?;
                f.write_str("')")
            }
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::B => "B",
            Dir::E => "E",
        })
    }
}

impl fmt::Display for PositionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionFunction::ConstPos(k) => write!(f, "ConstPos({k})"),
            PositionFunction::MatchPos(term, k, dir) => write!(f, "MatchPos({term},{k},{dir})"),
        }
    }
}

impl fmt::Display for StringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringFunction::ConstantStr(text) => {
                f.write_str("ConstantStr(\"")?;
                write_escaped(f, text, '"')?;
                f.write_str("\")")
            }
            StringFunction::SubStr(l, r) => write!(f, "SubStr({l},{r})"),
            StringFunction::Prefix(term, k) => write!(f, "Prefix({term},{k})"),
            StringFunction::Suffix(term, k) => write!(f, "Suffix({term},{k})"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, func) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("⊕")?;
            }
            write!(f, "{func}")?;
        }
        Ok(())
    }
}
