use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::dsl::Term;

/// Maximal-run character-class encoding of a string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure(pub Vec<Term>);

pub fn structure_of(s: &str) -> Structure {
    let mut terms: Vec<Term> = Vec::new();
    for c in s.chars() {
        match Term::class_of(c) {
            Some(term) => {
                if terms.last() != Some(&term) {
                    terms.push(term);
                }
            }
            None => terms.push(Term::SingleChar(c)),
        }
    }
    Structure(terms)
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Groups replacement indices by `(Struc(lhs), Struc(rhs))`, in order of
/// first appearance.
pub fn structure_partition(pairs: &[(String, String)]) -> Vec<((Structure, Structure), Vec<usize>)> {
    let mut out: Vec<((Structure, Structure), Vec<usize>)> = Vec::new();
    let mut slot: HashMap<(Structure, Structure), usize> = HashMap::new();
    for (idx, (lhs, rhs)) in pairs.iter().enumerate() {
        let key = (structure_of(lhs), structure_of(rhs));
        let at = *slot.entry(key.clone()).or_insert_with(|| {
            out.push((key, Vec::new()));
            out.len() - 1
        });
        out[at].1.push(idx);
    }
    out
}
