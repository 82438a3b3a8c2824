//! Entity consolidation by unsupervised grouping of string transformations.
//!
//! Variant values inside clusters of duplicate records are turned into
//! candidate replacements, each replacement is expanded into a transformation
//! graph, and replacements sharing a common program are grouped so a reviewer
//! can approve or reject whole groups at once.

#![no_std]

extern crate alloc;

pub mod apply;
pub mod candidates;
pub mod consolidate;
pub mod dsl;
pub mod graph;
pub mod grouping;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("replacement target is empty")]
    EmptyTarget,
    #[error("invalid frequencies: {struc} in structure group, {global} globally")]
    InvalidFrequency { struc: u32, global: u32 },
    #[error("row {row} holds {found:?}, expected {expected:?}")]
    OccurrenceMismatch {
        row: usize,
        expected: String,
        found: String,
    },
    #[error("pair ({0:?}, {1:?}) never shares a cluster")]
    PairNotColocated(String, String),
    #[error("requested {requested} samples from a population of {population}")]
    SampleTooLarge { requested: usize, population: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
