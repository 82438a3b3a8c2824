//! Files, sessions and the review API around `consol_core`.

pub mod config;
pub mod export;
pub mod ingest;
pub mod labels;
pub mod log;
pub mod reviewer;
pub mod server;
pub mod session;
pub mod synth;

use consol_core::consolidate::{LabeledPair, Metrics};

/// Metrics of a session when labels are available.
pub fn consolidate_metrics(session: &session::Session, labels: Option<&[LabeledPair]>) -> anyhow::Result<Option<Metrics>> {
    labels.map(|l| session.metrics(l)).transpose()
}
