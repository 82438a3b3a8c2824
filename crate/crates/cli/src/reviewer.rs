//! Who answers the review questions: a person at a terminal or a recorded log.

use std::io::{BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Result};
use consol_core::apply::{Direction, Verdict};
use consol_core::candidates::ReplacementKey;

use crate::log::LogRecord;
use crate::session::{GroupCard, Session};

pub enum Answer {
    Decide { verdict: Verdict, timestamp: u64 },
    Stop,
}

pub trait Reviewer {
    fn review(&mut self, card: &GroupCard, members: &[ReplacementKey]) -> Result<Answer>;
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Asks the reviewer about groups until the session ends or they stop.
pub fn run_session(session: &mut Session, reviewer: &mut dyn Reviewer) -> Result<()> {
    while let Some(card) = session.next_group() {
        let members = session.pending_members().unwrap_or_default().to_vec();
        match reviewer.review(&card, &members)? {
            Answer::Decide { verdict, timestamp } => {
                session.decide(card.seq, verdict, timestamp)?;
            }
            Answer::Stop => {
                session.stop();
                break;
            }
        }
    }
    Ok(())
}

/// Replays recorded decisions; stops when the log runs out.
pub struct Scripted {
    records: std::vec::IntoIter<LogRecord>,
}

impl Scripted {
    pub fn new(records: Vec<LogRecord>) -> Self {
        Scripted {
            records: records.into_iter(),
        }
    }
}

impl Reviewer for Scripted {
    fn review(&mut self, card: &GroupCard, _: &[ReplacementKey]) -> Result<Answer> {
        let Some(r) = self.records.next() else {
            return Ok(Answer::Stop);
        };
        if r.seq != card.seq || r.column != card.column || r.group_key != card.group_key {
            bail!(
                "decision {} is for {:?} in column {:?}, but the session offers {:?} in {:?} as decision {}",
                r.seq,
                r.group_key,
                r.column,
                card.group_key,
                card.column,
                card.seq
            );
        }
        Ok(Answer::Decide {
            verdict: r.verdict()?,
            timestamp: r.timestamp,
        })
    }
}

/// Line-oriented prompt: `y` approves left to right, `r` approves right to
/// left, `n` rejects, `q` quits.
pub struct Terminal<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> Terminal<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Terminal { input, output }
    }
}

impl<R: BufRead, W: Write> Reviewer for Terminal<R, W> {
    fn review(&mut self, card: &GroupCard, _: &[ReplacementKey]) -> Result<Answer> {
        let out = &mut self.output;
        writeln!(out)?;
        writeln!(out, "#{} [{}] {} replacements", card.seq, card.column, card.size)?;
        writeln!(out, "  program: {}", card.pivot_text)?;
        for (l, r) in &card.sample {
            writeln!(out, "  {l:?} -> {r:?}")?;
        }
        if card.size > card.sample.len() {
            writeln!(out, "  ... {} more", card.size - card.sample.len())?;
        }
        loop {
            write!(out, "[y] approve ->  [r] approve <-  [n] reject  [q] quit: ")?;
            out.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(Answer::Stop);
            }
            let verdict = match line.trim() {
                "y" => Verdict::Approved(Direction::LhsToRhs),
                "r" => Verdict::Approved(Direction::RhsToLhs),
                "n" => Verdict::Rejected,
                "q" => return Ok(Answer::Stop),
                _ => continue,
            };
            return Ok(Answer::Decide {
                verdict,
                timestamp: now(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card() -> GroupCard {
        GroupCard {
            seq: 3,
            column: "name".into(),
            group_key: "k".into(),
            pivot_text: "p".into(),
            size: 1,
            sample: vec![("a".into(), "b".into())],
        }
    }

    #[test]
    fn terminal_parses_answers() {
        let mut t = Terminal::new("x\nr\n".as_bytes(), Vec::new());
        match t.review(&card(), &[]).unwrap() {
            Answer::Decide { verdict, .. } => assert_eq!(verdict, Verdict::Approved(Direction::RhsToLhs)),
            Answer::Stop => panic!("expected a decision"),
        }
        let mut t = Terminal::new("".as_bytes(), Vec::new());
        assert!(matches!(t.review(&card(), &[]).unwrap(), Answer::Stop));
    }
}
