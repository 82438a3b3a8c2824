//! Pivot support against exhaustive path enumeration.

mod common;

use std::time::{Duration, Instant};

use consol_core::grouping::{search_pivot, Corpus, GroupingConfig, ScorerKind};

fn config() -> GroupingConfig {
    GroupingConfig {
        max_path_len: None,
        refine_by_structure: false,
        scorer: ScorerKind::Uniform,
        ..Default::default()
    }
}

#[test]
fn pivot_support_matches_exhaustive_enumeration() {
    let start = Instant::now();
    let mut rng = common::rng(7);
    let mut total = 0;
    let mut shared = 0;
    let mut mismatches = Vec::new();
    for round in 0..60 {
        let pairs = common::distinct_pairs(&mut rng, 10, common::tiny_pair);
        let expected = common::oracle::oracle_supports(&pairs);
        shared += expected.iter().filter(|&&s| s > 1).count();
        {
            let corpus = Corpus::new(pairs.clone(), config());
            let mut mat = corpus.materialize(0);
            for g in 0..pairs.len() {
                let params = mat.search_params(&corpus.config, g);
                let found = search_pivot(g as u32, &mat.graphs, &mat.index, &mut mat.lower, params, &mut Default::default())
                    .expect("every graph has a path");
                if found.support != expected[g] {
                    mismatches.push((round, pairs[g].clone(), found.support, expected[g]));
                }
                let program = mat.program(&found.path);
                for &h in &found.members {
                    let (s, t) = &pairs[h as usize];
                    assert!(consol_core::dsl::is_consistent(
                        &program,
                        &consol_core::dsl::to_chars(s),
                        &consol_core::dsl::to_chars(t)
                    ));
                }
            }
        }
        total += pairs.len();
    }
    assert!(total >= 500, "only {total} replacements");
    assert!(shared * 4 >= total, "only {shared} of {total} pivots are shared");
    assert!(mismatches.is_empty(), "{mismatches:?}");
    assert!(start.elapsed() < Duration::from_secs(60));
}
