use consol::config::SessionConfig;
use consol::reviewer::{run_session, Scripted};
use consol::session::Session;
use consol::synth::{Planted, PLANTED_COLUMNS};
use consol_core::consolidate::{evaluate, ConfusionCounts};

fn planted_session(p: &Planted) -> Session {
    let mut config = SessionConfig::new("planted.csv", "id", &PLANTED_COLUMNS, 1000);
    config.seed = 5;
    Session::new(p.table.clone(), config).unwrap()
}

fn counts(p: &Planted, s: &Session) -> ConfusionCounts {
    let mut total = ConfusionCounts::default();
    for (col, name) in PLANTED_COLUMNS.iter().enumerate() {
        let m = evaluate(&p.labels[*name], s.original(), s.table(), col + 1).unwrap();
        total.tp += m.counts.tp;
        total.fp += m.counts.fp;
        total.fn_ += m.counts.fn_;
        total.tn += m.counts.tn;
    }
    total
}

#[test]
fn oracle_review_reaches_targets() {
    let p = Planted::generate(100, 11);
    let mut s = planted_session(&p);
    run_session(&mut s, &mut p.reviewer()).unwrap();
    assert!(s.log().iter().any(|r| r.direction.is_some()));
    let c = counts(&p, &s);
    let m = c.metrics();
    assert_eq!(m.precision, Some(1.0));
    assert!(m.recall.unwrap() >= 0.9, "{m}");

    let mut again = planted_session(&p);
    run_session(&mut again, &mut Scripted::new(s.log().to_vec())).unwrap();
    assert_eq!(again.table(), s.table());
    assert_eq!(again.log(), s.log());
}
