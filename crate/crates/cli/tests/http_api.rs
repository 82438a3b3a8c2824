use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use consol::config::SessionConfig;
use consol::server::{router, AppState};
use consol::session::Session;
use consol_core::candidates::ClusterTable;
use consol_core::consolidate::{LabeledPair, PairLabel};

fn names() -> ClusterTable {
    let rows = [
        ("1", "Mary Lee"),
        ("1", "Lee, Mary"),
        ("1", "M. Lee"),
        ("2", "James Smith"),
        ("2", "Smith, James"),
        ("2", "J. Smith"),
    ];
    ClusterTable::new(
        vec!["id".into(), "name".into()],
        0,
        rows.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect(),
    )
}

fn fixed_clock() -> u64 {
    42
}

fn app(budget: usize, labels: Option<Vec<LabeledPair>>) -> Router {
    let session = Session::new(names(), SessionConfig::new("names.csv", "id", &["name"], budget)).unwrap();
    let state = AppState::new(session, labels);
    state.0.lock().unwrap().clock = fixed_clock;
    router(state)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn next(app: &Router) -> Value {
    let (status, body) = call(app, "GET", "/api/group/next", None).await;
    assert_eq!(status, StatusCode::OK);
    body
}

async fn decide(app: &Router, body: Value) -> (StatusCode, Value) {
    call(app, "POST", "/api/group/decision", Some(body)).await
}

#[tokio::test]
async fn session_reports_progress() {
    let app = app(3, None);
    let (status, body) = call(&app, "GET", "/api/session", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["column"], "name");
    assert_eq!(body["budget"], 3);
    assert_eq!(body["budget_remaining"], 3);
    assert_eq!(body["decisions"], 0);
    assert_eq!(body["complete"], false);
}

#[tokio::test]
async fn approve_then_next() {
    let app = app(10, None);
    let card = next(&app).await;
    assert_eq!(card["state"], "group");
    assert_eq!(card["seq"], 1);
    assert_eq!(card["size"], 2);
    assert_eq!(card["sample"].as_array().unwrap().len(), 2);
    assert_eq!(next(&app).await, card, "refresh shows the same group");

    let (status, body) = decide(&app, json!({"seq": 1, "verdict": "approved", "direction": "lhs_to_rhs"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["seq"], 1);
    assert_eq!(body["summary"]["cells_rewritten"], 2);

    let card = next(&app).await;
    assert_eq!(card["seq"], 2);
    let (_, status) = call(&app, "GET", "/api/session", None).await;
    assert_eq!(status["decisions"], 1);
    assert_eq!(status["budget_remaining"], 9);
}

#[tokio::test]
async fn double_submit_conflicts() {
    let app = app(10, None);
    next(&app).await;
    let body = json!({"seq": 1, "verdict": "rejected"});
    assert_eq!(decide(&app, body.clone()).await.0, StatusCode::OK);
    let (status, err) = decide(&app, body).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(err["error"].is_string());
}

#[tokio::test]
async fn stale_sequence_conflicts() {
    let app = app(10, None);
    next(&app).await;
    let (status, _) = decide(&app, json!({"seq": 7, "verdict": "rejected"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, log) = call(&app, "GET", "/api/log", None).await;
    assert_eq!(log, json!([]));
}

#[tokio::test]
async fn decision_without_group_conflicts() {
    let app = app(10, None);
    let (status, _) = decide(&app, json!({"seq": 1, "verdict": "rejected"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn direction_must_match_verdict() {
    let app = app(10, None);
    next(&app).await;
    let (status, _) = decide(&app, json!({"seq": 1, "verdict": "approved"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = decide(&app, json!({"seq": 1, "verdict": "rejected", "direction": "rhs_to_lhs"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, err) = decide(&app, json!({"seq": 1, "verdict": "maybe"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(err["error"].is_string());
    let (_, log) = call(&app, "GET", "/api/log", None).await;
    assert_eq!(log, json!([]));
}

#[tokio::test]
async fn budget_ends_the_session() {
    let app = app(2, None);
    for seq in 1..=2 {
        let card = next(&app).await;
        assert_eq!(card["seq"], seq);
        decide(&app, json!({"seq": seq, "verdict": "rejected"})).await;
    }
    let end = next(&app).await;
    assert_eq!(end, json!({"state": "complete", "reason": "budget_exhausted", "decisions": 2}));
    let (_, status) = call(&app, "GET", "/api/session", None).await;
    assert_eq!(status["complete"], true);
    assert_eq!(status["budget_remaining"], 0);
}

#[tokio::test]
async fn rejecting_everything_exhausts_groups() {
    let app = app(100, None);
    let mut seq = 0;
    loop {
        let card = next(&app).await;
        if card["state"] == "complete" {
            assert_eq!(card["reason"], "groups_exhausted");
            assert_eq!(card["decisions"], seq);
            break;
        }
        seq += 1;
        assert_eq!(card["seq"], seq);
        let (status, _) = decide(&app, json!({"seq": seq, "verdict": "rejected"})).await;
        assert_eq!(status, StatusCode::OK);
    }
    let (_, log) = call(&app, "GET", "/api/log", None).await;
    let log = log.as_array().unwrap();
    assert_eq!(log.len(), seq as usize);
    assert!(log.iter().all(|r| r["verdict"] == "rejected" && r.get("direction").is_none()));
    assert!(log.iter().all(|r| r["timestamp"] == 42));
}

#[tokio::test]
async fn metrics_need_labels() {
    let app_without = app(10, None);
    let (status, _) = call(&app_without, "GET", "/api/metrics", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let label = |a: &str, b: &str, label| LabeledPair {
        value_a: a.into(),
        value_b: b.into(),
        label,
    };
    let labels = vec![
        label("Mary Lee", "M. Lee", PairLabel::Variant),
        label("James Smith", "J. Smith", PairLabel::Variant),
        label("Lee, Mary", "Mary Lee", PairLabel::Variant),
        label("Smith, James", "J. Smith", PairLabel::Conflict),
    ];
    let app = app(10, Some(labels));
    let (status, before) = call(&app, "GET", "/api/metrics", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before["pairs"], 4);
    assert_eq!(before["tp"], 0);
    assert_eq!(before["recall"], 0.0);
    assert_eq!(before["precision"], Value::Null);

    let card = next(&app).await;
    let sample = card["sample"].to_string();
    let (status, _) = decide(&app, json!({"seq": 1, "verdict": "approved", "direction": "lhs_to_rhs"})).await;
    assert_eq!(status, StatusCode::OK);
    let (_, after) = call(&app, "GET", "/api/metrics", None).await;
    assert!(after["tp"].as_u64().unwrap() >= 1, "{sample} {after}");
    assert_eq!(after["pairs"], 4);
}
