//! HTTP review API. State-changing requests are serialized behind one lock.

use std::io::Write;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use consol_core::consolidate::{LabeledPair, Metrics};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::log::{verdict_of, write_record, DirectionKind, Summary, VerdictKind};
use crate::reviewer::now;
use crate::session::{DecideError, EndReason, GroupCard, Session};

pub struct Inner {
    pub session: Session,
    pub labels: Option<Vec<LabeledPair>>,
    /// Every decision is appended here as it is made.
    pub log_sink: Option<Box<dyn Write + Send>>,
    pub clock: fn() -> u64,
}

#[derive(Clone)]
pub struct AppState(pub Arc<Mutex<Inner>>);

impl AppState {
    pub fn new(session: Session, labels: Option<Vec<LabeledPair>>) -> Self {
        AppState(Arc::new(Mutex::new(Inner {
            session,
            labels,
            log_sink: None,
            clock: now,
        })))
    }

    fn run<T: Send + 'static>(&self, f: impl FnOnce(&mut Inner) -> T + Send + 'static) -> impl std::future::Future<Output = T> {
        let inner = self.0.clone();
        async move {
            tokio::task::spawn_blocking(move || {
                let mut guard = inner.lock().unwrap_or_else(|e| e.into_inner());
                f(&mut guard)
            })
            .await
            .expect("session task panicked")
        }
    }
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

#[derive(Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
enum NextGroup {
    Group(GroupCard),
    Complete { reason: Option<EndReason>, decisions: usize },
}

#[derive(Deserialize)]
pub struct DecisionRequest {
    pub seq: u64,
    pub verdict: VerdictKind,
    #[serde(default)]
    pub direction: Option<DirectionKind>,
}

#[derive(Serialize)]
struct DecisionResponse {
    seq: u64,
    summary: Summary,
}

#[derive(Serialize)]
struct MetricsBody {
    pairs: u64,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    tn: u64,
    precision: Option<f64>,
    recall: Option<f64>,
    mcc: Option<f64>,
}

impl From<Metrics> for MetricsBody {
    fn from(m: Metrics) -> Self {
        let c = m.counts;
        MetricsBody {
            pairs: c.total(),
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            tn: c.tn,
            precision: m.precision,
            recall: m.recall,
            mcc: m.mcc,
        }
    }
}

async fn session_status(State(state): State<AppState>) -> Response {
    Json(state.run(|i| i.session.status()).await).into_response()
}

async fn next_group(State(state): State<AppState>) -> Response {
    let next = state
        .run(|i| match i.session.next_group() {
            Some(card) => NextGroup::Group(card),
            None => NextGroup::Complete {
                reason: i.session.status().end,
                decisions: i.session.log().len(),
            },
        })
        .await;
    Json(next).into_response()
}

async fn decision(State(state): State<AppState>, body: Result<Json<DecisionRequest>, JsonRejection>) -> Response {
    let req = match body {
        Ok(Json(req)) => req,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.body_text()),
    };
    let verdict = match verdict_of(req.verdict, req.direction) {
        Ok(v) => v,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e),
    };
    state
        .run(move |i| {
            let ts = (i.clock)();
            match i.session.decide(req.seq, verdict, ts) {
                Ok(record) => {
                    if let Some(sink) = i.log_sink.as_mut() {
                        if let Err(e) = write_record(sink, &record).and_then(|_| Ok(sink.flush()?)) {
                            return error(StatusCode::INTERNAL_SERVER_ERROR, e);
                        }
                    }
                    Json(DecisionResponse {
                        seq: record.seq,
                        summary: record.summary,
                    })
                    .into_response()
                }
                Err(e @ (DecideError::NoPendingGroup | DecideError::Stale { .. })) => error(StatusCode::CONFLICT, e),
                Err(e @ DecideError::Apply(_)) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
            }
        })
        .await
}

async fn metrics(State(state): State<AppState>) -> Response {
    state
        .run(|i| match &i.labels {
            None => error(StatusCode::NOT_FOUND, "no labels configured"),
            Some(labels) => match i.session.metrics(labels) {
                Ok(m) => Json(MetricsBody::from(m)).into_response(),
                Err(e) => error(StatusCode::UNPROCESSABLE_ENTITY, e),
            },
        })
        .await
}

async fn decision_log(State(state): State<AppState>) -> Response {
    Json(state.run(|i| i.session.log().to_vec()).await).into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/session", get(session_status))
        .route("/api/group/next", get(next_group))
        .route("/api/group/decision", post(decision))
        .route("/api/metrics", get(metrics))
        .route("/api/log", get(decision_log))
        .with_state(state)
}

pub async fn serve(state: AppState, port: u16) -> anyhow::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

/// Port from the command line, then `CONSOL_PORT`, then the config, then 8080.
pub fn resolve_port(cli: Option<u16>, env: Option<&str>, config: Option<u16>) -> anyhow::Result<u16> {
    if let Some(p) = cli {
        return Ok(p);
    }
    if let Some(v) = env {
        return v
            .parse()
            .map_err(|_| anyhow::anyhow!("CONSOL_PORT must be a port number, got {v:?}"));
    }
    Ok(config.unwrap_or(8080))
}
