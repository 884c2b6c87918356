#![no_main]

use axum::body::Body;
use axum::http::Request;
use cxrlabel_core::classify::{FilterRuleSet, Ontology};
use cxrlabel_core::ingest::parse_reports;
use cxrlabel_core::sentence::{build_sentence_pool, SplitterConfig};
use cxrlabel_service::{router, App, EvalSets, QueueCoverage, ServiceConfig};
use libfuzzer_sys::fuzz_target;
use tower::ServiceExt;

const REPORTS: &str = r#"{"study_id":"a","patient_id":"p","age_years":50,"report_text":"Cardiomegaly. No effusion.","has_pa":true,"has_lateral":false}"#;
const SETS: &str = r#"{"sets":[{"set_id":"s","findings":["cardiomegaly"],"studies":[{"study_id":"a","pa_image":"a.png"}]}]}"#;
const ROUTES: [(&str, &str); 4] = [
    ("POST", "/api/sentences/tag"),
    ("POST", "/api/eval/s/rating"),
    ("GET", "/api/sentences/next"),
    ("GET", "/api/eval/s/next"),
];

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else { return };
    let (method, path) = ROUTES[usize::from(selector) % ROUTES.len()];
    let dir = tempfile::tempdir().unwrap();
    let ontology = Ontology::builtin();
    let corpus = parse_reports(REPORTS.as_bytes(), true).unwrap();
    let config = ServiceConfig {
        pool: Some(build_sentence_pool(&corpus, &SplitterConfig::builtin())),
        eval_sets: EvalSets::parse(SETS, &ontology).unwrap(),
        ontology,
        rules: FilterRuleSet::builtin(),
        log_path: dir.path().join("events.jsonl"),
        seed: 1,
        queue_coverage: QueueCoverage::Single,
        image_dir: None,
    };
    let app = App::open(config).unwrap();
    let uri = match (method, std::str::from_utf8(rest)) {
        ("GET", Ok(query)) if !query.contains(['#', ' ', '\n', '\r']) => format!("{path}?{query}"),
        _ => path.to_string(),
    };
    let Ok(request) = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(rest.to_vec()))
    else {
        return;
    };
    let runtime = tokio::runtime::Builder::new_current_thread().build().unwrap();
    let response = runtime.block_on(router(app).oneshot(request)).unwrap();
    assert!(!response.status().is_server_error(), "{}", response.status());
});
