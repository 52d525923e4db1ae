use std::path::Path;
use std::time::{Duration, Instant};

use linlayout::{goldner_harary, verify, Backend, Graph, JobRequest, LayoutSpec};
use linlayout_service::{JobRecord, JobStatus, Service, ServiceConfig, Store};
use reqwest::StatusCode;
use serde_json::{json, Value};
use tokio::sync::oneshot;

struct Running {
    base: String,
    client: reqwest::Client,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<()>,
}

impl Running {
    async fn start(cfg: ServiceConfig) -> Self {
        let service = Service::start(cfg).unwrap();
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel();
        let task = tokio::spawn(async move {
            service
                .serve(listener, async {
                    let _ = rx.await;
                })
                .await
                .unwrap();
        });
        Self { base, client: reqwest::Client::new(), stop: Some(tx), task }
    }

    async fn shutdown(mut self) {
        self.stop.take().unwrap().send(()).unwrap();
        self.task.await.unwrap();
    }

    async fn submit(&self, body: &Value) -> (StatusCode, Value) {
        let r = self.client.post(format!("{}/jobs", self.base)).json(body).send().await.unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn submit_ok(&self, body: &Value) -> String {
        let (code, v) = self.submit(body).await;
        assert_eq!(code, StatusCode::CREATED, "{v}");
        v["id"].as_str().unwrap().to_string()
    }

    async fn get_raw(&self, id: &str) -> (StatusCode, Vec<u8>) {
        let r = self.client.get(format!("{}/jobs/{id}", self.base)).send().await.unwrap();
        (r.status(), r.bytes().await.unwrap().to_vec())
    }

    async fn record(&self, id: &str) -> JobRecord {
        let (code, body) = self.get_raw(id).await;
        assert_eq!(code, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
        serde_json::from_slice(&body).unwrap()
    }

    async fn wait_terminal(&self, id: &str, within: Duration) -> JobRecord {
        let start = Instant::now();
        loop {
            let rec = self.record(id).await;
            if rec.status.is_terminal() {
                return rec;
            }
            assert!(start.elapsed() < within, "job {id} still {}", rec.status);
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }

    async fn delete(&self, id: &str) -> (StatusCode, Value) {
        let r = self.client.delete(format!("{}/jobs/{id}", self.base)).send().await.unwrap();
        (r.status(), r.json().await.unwrap())
    }

    async fn list(&self, query: &str) -> (StatusCode, Value) {
        let r = self.client.get(format!("{}/jobs?{query}", self.base)).send().await.unwrap();
        (r.status(), r.json().await.unwrap())
    }
}

fn config(dir: &Path) -> ServiceConfig {
    let mut cfg = ServiceConfig::new(dir.join("jobs.sqlite"));
    cfg.workers = 2;
    cfg.timeout_cap = Duration::from_secs(60);
    cfg
}

fn job(g: &Graph, spec: LayoutSpec) -> Value {
    serde_json::to_value(JobRequest::new(g.clone(), spec)).unwrap()
}

fn slow_solver(dir: &Path) -> Backend {
    let script = dir.join("slow.sh");
    std::fs::write(&script, "sleep 30\n").unwrap();
    Backend::External { command: format!("sh {} {{input}}", script.display()) }
}

#[tokio::test(flavor = "multi_thread")]
async fn minimal_job_and_goldner_harary() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Running::start(config(dir.path())).await;
    let minimal = json!({
        "graph": {"vertices": [{"id": "a"}, {"id": "b"}], "edges": [{"id": "e", "source": "a", "target": "b"}]},
        "pages": [{"type": "stack"}]
    });
    let id = svc.submit_ok(&minimal).await;
    let fresh = svc.record(&id).await;
    assert!(!fresh.status.is_terminal() || fresh.status == JobStatus::Sat);
    assert_eq!(svc.wait_terminal(&id, Duration::from_secs(10)).await.status, JobStatus::Sat);

    let g = goldner_harary();
    for (spec, want) in [(LayoutSpec::stacks(3), JobStatus::Sat), (LayoutSpec::stacks(2), JobStatus::Unsat)] {
        let id = svc.submit_ok(&job(&g, spec.clone())).await;
        let rec = svc.wait_terminal(&id, Duration::from_secs(30)).await;
        assert_eq!(rec.status, want);
        assert_eq!(rec.result.is_some(), want == JobStatus::Sat);
        if let Some(layout) = &rec.result {
            assert_eq!(verify(&g, &spec, layout).unwrap(), vec![]);
        }
    }

    let gen = json!({"generator": {"name": "step2_gadget", "params": {"k": 2}}, "pages": [{"type": "stack"}, {"type": "stack"}, {"type": "stack"}]});
    let id = svc.submit_ok(&gen).await;
    let rec = svc.wait_terminal(&id, Duration::from_secs(30)).await;
    assert_eq!(rec.graph.vertex_count(), 10);
    assert_eq!(rec.status, JobStatus::Sat);

    let a = svc.submit_ok(&minimal).await;
    let b = svc.submit_ok(&minimal).await;
    assert_ne!(a, b);
    let health: Value = svc.client.get(format!("{}/health", svc.base)).send().await.unwrap().json().await.unwrap();
    assert_eq!(health["status"], "ok");
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.max_body_bytes = 64 << 10;
    let svc = Running::start(cfg).await;

    let g = Graph::from_edges(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")]).unwrap();
    let spec = LayoutSpec::stacks(4).with_constraint(linlayout::Constraint::different_pages(["a-b", "b-c", "c-d", "d-a", "a-c"]));
    let (code, v) = svc.submit(&job(&g, spec)).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert_eq!(v["path"], "constraints[0]");
    assert!(v["error"].as_str().unwrap().contains("R4Different"), "{v}");

    let mut body = job(&g, LayoutSpec::stacks(1));
    body["pages"][0]["type"] = json!("book");
    let (code, v) = svc.submit(&body).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert_eq!(v["path"], "pages[0].type");

    let (code, v) = svc.submit(&json!({"pages": [{"type": "stack"}], "extra": 1})).await;
    assert_eq!(code, StatusCode::BAD_REQUEST, "{v}");
    let (code, v) = svc.submit(&json!({"pages": [{"type": "stack"}]})).await;
    assert_eq!((code, v["path"].as_str()), (StatusCode::BAD_REQUEST, Some("graph")));
    let (code, _) = svc.submit(&json!({"generator": {"name": "petersen"}, "pages": [{"type": "stack"}]})).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    let mut timed = job(&g, LayoutSpec::stacks(1));
    timed["solver"] = json!({"timeout_s": -1});
    assert_eq!(svc.submit(&timed).await.0, StatusCode::BAD_REQUEST);

    let huge = "x".repeat(100 << 10);
    let r = svc.client.post(format!("{}/jobs", svc.base)).body(huge).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::PAYLOAD_TOO_LARGE);

    assert_eq!(svc.get_raw("0190f000-0000-7000-8000-000000000000").await.0, StatusCode::NOT_FOUND);
    assert_eq!(svc.delete("nope").await.0, StatusCode::NOT_FOUND);
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn cancellation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.workers = 1;
    cfg.solver = slow_solver(dir.path());
    let svc = Running::start(cfg).await;
    let g = goldner_harary();
    let long = svc.submit_ok(&job(&g, LayoutSpec::stacks(3))).await;
    let queued = svc.submit_ok(&job(&g, LayoutSpec::stacks(3))).await;

    let start = Instant::now();
    while svc.record(&long).await.status != JobStatus::Running {
        assert!(start.elapsed() < Duration::from_secs(10));
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    let (code, v) = svc.delete(&queued).await;
    assert_eq!((code, v["status"].as_str()), (StatusCode::OK, Some("cancelled")));
    assert_eq!(svc.record(&queued).await.status, JobStatus::Cancelled);

    let t = Instant::now();
    assert_eq!(svc.delete(&long).await.0, StatusCode::ACCEPTED);
    let rec = svc.wait_terminal(&long, Duration::from_secs(5)).await;
    assert_eq!(rec.status, JobStatus::Cancelled);
    assert!(rec.stats.unwrap().cancelled);
    assert!(t.elapsed() < Duration::from_secs(2), "{:?}", t.elapsed());

    assert_eq!(svc.delete(&long).await.0, StatusCode::CONFLICT);
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn timeouts_are_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.solver = slow_solver(dir.path());
    cfg.timeout_cap = Duration::from_millis(300);
    let svc = Running::start(cfg).await;
    let mut body = job(&goldner_harary(), LayoutSpec::stacks(3));
    body["solver"] = json!({"timeout_s": 1000});
    let id = svc.submit_ok(&body).await;
    let rec = svc.wait_terminal(&id, Duration::from_secs(10)).await;
    assert_eq!(rec.status, JobStatus::Unknown);
    assert!(rec.result.is_none());
    assert!((rec.timeout_s - 0.3).abs() < 1e-9);
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn listing_pages_cover_every_record_once() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Running::start(config(dir.path())).await;
    let (code, v) = svc.list("").await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(v["jobs"], json!([]));
    assert_eq!(v["next_cursor"], Value::Null);

    let k4 = Graph::from_edges(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
    let mut ids = Vec::new();
    for i in 0..100 {
        let stacks = 1 + i % 2;
        ids.push(svc.submit_ok(&job(&k4, LayoutSpec::stacks(stacks))).await);
    }
    for id in &ids {
        svc.wait_terminal(id, Duration::from_secs(30)).await;
    }
    for limit in [1usize, 7, 33, 100, 1000] {
        let mut seen = Vec::new();
        let mut cursor: Option<String> = None;
        loop {
            let q = match &cursor {
                Some(c) => format!("limit={limit}&cursor={c}"),
                None => format!("limit={limit}"),
            };
            let (code, v) = svc.list(&q).await;
            assert_eq!(code, StatusCode::OK);
            let page = v["jobs"].as_array().unwrap();
            assert!(page.len() <= limit);
            seen.extend(page.iter().map(|j| j["id"].as_str().unwrap().to_string()));
            match v["next_cursor"].as_str() {
                Some(c) => cursor = Some(c.to_string()),
                None => break,
            }
        }
        assert_eq!(seen, ids, "limit {limit}");
    }
    let (_, sat) = svc.list("status=sat&limit=1000").await;
    let sat = sat["jobs"].as_array().unwrap();
    assert_eq!(sat.len(), 50);
    assert!(sat.iter().all(|j| j["status"] == "sat"));
    assert!(sat.iter().all(|j| j.get("graph").is_none()));
    assert_eq!(svc.list("cursor=not-a-cursor").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(svc.list("status=done").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(svc.list("limit=0").await.0, StatusCode::BAD_REQUEST);
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn records_survive_restart_and_interrupted_jobs_are_requeued() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Running::start(config(dir.path())).await;
    let g = goldner_harary();
    let mut done = Vec::new();
    for stacks in 1..=4 {
        let id = svc.submit_ok(&job(&g, LayoutSpec::stacks(stacks))).await;
        svc.wait_terminal(&id, Duration::from_secs(30)).await;
        done.push((id.clone(), svc.get_raw(&id).await.1));
    }
    svc.shutdown().await;

    // A job stranded mid-run by a crash.
    let store = Store::open(&dir.path().join("jobs.sqlite")).unwrap();
    let mut stranded: JobRecord = store.get(&done[0].0).unwrap().unwrap();
    stranded.id = uuid::Uuid::now_v7().to_string();
    stranded.status = JobStatus::Running;
    stranded.result = None;
    stranded.stats = None;
    store.insert(&stranded).unwrap();
    drop(store);

    let svc = Running::start(config(dir.path())).await;
    for (id, bytes) in &done {
        assert_eq!(&svc.get_raw(id).await.1, bytes);
    }
    let rec = svc.wait_terminal(&stranded.id, Duration::from_secs(30)).await;
    assert_eq!(rec.status, JobStatus::Unsat);
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn verify_on_read_rejects_tampered_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.verify_on_read = true;
    let svc = Running::start(cfg.clone()).await;
    let g = goldner_harary();
    let id = svc.submit_ok(&job(&g, LayoutSpec::stacks(3))).await;
    let mut rec = svc.wait_terminal(&id, Duration::from_secs(30)).await;
    assert_eq!(rec.status, JobStatus::Sat);
    svc.shutdown().await;

    let store = Store::open(&cfg.store).unwrap();
    for page in rec.result.as_mut().unwrap().assignment.values_mut() {
        *page = 0;
    }
    assert!(store.update_if(&rec, &[JobStatus::Sat], None).unwrap());
    drop(store);
    let svc = Running::start(cfg).await;
    let (code, body) = svc.get_raw(&id).await;
    assert_eq!(code, StatusCode::INTERNAL_SERVER_ERROR);
    assert!(String::from_utf8_lossy(&body).contains("verification"));
    svc.shutdown().await;
}

#[tokio::test(flavor = "multi_thread")]
async fn expired_records_are_purged() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Running::start(config(dir.path())).await;
    let id = svc.submit_ok(&job(&goldner_harary(), LayoutSpec::stacks(3))).await;
    svc.wait_terminal(&id, Duration::from_secs(30)).await;
    svc.shutdown().await;
    tokio::time::sleep(Duration::from_millis(50)).await;
    let mut cfg = config(dir.path());
    cfg.ttl = Some(Duration::from_millis(10));
    let svc = Running::start(cfg).await;
    assert_eq!(svc.get_raw(&id).await.0, StatusCode::NOT_FOUND);
    svc.shutdown().await;
}
