//! Starts the service on an ephemeral port with a temporary store, submits a
//! generated graph over HTTP and polls until the job finishes.

use std::time::Duration;

use linlayout_service::{Service, ServiceConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = ServiceConfig::new(dir.path().join("jobs.sqlite"));
    cfg.workers = 2;
    let service = Service::start(cfg)?;
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(service.serve(listener, async {
        let _ = stopped.await;
    }));

    let client = reqwest::Client::new();
    let body = json!({
        "generator": {"name": "goldner_harary"},
        "pages": [{"type": "stack"}, {"type": "stack"}, {"type": "stack"}],
    });
    let created: Value = client.post(format!("{base}/jobs")).json(&body).send().await?.json().await?;
    let id = created["id"].as_str().ok_or("no id")?.to_string();
    println!("submitted {id}");

    let record = loop {
        let r: Value = client.get(format!("{base}/jobs/{id}")).send().await?.json().await?;
        match r["status"].as_str() {
            Some("queued" | "running") => tokio::time::sleep(Duration::from_millis(50)).await,
            _ => break r,
        }
    };
    println!("status {}", record["status"]);
    if let Some(order) = record["result"]["order"].as_array() {
        println!("order {}", order.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "));
    }
    println!("stats {}", record["stats"]);

    let _ = stop.send(());
    server.await??;
    Ok(())
}
