//! The job request document shared by the CLI and the HTTP service.
//!
//! ```json
//! {"graph": {"vertices": [{"id": "a"}], "edges": []},
//!  "pages": [{"type": "stack", "restriction": "none"}],
//!  "constraints": [], "solver": {"timeout_s": 30}}
//! ```
//!
//! `"generator": {"name": ..., "params": {...}}` may replace `"graph"`.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{
    generate_skeleton, generate_stellated_skeleton, generate_step2_gadget, goldner_harary, random_triangulated_quad,
    ConstructionError,
};
use crate::graph::Graph;
use crate::layout::{Constraint, LayoutSpec, Page, SpecError};

/// Generators refuse parameters above this, so a request cannot ask for an
/// arbitrarily large allocation.
pub const MAX_GENERATOR_SIZE: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<Graph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    pub pages: Vec<Page>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOptions>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error("exactly one of `graph` and `generator` must be given")]
    GraphSource,
    #[error("unknown generator `{0}` (expected skeleton, stellated_skeleton, step2_gadget, goldner_harary or random_triangulated_quad)")]
    UnknownGenerator(String),
    #[error("generator parameter `{0}` must be a non-negative integer no larger than {MAX_GENERATOR_SIZE}")]
    BadParam(String),
    #[error("solver.timeout_s must be a positive number")]
    BadTimeout,
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: Default::default(),
        }
    }

    pub fn param(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    fn get(&self, key: &str, cap: u64) -> Result<u64, JobError> {
        self.params
            .get(key)
            .and_then(serde_json::Value::as_u64)
            .filter(|&v| v <= cap)
            .ok_or_else(|| JobError::BadParam(key.to_string()))
    }

    pub fn build(&self) -> Result<Graph, JobError> {
        let size = |k| self.get(k, MAX_GENERATOR_SIZE).map(|v| v as usize);
        Ok(match self.name.as_str() {
            "skeleton" => generate_skeleton(size("n")?)?.0,
            "stellated_skeleton" => generate_stellated_skeleton(size("n")?)?.0,
            "step2_gadget" => generate_step2_gadget(size("k")?)?.0,
            "goldner_harary" => goldner_harary(),
            "random_triangulated_quad" => random_triangulated_quad(size("n")?, self.get("seed", u64::MAX)?)?.0,
            other => return Err(JobError::UnknownGenerator(other.to_string())),
        })
    }
}

impl JobRequest {
    pub fn new(graph: Graph, spec: LayoutSpec) -> Self {
        Self {
            graph: Some(graph),
            generator: None,
            pages: spec.pages,
            constraints: spec.constraints,
            solver: None,
        }
    }

    pub fn timeout(&self) -> Result<Option<Duration>, JobError> {
        match self.solver.as_ref().and_then(|s| s.timeout_s) {
            None => Ok(None),
            Some(t) if t.is_finite() && t > 0.0 => Ok(Some(Duration::from_secs_f64(t))),
            Some(_) => Err(JobError::BadTimeout),
        }
    }

    /// Materializes the graph and checks the spec against it.
    pub fn resolve(&self) -> Result<(Graph, LayoutSpec), JobError> {
        let graph = match (&self.graph, &self.generator) {
            (Some(g), None) => g.clone(),
            (None, Some(gen)) => gen.build()?,
            _ => return Err(JobError::GraphSource),
        };
        self.timeout()?;
        let spec = LayoutSpec::new(self.pages.clone()).with_constraints(self.constraints.iter().cloned());
        spec.validate(&graph)?;
        Ok((graph, spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_body() {
        let body = r#"{"graph":{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"id":"e","source":"a","target":"b"}]},
                       "pages":[{"type":"stack"}]}"#;
        let req: JobRequest = serde_json::from_str(body).unwrap();
        let (g, spec) = req.resolve().unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(spec.page_count(), 1);
    }

    #[test]
    fn generator_body() {
        let body = r#"{"generator":{"name":"step2_gadget","params":{"k":2}},"pages":[{"type":"stack"}]}"#;
        let req: JobRequest = serde_json::from_str(body).unwrap();
        assert_eq!(req.resolve().unwrap().0.vertex_count(), 10);
        let bad = GeneratorSpec::new("skeleton").param("n", MAX_GENERATOR_SIZE + 1);
        assert_eq!(bad.build(), Err(JobError::BadParam("n".into())));
        assert!(matches!(GeneratorSpec::new("nope").build(), Err(JobError::UnknownGenerator(_))));
    }

    #[test]
    fn rejects_inconsistent_requests() {
        let g = Graph::from_edges(&[("a", "b")]).unwrap();
        let mut req = JobRequest::new(g, LayoutSpec::stacks(1));
        req.generator = Some(GeneratorSpec::new("goldner_harary"));
        assert_eq!(req.resolve().unwrap_err(), JobError::GraphSource);
        req.generator = None;
        req.solver = Some(SolverOptions { timeout_s: Some(-1.0) });
        assert_eq!(req.resolve().unwrap_err(), JobError::BadTimeout);
    }
}
