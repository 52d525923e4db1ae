//! GraphML reading and writing.
//!
//! Node positions live in the `x` / `y` data keys. Layout constraints are a
//! JSON array in the graph-level `constraints` key; the page configuration,
//! when present, is a JSON array in the graph-level `pages` key.

use std::collections::HashMap;
use std::fmt::Write as _;

use roxmltree::{Document, Node};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Point};
use crate::layout::{Constraint, LayoutSpec, Page, SpecError};

const NS: &str = "http://graphml.graphdrawing.org/xmlns";

#[derive(Debug, Error)]
pub enum GraphmlError {
    #[error("malformed XML at line {line}: {message}")]
    Xml { line: u32, message: String },
    #[error("line {line}: {message}")]
    Structure { line: u32, message: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Data { line: u32, key: String, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: u32,
        #[source]
        source: GraphError,
    },
    #[error("constraint {index} references unknown {what} `{id}`")]
    Dangling { index: usize, what: &'static str, id: String },
    #[error("invalid page configuration: {0}")]
    Spec(#[from] SpecError),
}

/// Everything a document can carry.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphmlDocument {
    pub graph: Graph,
    pub constraints: Vec<Constraint>,
    pub pages: Option<Vec<Page>>,
}

impl GraphmlDocument {
    /// The stored spec, if the document has a page configuration.
    pub fn spec(&self) -> Option<LayoutSpec> {
        self.pages
            .clone()
            .map(|pages| LayoutSpec::new(pages).with_constraints(self.constraints.iter().cloned()))
    }
}

pub fn parse_graphml(doc: &[u8]) -> Result<(Graph, Vec<Constraint>), GraphmlError> {
    let d = read_graphml(doc)?;
    Ok((d.graph, d.constraints))
}

pub fn read_graphml(doc: &[u8]) -> Result<GraphmlDocument, GraphmlError> {
    let text = std::str::from_utf8(doc).map_err(|e| {
        let line = doc[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() as u32 + 1;
        GraphmlError::Xml {
            line,
            message: "document is not valid UTF-8".into(),
        }
    })?;
    let xml = Document::parse(text).map_err(|e| GraphmlError::Xml {
        line: e.pos().row,
        message: e.to_string(),
    })?;
    let line_of = |n: Node| xml.text_pos_at(n.range().start).row;
    let structure = |n: Node, message: String| GraphmlError::Structure {
        line: line_of(n),
        message,
    };

    let root = xml.root_element();
    if root.tag_name().name() != "graphml" {
        return Err(structure(root, format!("expected <graphml>, found <{}>", root.tag_name().name())));
    }
    // Key id -> attribute name. Keys without attr.name are known by their id.
    let mut keys: HashMap<&str, &str> = HashMap::new();
    for k in root.children().filter(|n| is_el(n, "key")) {
        let id = k.attribute("id").ok_or_else(|| structure(k, "<key> without id".into()))?;
        keys.insert(id, k.attribute("attr.name").unwrap_or(id));
    }
    let key_name = |d: Node| -> Result<String, GraphmlError> {
        let k = d
            .attribute("key")
            .ok_or_else(|| structure(d, "<data> without key".into()))?;
        Ok(keys.get(k).copied().unwrap_or(k).to_string())
    };

    let graph_el = root
        .children()
        .find(|n| is_el(n, "graph"))
        .ok_or_else(|| structure(root, "no <graph> element".into()))?;

    let mut g = Graph::new();
    let mut constraints = Vec::new();
    let mut pages = None;
    let mut auto_edge = 0usize;
    for child in graph_el.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "data" => match key_name(child)?.as_str() {
                "constraints" => constraints = json_data(child, "constraints", line_of(child))?,
                "pages" => pages = Some(json_data::<Vec<Page>>(child, "pages", line_of(child))?),
                _ => {}
            },
            "node" => {
                let id = child
                    .attribute("id")
                    .ok_or_else(|| structure(child, "<node> without id".into()))?;
                let (mut x, mut y) = (None, None);
                for d in child.children().filter(|n| is_el(n, "data")) {
                    let key = key_name(d)?;
                    let slot = match key.as_str() {
                        "x" => &mut x,
                        "y" => &mut y,
                        _ => continue,
                    };
                    let raw = d.text().unwrap_or("").trim();
                    *slot = Some(raw.parse::<f64>().map_err(|e| GraphmlError::Data {
                        line: line_of(d),
                        key: key.clone(),
                        message: e.to_string(),
                    })?);
                }
                let res = match (x, y) {
                    (Some(x), Some(y)) => g.add_vertex_at(id, Point::new(x, y)),
                    (None, None) => g.add_vertex(id),
                    _ => return Err(structure(child, format!("node `{id}` has only one coordinate"))),
                };
                res.map_err(|source| GraphmlError::Graph {
                    line: line_of(child),
                    source,
                })?;
            }
            _ => {}
        }
    }
    // Edges may precede the nodes they reference, so add them second.
    for child in graph_el.children().filter(|n| is_el(n, "edge")) {
        let endpoint = |a: &str| child.attribute(a).ok_or_else(|| structure(child, format!("<edge> without {a}")));
        let (s, t) = (endpoint("source")?, endpoint("target")?);
        let id = match child.attribute("id") {
            Some(id) => id.to_string(),
            None => {
                auto_edge += 1;
                format!("e{}", auto_edge - 1)
            }
        };
        g.add_edge(id, s, t).map_err(|source| GraphmlError::Graph {
            line: line_of(child),
            source,
        })?;
    }

    check_references(&g, &constraints)?;
    if let Some(pages) = &pages {
        LayoutSpec::new(pages.clone())
            .with_constraints(constraints.iter().cloned())
            .validate(&g)?;
    }
    Ok(GraphmlDocument {
        graph: g,
        constraints,
        pages,
    })
}

fn is_el(n: &Node, name: &str) -> bool {
    n.is_element() && n.tag_name().name() == name
}

fn json_data<T: serde::de::DeserializeOwned>(d: Node, key: &str, line: u32) -> Result<T, GraphmlError> {
    serde_json::from_str(d.text().unwrap_or("").trim()).map_err(|e| GraphmlError::Data {
        line,
        key: key.to_string(),
        message: e.to_string(),
    })
}

fn check_references(g: &Graph, cs: &[Constraint]) -> Result<(), GraphmlError> {
    for (index, c) in cs.iter().enumerate() {
        if let Some(v) = c.vertex_refs().into_iter().find(|v| !g.contains_vertex(v)) {
            return Err(GraphmlError::Dangling {
                index,
                what: "vertex",
                id: v.to_string(),
            });
        }
        if let Some(e) = c.edge_refs().into_iter().find(|e| !g.contains_edge(e)) {
            return Err(GraphmlError::Dangling {
                index,
                what: "edge",
                id: e.to_string(),
            });
        }
    }
    Ok(())
}

pub fn write_graphml(g: &Graph, cs: &[Constraint]) -> Result<Vec<u8>, GraphmlError> {
    write_graphml_document(g, cs, None)
}

/// Deterministic output: nodes and edges sorted by id.
pub fn write_graphml_document(g: &Graph, cs: &[Constraint], pages: Option<&[Page]>) -> Result<Vec<u8>, GraphmlError> {
    check_references(g, cs)?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<graphml xmlns=\"{NS}\">");
    out.push_str("  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"constraints\" for=\"graph\" attr.name=\"constraints\" attr.type=\"string\"/>\n");
    if pages.is_some() {
        out.push_str("  <key id=\"pages\" for=\"graph\" attr.name=\"pages\" attr.type=\"string\"/>\n");
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    let json = serde_json::to_string(cs).expect("constraints serialize");
    let _ = writeln!(out, "    <data key=\"constraints\">{}</data>", escape(&json));
    if let Some(pages) = pages {
        let json = serde_json::to_string(pages).expect("pages serialize");
        let _ = writeln!(out, "    <data key=\"pages\">{}</data>", escape(&json));
    }
    for (v, pos) in g.vertices_with_positions() {
        match pos {
            Some(p) => {
                let _ = writeln!(out, "    <node id=\"{}\">", escape(v.as_str()));
                let _ = writeln!(out, "      <data key=\"x\">{}</data>", p.x);
                let _ = writeln!(out, "      <data key=\"y\">{}</data>", p.y);
                out.push_str("    </node>\n");
            }
            None => {
                let _ = writeln!(out, "    <node id=\"{}\"/>", escape(v.as_str()));
            }
        }
    }
    for (id, e) in g.edges() {
        let _ = writeln!(
            out,
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\"/>",
            escape(id.as_str()),
            escape(e.source.as_str()),
            escape(e.target.as_str())
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok(out.into_bytes())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
