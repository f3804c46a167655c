use serde::{Deserialize, Serialize};

use super::{DiscreteGraph, Edge, MetricGraph};
use crate::error::{Error, Result};

/// On-disk graph description (JSON).
///
/// ```json
/// {
///   "name": "lasso",
///   "vertices": ["v0", "v1"],
///   "edges": [
///     {"id": "loop", "from": "v0", "to": "v0", "length": 1.0},
///     {"id": "tail", "from": "v0", "to": "v1", "length": 1.0}
///   ]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDescription {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
}

impl GraphDescription {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }

    pub fn from_graph(g: &MetricGraph) -> Self {
        Self {
            name: g.name().to_string(),
            vertices: g.vertex_ids().to_vec(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeRecord {
                    id: e.id.clone(),
                    from: g.vertex_id(e.from).to_string(),
                    to: g.vertex_id(e.to).to_string(),
                    length: g.length(i),
                })
                .collect(),
        }
    }

    /// Validates and builds the graph.
    pub fn build(&self) -> Result<MetricGraph> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut index = std::collections::HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut lengths = Vec::with_capacity(self.edges.len());
        for rec in &self.edges {
            let lookup = |v: &str| {
                index.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: rec.id.clone(),
                    vertex: v.to_string(),
                })
            };
            edges.push(Edge {
                id: rec.id.clone(),
                from: lookup(&rec.from)?,
                to: lookup(&rec.to)?,
            });
            lengths.push(rec.length);
        }
        let graph = DiscreteGraph::new(self.vertices.clone(), edges)?;
        MetricGraph::new(self.name.clone(), graph, lengths)
    }
}

/// Convenience builder used by the example constructors.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    desc: GraphDescription,
}

impl Default for GraphDescription {
    fn default() -> Self {
        Self {
            name: String::new(),
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            desc: GraphDescription {
                name: name.into(),
                ..Default::default()
            },
        }
    }

    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.desc.vertices.push(id.into());
        self
    }

    pub fn vertices<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.desc.vertices.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn edge(mut self, id: impl Into<String>, from: impl Into<String>, to: impl Into<String>, length: f64) -> Self {
        self.desc.edges.push(EdgeRecord {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            length,
        });
        self
    }

    pub fn build(self) -> Result<MetricGraph> {
        self.desc.build()
    }
}

/// Parses and validates a JSON graph description.
pub fn build_graph(text: &str) -> Result<MetricGraph> {
    GraphDescription::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_path() {
        let g = GraphBuilder::new("p").vertices(["a", "b"]).edge("e", "a", "b", 1.0).build().unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertex_count(), 2);
    }

    #[test]
    fn single_loop_is_a_cycle() {
        let g = GraphBuilder::new("c").vertex("v").edge("e", "v", "v", 1.0).build().unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.betti(), 1);
    }

    #[test]
    fn dangling_endpoint() {
        let err = GraphBuilder::new("x").vertex("a").edge("e", "a", "zz", 1.0).build().unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { ref vertex, .. } if vertex == "zz"));
    }

    #[test]
    fn validation_errors() {
        let dup = GraphBuilder::new("x").vertices(["a", "a"]).build().unwrap_err();
        assert_eq!(dup, Error::DuplicateId("a".into()));
        let neg = GraphBuilder::new("x").vertices(["a", "b"]).edge("e", "a", "b", 0.0).build().unwrap_err();
        assert!(matches!(neg, Error::NonpositiveLength { .. }));
        let nan = GraphBuilder::new("x").vertices(["a", "b"]).edge("e", "a", "b", f64::NAN).build().unwrap_err();
        assert!(matches!(nan, Error::NonpositiveLength { .. }));
        let disc = GraphBuilder::new("x").vertices(["a", "b", "c"]).edge("e", "a", "b", 1.0).build().unwrap_err();
        assert_eq!(disc, Error::DisconnectedGraph { components: 2 });
        let dup_e = GraphBuilder::new("x")
            .vertices(["a", "b"])
            .edge("e", "a", "b", 1.0)
            .edge("e", "a", "b", 1.0)
            .build()
            .unwrap_err();
        assert_eq!(dup_e, Error::DuplicateId("e".into()));
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let text = r#"{"name":"lasso","vertices":["v0","v1"],
            "edges":[{"id":"loop","from":"v0","to":"v0","length":1.0},
                     {"id":"tail","from":"v0","to":"v1","length":1.0}]}"#;
        let g = build_graph(text).unwrap();
        let back = build_graph(&g.to_description().to_json()).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"name":"x","vertices":["a"],"edges":[],"extra":1}"#;
        assert!(matches!(build_graph(bad), Err(Error::Parse(_))));
    }
}
