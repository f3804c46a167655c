//! Compact metric graphs: construction, validation and combinatorial structure.
//!
//! Edges are stored in description order; that order is the canonical edge
//! ordering used downstream (eigenfunction sign conventions, reports).

mod description;
mod metric;
mod structure;
mod surgery;

pub use description::{build_graph, EdgeRecord, GraphBuilder, GraphDescription};
pub use metric::{diameter, distance, distance_with, vertex_distances};
pub use structure::{Subgraph, DoublyConnectedPart};
pub use surgery::{
    attach_pendant, disconnect, disconnect_points, glue, shrink_edge, split_edge, split_points, suppress_degree_two,
    surgery, Surgery,
};

use crate::error::{Error, Result};
use crate::tol;

/// Which end of an edge: `Origin` is offset 0, `Terminal` is offset `L(e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum End {
    Origin,
    Terminal,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Origin => End::Terminal,
            End::Terminal => End::Origin,
        }
    }
}

/// One edge end incident to a vertex. A loop contributes two of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }

    pub fn vertex(&self, end: End) -> usize {
        match end {
            End::Origin => self.from,
            End::Terminal => self.to,
        }
    }
}

/// Connectivity only: vertex ids, and edges as (id, origin, terminal).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeEnd>>,
}

impl DiscreteGraph {
    /// Validates ids and endpoints. Connectivity is checked separately so that
    /// intermediate surgery results may be split into components.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut seen_e = std::collections::HashSet::new();
        for e in &edges {
            if !seen_e.insert(e.id.as_str()) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            for &v in &[e.from, e.to] {
                if v >= vertices.len() {
                    return Err(Error::DanglingEndpoint {
                        edge: e.id.clone(),
                        vertex: format!("#{v}"),
                    });
                }
            }
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.from].push(EdgeEnd { edge: i, end: End::Origin });
            incidence[e.to].push(EdgeEnd { edge: i, end: End::Terminal });
        }
        Ok(Self {
            vertices,
            edges,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Edge ends at `v`, in edge order; loops appear twice.
    pub fn incidence(&self, v: usize) -> &[EdgeEnd] {
        &self.incidence[v]
    }

    /// Loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// Component label per vertex, ignoring the edges in `removed`.
    pub fn component_labels(&self, removed: &[usize]) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = count;
            while let Some(v) = stack.pop() {
                for ee in &self.incidence[v] {
                    if removed.contains(&ee.edge) {
                        continue;
                    }
                    let w = self.edges[ee.edge].vertex(ee.end.opposite());
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels(&[]).0 == 1
    }

    /// `E - V + 1`.
    pub fn betti(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) == 1).collect()
    }
}

/// A location on a graph: an edge and an arclength offset from its origin.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

impl GraphPoint {
    pub fn new(edge: usize, offset: f64) -> Self {
        Self { edge, offset }
    }
}

/// Canonical form of a [`GraphPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Vertex(usize),
    Interior { edge: usize, offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    name: String,
    graph: DiscreteGraph,
    lengths: Vec<f64>,
}

impl MetricGraph {
    /// Builds a validated, connected metric graph.
    pub fn new(name: impl Into<String>, graph: DiscreteGraph, lengths: Vec<f64>) -> Result<Self> {
        let g = Self::new_unchecked_connectivity(name, graph, lengths)?;
        let (components, _) = g.graph.component_labels(&[]);
        if components != 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked_connectivity(
        name: impl Into<String>,
        graph: DiscreteGraph,
        lengths: Vec<f64>,
    ) -> Result<Self> {
        assert_eq!(graph.edge_count(), lengths.len());
        for (e, &l) in graph.edges.iter().zip(&lengths) {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::NonpositiveLength {
                    edge: e.id.clone(),
                    length: l,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            graph,
            lengths,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn discrete(&self) -> &DiscreteGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        self.graph.edge(e)
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        self.graph.vertex_id(v)
    }

    pub fn vertex_ids(&self) -> &[String] {
        self.graph.vertex_ids()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.graph.vertex_index(id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.graph.edge_index(id)
    }

    pub fn incidence(&self, v: usize) -> &[EdgeEnd] {
        self.graph.incidence(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.lengths.iter().cloned().fold(0.0, f64::max)
    }

    /// Copy with new edge lengths (same topology).
    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self> {
        Self::new(self.name.clone(), self.graph.clone(), lengths)
    }

    pub fn betti(&self) -> usize {
        self.graph.betti()
    }

    pub fn is_tree(&self) -> bool {
        self.betti() == 0
    }

    /// Vertices of degree one.
    pub fn boundary(&self) -> Subgraph {
        Subgraph::from_vertices(self.graph.boundary_vertices())
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        self.graph.boundary_vertices()
    }

    /// Point-coincidence tolerance, proportional to the total length.
    pub fn point_tolerance(&self) -> f64 {
        tol::POINT_REL * self.total_length()
    }

    /// The point of `v` on its first incident edge.
    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let ee = self.incidence(v)[0];
        let offset = match ee.end {
            End::Origin => 0.0,
            End::Terminal => self.length(ee.edge),
        };
        GraphPoint::new(ee.edge, offset)
    }

    pub fn end_point(&self, e: usize, end: End) -> GraphPoint {
        match end {
            End::Origin => GraphPoint::new(e, 0.0),
            End::Terminal => GraphPoint::new(e, self.length(e)),
        }
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        if p.edge >= self.edge_count() {
            return Err(Error::InvalidPoint(format!("edge index {} out of range", p.edge)));
        }
        let tol = self.point_tolerance();
        if !(p.offset.is_finite() && p.offset >= -tol && p.offset <= self.length(p.edge) + tol) {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside [0, {}] on edge `{}`",
                p.offset,
                self.length(p.edge),
                self.edge(p.edge).id
            )));
        }
        Ok(())
    }

    /// Snaps offsets within the point tolerance of an endpoint to that vertex.
    pub fn locate(&self, p: &GraphPoint) -> Location {
        let tol = self.point_tolerance();
        let e = self.edge(p.edge);
        if p.offset <= tol {
            Location::Vertex(e.from)
        } else if p.offset >= self.length(p.edge) - tol {
            Location::Vertex(e.to)
        } else {
            Location::Interior {
                edge: p.edge,
                offset: p.offset,
            }
        }
    }

    pub fn same_point(&self, p: &GraphPoint, q: &GraphPoint) -> bool {
        match (self.locate(p), self.locate(q)) {
            (Location::Vertex(a), Location::Vertex(b)) => a == b,
            (Location::Interior { edge: e1, offset: s }, Location::Interior { edge: e2, offset: t }) => {
                e1 == e2 && (s - t).abs() <= self.point_tolerance()
            }
            _ => false,
        }
    }

    /// Human-readable label: a vertex id or `edge@offset`.
    pub fn describe_point(&self, p: &GraphPoint) -> String {
        match self.locate(p) {
            Location::Vertex(v) => self.vertex_id(v).to_string(),
            Location::Interior { edge, offset } => format!("{}@{:.12}", self.edge(edge).id, offset),
        }
    }

    /// Edges whose removal (keeping endpoints) disconnects the graph.
    pub fn bridges(&self) -> Vec<usize> {
        structure::bridges(&self.graph)
    }

    pub fn doubly_connected_part(&self) -> DoublyConnectedPart {
        structure::doubly_connected_part(self)
    }

    pub fn to_description(&self) -> GraphDescription {
        GraphDescription::from_graph(self)
    }
}
