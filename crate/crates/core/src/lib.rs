//! Eigenvalues, eigenfunctions and hot spots of the standard
//! (continuity–Kirchhoff) Laplacian on compact metric graphs.
//!
//! * [`graph`]: metric graphs, structural decompositions, distances, surgery.
//! * [`spectral`]: secular-equation solver with a finite-element cross-check.
//! * [`hotspots`]: extrema of second eigenfunctions and structural verifiers.
//! * [`catalog`]: named graph families and constructive procedures.

pub mod catalog;
pub mod error;
pub mod graph;
pub mod hotspots;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};
pub use graph::{GraphPoint, MetricGraph};
