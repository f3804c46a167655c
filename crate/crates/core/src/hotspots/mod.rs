//! Extrema of second eigenfunctions and structural verifiers.
//!
//! For a simple eigenvalue the sets are exact. For a multiple one they are
//! certified subsets: extrema of sampled eigenfunctions, closed up by joining
//! nearby crest maxima on an edge into segments.

mod combine;
mod extrema;
mod report;
mod verify;

pub use combine::{combination_alpha, combine, complete_apex_eigenfunction, Combination};
pub use extrema::{extrema_single, extrema_with, Extrema, ExtremumKind, ExtremumPoint, Scope};
pub use report::{hotspot_sets, hotspot_sets_with, Component, HotspotReport, Sampling, Shape};
pub use verify::{
    disconnect_extrema, distance_ratio, extrema_distance_ratio, extrema_distance_ratio_single, reverify,
    star_center, star_diameter_check, verify_location, verify_no_disconnect, verify_tree_boundary, Status,
    VerifierOutcome,
};
