//! Seeded random graphs. Lengths are uniform in `[0.2, 1.5)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::builders::star;
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MetricGraph};

const MIN_LENGTH: f64 = 0.2;
const MAX_LENGTH: f64 = 1.5;

fn length(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(MIN_LENGTH..MAX_LENGTH)
}

/// A tree with between 1 and `max_edges` edges; vertex `v{i}` hangs off a
/// uniformly chosen earlier vertex.
pub fn random_tree(seed: u64, max_edges: usize) -> Result<MetricGraph> {
    if max_edges == 0 {
        return Err(Error::BadParameter {
            name: "max_edges".into(),
            reason: "need at least one edge".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_edges);
    let mut b = GraphBuilder::new(format!("random_tree_{seed}")).vertex("v0");
    for i in 1..=n {
        let parent = rng.gen_range(0..i);
        let l = length(&mut rng);
        b = b.vertex(format!("v{i}")).edge(format!("e{i}"), format!("v{parent}"), format!("v{i}"), l);
    }
    b.build()
}

/// A star with between 2 and `max_edges` edges.
pub fn random_star(seed: u64, max_edges: usize) -> Result<MetricGraph> {
    if max_edges < 2 {
        return Err(Error::BadParameter {
            name: "max_edges".into(),
            reason: "need at least two edges".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_edges);
    let lengths: Vec<f64> = (0..n).map(|_| length(&mut rng)).collect();
    Ok(star(&lengths)?.with_name(format!("random_star_{seed}")))
}

/// A random spanning tree on `vertices` vertices plus `extra` further edges
/// between random (possibly equal) endpoints.
pub fn random_graph(seed: u64, vertices: usize, extra: usize) -> Result<MetricGraph> {
    if vertices == 0 || (vertices == 1 && extra == 0) {
        return Err(Error::BadParameter {
            name: "vertices".into(),
            reason: "need at least one edge".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(format!("random_graph_{seed}")).vertices((0..vertices).map(|i| format!("v{i}")));
    for i in 1..vertices {
        let parent = rng.gen_range(0..i);
        let l = length(&mut rng);
        b = b.edge(format!("t{i}"), format!("v{parent}"), format!("v{i}"), l);
    }
    for j in 0..extra {
        let (u, v) = (rng.gen_range(0..vertices), rng.gen_range(0..vertices));
        let l = length(&mut rng);
        b = b.edge(format!("c{j}"), format!("v{u}"), format!("v{v}"), l);
    }
    b.build()
}
