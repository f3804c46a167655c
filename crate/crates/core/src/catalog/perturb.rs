use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::spectral::{mu2_pair, EigenPair};

const MAX_ITERATIONS: usize = 60;
const EQUAL_REL: f64 = 1e-9;

/// One pair move: `first` grows by `delta`, `second` shrinks so that the
/// floating-point sum of the two lengths is unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairChange {
    pub first: String,
    pub second: String,
    pub delta: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub graph: MetricGraph,
    pub changes: Vec<PairChange>,
    /// Leaf id and value of the final `μ₂` eigenfunction.
    pub leaf_values: Vec<(String, f64)>,
    pub iterations: usize,
}

struct State {
    pair: EigenPair,
    values: Vec<f64>,
    equal: Vec<(usize, usize)>,
}

impl State {
    fn of(g: &MetricGraph, leaves: &[usize]) -> Result<Self> {
        let pair = mu2_pair(g)?;
        let f = &pair.basis[0];
        let values: Vec<f64> = leaves.iter().map(|&v| f.vertex_value(g, v)).collect();
        let tol = EQUAL_REL * f.max_amplitude();
        let mut equal = Vec::new();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                if (values[i] - values[j]).abs() <= tol {
                    equal.push((i, j));
                }
            }
        }
        Ok(Self { pair, values, equal })
    }

    fn badness(&self) -> usize {
        self.equal.len() + self.pair.multiplicity - 1
    }
}

/// `b` adjusted by a few ulps so that `a + b` rounds to exactly `sum`.
fn complement(sum: f64, a: f64) -> f64 {
    let mut b = sum - a;
    for _ in 0..8 {
        let s = a + b;
        if s == sum {
            break;
        }
        b = if s > sum { b.next_down() } else { b.next_up() };
    }
    b
}

/// Perturbs pairs of pendant edges, keeping each pair's total length, until
/// `μ₂` is simple and its eigenfunction takes pairwise distinct values on the
/// leaves. The perturbation size starts below `eps` and halves whenever a
/// move fails to reduce the number of coincidences.
pub fn boundary_distinct_perturb(g: &MetricGraph, eps: f64, seed: u64) -> Result<Perturbation> {
    let leaves = g.boundary_vertices();
    if leaves.len() < 2 {
        return Err(Error::NoBoundary);
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::BadParameter {
            name: "eps".into(),
            reason: "need a positive perturbation bound".into(),
        });
    }
    let pendant = |v: usize| g.incidence(v)[0].edge;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = g.clone();
    let mut state = State::of(&cur, &leaves)?;
    let mut changes = Vec::new();
    let mut scale = 1.0;
    for it in 0..MAX_ITERATIONS {
        if state.badness() == 0 {
            return Ok(finish(cur, &leaves, state, changes, it));
        }
        let (i, j) = state
            .equal
            .first()
            .copied()
            .or_else(|| (1..leaves.len()).find(|&j| pendant(leaves[j]) != pendant(leaves[0])).map(|j| (0, j)))
            .ok_or(Error::PerturbationStalled { iterations: it })?;
        let (mut a, mut b) = (pendant(leaves[i]), pendant(leaves[j]));
        if a == b {
            return Err(Error::PerturbationStalled { iterations: it });
        }
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        let (la, lb) = (cur.length(a), cur.length(b));
        let delta = (eps * scale * rng.gen_range(0.25..0.5)).min(0.5 * lb);
        let sum = la + lb;
        let new_a = la + delta;
        let mut lengths = cur.lengths().to_vec();
        lengths[a] = new_a;
        lengths[b] = complement(sum, new_a);
        let cand = cur.with_lengths(lengths)?;
        let next = State::of(&cand, &leaves)?;
        if next.badness() < state.badness() {
            changes.push(PairChange {
                first: cur.edge(a).id.clone(),
                second: cur.edge(b).id.clone(),
                delta,
                sum,
            });
            cur = cand;
            state = next;
        } else {
            scale *= 0.5;
        }
    }
    if state.badness() == 0 {
        return Ok(finish(cur, &leaves, state, changes, MAX_ITERATIONS));
    }
    Err(Error::PerturbationStalled {
        iterations: MAX_ITERATIONS,
    })
}

fn finish(g: MetricGraph, leaves: &[usize], state: State, changes: Vec<PairChange>, iterations: usize) -> Perturbation {
    let leaf_values = leaves
        .iter()
        .zip(&state.values)
        .map(|(&v, &x)| (g.vertex_id(v).to_string(), x))
        .collect();
    Perturbation {
        graph: g,
        changes,
        leaf_values,
        iterations,
    }
}
