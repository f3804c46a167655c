use super::{quad, EigenFunction};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;

/// A trial function for the Rayleigh quotient.
#[derive(Debug, Clone, Copy)]
pub enum TestFunction<'a> {
    /// Sinusoid traces; integrals are exact.
    Traces(&'a EigenFunction),
    /// Piecewise-linear interpolant of equispaced samples per edge, origin to
    /// terminal (at least two samples per edge).
    Nodal(&'a [Vec<f64>]),
}

/// `∫|f'|² / ∫|f|²`, optionally after subtracting the mean of `f`.
pub fn rayleigh_quotient(g: &MetricGraph, f: TestFunction<'_>, remove_mean: bool) -> Result<f64> {
    let (energy, mass, integral) = match f {
        TestFunction::Traces(ef) => (ef.energy(g), ef.norm_sq(g), ef.mean_integral(g)),
        TestFunction::Nodal(samples) => nodal_integrals(g, samples)?,
    };
    finish(g, energy, mass, integral, remove_mean)
}

/// Composite Gauss–Legendre version for functions given as closures.
pub fn rayleigh_quadrature(
    g: &MetricGraph,
    value: impl Fn(usize, f64) -> f64,
    derivative: impl Fn(usize, f64) -> f64,
    remove_mean: bool,
) -> Result<f64> {
    let (mut energy, mut mass, mut integral) = (0.0, 0.0, 0.0);
    for e in 0..g.edge_count() {
        let len = g.length(e);
        let panels = 64;
        energy += quad::integrate(0.0, len, panels, |x| derivative(e, x).powi(2));
        mass += quad::integrate(0.0, len, panels, |x| value(e, x).powi(2));
        integral += quad::integrate(0.0, len, panels, |x| value(e, x));
    }
    finish(g, energy, mass, integral, remove_mean)
}

fn nodal_integrals(g: &MetricGraph, samples: &[Vec<f64>]) -> Result<(f64, f64, f64)> {
    if samples.len() != g.edge_count() || samples.iter().any(|s| s.len() < 2) {
        return Err(Error::BadParameter {
            name: "samples".into(),
            reason: "need at least two samples on every edge".into(),
        });
    }
    let (mut energy, mut mass, mut integral) = (0.0, 0.0, 0.0);
    for (e, s) in samples.iter().enumerate() {
        let h = g.length(e) / (s.len() - 1) as f64;
        for w in s.windows(2) {
            let (a, b) = (w[0], w[1]);
            energy += (b - a).powi(2) / h;
            mass += h * (a * a + a * b + b * b) / 3.0;
            integral += h * (a + b) / 2.0;
        }
    }
    Ok((energy, mass, integral))
}

fn finish(g: &MetricGraph, energy: f64, mass: f64, integral: f64, remove_mean: bool) -> Result<f64> {
    let denom = if remove_mean {
        mass - integral * integral / g.total_length()
    } else {
        mass
    };
    if !(denom > 1e-24 * mass.max(f64::MIN_POSITIVE)) || mass == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(energy / denom)
}
