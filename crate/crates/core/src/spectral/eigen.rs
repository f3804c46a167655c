use serde::{Deserialize, Serialize};

use super::quad;
use crate::graph::{End, GraphPoint, Location, MetricGraph};

/// `A cos(kx) + B sin(kx)` on `[0, L(edge)]`; a constant `A` when `k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTrace {
    pub edge: usize,
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl EdgeTrace {
    pub fn new(edge: usize, a: f64, b: f64, k: f64) -> Self {
        Self { edge, a, b, k }
    }

    pub fn value(&self, x: f64) -> f64 {
        if self.k == 0.0 {
            return self.a;
        }
        let (s, c) = (self.k * x).sin_cos();
        self.a * c + self.b * s
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if self.k == 0.0 {
            return 0.0;
        }
        let (s, c) = (self.k * x).sin_cos();
        self.k * (-self.a * s + self.b * c)
    }

    /// Amplitude `R` and phase `φ` with `ψ = R cos(kx − φ)`.
    pub fn polar(&self) -> (f64, f64) {
        (self.a.hypot(self.b), self.b.atan2(self.a))
    }

    pub fn integral(&self, len: f64) -> f64 {
        if self.k == 0.0 {
            return self.a * len;
        }
        let (s, c) = (self.k * len).sin_cos();
        (self.a * s + self.b * (1.0 - c)) / self.k
    }

    /// `∫ ψ φ` for two traces on the same edge.
    pub fn dot(&self, other: &EdgeTrace, len: f64) -> f64 {
        if self.k == other.k {
            let (icc, iss, ics) = cos_sin_integrals(self.k, len);
            self.a * other.a * icc + self.b * other.b * iss + (self.a * other.b + self.b * other.a) * ics
        } else {
            quad::integrate(0.0, len, 1 + (self.k.max(other.k) * len) as usize, |x| {
                self.value(x) * other.value(x)
            })
        }
    }

    pub fn norm_sq(&self, len: f64) -> f64 {
        self.dot(self, len)
    }

    /// `∫ |ψ'|²`.
    pub fn energy(&self, len: f64) -> f64 {
        if self.k == 0.0 {
            return 0.0;
        }
        let (icc, iss, ics) = cos_sin_integrals(self.k, len);
        self.k * self.k * (self.a * self.a * iss + self.b * self.b * icc - 2.0 * self.a * self.b * ics)
    }

    /// `sup |ψ|` on `[0, len]`.
    pub fn sup(&self, len: f64) -> f64 {
        let ends = self.value(0.0).abs().max(self.value(len).abs());
        if self.k == 0.0 {
            return ends;
        }
        let (r, phi) = self.polar();
        if phase_hit(self.k, len, phi, 0.0) {
            r
        } else {
            ends
        }
    }

    /// `sup |ψ'|` on `[0, len]`.
    pub fn sup_derivative(&self, len: f64) -> f64 {
        let ends = self.derivative(0.0).abs().max(self.derivative(len).abs());
        if self.k == 0.0 {
            return 0.0;
        }
        let (r, phi) = self.polar();
        if phase_hit(self.k, len, phi, std::f64::consts::FRAC_PI_2) {
            self.k * r
        } else {
            ends
        }
    }
}

/// Whether `kx − φ ≡ shift (mod π)` for some `x ∈ [0, len]`.
fn phase_hit(k: f64, len: f64, phi: f64, shift: f64) -> bool {
    let pi = std::f64::consts::PI;
    let lo = ((-phi - shift) / pi).ceil();
    let x = (phi + shift + lo * pi) / k;
    x <= len
}

/// `(∫cos², ∫sin², ∫cos·sin)` of `kx` over `[0, len]`.
pub(crate) fn cos_sin_integrals(k: f64, len: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        return (len, 0.0, 0.0);
    }
    let s2 = (2.0 * k * len).sin();
    let sh = (k * len).sin();
    let icc = len / 2.0 + s2 / (4.0 * k);
    let iss = len / 2.0 - s2 / (4.0 * k);
    // (1 − cos 2kL)/(4k) written as sin²(kL)/(2k) to avoid cancellation
    let ics = sh * sh / (2.0 * k);
    (icc, iss, ics)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    /// First edge (in description order) with a nonzero trace starts positive,
    /// or with a positive slope when its value at the origin vanishes.
    FirstNonzeroPositive,
    /// Sign chosen by the caller (e.g. aligned with a reference function).
    Aligned,
    Unnormalized,
}

/// A function on the graph given by one sinusoid trace per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub k: f64,
    pub traces: Vec<EdgeTrace>,
    pub norm: f64,
    pub sign: SignConvention,
}

impl EigenFunction {
    pub fn from_coefficients(k: f64, coeffs: &[f64]) -> Self {
        let traces = coeffs
            .chunks_exact(2)
            .enumerate()
            .map(|(e, ab)| EdgeTrace::new(e, ab[0], ab[1], k))
            .collect();
        Self {
            k,
            traces,
            norm: f64::NAN,
            sign: SignConvention::Unnormalized,
        }
    }

    pub fn constant(g: &MetricGraph, value: f64) -> Self {
        let traces = (0..g.edge_count()).map(|e| EdgeTrace::new(e, value, 0.0, 0.0)).collect();
        Self {
            k: 0.0,
            traces,
            norm: value.abs() * g.total_length().sqrt(),
            sign: SignConvention::FirstNonzeroPositive,
        }
    }

    pub fn mu(&self) -> f64 {
        self.k * self.k
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.traces.iter().flat_map(|t| [t.a, t.b]).collect()
    }

    pub fn trace(&self, e: usize) -> &EdgeTrace {
        &self.traces[e]
    }

    pub fn evaluate(&self, p: &GraphPoint) -> f64 {
        self.traces[p.edge].value(p.offset)
    }

    /// Derivative along the edge orientation at `p`.
    pub fn derivative(&self, p: &GraphPoint) -> f64 {
        self.traces[p.edge].derivative(p.offset)
    }

    /// Derivative at an edge end pointing into the edge.
    pub fn outgoing_derivative(&self, g: &MetricGraph, edge: usize, end: End) -> f64 {
        let t = &self.traces[edge];
        match end {
            End::Origin => t.derivative(0.0),
            End::Terminal => -t.derivative(g.length(edge)),
        }
    }

    pub fn end_value(&self, g: &MetricGraph, edge: usize, end: End) -> f64 {
        match end {
            End::Origin => self.traces[edge].value(0.0),
            End::Terminal => self.traces[edge].value(g.length(edge)),
        }
    }

    /// Value at a vertex, read from its first incident end.
    pub fn vertex_value(&self, g: &MetricGraph, v: usize) -> f64 {
        let ee = g.incidence(v)[0];
        self.end_value(g, ee.edge, ee.end)
    }

    pub fn value_at(&self, g: &MetricGraph, p: &GraphPoint) -> f64 {
        match g.locate(p) {
            Location::Vertex(v) => self.vertex_value(g, v),
            Location::Interior { edge, offset } => self.traces[edge].value(offset),
        }
    }

    pub fn dot(&self, other: &EigenFunction, g: &MetricGraph) -> f64 {
        self.traces
            .iter()
            .zip(&other.traces)
            .enumerate()
            .map(|(e, (a, b))| a.dot(b, g.length(e)))
            .sum()
    }

    pub fn norm_sq(&self, g: &MetricGraph) -> f64 {
        self.dot(self, g)
    }

    pub fn mean_integral(&self, g: &MetricGraph) -> f64 {
        self.traces.iter().enumerate().map(|(e, t)| t.integral(g.length(e))).sum()
    }

    pub fn energy(&self, g: &MetricGraph) -> f64 {
        self.traces.iter().enumerate().map(|(e, t)| t.energy(g.length(e))).sum()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.traces.iter().map(|t| t.a.hypot(t.b)).fold(0.0, f64::max)
    }

    pub fn sup(&self, g: &MetricGraph) -> f64 {
        self.traces.iter().enumerate().map(|(e, t)| t.sup(g.length(e))).fold(0.0, f64::max)
    }

    pub fn sup_derivative(&self, g: &MetricGraph) -> f64 {
        self.traces
            .iter()
            .enumerate()
            .map(|(e, t)| t.sup_derivative(g.length(e)))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.traces {
            t.a *= factor;
            t.b *= factor;
        }
        out.norm *= factor.abs();
        out
    }

    /// `self + alpha·other` (same wavenumber per edge).
    pub fn add_scaled(&self, other: &EigenFunction, alpha: f64) -> Self {
        let mut out = self.clone();
        for (t, o) in out.traces.iter_mut().zip(&other.traces) {
            t.a += alpha * o.a;
            t.b += alpha * o.b;
        }
        out.norm = f64::NAN;
        out.sign = SignConvention::Unnormalized;
        out
    }

    pub fn normalized(&self, g: &MetricGraph) -> Self {
        let n = self.norm_sq(g).sqrt();
        let mut out = self.scaled(1.0 / n);
        out.norm = 1.0;
        out
    }

    /// Flips the sign so that the first edge with a nonzero trace has a
    /// positive value at its origin (or a positive slope if that value is zero).
    pub fn canonical_sign(mut self, g: &MetricGraph) -> Self {
        let scale = self.max_amplitude();
        let tiny = 1e-12 * scale;
        for (e, t) in self.traces.iter().enumerate() {
            if t.a.hypot(t.b) <= tiny {
                continue;
            }
            let v = t.value(0.0);
            let s = if v.abs() > tiny * 1e3 {
                v.signum()
            } else {
                let d = t.derivative(0.0);
                if d.abs() > tiny * t.k.max(1.0 / g.length(e)) {
                    d.signum()
                } else {
                    continue;
                }
            };
            if s < 0.0 {
                self = self.scaled(-1.0);
            }
            break;
        }
        self.sign = SignConvention::FirstNonzeroPositive;
        self
    }

    pub fn residuals(&self, g: &MetricGraph) -> Residuals {
        let amp = self.max_amplitude().max(f64::MIN_POSITIVE);
        let mut continuity = 0.0f64;
        let mut kirchhoff = 0.0f64;
        for v in 0..g.vertex_count() {
            let inc = g.incidence(v);
            let first = self.end_value(g, inc[0].edge, inc[0].end);
            let mut flux = 0.0;
            for ee in inc {
                continuity = continuity.max((self.end_value(g, ee.edge, ee.end) - first).abs() / amp);
                flux += self.outgoing_derivative(g, ee.edge, ee.end);
            }
            let scale = self.k.max(1.0 / g.total_length()) * amp;
            kirchhoff = kirchhoff.max(flux.abs() / scale);
        }
        let mean = if self.k > 0.0 {
            self.mean_integral(g).abs() / (amp * g.total_length().sqrt())
        } else {
            0.0
        };
        Residuals {
            continuity,
            kirchhoff,
            mean,
        }
    }

    /// `sup|ψ| ≤ √(μ L)` and `sup|ψ'| ≤ μ L sup|ψ|` for a normalized function
    /// with `μ > 0`; trivially true for constants.
    pub fn derivative_bounds(&self, g: &MetricGraph) -> BoundCheck {
        let n = self.norm_sq(g).sqrt();
        let sup = self.sup(g) / n;
        let sup_d = self.sup_derivative(g) / n;
        let mu = self.mu();
        let l = g.total_length();
        let slack = 1.0 + 1e-9;
        BoundCheck {
            sup,
            sup_derivative: sup_d,
            value_bound: (mu * l).sqrt(),
            derivative_bound: mu * l * sup,
            holds: self.k == 0.0 || (sup <= (mu * l).sqrt() * slack && sup_d <= mu * l * sup * slack),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Max vertex value mismatch, relative to the largest trace amplitude.
    pub continuity: f64,
    /// Max |Σ outgoing derivatives| relative to `k·amplitude`.
    pub kirchhoff: f64,
    /// |∫ψ| relative to `amplitude·√L`.
    pub mean: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.continuity.max(self.kirchhoff).max(self.mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub sup: f64,
    pub sup_derivative: f64,
    pub value_bound: f64,
    pub derivative_bound: f64,
    pub holds: bool,
}

/// One eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub mu: f64,
    pub k: f64,
    pub multiplicity: usize,
    pub basis: Vec<EigenFunction>,
    /// 1-based positions `first..=last` in the ordered spectrum.
    pub index_range: (usize, usize),
}

impl EigenPair {
    pub fn contains_index(&self, j: usize) -> bool {
        self.index_range.0 <= j && j <= self.index_range.1
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }

    /// Gram matrix of the basis in `L²(Γ)`.
    pub fn gram(&self, g: &MetricGraph) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|f| self.basis.iter().map(|h| f.dot(h, g)).collect())
            .collect()
    }

    pub fn gram_error(&self, g: &MetricGraph) -> f64 {
        let gram = self.gram(g);
        let mut err = 0.0f64;
        for (i, row) in gram.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((x - target).abs());
            }
        }
        err
    }

    /// `Σ c_i ψ_i` for a coefficient vector in this basis.
    pub fn combination(&self, coeffs: &[f64]) -> EigenFunction {
        let mut out = self.basis[0].scaled(coeffs[0]);
        for (f, &c) in self.basis.iter().zip(coeffs).skip(1) {
            out = out.add_scaled(f, c);
        }
        out.norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        out.sign = SignConvention::Unnormalized;
        out
    }
}
