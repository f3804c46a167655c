//! Numerical tolerances shared across the crate.

/// Relative point-coincidence tolerance; multiplied by the total length.
pub const POINT_REL: f64 = 1e-9;

/// Residual tolerance for eigenfunctions (continuity, Kirchhoff, mean, Gram).
pub const EIG: f64 = 1e-9;

/// Singular values below `NULL * sigma_max` count towards the nullity of `M(k)`.
pub const NULL: f64 = 1e-8;

/// Golden-section refinement stops once the bracket is below `REFINE * k`.
pub const REFINE: f64 = 1e-12;

/// Extremal values closer than `TIE * sup|psi|` are treated as equal.
pub const TIE: f64 = 1e-9;

/// Environment variable overriding [`EIG`].
pub const ENV_OVERRIDE: &str = "QGHOT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub eig: f64,
    pub null: f64,
    pub point_rel: f64,
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: EIG,
            null: NULL,
            point_rel: POINT_REL,
            tie: TIE,
        }
    }
}

impl Tolerances {
    /// Defaults with `eig` taken from `QGHOT_TOL` when set to a positive number.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(v) = std::env::var(ENV_OVERRIDE)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
        {
            tol.eig = v;
        }
        tol
    }
}
