//! Numerical tolerances shared across the crate.

/// Tolerance for algebraic identities (homogeneity, triangle inequality, ...).
pub const EPS_NUM: f64 = 1e-9;

/// Relative interval width at which boundary bisection stops.
pub const EPS_ROOT: f64 = 1e-12;

/// Overridable tolerance pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub num: f64,
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            num: EPS_NUM,
            root: EPS_ROOT,
        }
    }
}
