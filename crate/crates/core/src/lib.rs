//! Computational weak Minkowski geometry.
//!
//! The crate is organised bottom-up:
//!
//! - [`body`]: convex bodies containing the origin and their gauges
//!   (Minkowski functionals), boundary ray intersections and recession rays.
//! - [`norm`]: weak Minkowski norms, their classification, indicatrix and
//!   unit-ball reconstruction, and the induced translation-invariant metrics.
//! - [`checks`]: black-box property checkers for two-point distance
//!   functions and the sampled "is it Minkowskian?" decision procedure.
//! - [`differential`]: gradients, the fundamental tensor, Euler residuals and
//!   strict/strong convexity classification.
//! - [`ellipsoid`]: minimum-volume enclosing ellipsoids, normalizers,
//!   conjugation of isometries and Euclidean-norm detection.
//! - [`projective`]: Funk, reverse Funk and Hilbert metrics, the ratio form
//!   of the Minkowski distance, and the simplex closed form.
//! - [`svg`]: deterministic SVG figures of planar bodies and metric balls.
//!
//! Extended reals are represented by `f64` with `f64::INFINITY` standing for
//! an infinite gauge or distance.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod checks;
pub mod differential;
pub mod ellipsoid;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod metric;
pub mod norm;
pub mod projective;
pub mod report;
pub mod sampling;
pub mod svg;
pub mod tolerance;

pub use body::ConvexBody;
pub use checks::{PropertyReport, Verdict};
pub use error::{Error, Result};
pub use metric::MetricOracle;
pub use norm::WeakNorm;
pub use sampling::SamplingPlan;
