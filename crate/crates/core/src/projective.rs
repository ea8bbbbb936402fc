//! Funk, reverse Funk and Hilbert metrics on convex bodies, the ratio form of
//! the Minkowski distance, and the Hilbert geometry of the open simplex.

use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{norm2, sub};
use crate::metric::{MetricDomain, MetricOracle};
use crate::report::ext_real;
use crate::tolerance::EPS_ROOT;

fn unit_direction(x: &[f64], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let d = sub(y, x);
    let len = norm2(&d);
    (len > 0.0).then(|| (d.iter().map(|v| v / len).collect(), len))
}

/// `|x − y| / |a⁺|`, where `a⁺` is the boundary point of the ray from the
/// origin parallel to `y − x`. Recession directions give 0.
pub fn minkowski_ratio_distance(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    let Some((u, len)) = unit_direction(x, y) else {
        return Ok(0.0);
    };
    let reach = body.ray_boundary(&vec![0.0; u.len()], &u)?;
    Ok(if reach.is_infinite() { 0.0 } else { len / reach })
}

fn require_interior(body: &ConvexBody, x: &[f64]) -> Result<()> {
    let g = body.try_gauge(x)?;
    if g < 1.0 {
        Ok(())
    } else {
        Err(Error::NotInterior { gauge: g })
    }
}

/// `log(t* / (t* − |y − x|))` with `t*` the exit parameter of the ray from
/// `x` through `y`; 0 when the ray never exits.
pub fn funk_distance_tol(body: &ConvexBody, x: &[f64], y: &[f64], root_tol: f64) -> Result<f64> {
    require_interior(body, x)?;
    require_interior(body, y)?;
    let Some((u, len)) = unit_direction(x, y) else {
        return Ok(0.0);
    };
    let reach = body.ray_boundary_tol(x, &u, root_tol)?;
    if reach.is_infinite() {
        return Ok(0.0);
    }
    if reach <= len {
        return Err(Error::NotInterior {
            gauge: body.gauge(y),
        });
    }
    Ok(-(-len / reach).ln_1p())
}

pub fn funk_distance(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    funk_distance_tol(body, x, y, EPS_ROOT)
}

pub fn reverse_funk_distance(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    funk_distance(body, y, x)
}

/// `Funk(x, y) + Funk(y, x)`: the logarithm of the cross ratio of `x`, `y`
/// and the two chord endpoints.
pub fn log_cross_ratio(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(funk_distance(body, x, y)? + funk_distance(body, y, x)?)
}

/// `½·(Funk(x, y) + Funk(y, x))`, half the log cross ratio; on the unit disc
/// this is the Klein model of curvature −1.
pub fn hilbert_distance(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(0.5 * log_cross_ratio(body, x, y)?)
}

fn check_simplex_point(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "simplex points need at least two coordinates".into(),
        ));
    }
    if let Some(v) = x.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "simplex coordinates must be positive, found {v}"
        )));
    }
    let s: f64 = x.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "simplex coordinates must sum to 1, found {s}"
        )));
    }
    Ok(())
}

/// Closed form on the open standard simplex:
/// `log(maxᵢ xᵢ/yᵢ · maxⱼ yⱼ/xⱼ)`. This is the full log cross ratio, so it
/// equals [`log_cross_ratio`] on the embedded simplex and twice
/// [`hilbert_distance`].
pub fn simplex_hilbert(x: &[f64], y: &[f64]) -> Result<f64> {
    check_simplex_point(x)?;
    check_simplex_point(y)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let up = x.iter().zip(y).map(|(a, b)| a / b).fold(0.0, f64::max);
    let down = x.iter().zip(y).map(|(a, b)| b / a).fold(0.0, f64::max);
    Ok(up.ln() + down.ln())
}

/// `L(x) = (log(x₁/x_k), …, log(x_{k−1}/x_k))`.
pub fn simplex_to_minkowski(x: &[f64]) -> Result<Vec<f64>> {
    check_simplex_point(x)?;
    let last = x[x.len() - 1];
    Ok(x[..x.len() - 1].iter().map(|v| (v / last).ln()).collect())
}

/// `max ṽ − min ṽ` for `ṽ = (v, 0)`.
pub fn variation_seminorm(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((0.0_f64, 0.0_f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    hi - lo
}

/// Affine chart of the open `k`-simplex: subtract the barycenter and drop
/// the last coordinate.
pub fn simplex_embed(x: &[f64]) -> Vec<f64> {
    let k = x.len() as f64;
    x[..x.len() - 1].iter().map(|v| v - 1.0 / k).collect()
}

/// The standard `k`-simplex in the chart of [`simplex_embed`], as a
/// V-polytope with the barycenter at the origin.
pub fn simplex_body(k: usize) -> Result<ConvexBody> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("simplex needs k ≥ 2, got {k}")));
    }
    let vertices = (0..k)
        .map(|i| {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            simplex_embed(&e)
        })
        .collect();
    ConvexBody::vpolytope(vertices, vec![])
}

fn interior_oracle(
    name: &str,
    body: &ConvexBody,
    f: fn(&ConvexBody, &[f64], &[f64]) -> Result<f64>,
) -> MetricOracle {
    let b = body.clone();
    // Errors surface as NaN, which the checkers report as malformed input.
    MetricOracle::new(
        name,
        body.dimension(),
        MetricDomain::Interior(body.clone()),
        move |x, y| f(&b, x, y).unwrap_or(f64::NAN),
    )
}

pub fn funk_oracle(body: &ConvexBody) -> MetricOracle {
    interior_oracle("funk", body, funk_distance)
}

pub fn reverse_funk_oracle(body: &ConvexBody) -> MetricOracle {
    interior_oracle("reverse_funk", body, reverse_funk_distance)
}

pub fn hilbert_oracle(body: &ConvexBody) -> MetricOracle {
    interior_oracle("hilbert", body, hilbert_distance)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    #[serde(serialize_with = "ext_real::serialize")]
    pub minkowski: f64,
    pub funk_xy: f64,
    pub funk_yx: f64,
    pub hilbert: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_pair(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<ComparisonRow> {
    compare_pair_tol(body, x, y, EPS_ROOT)
}

pub fn compare_pair_tol(body: &ConvexBody, x: &[f64], y: &[f64], root_tol: f64) -> Result<ComparisonRow> {
    let funk_xy = funk_distance_tol(body, x, y, root_tol)?;
    let funk_yx = funk_distance_tol(body, y, x, root_tol)?;
    Ok(ComparisonRow {
        from: x.to_vec(),
        to: y.to_vec(),
        minkowski: minkowski_ratio_distance(body, x, y)?,
        funk_xy,
        funk_yx,
        hilbert: 0.5 * (funk_xy + funk_yx),
    })
}

/// Minkowski, Funk in both orders and Hilbert distances for each pair.
pub fn compare(body: &ConvexBody, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<ComparisonReport> {
    let rows: Result<Vec<_>> = pairs
        .par_iter()
        .map(|(x, y)| compare_pair(body, x, y))
        .collect();
    Ok(ComparisonReport { rows: rows? })
}
