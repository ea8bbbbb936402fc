//! Finite-difference calculus on gauges: gradients, the fundamental tensor
//! `g_y = ½·Hess(F²)(y)`, Euler residuals and convexity classification.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, jacobi_eigen, norm2, quad_form};
use crate::norm::{norm_from_body, ClosedForm, NormSource, WeakNorm};
use crate::report::matrix_rows;
use crate::sampling::{sphere_point, SamplingPlan, Stream};

/// Relative first-derivative step: `h = 1e-5·(1 + ‖y‖)`.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Relative second-derivative step: `h = 1e-3·(1 + ‖y‖)`.
pub const TENSOR_STEP: f64 = 1e-3;
/// One-sided slope mismatch above which a point is flagged non-smooth.
pub const SMOOTHNESS_THRESHOLD: f64 = 1e-3;
/// Minimum eigenvalues above this certify strong convexity.
pub const STRONG_THRESHOLD: f64 = 1e-3;
/// Minimum eigenvalues below this count as degenerate.
pub const DEGENERATE_THRESHOLD: f64 = 1e-6;
const SEGMENT_PERTURBATIONS: [f64; 2] = [0.05, 0.2];
const SEGMENT_TOL: f64 = 1e-9;

pub fn default_gradient_step(y: &[f64]) -> f64 {
    GRADIENT_STEP * (1.0 + norm2(y))
}

pub fn default_tensor_step(y: &[f64]) -> f64 {
    TENSOR_STEP * (1.0 + norm2(y))
}

fn check_base(f: &WeakNorm, y: &[f64], h: f64) -> Result<()> {
    if y.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            expected: f.dimension(),
            got: y.len(),
        });
    }
    if !(h > 0.0) || !(norm2(y) > 10.0 * h) {
        return Err(Error::InvalidArgument(format!(
            "base point must satisfy ‖y‖ > 10h (‖y‖ = {}, h = {h})",
            norm2(y)
        )));
    }
    Ok(())
}

fn finite_eval(f: &WeakNorm, x: &[f64]) -> Result<f64> {
    let v = f.eval(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NotFinite(format!("F is {v} at {x:?} inside the stencil")))
    }
}

fn shifted(y: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut x = y.to_vec();
    for &(i, d) in moves {
        x[i] += d;
    }
    x
}

/// Central-difference gradient of `F` at `y`.
pub fn fd_gradient(f: &WeakNorm, y: &[f64], h: Option<f64>) -> Result<Vec<f64>> {
    let h = h.unwrap_or_else(|| default_gradient_step(y));
    check_base(f, y, h)?;
    (0..y.len())
        .map(|i| {
            let up = finite_eval(f, &shifted(y, &[(i, h)]))?;
            let down = finite_eval(f, &shifted(y, &[(i, -h)]))?;
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

/// `Σ yᵢ ∂ᵢψ(y) − r·ψ(y)` by central differences; zero for `ψ` positively
/// homogeneous of degree `r`.
pub fn euler_defect<P>(psi: P, y: &[f64], degree: f64, h: f64) -> f64
where
    P: Fn(&[f64]) -> f64,
{
    let directional: f64 = (0..y.len())
        .map(|i| y[i] * (psi(&shifted(y, &[(i, h)])) - psi(&shifted(y, &[(i, -h)]))) / (2.0 * h))
        .sum();
    directional - degree * psi(y)
}

/// `y·∇F(y) − F(y)`.
pub fn euler_residual(f: &WeakNorm, y: &[f64]) -> Result<f64> {
    let g = fd_gradient(f, y, None)?;
    Ok(dot(y, &g) - finite_eval(f, y)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorAtPoint {
    pub base: Vec<f64>,
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub method: TensorMethod,
    /// Second-difference step; absent for analytic tensors.
    pub step: Option<f64>,
    pub warnings: Vec<String>,
}

impl TensorAtPoint {
    pub fn max_eigenvalue(&self) -> f64 {
        jacobi_eigen(&self.matrix).max()
    }
}

/// Constant tensor of a quadratic gauge, if the source is one.
fn analytic_tensor(f: &WeakNorm) -> Option<DMatrix<f64>> {
    let n = f.dimension();
    match f.source() {
        NormSource::Closed(ClosedForm::Euclidean) => Some(DMatrix::identity(n, n)),
        NormSource::Body(ConvexBody::Ellipsoid { shape }) => Some(shape.clone()),
        NormSource::Body(ConvexBody::LpBall { p, semiaxes }) if *p == 2.0 => {
            Some(DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    semiaxes[i].powi(-2)
                } else {
                    0.0
                }
            }))
        }
        _ => None,
    }
}

/// One-sided slope mismatches of `F` at `y` along each axis.
fn smoothness_warnings(f: &WeakNorm, y: &[f64]) -> Result<Vec<String>> {
    let h = default_gradient_step(y);
    let fy = finite_eval(f, y)?;
    let mut warnings = Vec::new();
    for i in 0..y.len() {
        let fwd = (finite_eval(f, &shifted(y, &[(i, h)]))? - fy) / h;
        let bwd = (fy - finite_eval(f, &shifted(y, &[(i, -h)]))?) / h;
        let gap = (fwd - bwd).abs();
        if gap > SMOOTHNESS_THRESHOLD {
            warnings.push(format!(
                "non-smooth along axis {i}: one-sided slopes differ by {gap:.3e}"
            ));
        }
    }
    Ok(warnings)
}

/// Fundamental tensor `g_y` with entries `½·∂ᵢ∂ⱼ F²(y)`.
///
/// Quadratic gauges (Euclidean, ellipsoid, `p = 2` balls) use their constant
/// matrix; everything else uses central second differences of `F²`.
pub fn fundamental_tensor(f: &WeakNorm, y: &[f64], h: Option<f64>) -> Result<TensorAtPoint> {
    let h = h.unwrap_or_else(|| default_tensor_step(y));
    check_base(f, y, h)?;
    if let Some(matrix) = analytic_tensor(f) {
        let min_eigenvalue = jacobi_eigen(&matrix).min();
        return Ok(TensorAtPoint {
            base: y.to_vec(),
            matrix,
            min_eigenvalue,
            method: TensorMethod::Analytic,
            step: None,
            warnings: vec![],
        });
    }
    let n = y.len();
    let sq = |moves: &[(usize, f64)]| -> Result<f64> {
        let v = finite_eval(f, &shifted(y, moves))?;
        Ok(v * v)
    };
    let centre = sq(&[])?;
    let mut raw = DMatrix::zeros(n, n);
    for i in 0..n {
        raw[(i, i)] = 0.5 * (sq(&[(i, h)])? - 2.0 * centre + sq(&[(i, -h)])?) / (h * h);
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = sq(&[(i, h), (j, h)])? - sq(&[(i, h), (j, -h)])? - sq(&[(i, -h), (j, h)])?
                + sq(&[(i, -h), (j, -h)])?;
            raw[(i, j)] = 0.5 * v / (4.0 * h * h);
        }
    }
    let matrix = (&raw + raw.transpose()) * 0.5;
    let min_eigenvalue = jacobi_eigen(&matrix).min();
    Ok(TensorAtPoint {
        base: y.to_vec(),
        matrix,
        min_eigenvalue,
        method: TensorMethod::FiniteDifference,
        step: Some(h),
        warnings: smoothness_warnings(f, y)?,
    })
}

/// `√(yᵀ g_y y)`, which equals `F(y)` for smooth gauges.
pub fn recover_norm(f: &WeakNorm, y: &[f64]) -> Result<f64> {
    let t = fundamental_tensor(f, y, None)?;
    let q = quad_form(&t.matrix, y);
    if q < 0.0 {
        return Err(Error::NumericalBreakdown(format!(
            "yᵀ g_y y = {q} is negative at a non-smooth point"
        )));
    }
    Ok(q.sqrt())
}

/// `‖g_{λy} − g_y‖_∞`.
pub fn homothety_invariance(f: &WeakNorm, y: &[f64], lambda: f64) -> Result<f64> {
    if !(0.1..=10.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "homothety factor {lambda} outside [0.1, 10]"
        )));
    }
    let g = fundamental_tensor(f, y, None)?;
    let g_scaled = fundamental_tensor(f, &linalg::scale(y, lambda), None)?;
    Ok(linalg::max_abs(&(g_scaled.matrix - g.matrix)))
}

/// Search for a segment on the indicatrix: boundary points in sampled
/// directions paired with boundary points in nearby directions, accepted when
/// the midpoint also has gauge 1 within 1e-9.
pub fn find_boundary_segment(f: &WeakNorm, plan: &SamplingPlan) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = f.dimension();
    if n < 2 {
        return None;
    }
    (0..plan.samples).into_par_iter().find_map_first(|i| {
        let mut rng = plan.rng(Stream::Primary, i);
        let u = sphere_point(&mut rng, n);
        let w = sphere_point(&mut rng, n);
        let p = f.indicatrix_point(&u)?;
        // Tangent part of `w`, so the perturbation actually turns `u`.
        let t = linalg::normalized(&linalg::axpy(&w, -dot(&w, &u), &u))?;
        SEGMENT_PERTURBATIONS.iter().find_map(|&eps| {
            let q = f.indicatrix_point(&linalg::axpy(&u, eps, &t))?;
            let m: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
            (f.eval(&m) >= 1.0 - SEGMENT_TOL).then(|| (p.clone(), q))
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Defect {
    /// The tensor has an eigenvalue near 0.
    Degenerate,
    /// `F²` has no bounded second derivative at the witness.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ConvexityClass {
    NotStrictlyConvex {
        p: Vec<f64>,
        q: Vec<f64>,
    },
    StrictlyNotStrongly {
        witness: Vec<f64>,
        /// Smallest eigenvalue for degenerate witnesses, largest otherwise.
        eigenvalue: f64,
        defect: Defect,
    },
    StronglyConvex {
        min_eigenvalue: f64,
    },
    /// The sampled minimum eigenvalue fell between the two thresholds.
    Inconclusive {
        min_eigenvalue: f64,
    },
}

/// Facet segment of an H-polytope: a foot point `bᵢaᵢ/|aᵢ|²` lying on the
/// body, moved half-way towards both ends of a tangent chord.
fn hpolytope_facet(normals: &[Vec<f64>], offsets: &[f64], body: &ConvexBody) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = body.dimension();
    for (a, &b) in normals.iter().zip(offsets) {
        if b <= 0.0 {
            continue;
        }
        let foot = linalg::scale(a, b / dot(a, a));
        if body.gauge(&foot) > 1.0 + SEGMENT_TOL {
            continue;
        }
        // Coordinate axis least aligned with the normal, made orthogonal.
        let k = (0..n)
            .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
            .unwrap();
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let Some(t) = linalg::normalized(&linalg::axpy(&e, -a[k] / dot(a, a), a)) else {
            continue;
        };
        let reach = |dir: f64| -> f64 {
            normals
                .iter()
                .zip(offsets)
                .filter_map(|(c, &d)| {
                    let rate = dir * dot(c, &t);
                    (rate > 1e-15).then(|| (d - dot(c, &foot)) / rate)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let (up, down) = (reach(1.0), reach(-1.0));
        if !(up.is_finite() && down.is_finite()) || up + down <= 1e-9 {
            continue;
        }
        let p = linalg::axpy(&foot, -0.5 * down.max(0.0), &t);
        let q = linalg::axpy(&foot, 0.5 * up.max(0.0), &t);
        let m: Vec<f64> = p.iter().zip(&q).map(|(x, y)| 0.5 * (x + y)).collect();
        if (body.gauge(&m) - 1.0).abs() <= SEGMENT_TOL {
            return Some((p, q));
        }
    }
    None
}

/// Pair of vertices whose midpoint lies on the boundary (an edge).
fn vertex_edge(vertices: &[Vec<f64>], body: &ConvexBody) -> Option<(Vec<f64>, Vec<f64>)> {
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let (p, q) = (&vertices[i], &vertices[j]);
            if p == q {
                continue;
            }
            let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
            let on = |x: &[f64]| (body.gauge(x) - 1.0).abs() <= SEGMENT_TOL;
            if on(p) && on(q) && on(&m) {
                return Some((p.clone(), q.clone()));
            }
        }
    }
    None
}

fn sampled_strength(f: &WeakNorm, plan: &SamplingPlan) -> Result<ConvexityClass> {
    let n = f.dimension();
    let rows: Vec<Result<(f64, Vec<f64>)>> = (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let u = plan.sphere(Stream::Auxiliary, i, n);
            let y = f.indicatrix_point(&u).ok_or_else(|| {
                Error::NotFinite(format!("no boundary point in direction {u:?}"))
            })?;
            Ok((fundamental_tensor(f, &y, None)?.min_eigenvalue, y))
        })
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in rows {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.0 < b.0) {
            best = Some(r);
        }
    }
    let (min_eigenvalue, y) = best.ok_or_else(|| Error::InvalidArgument("no samples".into()))?;
    Ok(if min_eigenvalue > STRONG_THRESHOLD {
        ConvexityClass::StronglyConvex { min_eigenvalue }
    } else if min_eigenvalue < DEGENERATE_THRESHOLD {
        ConvexityClass::StrictlyNotStrongly {
            witness: y,
            eigenvalue: min_eigenvalue,
            defect: Defect::Degenerate,
        }
    } else {
        ConvexityClass::Inconclusive { min_eigenvalue }
    })
}

/// Strict/strong convexity class of a bounded body with the origin inside.
pub fn classify_convexity(body: &ConvexBody, plan: &SamplingPlan) -> Result<ConvexityClass> {
    if let Some(direction) = body.recession_ray()? {
        return Err(Error::Unbounded { direction });
    }
    if !body.origin_is_interior()? {
        return Err(Error::InvalidArgument(
            "the origin must be an interior point".into(),
        ));
    }
    let n = body.dimension();
    let f = norm_from_body(body.clone());
    if n == 1 {
        // The sphere is two points; F² is a quadratic on each half-line.
        let (a, b) = (f.eval(&[1.0]), f.eval(&[-1.0]));
        return Ok(ConvexityClass::StronglyConvex {
            min_eigenvalue: (a * a).min(b * b),
        });
    }
    let segment = |s: Option<(Vec<f64>, Vec<f64>)>| s.map(|(p, q)| ConvexityClass::NotStrictlyConvex { p, q });
    match body {
        ConvexBody::HPolytope { normals, offsets } => {
            if let Some(c) = segment(hpolytope_facet(normals, offsets, body)) {
                return Ok(c);
            }
        }
        ConvexBody::VPolytope { vertices, .. } => {
            if let Some(c) = segment(vertex_edge(vertices, body)) {
                return Ok(c);
            }
        }
        ConvexBody::Ellipsoid { shape } => {
            return Ok(ConvexityClass::StronglyConvex {
                min_eigenvalue: jacobi_eigen(shape).min(),
            });
        }
        ConvexBody::LpBall { p, semiaxes } => {
            let axis = |k: usize| {
                let mut e = vec![0.0; n];
                e[k] = semiaxes[k];
                e
            };
            if *p == 1.0 {
                return Ok(ConvexityClass::NotStrictlyConvex { p: axis(0), q: axis(1) });
            }
            if *p == 2.0 {
                let min_eigenvalue = semiaxes.iter().map(|s| s.powi(-2)).fold(f64::INFINITY, f64::min);
                return Ok(ConvexityClass::StronglyConvex { min_eigenvalue });
            }
            let y = axis(0);
            let t = fundamental_tensor(&f, &y, None)?;
            return Ok(if *p > 2.0 {
                ConvexityClass::StrictlyNotStrongly {
                    witness: y,
                    eigenvalue: t.min_eigenvalue,
                    defect: Defect::Degenerate,
                }
            } else {
                ConvexityClass::StrictlyNotStrongly {
                    eigenvalue: t.max_eigenvalue(),
                    witness: y,
                    defect: Defect::Unbounded,
                }
            });
        }
        ConvexBody::LinearImage { transform, inner, .. } => {
            if let ConvexityClass::NotStrictlyConvex { p, q } = classify_convexity(inner, plan)? {
                return Ok(ConvexityClass::NotStrictlyConvex {
                    p: linalg::mat_vec(transform, &p),
                    q: linalg::mat_vec(transform, &q),
                });
            }
        }
    }
    if let Some(c) = segment(find_boundary_segment(&f, plan)) {
        return Ok(c);
    }
    sampled_strength(&f, plan)
}
