//! Convex bodies containing the origin, their gauges (Minkowski
//! functionals) `F(x) = inf{t ≥ 0 : x ∈ tΩ}`, boundary ray intersections and
//! recession rays.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm2};
use crate::lp;
use crate::tolerance::EPS_ROOT;

/// JSON schema for bodies. Matrices are row-major arrays of arrays.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Hpolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        rays: Vec<Vec<f64>>,
    },
    Ellipsoid {
        shape: Vec<Vec<f64>>,
    },
    LpBall {
        p: f64,
        semiaxes: Vec<f64>,
    },
    LinearImage {
        transform: Vec<Vec<f64>>,
        inner: Box<BodySpec>,
    },
}

/// A validated convex body containing the origin. Immutable once built.
#[derive(Clone, Debug)]
pub enum ConvexBody {
    /// `{x : aᵢ·x ≤ bᵢ}` with every `bᵢ ≥ 0`.
    HPolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// `conv(V) + cone(R)`, required to contain the origin.
    VPolytope {
        vertices: Vec<Vec<f64>>,
        rays: Vec<Vec<f64>>,
    },
    /// `{x : xᵀQx ≤ 1}`.
    Ellipsoid { shape: DMatrix<f64> },
    /// `{x : Σ|xᵢ/sᵢ|ᵖ ≤ 1}`.
    LpBall { p: f64, semiaxes: Vec<f64> },
    /// `A·Ω_inner`.
    LinearImage {
        transform: DMatrix<f64>,
        inverse: DMatrix<f64>,
        inner: Box<ConvexBody>,
    },
}

fn check_rows(rows: &[Vec<f64>], dim: usize, path: &str) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::body(
                format!("{path}[{i}]"),
                format!("expected {dim} coordinates, found {}", r.len()),
            ));
        }
        if let Some(j) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::body(format!("{path}[{i}][{j}]"), "non-finite number"));
        }
    }
    Ok(())
}

fn square_matrix(rows: &[Vec<f64>], path: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::body(path, "empty matrix"));
    }
    check_rows(rows, n, path)?;
    Ok(linalg::from_rows(rows))
}

/// Parses and validates a body from its JSON text.
pub fn parse_body(text: &str) -> Result<ConvexBody> {
    let spec: BodySpec = serde_json::from_str(text)?;
    ConvexBody::from_spec(&spec)
}

impl ConvexBody {
    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        Self::from_spec_at(spec, "")
    }

    fn from_spec_at(spec: &BodySpec, prefix: &str) -> Result<Self> {
        let at = |field: &str| {
            if prefix.is_empty() {
                field.to_string()
            } else {
                format!("{prefix}.{field}")
            }
        };
        match spec {
            BodySpec::Hpolytope { normals, offsets } => {
                if normals.is_empty() {
                    return Err(Error::body(at("normals"), "at least one facet is required"));
                }
                if normals.len() != offsets.len() {
                    return Err(Error::body(
                        at("offsets"),
                        format!("{} offsets for {} normals", offsets.len(), normals.len()),
                    ));
                }
                let dim = normals[0].len();
                if dim == 0 {
                    return Err(Error::body(at("normals[0]"), "dimension must be at least 1"));
                }
                check_rows(normals, dim, &at("normals"))?;
                for (i, &b) in offsets.iter().enumerate() {
                    if !b.is_finite() {
                        return Err(Error::body(at(&format!("offsets[{i}]")), "non-finite number"));
                    }
                    if b < 0.0 {
                        return Err(Error::body(
                            at(&format!("offsets[{i}]")),
                            format!("negative offset {b}: the origin must lie in the body"),
                        ));
                    }
                }
                Ok(ConvexBody::HPolytope {
                    normals: normals.clone(),
                    offsets: offsets.clone(),
                })
            }
            BodySpec::Vpolytope { vertices, rays } => {
                if vertices.is_empty() {
                    return Err(Error::body(at("vertices"), "at least one vertex is required"));
                }
                let dim = vertices[0].len();
                if dim == 0 {
                    return Err(Error::body(at("vertices[0]"), "dimension must be at least 1"));
                }
                check_rows(vertices, dim, &at("vertices"))?;
                check_rows(rays, dim, &at("rays"))?;
                // 0 ∈ conv(V) + cone(R):  Σλv + Σρr = 0, Σλ = 1, λ, ρ ≥ 0.
                let cols: Vec<&Vec<f64>> = vertices.iter().chain(rays).collect();
                let mut a: Vec<Vec<f64>> = (0..dim)
                    .map(|i| cols.iter().map(|g| g[i]).collect())
                    .collect();
                let mut ones = vec![1.0; vertices.len()];
                ones.resize(cols.len(), 0.0);
                a.push(ones);
                let mut b = vec![0.0; dim];
                b.push(1.0);
                if lp::feasible_point(a, b)?.is_none() {
                    return Err(Error::body(at("vertices"), "the origin is not in the body"));
                }
                Ok(ConvexBody::VPolytope {
                    vertices: vertices.clone(),
                    rays: rays.clone(),
                })
            }
            BodySpec::Ellipsoid { shape } => {
                let q = square_matrix(shape, &at("shape"))?;
                let tol = 1e-12 * linalg::max_abs(&q).max(1.0);
                if !linalg::is_symmetric(&q, tol) {
                    return Err(Error::body(at("shape"), "shape matrix is not symmetric"));
                }
                let eig = linalg::jacobi_eigen(&q);
                if eig.min() <= 0.0 {
                    return Err(Error::body(
                        at("shape"),
                        format!("shape not positive definite (eigenvalues {:?})", eig.values),
                    ));
                }
                Ok(ConvexBody::Ellipsoid { shape: q })
            }
            BodySpec::LpBall { p, semiaxes } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::body(at("p"), format!("p must be a finite real ≥ 1, got {p}")));
                }
                if semiaxes.is_empty() {
                    return Err(Error::body(at("semiaxes"), "dimension must be at least 1"));
                }
                if let Some(i) = semiaxes.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
                    return Err(Error::body(at(&format!("semiaxes[{i}]")), "semiaxes must be positive"));
                }
                Ok(ConvexBody::LpBall {
                    p: *p,
                    semiaxes: semiaxes.clone(),
                })
            }
            BodySpec::LinearImage { transform, inner } => {
                let a = square_matrix(transform, &at("transform"))?;
                let inner = Self::from_spec_at(inner, &at("inner"))?;
                if inner.dimension() != a.nrows() {
                    return Err(Error::body(
                        at("transform"),
                        format!(
                            "transform is {}x{} but inner body has dimension {}",
                            a.nrows(),
                            a.nrows(),
                            inner.dimension()
                        ),
                    ));
                }
                Self::linear_image(a, inner).map_err(|e| match e {
                    Error::Singular { det } => {
                        Error::body(at("transform"), format!("singular transform (|det| = {det})"))
                    }
                    other => other,
                })
            }
        }
    }

    pub fn to_spec(&self) -> BodySpec {
        match self {
            ConvexBody::HPolytope { normals, offsets } => BodySpec::Hpolytope {
                normals: normals.clone(),
                offsets: offsets.clone(),
            },
            ConvexBody::VPolytope { vertices, rays } => BodySpec::Vpolytope {
                vertices: vertices.clone(),
                rays: rays.clone(),
            },
            ConvexBody::Ellipsoid { shape } => BodySpec::Ellipsoid {
                shape: linalg::to_rows(shape),
            },
            ConvexBody::LpBall { p, semiaxes } => BodySpec::LpBall {
                p: *p,
                semiaxes: semiaxes.clone(),
            },
            ConvexBody::LinearImage {
                transform, inner, ..
            } => BodySpec::LinearImage {
                transform: linalg::to_rows(transform),
                inner: Box::new(inner.to_spec()),
            },
        }
    }

    pub fn hpolytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        Self::from_spec(&BodySpec::Hpolytope { normals, offsets })
    }

    pub fn vpolytope(vertices: Vec<Vec<f64>>, rays: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_spec(&BodySpec::Vpolytope { vertices, rays })
    }

    pub fn ellipsoid(shape: DMatrix<f64>) -> Result<Self> {
        Self::from_spec(&BodySpec::Ellipsoid {
            shape: linalg::to_rows(&shape),
        })
    }

    pub fn lp_ball(p: f64, semiaxes: Vec<f64>) -> Result<Self> {
        Self::from_spec(&BodySpec::LpBall { p, semiaxes })
    }

    pub fn linear_image(transform: DMatrix<f64>, inner: ConvexBody) -> Result<Self> {
        let det = transform.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::Singular { det: det.abs() });
        }
        let inverse = linalg::inverse(&transform)?;
        Ok(ConvexBody::LinearImage {
            transform,
            inverse,
            inner: Box::new(inner),
        })
    }

    /// The cube `[-1, 1]ⁿ` as an H-polytope.
    pub fn unit_cube(n: usize) -> Self {
        let mut normals = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; n];
                a[i] = s;
                normals.push(a);
            }
        }
        ConvexBody::HPolytope {
            normals,
            offsets: vec![1.0; 2 * n],
        }
    }

    /// The Euclidean unit ball.
    pub fn unit_ball(n: usize) -> Self {
        ConvexBody::Ellipsoid {
            shape: DMatrix::identity(n, n),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexBody::HPolytope { normals, .. } => normals[0].len(),
            ConvexBody::VPolytope { vertices, .. } => vertices[0].len(),
            ConvexBody::Ellipsoid { shape } => shape.nrows(),
            ConvexBody::LpBall { semiaxes, .. } => semiaxes.len(),
            ConvexBody::LinearImage { transform, .. } => transform.nrows(),
        }
    }

    pub fn is_polytope(&self) -> bool {
        match self {
            ConvexBody::HPolytope { .. } | ConvexBody::VPolytope { .. } => true,
            ConvexBody::LpBall { p, .. } => *p == 1.0,
            ConvexBody::LinearImage { inner, .. } => inner.is_polytope(),
            ConvexBody::Ellipsoid { .. } => false,
        }
    }

    /// Gauge `F(x) = inf{t ≥ 0 : x ∈ tΩ}` in `[0, ∞]`.
    ///
    /// Only the V-polytope route can fail (LP pivot cap); see [`Self::gauge`].
    pub fn try_gauge(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(match self {
            ConvexBody::HPolytope { normals, offsets } => {
                let mut g = 0.0_f64;
                for (a, &b) in normals.iter().zip(offsets) {
                    let ax = dot(a, x);
                    if b == 0.0 {
                        if ax > 0.0 {
                            return Ok(f64::INFINITY);
                        }
                    } else {
                        g = g.max(ax / b);
                    }
                }
                g
            }
            ConvexBody::VPolytope { vertices, rays } => lp::lp_minsum(vertices, rays, x)?,
            ConvexBody::Ellipsoid { shape } => linalg::quad_form(shape, x).max(0.0).sqrt(),
            ConvexBody::LpBall { p, semiaxes } => lp_gauge(*p, semiaxes, x),
            ConvexBody::LinearImage { inverse, inner, .. } => {
                inner.try_gauge(&linalg::mat_vec(inverse, x))?
            }
        })
    }

    /// Gauge value; NaN only if the internal LP of a V-polytope hits its
    /// pivot cap (a numerically degenerate input).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.try_gauge(x).unwrap_or(f64::NAN)
    }

    /// `t* = sup{t ≥ 0 : base + t·dir ∈ Ω̄}`, `∞` along recession directions.
    pub fn ray_boundary(&self, base: &[f64], dir: &[f64]) -> Result<f64> {
        self.ray_boundary_tol(base, dir, EPS_ROOT)
    }

    /// [`Self::ray_boundary`] with an explicit relative bisection width.
    pub fn ray_boundary_tol(&self, base: &[f64], dir: &[f64], root_tol: f64) -> Result<f64> {
        let n = self.dimension();
        for v in [base, dir] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        if (norm2(dir) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "direction must have unit Euclidean norm, got {}",
                norm2(dir)
            )));
        }
        let at_origin = base.iter().all(|&v| v == 0.0);
        if !at_origin {
            let g = self.try_gauge(base)?;
            if !(g < 1.0) {
                return Err(Error::NotInterior { gauge: g });
            }
        }
        match self {
            ConvexBody::HPolytope { normals, offsets } => {
                let mut t = f64::INFINITY;
                for (a, &b) in normals.iter().zip(offsets) {
                    let ad = dot(a, dir);
                    if ad > 0.0 {
                        t = t.min(((b - dot(a, base)) / ad).max(0.0));
                    }
                }
                Ok(t)
            }
            ConvexBody::Ellipsoid { shape } => {
                let qa = linalg::mat_vec(shape, dir);
                let a = dot(dir, &qa);
                let b = dot(base, &qa);
                let c = linalg::quad_form(shape, base) - 1.0;
                let disc = (b * b - a * c).max(0.0).sqrt();
                Ok(if b >= 0.0 { -c / (b + disc) } else { (-b + disc) / a })
            }
            _ if at_origin => {
                let f = self.try_gauge(dir)?;
                Ok(if f == 0.0 { f64::INFINITY } else { 1.0 / f })
            }
            _ => self.bisect_boundary(base, dir, root_tol),
        }
    }

    fn bisect_boundary(&self, base: &[f64], dir: &[f64], root_tol: f64) -> Result<f64> {
        let along = |t: f64| self.try_gauge(&linalg::axpy(base, t, dir));
        let f_dir = self.try_gauge(dir)?;
        // F(base + t·dir) ≤ F(base) + t·F(dir) < 1 for all t when F(dir) = 0.
        if f_dir <= 1e-14 {
            return Ok(f64::INFINITY);
        }
        // F(base + t·dir) ≥ t·F(dir) − F(−base), so this bracket overshoots 1.
        let back = self.try_gauge(&linalg::scale(base, -1.0))?;
        let mut hi = if back.is_finite() {
            (1.0 + back) / f_dir
        } else {
            1.0 / f_dir
        };
        let mut lo = 0.0;
        while along(hi)? <= 1.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e15 {
                return Ok(f64::INFINITY);
            }
        }
        while hi - lo > root_tol * (1.0 + lo) {
            let mid = 0.5 * (lo + hi);
            if along(mid)? <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Some unit direction `u` with `F(u) = 0`, if the body has one.
    /// Nonempty whenever the body is unbounded.
    pub fn recession_ray(&self) -> Result<Option<Vec<f64>>> {
        Ok(match self {
            ConvexBody::HPolytope { normals, .. } => hpolytope_recession(normals)?,
            ConvexBody::VPolytope { rays, .. } => rays.iter().find_map(|r| linalg::normalized(r)),
            ConvexBody::Ellipsoid { .. } | ConvexBody::LpBall { .. } => None,
            ConvexBody::LinearImage {
                transform, inner, ..
            } => inner
                .recession_ray()?
                .and_then(|r| linalg::normalized(&linalg::mat_vec(transform, &r))),
        })
    }

    /// Whether the origin is an interior point (the gauge is finite everywhere).
    pub fn origin_is_interior(&self) -> Result<bool> {
        let n = self.dimension();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                if !self.try_gauge(&e)?.is_finite() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn lp_gauge(p: f64, semiaxes: &[f64], x: &[f64]) -> f64 {
    // Factor out the largest scaled coordinate to avoid overflow.
    let scaled: Vec<f64> = x.iter().zip(semiaxes).map(|(v, s)| (v / s).abs()).collect();
    let m = scaled.iter().fold(0.0_f64, |a, &b| a.max(b));
    if m == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return scaled.iter().sum();
    }
    m * scaled.iter().map(|v| (v / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Feasibility of `{u : aᵢ·u ≤ 0 ∀i, u_k = ±1}` for each coordinate `k`.
fn hpolytope_recession(normals: &[Vec<f64>]) -> Result<Option<Vec<f64>>> {
    let n = normals[0].len();
    let m = normals.len();
    // Variables: u⁺ (n), u⁻ (n), slack t (m).
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut a = Vec::with_capacity(m + 1);
            for (i, row) in normals.iter().enumerate() {
                let mut line = vec![0.0; 2 * n + m];
                for j in 0..n {
                    line[j] = row[j];
                    line[n + j] = -row[j];
                }
                line[2 * n + i] = 1.0;
                a.push(line);
            }
            let mut fix = vec![0.0; 2 * n + m];
            fix[k] = 1.0;
            fix[n + k] = -1.0;
            a.push(fix);
            let mut b = vec![0.0; m];
            b.push(s);
            if let Some(sol) = lp::feasible_point(a, b)? {
                let u: Vec<f64> = (0..n).map(|j| sol[j] - sol[n + j]).collect();
                return Ok(linalg::normalized(&u));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn square_json() -> &'static str {
        r#"{"type":"hpolytope","normals":[[1,0],[-1,0],[0,1],[0,-1]],"offsets":[1,1,1,1]}"#
    }

    fn triangle() -> ConvexBody {
        ConvexBody::vpolytope(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn parse_square_and_gauge() {
        let sq = parse_body(square_json()).unwrap();
        assert_eq!(sq.dimension(), 2);
        assert_eq!(sq.gauge(&[3.0, 1.0]), 3.0);
    }

    #[test]
    fn parse_ellipse_semiaxes() {
        let e = parse_body(r#"{"type":"ellipsoid","shape":[[1,0],[0,4]]}"#).unwrap();
        assert!((e.gauge(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((e.gauge(&[0.0, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(e.gauge(&[0.0, 1.0]), 2.0);
    }

    #[test]
    fn parse_rejects_indefinite_shape() {
        let err = parse_body(r#"{"type":"ellipsoid","shape":[[1,2],[2,1]]}"#).unwrap_err();
        match err {
            Error::InvalidBody { path, reason } => {
                assert_eq!(path, "shape");
                assert!(reason.contains("positive definite"), "{reason}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_field_paths() {
        let neg = parse_body(r#"{"type":"hpolytope","normals":[[1]],"offsets":[-1]}"#).unwrap_err();
        assert!(matches!(neg, Error::InvalidBody { ref path, .. } if path == "offsets[0]"));

        let sing = parse_body(
            r#"{"type":"linear_image","transform":[[1,2],[2,4]],"inner":{"type":"lp_ball","p":2,"semiaxes":[1,1]}}"#,
        )
        .unwrap_err();
        assert!(matches!(sing, Error::InvalidBody { ref path, .. } if path == "transform"));

        let nested = parse_body(
            r#"{"type":"linear_image","transform":[[1,0],[0,1]],"inner":{"type":"lp_ball","p":0.5,"semiaxes":[1,1]}}"#,
        )
        .unwrap_err();
        assert!(matches!(nested, Error::InvalidBody { ref path, .. } if path == "inner.p"));

        let outside =
            parse_body(r#"{"type":"vpolytope","vertices":[[1,1],[2,1],[1,2]]}"#).unwrap_err();
        assert!(matches!(outside, Error::InvalidBody { ref path, .. } if path == "vertices"));

        assert!(matches!(
            parse_body(r#"{"type":"ellipsoid","shape":[[1,0],[0,4]],"extra":1}"#),
            Err(Error::Json(_))
        ));
        assert!(matches!(parse_body(r#"{"type":"blob"}"#), Err(Error::Json(_))));
        assert!(matches!(
            parse_body(r#"{"type":"ellipsoid","shape":[[1,0.5],[0,4]]}"#),
            Err(Error::InvalidBody { .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        let text = r#"{"type":"linear_image","transform":[[2,0],[1,1]],"inner":{"type":"vpolytope","vertices":[[1,0],[0,1],[-1,-1]],"rays":[]}}"#;
        let body = parse_body(text).unwrap();
        let again = serde_json::to_string(&body.to_spec()).unwrap();
        let body2 = parse_body(&again).unwrap();
        for x in [[0.3, -1.2], [4.0, 0.5]] {
            assert_eq!(body.gauge(&x), body2.gauge(&x));
        }
    }

    #[test]
    fn triangle_asymmetric_gauge() {
        let t = triangle();
        assert!((t.gauge(&[-1.0, 0.0]) - 2.0).abs() < 1e-9);
        assert!((t.gauge(&[1.0, 0.0]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_offset_facet_convention() {
        let h = ConvexBody::hpolytope(vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        assert_eq!(h.gauge(&[1.0, 0.0]), f64::INFINITY);
        assert_eq!(h.gauge(&[-1.0, 0.0]), 0.0);
    }

    #[test]
    fn segment_body_is_infinite_off_span() {
        let seg = ConvexBody::vpolytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![]).unwrap();
        assert_eq!(seg.gauge(&[0.0, 1.0]), f64::INFINITY);
        assert!((seg.gauge(&[-0.5, 0.0]) - 0.5).abs() < 1e-12);
        assert!(!seg.origin_is_interior().unwrap());
    }

    #[test]
    fn lp_ball_and_linear_image() {
        let b = ConvexBody::lp_ball(4.0, vec![1.0, 1.0]).unwrap();
        assert!((b.gauge(&[1.0, 1.0]) - 2f64.powf(0.25)).abs() < 1e-15);
        let l1 = ConvexBody::lp_ball(1.0, vec![1.0, 2.0]).unwrap();
        assert_eq!(l1.gauge(&[1.0, 2.0]), 2.0);
        let img = ConvexBody::linear_image(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]),
            ConvexBody::unit_cube(2),
        )
        .unwrap();
        assert_eq!(img.gauge(&[2.0, 0.5]), 1.0);
    }

    #[test]
    fn ray_boundary_examples() {
        let disc = ConvexBody::unit_ball(2);
        assert!((disc.ray_boundary(&[0.0, 0.0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let sq = ConvexBody::unit_cube(2);
        let d = [1.0 / SQRT_2, 1.0 / SQRT_2];
        assert!((sq.ray_boundary(&[0.0, 0.0], &d).unwrap() - SQRT_2).abs() < 1e-12);
        let ray = ConvexBody::vpolytope(vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]);
        // conv{(1,0)} + cone{(1,0)} does not contain 0, so build the
        // half-line through the origin instead.
        assert!(ray.is_err());
        let half = ConvexBody::vpolytope(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![vec![1.0, 0.0]])
            .unwrap();
        assert_eq!(half.ray_boundary(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ray_boundary_from_interior_base() {
        let base = [0.2, -0.1];
        let dir = [0.6, 0.8];
        for body in [
            triangle(),
            ConvexBody::unit_ball(2),
            ConvexBody::lp_ball(4.0, vec![1.0, 0.5]).unwrap(),
            ConvexBody::unit_cube(2),
        ] {
            let t = body.ray_boundary(&base, &dir).unwrap();
            let g = body.gauge(&linalg::axpy(&base, t, &dir));
            assert!((g - 1.0).abs() < 1e-9, "{body:?}: {g}");
        }
        let err = ConvexBody::unit_ball(2).ray_boundary(&[2.0, 0.0], &dir);
        assert!(matches!(err, Err(Error::NotInterior { .. })));
        let err = ConvexBody::unit_ball(2).ray_boundary(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn recession_examples() {
        assert!(ConvexBody::unit_cube(2).recession_ray().unwrap().is_none());
        assert!(ConvexBody::unit_ball(3).recession_ray().unwrap().is_none());
        let v = ConvexBody::vpolytope(vec![vec![0.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 0.0]])
            .unwrap();
        assert_eq!(v.recession_ray().unwrap(), Some(vec![1.0, 0.0]));
        let half = ConvexBody::hpolytope(vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let u = half.recession_ray().unwrap().unwrap();
        assert!(u[0] <= 1e-12);
        assert!((norm2(&u) - 1.0).abs() < 1e-12);
        assert_eq!(half.gauge(&u), 0.0);
    }

    #[test]
    fn recession_ray_brute_force_oracle() {
        // Sample the unit circle and look for zero-gauge directions.
        let half = ConvexBody::hpolytope(vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let mut zero_dirs = 0;
        for k in 0..3600 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3600.0;
            if half.gauge(&[a.cos(), a.sin()]) <= 1e-9 {
                zero_dirs += 1;
            }
        }
        assert!(zero_dirs > 0);
        assert!(half.recession_ray().unwrap().is_some());
    }
}
