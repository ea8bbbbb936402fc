//! Minimum-volume enclosing (Löwner) ellipsoids, normalizers of unit balls,
//! conjugation of linear isometries into the orthogonal group, and a
//! quadratic-fit detector for Euclidean norms.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, inverse, jacobi_eigen, mat_vec, quad_form, sym_sqrt};
use crate::norm::WeakNorm;
use crate::report::{ext_real, matrix_rows};
use crate::sampling::{circle_grid, cube_point, SamplingPlan, Stream};

pub const DEFAULT_MVEE_EPS: f64 = 1e-7;
pub const MVEE_ITERATION_CAP: usize = 100_000;
/// Directions of the planar boundary cloud.
pub const CLOUD_2D: usize = 720;
/// Subdivisions of the icosahedron for the spatial boundary cloud (2562 points).
pub const ICOSPHERE_LEVEL: usize = 4;
/// Relative fresh-sample residual below which a quadratic fit is accepted.
pub const EUCLIDEAN_FIT_TOL: f64 = 1e-6;

/// `{x : (x − c)ᵀ M (x − c) ≤ 1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub shape: DMatrix<f64>,
}

impl Ellipsoid {
    /// `(x − c)ᵀ M (x − c)`; at most 1 inside.
    pub fn level(&self, x: &[f64]) -> f64 {
        quad_form(&self.shape, &linalg::sub(x, &self.center))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MveeResult {
    pub kind: &'static str,
    #[serde(flatten)]
    pub ellipsoid: Ellipsoid,
    pub eps: f64,
    pub iterations: usize,
    /// `max κᵢ/(d+1) − 1` at termination.
    pub gap: f64,
}

fn degenerate_direction(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = points[0].len();
    let m = points.len() as f64;
    let mean: Vec<f64> = (0..n).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / m).collect();
    let cov = DMatrix::from_fn(n, n, |i, j| {
        points.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>() / m
    });
    let eig = jacobi_eigen(&cov);
    (eig.min() <= 1e-12 * eig.max().max(1e-300)).then(|| eig.vectors.column(0).iter().copied().collect())
}

/// Khachiyan's barycentric ascent with Todd–Yildirim away steps. Stops when
/// every lifted point satisfies `κᵢ ≤ (1 + eps)(d + 1)`, which keeps all
/// points inside the ellipsoid inflated by `1 + 2·eps`.
pub fn mvee(points: &[Vec<f64>], eps: f64) -> Result<MveeResult> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidArgument("mvee needs at least one point".into()));
    };
    let d = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.len(),
        });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if points.len() < d + 1 {
        return Err(Error::Degenerate {
            direction: vec![0.0; d],
        });
    }
    if let Some(direction) = degenerate_direction(points) {
        return Err(Error::Degenerate { direction });
    }

    let m = points.len();
    let lifted: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(1.0);
            q
        })
        .collect();
    let dd = (d + 1) as f64;
    let mut u = vec![1.0 / m as f64; m];
    let exact_kappa = |u: &[f64]| -> Result<(DMatrix<f64>, Vec<f64>)> {
        let mut x = DMatrix::zeros(d + 1, d + 1);
        for (q, &w) in lifted.iter().zip(u) {
            for i in 0..=d {
                for j in 0..=d {
                    x[(i, j)] += w * q[i] * q[j];
                }
            }
        }
        let xinv = inverse(&x)?;
        let kappa = lifted.iter().map(|q| quad_form(&xinv, q)).collect();
        Ok((xinv, kappa))
    };

    let (mut xinv, mut kappa) = exact_kappa(&u)?;
    let mut iterations = 0;
    let gap = loop {
        let (j, kmax) = kappa
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, k)| if k > b.1 { (i, k) } else { b });
        let gap = kmax / dd - 1.0;
        if gap <= eps {
            // Confirm against freshly computed κ before stopping.
            let (xi, ka) = exact_kappa(&u)?;
            let fresh = ka.iter().copied().fold(f64::NEG_INFINITY, f64::max) / dd - 1.0;
            if fresh <= eps {
                break fresh;
            }
            (xinv, kappa) = (xi, ka);
            continue;
        }
        if iterations >= MVEE_ITERATION_CAP {
            return Err(Error::IterationCap {
                cap: MVEE_ITERATION_CAP,
            });
        }
        iterations += 1;
        let (k, kmin) = kappa
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| u[i] > 0.0)
            .fold((0, f64::INFINITY), |b, (i, k)| if k < b.1 { (i, k) } else { b });
        // Move weight towards the most violated point, or away from the
        // least useful supported one when that gains more.
        let (idx, kappa_idx) = if dd - kmin > kmax - dd { (k, kmin) } else { (j, kmax) };
        let mut tau = (kappa_idx - dd) / (dd * (kappa_idx - 1.0));
        if idx == k && tau < 0.0 {
            tau = tau.max(-u[k] / (1.0 - u[k]));
        }
        for w in u.iter_mut() {
            *w *= 1.0 - tau;
        }
        u[idx] = (u[idx] + tau).max(0.0);

        // X ← (1−τ)X + τ·q qᵀ, applied to X⁻¹ and κ by Sherman–Morrison.
        let w = mat_vec(&xinv, &lifted[idx]);
        let s = tau / (1.0 - tau);
        let denom = 1.0 + s * kappa_idx;
        for (ki, q) in kappa.iter_mut().zip(&lifted) {
            let c = dot(q, &w);
            *ki = (*ki - s * c * c / denom) / (1.0 - tau);
        }
        for a in 0..=d {
            for b in 0..=d {
                xinv[(a, b)] = (xinv[(a, b)] - s * w[a] * w[b] / denom) / (1.0 - tau);
            }
        }
        if iterations % 1000 == 0 {
            (xinv, kappa) = exact_kappa(&u)?;
        }
    };

    let center: Vec<f64> = (0..d)
        .map(|i| lifted.iter().zip(&u).map(|(q, w)| w * q[i]).sum())
        .collect();
    let mut scatter = DMatrix::zeros(d, d);
    for (p, &w) in points.iter().zip(&u) {
        for i in 0..d {
            for j in 0..d {
                scatter[(i, j)] += w * (p[i] - center[i]) * (p[j] - center[j]);
            }
        }
    }
    let mut shape = inverse(&scatter)? / d as f64;
    shape = (&shape + shape.transpose()) * 0.5;
    Ok(MveeResult {
        kind: "Löwner (circumscribed)",
        ellipsoid: Ellipsoid { center, shape },
        eps,
        iterations,
        gap,
    })
}

/// Symmetric square root `A = M^{1/2}`, mapping the centred ellipsoid onto
/// the unit ball.
pub fn normalizer(ell: &Ellipsoid) -> Result<DMatrix<f64>> {
    sym_sqrt(&ell.shape)
}

/// Unit vectors at the vertices of the `level`-fold subdivided icosahedron.
pub fn icosphere(level: usize) -> Vec<Vec<f64>> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let unit = |v: [f64; 3]| {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    verts.iter_mut().for_each(|v| *v = unit(*v));
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts.into_iter().map(|v| v.to_vec()).collect()
}

/// Probe directions of the boundary cloud: 720 planar directions, the
/// 2562-vertex icosphere in space, seeded sphere samples otherwise.
pub fn cloud_directions(n: usize, plan: &SamplingPlan) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => circle_grid(CLOUD_2D),
        3 => icosphere(ICOSPHERE_LEVEL),
        _ => (0..plan.samples.max(2 * n * n))
            .map(|i| plan.sphere(Stream::Auxiliary, i, n))
            .collect(),
    }
}

/// Points of the indicatrix in the cloud directions.
pub fn boundary_cloud(norm: &WeakNorm, plan: &SamplingPlan) -> Result<Vec<Vec<f64>>> {
    cloud_directions(norm.dimension(), plan)
        .into_iter()
        .map(|u| {
            norm.indicatrix_point(&u).ok_or_else(|| {
                Error::NotSeparating(format!(
                    "F({u:?}) = {} leaves no boundary point in that direction",
                    norm.eval(&u)
                ))
            })
        })
        .collect()
}

/// An affine map `x ↦ matrix·x + translation`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearMapCandidate {
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub matrix: DMatrix<f64>,
    pub translation: Vec<f64>,
}

impl LinearMapCandidate {
    pub fn linear(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        Self {
            matrix,
            translation: vec![0.0; n],
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::add(&mat_vec(&self.matrix, x), &self.translation)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    /// `f = A·g·A⁻¹` for the normalizer `A` of the unit ball's Löwner ellipsoid.
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub f: DMatrix<f64>,
    /// `‖fᵀf − I‖_∞`.
    pub orth_residual: f64,
    /// `max |F(g(x) − g(y)) − F(x − y)|` over sampled pairs.
    pub isometry_residual: f64,
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub normalizer: DMatrix<f64>,
    pub ellipsoid: MveeResult,
}

/// Conjugates a candidate isometry of a finite separating norm by the
/// normalizer of the unit ball's Löwner ellipsoid. The affine part is
/// removed first; orthogonality of the result is measured, not assumed.
pub fn conjugate_to_orthogonal(
    norm: &WeakNorm,
    g: &LinearMapCandidate,
    plan: &SamplingPlan,
) -> Result<ConjugationReport> {
    let n = norm.dimension();
    if g.matrix.nrows() != n || g.matrix.ncols() != n || g.translation.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.matrix.nrows(),
        });
    }
    let det = g.matrix.determinant();
    if det.abs() <= 1e-12 {
        return Err(Error::Singular { det });
    }
    let cloud = boundary_cloud(norm, plan)?;

    let isometry_residual = (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = plan.rng(Stream::Fresh, i);
            let x = cube_point(&mut rng, n, 1.0);
            let y = cube_point(&mut rng, n, 1.0);
            let lhs = norm.eval(&linalg::sub(&g.apply(&x), &g.apply(&y)));
            (lhs - norm.eval(&linalg::sub(&x, &y))).abs()
        })
        .reduce(|| 0.0, f64::max);

    let ellipsoid = mvee(&cloud, DEFAULT_MVEE_EPS)?;
    let a = normalizer(&ellipsoid.ellipsoid)?;
    let f = &a * &g.matrix * inverse(&a)?;
    let orth_residual = linalg::max_abs(&(f.transpose() * &f - DMatrix::identity(n, n)));
    Ok(ConjugationReport {
        f,
        orth_residual,
        isometry_residual,
        normalizer: a,
        ellipsoid,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EuclideanFit {
    pub accepted: bool,
    /// The fitted `Q`, present only on acceptance.
    #[serde(serialize_with = "opt_matrix")]
    pub shape: Option<DMatrix<f64>>,
    /// Least-squares `Q`, whether or not accepted.
    #[serde(serialize_with = "matrix_rows::serialize")]
    pub fit: DMatrix<f64>,
    /// Largest `|F(u)² − uᵀQu| / F(u)²` over fresh probe directions.
    #[serde(serialize_with = "ext_real::serialize")]
    pub residual: f64,
    pub worst_direction: Vec<f64>,
    /// `|F(u) − √(uᵀQu)|` at the worst direction.
    #[serde(serialize_with = "ext_real::serialize")]
    pub miss: f64,
}

fn opt_matrix<S: serde::Serializer>(m: &Option<DMatrix<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(linalg::to_rows).serialize(s)
}

/// Symmetric-unknown features `(uᵢ², 2uᵢuⱼ)` with `uᵀQu = features·θ`.
fn features(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut phi: Vec<f64> = u.iter().map(|x| x * x).collect();
    for i in 0..n {
        for j in i + 1..n {
            phi.push(2.0 * u[i] * u[j]);
        }
    }
    phi
}

fn unpack(theta: &[f64], n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n);
    let mut k = n;
    for i in 0..n {
        q[(i, i)] = theta[i];
        for j in i + 1..n {
            q[(i, j)] = theta[k];
            q[(j, i)] = theta[k];
            k += 1;
        }
    }
    q
}

/// Axes followed by normalised `eᵢ + eⱼ` and `eᵢ − eⱼ`.
fn fixed_probes(n: usize) -> Vec<Vec<f64>> {
    let mut probes = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        probes.push(e);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for sign in [1.0, -1.0] {
        for i in 0..n {
            for j in i + 1..n {
                let mut e = vec![0.0; n];
                e[i] = r;
                e[j] = sign * r;
                probes.push(e);
            }
        }
    }
    probes
}

/// Least-squares fit of `F(u)² = uᵀQu` over sampled directions, accepted
/// when the fresh-sample relative residual is at most 1e-6 and `Q` is SPD.
pub fn is_euclidean(norm: &WeakNorm, plan: &SamplingPlan) -> Result<EuclideanFit> {
    let n = norm.dimension();
    let unknowns = n * (n + 1) / 2;
    let m = plan.samples.max(n * (n + 1));
    let mut normal = DMatrix::zeros(unknowns, unknowns);
    let mut rhs = vec![0.0; unknowns];
    for i in 0..m {
        let u = plan.sphere(Stream::Primary, i, n);
        let f = norm.eval(&u);
        if !f.is_finite() {
            return Err(Error::NotFinite(format!("F({u:?}) is infinite")));
        }
        let phi = features(&u);
        for a in 0..unknowns {
            rhs[a] += phi[a] * f * f;
            for b in 0..unknowns {
                normal[(a, b)] += phi[a] * phi[b];
            }
        }
    }
    let fit = unpack(&linalg::solve(&normal, &rhs)?, n);

    let mut probes = fixed_probes(n);
    probes.extend((0..plan.samples).map(|i| plan.sphere(Stream::Fresh, i, n)));
    let mut residual = 0.0_f64;
    let mut worst = probes[0].clone();
    for u in &probes {
        let f = norm.eval(u);
        let q = quad_form(&fit, u);
        let r = if f > 0.0 { (f * f - q).abs() / (f * f) } else { f64::INFINITY };
        if r > residual {
            residual = r;
            worst = u.clone();
        }
    }
    let fw = norm.eval(&worst);
    let miss = (fw - quad_form(&fit, &worst).max(0.0).sqrt()).abs();
    let spd = linalg::is_symmetric(&fit, 1e-12) && jacobi_eigen(&fit).min() > 0.0;
    let accepted = residual <= EUCLIDEAN_FIT_TOL && spd;
    Ok(EuclideanFit {
        accepted,
        shape: accepted.then(|| fit.clone()),
        fit,
        residual,
        worst_direction: worst,
        miss,
    })
}
