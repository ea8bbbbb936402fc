#![allow(dead_code)]

use minkgeo::ConvexBody;
use nalgebra::DMatrix;

pub fn square_h() -> ConvexBody {
    ConvexBody::hpolytope(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        vec![1.0; 4],
    )
    .unwrap()
}

pub fn square_v() -> ConvexBody {
    ConvexBody::vpolytope(
        vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]],
        vec![],
    )
    .unwrap()
}

pub fn triangle() -> ConvexBody {
    ConvexBody::vpolytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]], vec![]).unwrap()
}

pub fn ellipse14() -> ConvexBody {
    ConvexBody::ellipsoid(diag(&[1.0, 4.0])).unwrap()
}

pub fn lp4() -> ConvexBody {
    ConvexBody::lp_ball(4.0, vec![1.0, 1.0]).unwrap()
}

/// The five bounded planar bodies used across the acceptance checks.
pub fn corpus() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("square-H", square_h()),
        ("square-V", square_v()),
        ("triangle", triangle()),
        ("ellipsoid", ellipse14()),
        ("lp4", lp4()),
    ]
}

/// Two unbounded bodies: a half-plane and a triangle with a recession ray.
pub fn unbounded() -> Vec<(&'static str, ConvexBody)> {
    vec![
        (
            "half-plane",
            ConvexBody::hpolytope(vec![vec![1.0, 0.0]], vec![1.0]).unwrap(),
        ),
        (
            "triangle+ray",
            ConvexBody::vpolytope(
                vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
                vec![vec![1.0, 2.0]],
            )
            .unwrap(),
        ),
    ]
}

pub fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

pub fn rotation(deg: f64) -> DMatrix<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Barycentric membership in the triangle `conv{a, b, c}`.
pub fn in_triangle(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> bool {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((b[0] - p[0]) * (c[1] - p[1]) - (c[0] - p[0]) * (b[1] - p[1])) / det;
    let l2 = ((c[0] - p[0]) * (a[1] - p[1]) - (a[0] - p[0]) * (c[1] - p[1])) / det;
    let l3 = 1.0 - l1 - l2;
    let tol = 1e-13;
    l1 >= -tol && l2 >= -tol && l3 >= -tol
}

/// Gauge of a triangle by scanning `t` and bisecting on membership of `x/t`.
pub fn triangle_gauge_by_scan(x: &[f64], v: &[Vec<f64>; 3]) -> f64 {
    let inside = |t: f64| {
        let p = [x[0] / t, x[1] / t];
        in_triangle(&p, &v[0], &v[1], &v[2])
    };
    let step = 1e-4;
    let mut t = step;
    while !inside(t) {
        t += step;
        assert!(t < 1e4, "scan did not reach the body");
    }
    let (mut lo, mut hi) = (t - step, t);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Gauge of a planar V-polytope by enumerating all two-vertex bases of
/// `min Σλ s.t. Σλᵢvᵢ = x, λ ≥ 0`.
pub fn gauge_by_bases(x: &[f64], v: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let det = v[i][0] * v[j][1] - v[j][0] * v[i][1];
            if det.abs() < 1e-14 {
                continue;
            }
            let a = (x[0] * v[j][1] - v[j][0] * x[1]) / det;
            let b = (v[i][0] * x[1] - x[0] * v[i][1]) / det;
            if a >= -1e-14 && b >= -1e-14 {
                best = best.min(a + b);
            }
        }
    }
    best
}
