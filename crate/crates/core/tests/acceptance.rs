//! Acceptance criteria, one PASS/FAIL line each.
//!
//! The lines are written straight to stderr so they appear in the test log
//! even when output capture is on.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use minkgeo::body::ConvexBody;
use minkgeo::checks::{decide_minkowski, MinkowskiVerdict, Property};
use minkgeo::differential::{
    classify_convexity, euler_residual, find_boundary_segment, fundamental_tensor,
    homothety_invariance, recover_norm, ConvexityClass,
};
use minkgeo::ellipsoid::{conjugate_to_orthogonal, is_euclidean, mvee, LinearMapCandidate};
use minkgeo::linalg::{self, inverse, max_abs, norm2};
use minkgeo::metric::{metric_from_norm, pathological};
use minkgeo::norm::{norm_from_body, ClosedForm, WeakNorm};
use minkgeo::projective::{
    funk_distance, hilbert_distance, log_cross_ratio, simplex_body, simplex_embed,
    simplex_hilbert, simplex_to_minkowski, variation_seminorm,
};
use minkgeo::report::to_json;
use minkgeo::sampling::{cube_point, SamplingPlan, Stream};
use minkgeo::svg::{render_svg, Ball, RenderOptions};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn gauge_correctness() -> Outcome {
    let start = Instant::now();
    let plan = SamplingPlan::new(1, 1000);
    let mut worst = 0.0_f64;
    for (name, body) in corpus() {
        for i in 0..plan.samples {
            let mut rng = plan.rng(Stream::Primary, i);
            let x = cube_point(&mut rng, 2, 2.0);
            let y = cube_point(&mut rng, 2, 2.0);
            let lambda: f64 = rng.random_range(0.0..10.0);
            let fx = body.gauge(&x);
            let hom = (body.gauge(&linalg::scale(&x, lambda)) - lambda * fx).abs();
            let sub = body.gauge(&linalg::add(&x, &y)) - fx - body.gauge(&y);
            worst = worst.max(hom / (1.0 + lambda * fx)).max(sub);
            ensure(hom <= 1e-9 * (1.0 + lambda * fx), || format!("{name}: homogeneity off by {hom:e} at {x:?}"))?;
            ensure(sub <= 1e-9, || format!("{name}: subadditivity off by {sub:e} at {x:?}, {y:?}"))?;
        }
    }
    let (h, v) = (square_h(), square_v());
    for i in 0..plan.samples {
        let x = cube_point(&mut plan.rng(Stream::Fresh, i), 2, 3.0);
        let d = (h.gauge(&x) - v.gauge(&x)).abs();
        ensure(d <= 1e-9, || format!("square-H vs square-V differ by {d:e} at {x:?}"))?;
    }
    let verts = [vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]];
    let x = [-1.0, 0.0];
    let lp = triangle().gauge(&x);
    let scan = triangle_gauge_by_scan(&x, &verts);
    let bases = gauge_by_bases(&x, &verts);
    for (label, v) in [("lp", lp), ("grid scan", scan), ("basis enumeration", bases)] {
        ensure((v - 2.0).abs() <= 1e-9, || format!("triangle F(-1,0) by {label} = {v}"))?;
    }
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("worst normalised defect {worst:.1e}; triangle F(-1,0) = {lp}; {t:.2?}"))
}

fn round_trip() -> Outcome {
    let resolution = 3600;
    let mut worst_ratio = 0.0_f64;
    for (name, body) in corpus() {
        let f = norm_from_body(body.clone());
        let ball = f.reconstruct_ball(resolution).map_err(|e| e.to_string())?;
        ensure(ball.len() == resolution, || format!("{name}: {} points", ball.len()))?;
        for p in &ball {
            let g = body.gauge(p);
            ensure((g - 1.0).abs() <= 1e-9, || format!("{name}: boundary point {p:?} has gauge {g}"))?;
        }
        // Independent boundary reference: ray exits at 4× the resolution,
        // offset by a quarter step.
        let m = 4 * resolution;
        let reference: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let a = std::f64::consts::TAU * (k as f64 + 0.25) / m as f64;
                let u = [a.cos(), a.sin()];
                let t = body.ray_boundary(&[0.0, 0.0], &u).unwrap();
                vec![t * u[0], t * u[1]]
            })
            .collect();
        let nearest = |p: &[f64], set: &[Vec<f64>]| {
            set.iter()
                .map(|q| norm2(&linalg::sub(p, q)))
                .fold(f64::INFINITY, f64::min)
        };
        let h1 = reference.iter().map(|p| nearest(p, &ball)).fold(0.0, f64::max);
        let h2 = ball.iter().map(|p| nearest(p, &reference)).fold(0.0, f64::max);
        let diam = reference
            .iter()
            .flat_map(|p| reference.iter().step_by(7).map(move |q| norm2(&linalg::sub(p, q))))
            .fold(0.0, f64::max);
        let tol = std::f64::consts::TAU / resolution as f64 * diam;
        let h = h1.max(h2);
        worst_ratio = worst_ratio.max(h / tol);
        ensure(h <= tol, || format!("{name}: Hausdorff {h:e} > {tol:e}"))?;
    }
    Ok(format!("worst Hausdorff / tolerance = {worst_ratio:.3}"))
}

fn separation_equivalence() -> Outcome {
    let plan = SamplingPlan::new(3, 1000);
    let mut lines = Vec::new();
    for (name, body) in corpus().into_iter().chain(unbounded()) {
        let f = norm_from_body(body.clone());
        let ray = body.recession_ray().map_err(|e| e.to_string())?;
        let (min, _) = f.sphere_minimum(&plan);
        let class = f.classify(&plan).map_err(|e| e.to_string())?;
        let separating = min > plan.tolerance;
        ensure(separating == ray.is_none(), || {
            format!("{name}: sphere minimum {min:e} but recession ray {ray:?}")
        })?;
        ensure(class.separating == separating, || format!("{name}: classification disagrees"))?;
        if let Some(r) = &ray {
            let g = body.gauge(r);
            ensure(g <= 1e-9, || format!("{name}: ray {r:?} has gauge {g:e}"))?;
            lines.push(format!("{name} ray {:?}", r.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>()));
        }
    }
    Ok(lines.join("; "))
}

fn characterization() -> Outcome {
    let plan = SamplingPlan::new(7, 1000);
    let mut norms: Vec<WeakNorm> = corpus().into_iter().map(|(_, b)| norm_from_body(b)).collect();
    norms.push(WeakNorm::euclidean(3));
    norms.push(WeakNorm::max_norm(3));
    norms.push(WeakNorm::closed(ClosedForm::Variation, 3));
    for f in &norms {
        let d = decide_minkowski(&metric_from_norm(f), &plan).map_err(|e| e.to_string())?;
        ensure(d.verdict == MinkowskiVerdict::Minkowski, || {
            format!("{:?}: failed stages {:?}", f.source(), d.failed_stages())
        })?;
        ensure(d.reconstruction_error <= 1e-9, || {
            format!("{:?}: reconstruction error {:e}", f.source(), d.reconstruction_error)
        })?;
    }

    let cases: [(&str, Option<f64>, &[(&str, Property)]); 3] = [
        ("capped_norm", None, &[("midpoint", Property::Midpoint), ("projective", Property::Projective)]),
        ("power", Some(0.5), &[("projective", Property::Projective)]),
        ("exp_coordinates", None, &[("translation", Property::Reconstruction)]),
    ];
    let mut summary = Vec::new();
    for (name, alpha, stages) in cases {
        let oracle = pathological(name, alpha, 2).map_err(|e| e.to_string())?;
        let d = decide_minkowski(&oracle, &plan).map_err(|e| e.to_string())?;
        ensure(d.verdict == MinkowskiVerdict::NotMinkowski, || format!("{name} judged Minkowski"))?;
        for (stage, prop) in stages {
            let r = d.stage(stage).ok_or_else(|| format!("{name}: no {stage} stage"))?;
            let w = r.witness.as_ref().ok_or_else(|| format!("{name}: {stage} has no witness"))?;
            let v = prop.violation(&oracle, w);
            ensure(v > 1e-6, || format!("{name}: {stage} witness re-evaluates to {v:e}"))?;
            summary.push(format!("{name}/{stage} {v:.2e}"));
        }
    }
    Ok(format!("{} norms minkowski; witnesses {}", norms.len(), summary.join(", ")))
}

fn differential_layer() -> Outcome {
    let start = Instant::now();
    let plan = SamplingPlan::new(5, 100);
    let norms = [
        ("euclidean", WeakNorm::euclidean(2)),
        ("ellipsoid", norm_from_body(ellipse14())),
        ("lp4", norm_from_body(lp4())),
    ];
    let (mut rec, mut eul, mut hom) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (name, f) in &norms {
        for i in 0..plan.samples {
            let mut rng = plan.rng(Stream::Primary, i);
            let u = plan.sphere(Stream::Auxiliary, i, 2);
            let y = linalg::scale(&u, rng.random_range(0.5..3.0));
            let lambda = rng.random_range(0.5..5.0);
            let fy = f.eval(&y);
            let e = |err: minkgeo::Error| format!("{name}: {err}");
            let r = (recover_norm(f, &y).map_err(e)? - fy).abs() / fy;
            let eu = euler_residual(f, &y).map_err(e)?.abs() / (1.0 + fy);
            let h = homothety_invariance(f, &y, lambda).map_err(e)?;
            rec = rec.max(r);
            eul = eul.max(eu);
            hom = hom.max(h);
            ensure(r <= 1e-4, || format!("{name}: recover_norm relative error {r:e} at {y:?}"))?;
            ensure(eu <= 1e-6, || format!("{name}: Euler residual {eu:e} at {y:?}"))?;
            ensure(h <= 1e-4, || format!("{name}: homothety defect {h:e} at {y:?}, λ = {lambda}"))?;
        }
    }
    let lp4n = norm_from_body(lp4());
    let t = fundamental_tensor(&lp4n, &[1.0, 0.0], None).map_err(|e| e.to_string())?;
    ensure(t.min_eigenvalue <= 1e-3, || format!("lp4 min eigenvalue at e1 = {}", t.min_eigenvalue))?;
    let seg = find_boundary_segment(&lp4n, &SamplingPlan::new(5, 1000));
    ensure(seg.is_none(), || format!("lp4 boundary segment found: {seg:?}"))?;
    let class = classify_convexity(&lp4(), &plan).map_err(|e| e.to_string())?;
    ensure(matches!(class, ConvexityClass::StrictlyNotStrongly { .. }), || format!("lp4 classified {class:?}"))?;
    let el = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "recover {rec:.1e}, euler {eul:.1e}, homothety {hom:.1e}, lp4 λmin(e1) {:.1e}; {el:.2?}",
        t.min_eigenvalue
    ))
}

fn ellipsoid_isometry() -> Outcome {
    let plan = SamplingPlan::new(9, 500);
    let sq = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
    let r = mvee(&sq, 1e-7).map_err(|e| e.to_string())?;
    let c = norm2(&r.ellipsoid.center);
    ensure(c <= 1e-7, || format!("square mvee center {c:e}"))?;
    for u in [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]] {
        let radius = 1.0 / linalg::quad_form(&r.ellipsoid.shape, &u).sqrt();
        ensure((radius - 2f64.sqrt()).abs() <= 1e-6, || format!("square mvee radius {radius} along {u:?}"))?;
    }

    let ellipse = norm_from_body(ConvexBody::ellipsoid(diag(&[0.25, 1.0])).unwrap());
    let a = diag(&[0.5, 1.0]);
    let ainv = inverse(&a).unwrap();
    let mut worst = 0.0_f64;
    for deg in [0.0, 37.0, 90.0, 145.0, 211.0] {
        for refl in [false, true] {
            let mut o = rotation(deg);
            if refl {
                o *= diag(&[1.0, -1.0]);
            }
            let g = &ainv * &o * &a;
            let rep = conjugate_to_orthogonal(&ellipse, &LinearMapCandidate::linear(g), &plan)
                .map_err(|e| e.to_string())?;
            worst = worst.max(rep.orth_residual);
            ensure(rep.isometry_residual <= 1e-12, || format!("constructed map is not an isometry: {:e}", rep.isometry_residual))?;
            ensure(rep.orth_residual <= 1e-5, || format!("rotation {deg}°: orth residual {:e}", rep.orth_residual))?;
        }
    }

    let rot = rotation(30.0);
    let q_rot = &rot * diag(&[1.0, 4.0]) * rot.transpose();
    let quadratic = [
        ("ellipsoid", norm_from_body(ellipse14()), diag(&[1.0, 4.0])),
        ("rotated", norm_from_body(ConvexBody::ellipsoid(q_rot.clone()).unwrap()), q_rot),
        ("lp2", norm_from_body(ConvexBody::lp_ball(2.0, vec![1.0, 0.5]).unwrap()), diag(&[1.0, 4.0])),
        ("euclidean", WeakNorm::euclidean(2), diag(&[1.0, 1.0])),
    ];
    for (name, f, q) in &quadratic {
        let fit = is_euclidean(f, &plan).map_err(|e| e.to_string())?;
        let shape = fit.shape.ok_or_else(|| format!("{name}: rejected, residual {:e}", fit.residual))?;
        let err = max_abs(&(shape - q));
        ensure(err <= 1e-8, || format!("{name}: shape error {err:e}"))?;
    }
    let fit = is_euclidean(&WeakNorm::max_norm(2), &plan).map_err(|e| e.to_string())?;
    ensure(!fit.accepted && fit.residual >= 0.05, || format!("max norm fit residual {:e}", fit.residual))?;
    Ok(format!(
        "square mvee radius √2, worst orth residual {worst:.1e}, max-norm fit residual {:.3}",
        fit.residual
    ))
}

fn random_simplex_point<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn projective_metrics() -> Outcome {
    let start = Instant::now();
    let ln2 = std::f64::consts::LN_2;
    let disc = ConvexBody::unit_ball(2);
    let f = funk_distance(&disc, &[0.0, 0.0], &[0.5, 0.0]).map_err(|e| e.to_string())?;
    ensure((f - ln2).abs() <= 1e-9, || format!("funk = {f}"))?;
    let h = hilbert_distance(&disc, &[0.0, 0.0], &[0.5, 0.0]).map_err(|e| e.to_string())?;
    ensure((h - 0.5 * 3f64.ln()).abs() <= 1e-9, || format!("hilbert = {h}"))?;
    let s = simplex_hilbert(&[1.0 / 3.0; 3], &[0.5, 0.25, 0.25]).map_err(|e| e.to_string())?;
    ensure((s - ln2).abs() <= 1e-9, || format!("simplex closed form = {s}"))?;

    let plan = SamplingPlan::new(13, 10_000);
    let mut iso = 0.0_f64;
    for k in 2..=5 {
        for i in 0..plan.samples {
            let mut rng = plan.rng(Stream::Primary, (k << 20) + i);
            let x = random_simplex_point(&mut rng, k);
            let y = random_simplex_point(&mut rng, k);
            let closed = simplex_hilbert(&x, &y).map_err(|e| e.to_string())?;
            let lx = simplex_to_minkowski(&x).unwrap();
            let ly = simplex_to_minkowski(&y).unwrap();
            let n = variation_seminorm(&linalg::sub(&lx, &ly));
            iso = iso.max((closed - n).abs());
            ensure((closed - n).abs() <= 1e-9, || format!("k={k}: closed {closed} vs N∘L {n}"))?;
        }
    }

    let mut cross = 0.0_f64;
    for k in 2..=4 {
        let body = simplex_body(k).unwrap();
        for i in 0..100 {
            let mut rng = plan.rng(Stream::Fresh, (k << 20) + i);
            let x = random_simplex_point(&mut rng, k);
            let y = random_simplex_point(&mut rng, k);
            let closed = simplex_hilbert(&x, &y).unwrap();
            let c = log_cross_ratio(&body, &simplex_embed(&x), &simplex_embed(&y)).map_err(|e| e.to_string())?;
            cross = cross.max((closed - c).abs());
            ensure((closed - c).abs() <= 1e-7, || format!("k={k}: closed {closed} vs cross ratio {c}"))?;
        }
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("isometry defect {iso:.1e} on 4×10⁴ pairs, cross-ratio defect {cross:.1e}; {t:.2?}"))
}

/// Every report the test matrix produces, serialized.
fn artifact_matrix() -> Vec<String> {
    let plan = SamplingPlan::new(21, 300);
    let mut out = Vec::new();
    for (_, body) in corpus() {
        let f = norm_from_body(body.clone());
        out.push(to_json(&f.classify(&plan).unwrap()));
        out.push(to_json(&f.euclidean_sandwich(&plan).unwrap()));
        let d = minkgeo::checks::run_suite(&metric_from_norm(&f), minkgeo::checks::Suite::Minkowski, &plan).unwrap();
        out.push(to_json(&d));
        out.push(to_json(&classify_convexity(&body, &plan).unwrap()));
        out.push(to_json(&is_euclidean(&f, &plan).unwrap()));
        let g = LinearMapCandidate::linear(diag(&[-1.0, 1.0]));
        out.push(to_json(&conjugate_to_orthogonal(&f, &g, &plan).unwrap()));
        let funk = minkgeo::projective::funk_oracle(&body);
        out.push(to_json(&minkgeo::checks::run_suite(&funk, minkgeo::checks::Suite::Funk, &plan).unwrap()));
        out.push(
            render_svg(
                &body,
                &RenderOptions {
                    funk_ball: Some(Ball { center: vec![0.1, 0.05], radius: 0.3 }),
                    hilbert_ball: Some(Ball { center: vec![0.0, 0.0], radius: 0.4 }),
                    ..Default::default()
                },
            )
            .unwrap(),
        );
    }
    for name in ["capped_norm", "exp_coordinates"] {
        let o = pathological(name, None, 2).unwrap();
        out.push(to_json(&decide_minkowski(&o, &plan).unwrap()));
    }
    out
}

fn determinism() -> Outcome {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(artifact_matrix)
    };
    let a = run(1);
    let b = run(4);
    let c = run(4);
    ensure(a.len() == b.len(), || "artifact counts differ".into())?;
    for (i, ((x, y), z)) in a.iter().zip(&b).zip(&c).enumerate() {
        ensure(x == y && y == z, || format!("artifact {i} differs between runs"))?;
    }
    let bytes: usize = a.iter().map(String::len).sum();
    Ok(format!("{} artifacts, {bytes} bytes, identical across 1 and 4 threads", a.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 gauge correctness", gauge_correctness),
        ("2 unit-ball round trip", round_trip),
        ("3 separating iff no recession ray", separation_equivalence),
        ("4 minkowski characterization", characterization),
        ("5 differential layer", differential_layer),
        ("6 ellipsoid and isometry", ellipsoid_isometry),
        ("7 projective metrics", projective_metrics),
        ("8 determinism", determinism),
    ];
    let mut failures = Vec::new();
    let mut err = std::io::stderr();
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => writeln!(err, "PASS criterion {name}: {detail}").unwrap(),
            Err(detail) => {
                writeln!(err, "FAIL criterion {name}: {detail}").unwrap();
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
