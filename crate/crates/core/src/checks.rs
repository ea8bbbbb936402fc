//! Sampled property verdicts for two-point distance functions.
//!
//! Every checker evaluates its samples independently (each from its own
//! index-keyed stream), possibly in parallel, and aggregates with an
//! order-independent argmax where the lowest sample index wins ties. A `fail`
//! verdict always carries a witness that [`Property::violation`] re-evaluates.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, sub};
use crate::metric::{MetricDomain, MetricOracle};
use crate::norm::WeakNorm;
use crate::report::{ext_real, ext_real_vec};
use crate::sampling::{cube_point, sphere_point, SamplingPlan, Stream};

/// Half-width of the sampling cube for oracles defined on all of `ℝⁿ`.
pub const SAMPLE_BOX: f64 = 5.0;
/// Interior samples stay within this fraction of the boundary distance.
pub const INTERIOR_MARGIN: f64 = 0.95;
const MAX_DYADIC_DEPTH: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    #[serde(serialize_with = "ext_real_vec::serialize")]
    pub values: Vec<f64>,
    /// Scalar parameters of the witness (segment position, dyadic pair, ...).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub seed: u64,
    #[serde(serialize_with = "ext_real::serialize")]
    pub max_violation: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectiveReport {
    #[serde(flatten)]
    pub report: PropertyReport,
    /// Every sampled off-segment point gave a strict triangle inequality.
    pub strictly_projective: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReversibilityReport {
    #[serde(flatten)]
    pub report: PropertyReport,
    /// Largest sampled `δ(y,x)/δ(x,y)`; `∞` when some `δ(x,y) = 0 < δ(y,x)`.
    #[serde(serialize_with = "ext_real::serialize")]
    pub estimated_c: f64,
}

/// Properties whose witnesses can be re-evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Axioms,
    Projective,
    Midpoint,
    Dyadic,
    Translation,
    Reversibility,
    LineContinuity,
    Reconstruction,
}

/// `(lhs − rhs)₊ / (1 + lhs)` with the conventions of extended reals.
fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs.is_infinite() {
        return if rhs.is_infinite() { 0.0 } else { f64::INFINITY };
    }
    if rhs.is_infinite() {
        return 0.0;
    }
    (lhs - rhs).max(0.0) / (1.0 + lhs.abs())
}

/// `|a − b| / (1 + |scale|)`; equal infinities agree.
fn mismatch(a: f64, b: f64, scale: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        return if a == b { 0.0 } else { f64::INFINITY };
    }
    let s = if scale.is_finite() { scale.abs() } else { 0.0 };
    (a - b).abs() / (1.0 + s)
}

fn midpoint(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// `γ(t) = (1 − t)·p + t·q`, so `γ(0) = p` and `γ(1) = q`.
fn along(p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
    axpy(p, t, &sub(q, p))
}

/// Continuity line `γ(t) = t·a + (1 − t)·b`.
fn line(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    axpy(b, t, &sub(a, b))
}

fn draw_point<R: Rng>(domain: &MetricDomain, rng: &mut R, n: usize) -> Vec<f64> {
    match domain {
        MetricDomain::Whole => cube_point(rng, n, SAMPLE_BOX),
        MetricDomain::Interior(body) => {
            let u = sphere_point(rng, n);
            let reach = body
                .ray_boundary(&vec![0.0; n], &u)
                .unwrap_or(0.0)
                .min(SAMPLE_BOX);
            let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
            linalg::scale(&u, INTERIOR_MARGIN * reach * r)
        }
    }
}

struct Sample {
    violation: f64,
    witness: Witness,
}

fn check_nan(values: &[f64], points: &[Vec<f64>]) -> Result<()> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::MalformedOracle {
            points: points.to_vec(),
        });
    }
    Ok(())
}

/// Evaluates `count` samples and reduces to a report.
fn aggregate<F>(plan: &SamplingPlan, count: usize, eval: F) -> Result<PropertyReport>
where
    F: Fn(usize) -> Result<Option<Sample>> + Sync,
{
    let results: Vec<Result<Option<Sample>>> = (0..count).into_par_iter().map(&eval).collect();
    let mut best: Option<Sample> = None;
    let mut evaluated = 0;
    for r in results {
        let Some(s) = r? else { continue };
        evaluated += 1;
        if best.as_ref().is_none_or(|b| s.violation > b.violation) {
            best = Some(s);
        }
    }
    Ok(finish(plan, evaluated, best))
}

fn finish(plan: &SamplingPlan, evaluated: usize, best: Option<Sample>) -> PropertyReport {
    match best {
        None => PropertyReport {
            verdict: Verdict::Inconclusive,
            witness: None,
            samples: 0,
            seed: plan.seed,
            max_violation: 0.0,
        },
        Some(s) if s.violation > plan.tolerance => PropertyReport {
            verdict: Verdict::Fail,
            witness: Some(s.witness),
            samples: evaluated,
            seed: plan.seed,
            max_violation: s.violation,
        },
        Some(s) => PropertyReport {
            verdict: Verdict::Pass,
            witness: None,
            samples: evaluated,
            seed: plan.seed,
            max_violation: s.violation,
        },
    }
}

fn axioms_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
    let dxx = d.distance(x, x);
    let dxy = d.distance(x, y);
    let dyz = d.distance(y, z);
    let dxz = d.distance(x, z);
    let identity = if dxx.is_nan() { 0.0 } else { dxx.abs() };
    let v = identity.max(excess(dxz, dxy + dyz));
    (v, vec![dxx, dxy, dyz, dxz])
}

fn projective_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
    let dxy = d.distance(x, y);
    let dyz = d.distance(y, z);
    let dxz = d.distance(x, z);
    (mismatch(dxy + dyz, dxz, dxz), vec![dxy, dyz, dxz])
}

fn midpoint_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (p, q) = (&pts[0], &pts[1]);
    let m = midpoint(p, q);
    let dpq = d.distance(p, q);
    let dpm = d.distance(p, &m);
    let dmq = d.distance(&m, q);
    let v = mismatch(dpm, 0.5 * dpq, dpq).max(mismatch(dmq, 0.5 * dpq, dpq));
    (v, vec![dpm, dmq, dpq])
}

fn translation_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (p, q, v) = (&pts[0], &pts[1], &pts[2]);
    let dpq = d.distance(p, q);
    let dt = d.distance(&linalg::add(p, v), &linalg::add(q, v));
    (mismatch(dt, dpq, dpq), vec![dpq, dt])
}

fn reversibility_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (x, y) = (&pts[0], &pts[1]);
    let dxy = d.distance(x, y);
    let dyx = d.distance(y, x);
    (mismatch(dxy, dyx, dxy.max(dyx)), vec![dxy, dyx])
}

fn dyadic_violation(d: &MetricOracle, pts: &[Vec<f64>], params: &[f64]) -> (f64, Vec<f64>) {
    let (p, q) = (&pts[0], &pts[1]);
    let (mu, lambda) = (params[0], params[1]);
    let dpq = d.distance(p, q);
    let expected = (lambda - mu) * dpq;
    let got = d.distance(&along(p, q, mu), &along(p, q, lambda));
    (mismatch(got, expected, expected), vec![got, expected])
}

fn reconstruction_violation(d: &MetricOracle, pts: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (x, y) = (&pts[0], &pts[1]);
    let origin = vec![0.0; x.len()];
    let dxy = d.distance(x, y);
    let f = d.distance(&origin, &sub(y, x));
    (mismatch(dxy, f, dxy), vec![dxy, f])
}

const CONTINUITY_STEPS: (f64, f64) = (1e-3, 1e-9);

/// Largest change of `δ(γ(t), b)` and `δ(a, γ(t))` when `t` moves by `±h`.
fn continuity_jump(d: &MetricOracle, a: &[f64], b: &[f64], t0: f64, h: f64) -> (f64, f64) {
    let g0 = line(a, b, t0);
    let base_b = d.distance(&g0, b);
    let base_a = d.distance(a, &g0);
    let mut jump = 0.0_f64;
    for s in [h, -h] {
        let g = line(a, b, t0 + s);
        for (v, v0) in [(d.distance(&g, b), base_b), (d.distance(a, &g), base_a)] {
            jump = jump.max(mismatch(v, v0, 0.0));
        }
    }
    (jump, base_a.max(base_b))
}

fn continuity_violation(d: &MetricOracle, pts: &[Vec<f64>], t0: f64) -> (f64, Vec<f64>) {
    let (a, b) = (&pts[0], &pts[1]);
    let (coarse, _) = continuity_jump(d, a, b, t0, CONTINUITY_STEPS.0);
    let (fine, level) = continuity_jump(d, a, b, t0, CONTINUITY_STEPS.1);
    // A continuous restriction has jumps that shrink with the step.
    let discontinuous = fine > 1e-6 * (1.0 + level) && fine > 0.5 * coarse;
    let v = if discontinuous { fine / (1.0 + level) } else { 0.0 };
    (v, vec![fine, coarse])
}

impl Property {
    /// Normalised violation measured at a witness; a failed report's witness
    /// reproduces a value above the reporting tolerance.
    pub fn violation(&self, oracle: &MetricOracle, witness: &Witness) -> f64 {
        let pts = &witness.points;
        match self {
            Property::Axioms => axioms_violation(oracle, pts).0,
            Property::Projective => projective_violation(oracle, pts).0,
            Property::Midpoint => midpoint_violation(oracle, pts).0,
            Property::Dyadic => dyadic_violation(oracle, pts, &witness.params).0,
            Property::Translation => translation_violation(oracle, pts).0,
            Property::Reversibility => reversibility_violation(oracle, pts).0,
            Property::LineContinuity => continuity_violation(oracle, pts, witness.params[0]).0,
            Property::Reconstruction => reconstruction_violation(oracle, pts).0,
        }
    }
}

fn sampled<F>(
    oracle: &MetricOracle,
    plan: &SamplingPlan,
    stream: Stream,
    npoints: usize,
    measure: F,
) -> Result<PropertyReport>
where
    F: Fn(&MetricOracle, &[Vec<f64>]) -> (f64, Vec<f64>) + Sync,
{
    let n = oracle.dimension();
    aggregate(plan, plan.samples, |i| {
        let mut rng = plan.rng(stream, i);
        let points: Vec<Vec<f64>> = (0..npoints)
            .map(|_| draw_point(oracle.domain(), &mut rng, n))
            .collect();
        let (violation, values) = measure(oracle, &points);
        check_nan(&values, &points)?;
        Ok(Some(Sample {
            violation,
            witness: Witness {
                points,
                values,
                params: vec![],
            },
        }))
    })
}

/// Zero diagonal and triangle inequality on sampled triples.
pub fn check_weak_axioms(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<PropertyReport> {
    sampled(oracle, plan, Stream::Primary, 3, axioms_violation)
}

/// Additivity along segments, plus a strictness probe with off-segment points.
pub fn check_projective(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<ProjectiveReport> {
    let n = oracle.dimension();
    let strict = std::sync::atomic::AtomicBool::new(true);
    let report = aggregate(plan, plan.samples, |i| {
        let mut rng = plan.rng(Stream::Primary, i);
        let x = draw_point(oracle.domain(), &mut rng, n);
        let z = draw_point(oracle.domain(), &mut rng, n);
        let u = draw_point(oracle.domain(), &mut rng, n);
        let t: f64 = rng.random_range(1e-6..1.0);
        let y = along(&x, &z, t);
        let points = vec![x, y, z];
        let (violation, values) = projective_violation(oracle, &points);
        check_nan(&values, &points)?;

        let (x, z) = (&points[0], &points[2]);
        let dxu = oracle.distance(x, &u);
        let duz = oracle.distance(&u, z);
        let dxz = values[2];
        if !(excess(dxu + duz, dxz) > plan.tolerance) {
            strict.store(false, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(Some(Sample {
            violation,
            witness: Witness {
                points,
                values,
                params: vec![t],
            },
        }))
    })?;
    let strictly_projective = report.passed() && strict.into_inner();
    Ok(ProjectiveReport {
        report,
        strictly_projective,
    })
}

/// `δ(p,m) = δ(m,q) = ½δ(p,q)` at affine midpoints.
pub fn check_midpoint(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<PropertyReport> {
    sampled(oracle, plan, Stream::Primary, 2, midpoint_violation)
}

/// `δ(p+v, q+v) = δ(p,q)`.
pub fn check_translation_invariance(
    oracle: &MetricOracle,
    plan: &SamplingPlan,
) -> Result<PropertyReport> {
    match oracle.domain() {
        MetricDomain::Whole => sampled(oracle, plan, Stream::Primary, 3, translation_violation),
        MetricDomain::Interior(_) => {
            let n = oracle.dimension();
            let dom = oracle.domain();
            aggregate(plan, plan.samples, |i| {
                let mut rng = plan.rng(Stream::Primary, i);
                let p = draw_point(dom, &mut rng, n);
                let q = draw_point(dom, &mut rng, n);
                let w = draw_point(dom, &mut rng, n);
                let mut v = sub(&w, &p);
                // Shrink the shift until both translated points stay inside.
                for _ in 0..20 {
                    if dom.contains(&linalg::add(&p, &v)) && dom.contains(&linalg::add(&q, &v)) {
                        let points = vec![p, q, v];
                        let (violation, values) = translation_violation(oracle, &points);
                        check_nan(&values, &points)?;
                        return Ok(Some(Sample {
                            violation,
                            witness: Witness {
                                points,
                                values,
                                params: vec![],
                            },
                        }));
                    }
                    v = linalg::scale(&v, 0.5);
                }
                Ok(None)
            })
        }
    }
}

/// Symmetry of the oracle, with the sampled quasi-reversibility constant.
pub fn check_reversibility(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<ReversibilityReport> {
    let n = oracle.dimension();
    let eps = plan.tolerance;
    let rows: Vec<Result<(Witness, f64, f64)>> = (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = plan.rng(Stream::Primary, i);
            let points = vec![
                draw_point(oracle.domain(), &mut rng, n),
                draw_point(oracle.domain(), &mut rng, n),
            ];
            let (violation, values) = reversibility_violation(oracle, &points);
            check_nan(&values, &points)?;
            let (dxy, dyx) = (values[0], values[1]);
            let mut ratio = 0.0_f64;
            for (f, g) in [(dxy, dyx), (dyx, dxy)] {
                let r = if f > eps {
                    g / f
                } else if g > eps {
                    f64::INFINITY
                } else {
                    continue;
                };
                ratio = ratio.max(r);
            }
            Ok((
                Witness {
                    points,
                    values,
                    params: vec![],
                },
                violation,
                ratio,
            ))
        })
        .collect();
    let mut rows_ok = Vec::with_capacity(rows.len());
    for r in rows {
        rows_ok.push(r?);
    }
    let estimated_c = rows_ok.iter().map(|r| r.2).fold(0.0, f64::max);
    let pick = |key: &dyn Fn(&(Witness, f64, f64)) -> f64| {
        let mut best: Option<usize> = None;
        for (i, r) in rows_ok.iter().enumerate() {
            if best.is_none_or(|b| key(r) > key(&rows_ok[b])) {
                best = Some(i);
            }
        }
        best
    };
    let best_violation = pick(&|r| r.1);
    let witness_index = if estimated_c.is_infinite() {
        pick(&|r| if r.2.is_infinite() { 1.0 } else { 0.0 })
    } else {
        best_violation
    };
    let max_violation = best_violation.map_or(0.0, |i| rows_ok[i].1);
    let best = witness_index.map(|i| Sample {
        violation: max_violation,
        witness: rows_ok[i].0.clone(),
    });
    let report = finish(plan, rows_ok.len(), best);
    let estimated_c = if report.passed() { 1.0 } else { estimated_c };
    Ok(ReversibilityReport {
        report,
        estimated_c,
    })
}

/// `δ(γ(μ), γ(λ)) = (λ − μ)·δ(p, q)` for all dyadic `μ ≤ λ` in `[−1, 2]` with
/// denominator `2^depth`, where `γ(t) = (1 − t)p + tq`.
pub fn check_dyadic(
    oracle: &MetricOracle,
    p: &[f64],
    q: &[f64],
    depth: u32,
    plan: &SamplingPlan,
) -> Result<PropertyReport> {
    if depth > MAX_DYADIC_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "dyadic depth {depth} exceeds {MAX_DYADIC_DEPTH}"
        )));
    }
    let dpq = oracle.distance(p, q);
    check_nan(&[dpq], &[p.to_vec(), q.to_vec()])?;
    if dpq.is_infinite() {
        return Err(Error::NotFinite("δ(p, q) is infinite".into()));
    }
    let k = 1_i64 << depth;
    let params: Vec<f64> = (-k..=2 * k).map(|j| j as f64 / k as f64).collect();
    let points: Vec<Option<Vec<f64>>> = params
        .iter()
        .map(|&t| {
            let g = along(p, q, t);
            oracle.domain().contains(&g).then_some(g)
        })
        .collect();

    let per_row: Vec<Result<(usize, Option<Sample>)>> = (0..params.len())
        .into_par_iter()
        .map(|a| {
            let Some(ga) = &points[a] else {
                return Ok((0, None));
            };
            let mut best: Option<Sample> = None;
            let mut count = 0;
            for b in a..params.len() {
                let Some(gb) = &points[b] else { continue };
                let expected = (params[b] - params[a]) * dpq;
                let got = oracle.distance(ga, gb);
                check_nan(&[got], &[ga.clone(), gb.clone()])?;
                count += 1;
                let v = mismatch(got, expected, expected);
                if best.as_ref().is_none_or(|s| v > s.violation) {
                    best = Some(Sample {
                        violation: v,
                        witness: Witness {
                            points: vec![p.to_vec(), q.to_vec(), ga.clone(), gb.clone()],
                            values: vec![got, expected],
                            params: vec![params[a], params[b]],
                        },
                    });
                }
            }
            Ok((count, best))
        })
        .collect();
    let mut total = 0;
    let mut best: Option<Sample> = None;
    for r in per_row {
        let (count, s) = r?;
        total += count;
        if let Some(s) = s {
            if best.as_ref().is_none_or(|b| s.violation > b.violation) {
                best = Some(s);
            }
        }
    }
    Ok(finish(plan, total, best))
}

/// Discontinuity probe along sampled lines: the jump of `δ(γ(t), b)` and
/// `δ(a, γ(t))` at `t₀` must shrink as the step goes from 1e-3 to 1e-9.
/// `t₀` cycles through the endpoints and a random interior value.
pub fn check_line_continuity(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<PropertyReport> {
    let n = oracle.dimension();
    aggregate(plan, plan.samples, |i| {
        let mut rng = plan.rng(Stream::Auxiliary, i);
        let a = draw_point(oracle.domain(), &mut rng, n);
        let b = draw_point(oracle.domain(), &mut rng, n);
        let t0 = match i % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        };
        let points = vec![a, b];
        let (violation, values) = continuity_violation(oracle, &points, t0);
        check_nan(&values, &points)?;
        Ok(Some(Sample {
            violation,
            witness: Witness {
                points,
                values,
                params: vec![t0],
            },
        }))
    })
}

/// Compares `δ(x, y)` with the reconstructed `F(y − x) := δ(0, y − x)` on
/// fresh samples.
pub fn check_reconstruction(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<PropertyReport> {
    sampled(oracle, plan, Stream::Fresh, 2, reconstruction_violation)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: String,
    #[serde(flatten)]
    pub report: PropertyReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinkowskiVerdict {
    /// All stages passed on the sample.
    #[serde(rename = "minkowski (sampled)")]
    Minkowski,
    #[serde(rename = "not minkowski")]
    NotMinkowski,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiDecision {
    pub verdict: MinkowskiVerdict,
    pub stages: Vec<StageReport>,
    /// Largest relative gap `|δ(x,y) − F(y−x)| / max(δ(x,y), F(y−x))` on the
    /// reconstruction samples.
    #[serde(serialize_with = "ext_real::serialize")]
    pub reconstruction_error: f64,
    #[serde(skip)]
    pub reconstructed: Option<WeakNorm>,
}

impl MinkowskiDecision {
    pub fn stage(&self, name: &str) -> Option<&PropertyReport> {
        self.stages.iter().find(|s| s.stage == name).map(|s| &s.report)
    }

    pub fn failed_stages(&self) -> Vec<&str> {
        self.stages
            .iter()
            .filter(|s| s.report.verdict == Verdict::Fail)
            .map(|s| s.stage.as_str())
            .collect()
    }
}

/// Sampled decision whether a finite weak metric is a weak Minkowski metric:
/// midpoint property and continuity on lines, cross-checked by projectivity
/// and by reconstructing `F(v) := δ(0, v)` and comparing `δ(x,y)` with
/// `F(y − x)`.
pub fn decide_minkowski(oracle: &MetricOracle, plan: &SamplingPlan) -> Result<MinkowskiDecision> {
    let n = oracle.dimension();
    let infinite = (0..plan.samples).into_par_iter().find_first(|&i| {
        let mut rng = plan.rng(Stream::Refine, i);
        let x = draw_point(oracle.domain(), &mut rng, n);
        let y = draw_point(oracle.domain(), &mut rng, n);
        oracle.distance(&x, &y).is_infinite() || oracle.distance(&y, &x).is_infinite()
    });
    if let Some(i) = infinite {
        return Err(Error::NotFinite(format!(
            "oracle `{}` is infinite on sample {i}; the characterization needs a finite metric",
            oracle.name()
        )));
    }

    let stages = vec![
        StageReport {
            stage: "midpoint".into(),
            report: check_midpoint(oracle, plan)?,
        },
        StageReport {
            stage: "line_continuity".into(),
            report: check_line_continuity(oracle, plan)?,
        },
        StageReport {
            stage: "projective".into(),
            report: check_projective(oracle, plan)?.report,
        },
        StageReport {
            stage: "translation".into(),
            report: check_reconstruction(oracle, plan)?,
        },
    ];

    let reconstruction_error = (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = plan.rng(Stream::Fresh, i);
            let x = draw_point(oracle.domain(), &mut rng, n);
            let y = draw_point(oracle.domain(), &mut rng, n);
            let a = oracle.distance(&x, &y);
            let b = oracle.distance(&vec![0.0; n], &sub(&y, &x));
            let m = a.abs().max(b.abs());
            if m == 0.0 {
                0.0
            } else {
                (a - b).abs() / m
            }
        })
        .reduce(|| 0.0, f64::max);

    let all_pass = stages.iter().all(|s| s.report.passed());
    let reconstructed = all_pass.then(|| {
        let d = oracle.clone();
        WeakNorm::custom(format!("reconstructed:{}", oracle.name()), n, move |v| {
            d.distance(&vec![0.0; v.len()], v)
        })
    });
    Ok(MinkowskiDecision {
        verdict: if all_pass {
            MinkowskiVerdict::Minkowski
        } else {
            MinkowskiVerdict::NotMinkowski
        },
        stages,
        reconstruction_error,
        reconstructed,
    })
}

/// Named bundles of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Minkowski,
    Funk,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axioms" => Ok(Suite::Axioms),
            "minkowski" => Ok(Suite::Minkowski),
            "funk" => Ok(Suite::Funk),
            other => Err(Error::InvalidArgument(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub property: String,
    pub verdict: Verdict,
    /// Reported but excluded from the suite's pass/fail outcome.
    pub informational: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub oracle: String,
    pub passed: bool,
    pub results: Vec<SuiteEntry>,
}

fn entry<T: Serialize>(property: &str, verdict: Verdict, informational: bool, detail: &T) -> SuiteEntry {
    SuiteEntry {
        property: property.into(),
        verdict,
        informational,
        detail: serde_json::to_value(detail).expect("reports serialize"),
    }
}

/// Runs a suite:
/// - `axioms`: weak-metric axioms;
/// - `minkowski`: axioms, projective, midpoint, dyadic (depth 8),
///   translation, decide_minkowski;
/// - `funk`: axioms and projective, with reversibility reported as
///   informational (Funk metrics are never symmetric).
pub fn run_suite(oracle: &MetricOracle, suite: Suite, plan: &SamplingPlan) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let axioms = check_weak_axioms(oracle, plan)?;
    results.push(entry("axioms", axioms.verdict, false, &axioms));
    match suite {
        Suite::Axioms => {}
        Suite::Minkowski => {
            let proj = check_projective(oracle, plan)?;
            results.push(entry("projective", proj.report.verdict, false, &proj));
            let mid = check_midpoint(oracle, plan)?;
            results.push(entry("midpoint", mid.verdict, false, &mid));
            let n = oracle.dimension();
            let mut rng = plan.rng(Stream::Auxiliary, usize::MAX >> 16);
            let p = draw_point(oracle.domain(), &mut rng, n);
            let q = draw_point(oracle.domain(), &mut rng, n);
            let dy = check_dyadic(oracle, &p, &q, 8, plan)?;
            results.push(entry("dyadic", dy.verdict, false, &dy));
            let tr = check_translation_invariance(oracle, plan)?;
            results.push(entry("translation", tr.verdict, false, &tr));
            let dec = decide_minkowski(oracle, plan)?;
            let v = if dec.verdict == MinkowskiVerdict::Minkowski {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            results.push(entry("decide_minkowski", v, false, &dec));
        }
        Suite::Funk => {
            let proj = check_projective(oracle, plan)?;
            results.push(entry("projective", proj.report.verdict, false, &proj));
            let rev = check_reversibility(oracle, plan)?;
            results.push(entry("reversibility", rev.report.verdict, true, &rev));
        }
    }
    let passed = results
        .iter()
        .filter(|e| !e.informational)
        .all(|e| e.verdict == Verdict::Pass);
    Ok(SuiteReport {
        suite,
        oracle: oracle.name().to_string(),
        passed,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::metric::{metric_from_norm, pathological};
    use crate::norm::{linear_form_norm, norm_from_body};

    fn plan() -> SamplingPlan {
        SamplingPlan::new(7, 400)
    }

    fn euclid(n: usize) -> MetricOracle {
        metric_from_norm(&WeakNorm::euclidean(n))
    }

    fn squared_distance() -> MetricOracle {
        MetricOracle::new("squared", 1, MetricDomain::Whole, |x, y| (y[0] - x[0]).powi(2))
    }

    fn assert_witness_reproduces(prop: Property, oracle: &MetricOracle, r: &PropertyReport) {
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.as_ref().expect("fail carries a witness");
        let v = prop.violation(oracle, w);
        assert!(v > 0.5 * plan().tolerance, "{prop:?} witness re-evaluates to {v}");
    }

    #[test]
    fn axioms_examples() {
        assert!(check_weak_axioms(&euclid(2), &plan()).unwrap().passed());
        let rho = pathological("power", Some(0.5), 2).unwrap();
        assert!(check_weak_axioms(&rho, &plan()).unwrap().passed());
        let sq = squared_distance();
        let w = Witness {
            points: vec![vec![0.0], vec![1.0], vec![2.0]],
            values: vec![],
            params: vec![],
        };
        assert!((Property::Axioms.violation(&sq, &w) - 2.0 / 5.0).abs() < 1e-15);
        let r = check_weak_axioms(&sq, &plan()).unwrap();
        assert_witness_reproduces(Property::Axioms, &sq, &r);
    }

    #[test]
    fn nan_oracle_is_malformed() {
        let bad = MetricOracle::new("nan", 1, MetricDomain::Whole, |_, _| f64::NAN);
        assert!(matches!(check_weak_axioms(&bad, &plan()), Err(Error::MalformedOracle { .. })));
    }

    #[test]
    fn projective_examples() {
        let e = pathological("exp_coordinates", None, 1).unwrap();
        let w = Witness {
            points: vec![vec![0.0], vec![0.5], vec![1.0]],
            values: vec![],
            params: vec![],
        };
        assert!(Property::Projective.violation(&e, &w) < 1e-15);
        assert!(check_projective(&e, &plan()).unwrap().report.passed());

        let capped = pathological("capped_norm", None, 2).unwrap();
        let r = check_projective(&capped, &plan()).unwrap();
        assert_witness_reproduces(Property::Projective, &capped, &r.report);

        let rho = pathological("power", Some(0.5), 1).unwrap();
        let w = Witness {
            points: vec![vec![0.0], vec![1.0], vec![2.0]],
            values: vec![],
            params: vec![],
        };
        assert!(Property::Projective.violation(&rho, &w) > 1e-3);
        let r = check_projective(&rho, &plan()).unwrap();
        assert_witness_reproduces(Property::Projective, &rho, &r.report);
    }

    #[test]
    fn strict_projectivity() {
        assert!(check_projective(&euclid(2), &plan()).unwrap().strictly_projective);
        let max = metric_from_norm(&WeakNorm::max_norm(2));
        let r = check_projective(&max, &plan()).unwrap();
        assert!(r.report.passed());
        assert!(!r.strictly_projective);
    }

    #[test]
    fn midpoint_examples() {
        let max = metric_from_norm(&WeakNorm::max_norm(3));
        assert!(check_midpoint(&max, &plan()).unwrap().passed());
        let capped = pathological("capped_norm", None, 2).unwrap();
        let w = Witness {
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            values: vec![],
            params: vec![],
        };
        // δ(p,m) = 1 against ½·δ(p,q) = ½.
        assert!((Property::Midpoint.violation(&capped, &w) - 0.25).abs() < 1e-15);
        let r = check_midpoint(&capped, &plan()).unwrap();
        assert_witness_reproduces(Property::Midpoint, &capped, &r);
    }

    #[test]
    fn dyadic_examples() {
        let e = euclid(1);
        let r = check_dyadic(&e, &[0.0], &[1.0], 2, &plan()).unwrap();
        assert!(r.passed());
        let w = Witness {
            points: vec![vec![0.0], vec![1.0]],
            values: vec![],
            params: vec![0.25, 0.75],
        };
        assert_eq!(Property::Dyadic.violation(&e, &w), 0.0);

        let max = metric_from_norm(&WeakNorm::max_norm(2));
        assert!(check_dyadic(&max, &[0.3, -1.0], &[2.0, 0.5], 6, &plan()).unwrap().passed());

        let capped = pathological("capped_norm", None, 1).unwrap();
        let w = Witness {
            points: vec![vec![0.0], vec![1.0]],
            values: vec![],
            params: vec![0.0, 0.5],
        };
        assert!((Property::Dyadic.violation(&capped, &w) - 0.5 / 1.5).abs() < 1e-15);
        let r = check_dyadic(&capped, &[0.0], &[1.0], 3, &plan()).unwrap();
        assert_witness_reproduces(Property::Dyadic, &capped, &r);

        assert!(check_dyadic(&e, &[0.0], &[1.0], 13, &plan()).is_err());
        let inf = MetricOracle::new("inf", 1, MetricDomain::Whole, |x, y| {
            if x == y {
                0.0
            } else {
                f64::INFINITY
            }
        });
        assert!(matches!(
            check_dyadic(&inf, &[0.0], &[1.0], 3, &plan()),
            Err(Error::NotFinite(_))
        ));
    }

    #[test]
    fn dyadic_asymmetric_norm_uses_forward_direction() {
        let tri = norm_from_body(
            ConvexBody::vpolytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]], vec![])
                .unwrap(),
        );
        let d = metric_from_norm(&tri);
        let r = check_dyadic(&d, &[0.5, 0.0], &[-0.5, 0.0], 4, &plan()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn translation_examples() {
        assert!(check_translation_invariance(&euclid(3), &plan()).unwrap().passed());
        let e = pathological("exp_coordinates", None, 1).unwrap();
        let w = Witness {
            points: vec![vec![0.0], vec![1.0], vec![1.0]],
            values: vec![],
            params: vec![],
        };
        let e1 = 1f64.exp();
        let expected = ((e1 * e1 - e1) - (e1 - 1.0)) / (1.0 + (e1 - 1.0));
        assert!((Property::Translation.violation(&e, &w) - expected).abs() < 1e-12);
        let r = check_translation_invariance(&e, &plan()).unwrap();
        assert_witness_reproduces(Property::Translation, &e, &r);
    }

    #[test]
    fn reversibility_examples() {
        let r = check_reversibility(&euclid(2), &plan()).unwrap();
        assert!(r.report.passed());
        assert_eq!(r.estimated_c, 1.0);

        let tri = norm_from_body(
            ConvexBody::vpolytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]], vec![])
                .unwrap(),
        );
        let r = check_reversibility(&metric_from_norm(&tri), &SamplingPlan::new(3, 4000)).unwrap();
        assert!(!r.report.passed());
        assert!((r.estimated_c - 2.0).abs() < 0.1, "{}", r.estimated_c);

        let lf = metric_from_norm(&linear_form_norm(vec![1.0, 0.0]));
        let r = check_reversibility(&lf, &plan()).unwrap();
        assert_eq!(r.estimated_c, f64::INFINITY);
        let w = r.report.witness.unwrap();
        assert!(w.values[0] == 0.0 || w.values[1] == 0.0);
    }

    #[test]
    fn decide_examples() {
        let max = metric_from_norm(&WeakNorm::max_norm(2));
        let d = decide_minkowski(&max, &plan()).unwrap();
        assert_eq!(d.verdict, MinkowskiVerdict::Minkowski);
        let f = d.reconstructed.unwrap();
        for x in [[1.0, 2.0], [-3.0, 0.5]] {
            assert!((f.eval(&x) - WeakNorm::max_norm(2).eval(&x)).abs() <= 1e-9);
        }

        let capped = pathological("capped_norm", None, 2).unwrap();
        let d = decide_minkowski(&capped, &plan()).unwrap();
        assert_eq!(d.verdict, MinkowskiVerdict::NotMinkowski);
        assert!(d.failed_stages().contains(&"midpoint"));
        assert!(d.failed_stages().contains(&"line_continuity"));

        let exp = pathological("exp_coordinates", None, 1).unwrap();
        let d = decide_minkowski(&exp, &plan()).unwrap();
        assert_eq!(d.verdict, MinkowskiVerdict::NotMinkowski);
        let tr = d.stage("translation").unwrap();
        assert_witness_reproduces(Property::Reconstruction, &exp, tr);

        let seg = metric_from_norm(&norm_from_body(
            ConvexBody::vpolytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![]).unwrap(),
        ));
        assert!(matches!(decide_minkowski(&seg, &plan()), Err(Error::NotFinite(_))));
    }

    #[test]
    fn power_metric_is_continuous_but_not_projective() {
        let rho = pathological("power", Some(0.5), 2).unwrap();
        let d = decide_minkowski(&rho, &plan()).unwrap();
        assert!(d.stage("line_continuity").unwrap().passed());
        assert!(!d.stage("projective").unwrap().passed());
    }

    #[test]
    fn suites() {
        let sq = metric_from_norm(&norm_from_body(ConvexBody::unit_cube(2)));
        let r = run_suite(&sq, Suite::Minkowski, &SamplingPlan::new(7, 200)).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.results.len(), 6);
        let r = run_suite(&squared_distance(), Suite::Axioms, &plan()).unwrap();
        assert!(!r.passed);
    }
}
