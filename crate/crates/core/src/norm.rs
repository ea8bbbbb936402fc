//! Weak Minkowski norms: positively homogeneous, subadditive gauges with
//! values in `[0, ∞]`, together with their classification, indicatrix and
//! unit-ball reconstruction.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm2};
use crate::report::ext_real;
use crate::sampling::{circle_grid, SamplingPlan, Stream};
use crate::tolerance::EPS_NUM;

pub type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Closed-form norms that need no body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    Euclidean,
    /// `max |xᵢ|`
    Max,
    /// `max(ṽ) − min(ṽ)` with `ṽ = (v, 0)`.
    Variation,
}

#[derive(Clone)]
pub enum NormSource {
    Body(ConvexBody),
    /// `x ↦ max(0, φ·x)`
    LinearForm(Vec<f64>),
    Closed(ClosedForm),
    Custom { name: String, eval: NormFn },
}

impl fmt::Debug for NormSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSource::Body(b) => f.debug_tuple("Body").field(b).finish(),
            NormSource::LinearForm(phi) => f.debug_tuple("LinearForm").field(phi).finish(),
            NormSource::Closed(c) => f.debug_tuple("Closed").field(c).finish(),
            NormSource::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeakNorm {
    dimension: usize,
    source: NormSource,
}

/// Result of [`WeakNorm::classify`]; serializes as the classification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormClassification {
    pub finite: bool,
    pub separating: bool,
    pub weakly_separating: bool,
    pub reversible: bool,
    /// Least sampled `C` with `F(−x) ≤ C·F(x)`.
    #[serde(rename = "quasi_constant", serialize_with = "ext_real::serialize")]
    pub quasi_reversibility_constant: f64,
    pub method: Method,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Sampled,
}

/// Constants with `lower·‖x‖ ≤ F(x) ≤ upper·‖x‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

/// The Minkowski functional of a body.
pub fn norm_from_body(body: ConvexBody) -> WeakNorm {
    WeakNorm {
        dimension: body.dimension(),
        source: NormSource::Body(body),
    }
}

/// `F(x) = max{0, φ·x}`: finite, but neither reversible nor weakly separating.
pub fn linear_form_norm(phi: Vec<f64>) -> WeakNorm {
    WeakNorm {
        dimension: phi.len(),
        source: NormSource::LinearForm(phi),
    }
}

impl WeakNorm {
    pub fn closed(form: ClosedForm, dimension: usize) -> Self {
        Self {
            dimension,
            source: NormSource::Closed(form),
        }
    }

    pub fn euclidean(dimension: usize) -> Self {
        Self::closed(ClosedForm::Euclidean, dimension)
    }

    pub fn max_norm(dimension: usize) -> Self {
        Self::closed(ClosedForm::Max, dimension)
    }

    pub fn custom(
        name: impl Into<String>,
        dimension: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            source: NormSource::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn source(&self) -> &NormSource {
        &self.source
    }

    pub fn body(&self) -> Option<&ConvexBody> {
        match &self.source {
            NormSource::Body(b) => Some(b),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.source {
            NormSource::Body(b) => b.gauge(x),
            NormSource::LinearForm(phi) => dot(phi, x).max(0.0),
            NormSource::Closed(ClosedForm::Euclidean) => norm2(x),
            NormSource::Closed(ClosedForm::Max) => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            NormSource::Closed(ClosedForm::Variation) => {
                let (lo, hi) = x
                    .iter()
                    .fold((0.0_f64, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                hi - lo
            }
            NormSource::Custom { eval, .. } => eval(x),
        }
    }

    /// `dir / F(dir)` when `0 < F(dir) < ∞`.
    pub fn indicatrix_point(&self, dir: &[f64]) -> Option<Vec<f64>> {
        let f = self.eval(dir);
        (f > 0.0 && f.is_finite()).then(|| linalg::scale(dir, 1.0 / f))
    }

    /// Flags decided analytically where the source allows it.
    fn analytic_flags(&self) -> Result<AnalyticFlags> {
        let n = self.dimension;
        let all = |v: bool| AnalyticFlags {
            finite: Some(v),
            separating: Some(v),
            weakly_separating: Some(v),
            reversible: Some(v),
        };
        Ok(match &self.source {
            NormSource::Closed(_) => all(true),
            NormSource::Body(ConvexBody::Ellipsoid { .. } | ConvexBody::LpBall { .. }) => all(true),
            NormSource::Body(ConvexBody::HPolytope { offsets, .. }) => {
                let body = self.body().unwrap();
                let separating = body.recession_ray()?.is_none();
                AnalyticFlags {
                    finite: Some(offsets.iter().all(|&b| b > 0.0)),
                    separating: Some(separating),
                    weakly_separating: separating.then_some(true),
                    reversible: None,
                }
            }
            NormSource::LinearForm(phi) => {
                let zero = phi.iter().all(|&v| v == 0.0);
                AnalyticFlags {
                    finite: Some(true),
                    separating: Some(false),
                    weakly_separating: Some(n == 1 && !zero),
                    reversible: Some(zero),
                }
            }
            _ => AnalyticFlags::default(),
        })
    }

    /// Classifies the norm. Sampled flags use `plan.samples` directions on
    /// the Euclidean unit sphere; they are evidence, not proof.
    pub fn classify(&self, plan: &SamplingPlan) -> Result<NormClassification> {
        let n = self.dimension;
        if plan.samples < 2 * n {
            return Err(Error::InvalidArgument(format!(
                "{} samples cannot classify a norm on R^{n} (need at least {})",
                plan.samples,
                2 * n
            )));
        }
        let eps = plan.tolerance;
        let analytic = self.analytic_flags()?;

        // (F(u), F(−u)) on the sphere.
        let values: Vec<(f64, f64)> = (0..plan.samples)
            .into_par_iter()
            .map(|i| {
                let u = plan.sphere(Stream::Primary, i, n);
                (self.eval(&u), self.eval(&linalg::scale(&u, -1.0)))
            })
            .collect();

        let finite = analytic
            .finite
            .unwrap_or_else(|| values.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        let separating = analytic.separating.unwrap_or_else(|| {
            values.iter().all(|&(a, b)| a > eps && b > eps) && self.sphere_minimum(plan).0 > eps
        });
        let weakly_separating = analytic
            .weakly_separating
            .unwrap_or_else(|| values.iter().all(|&(a, b)| a.max(b) > eps));
        let reversible = analytic.reversible.unwrap_or_else(|| {
            values.iter().all(|&(a, b)| {
                if a.is_infinite() || b.is_infinite() {
                    a == b
                } else {
                    (a - b).abs() <= eps
                }
            })
        });

        let quasi = if reversible {
            1.0
        } else {
            let mut c = 0.0_f64;
            for &(a, b) in &values {
                // Both orders of each sampled direction.
                for (f, g) in [(a, b), (b, a)] {
                    let ratio = if f > eps {
                        g / f
                    } else if g > eps {
                        f64::INFINITY
                    } else {
                        continue;
                    };
                    c = c.max(ratio);
                }
            }
            c
        };

        let method = if analytic.complete() {
            Method::Analytic
        } else {
            Method::Sampled
        };
        Ok(NormClassification {
            finite,
            separating,
            weakly_separating: weakly_separating || separating,
            reversible,
            quasi_reversibility_constant: quasi,
            method,
            seed: plan.seed,
            samples: plan.samples,
        })
    }

    /// Constants `(lower, upper)` with `lower·‖x‖ ≤ F(x) ≤ upper·‖x‖`: sphere
    /// extremes, locally refined, then widened to cover fresh samples.
    pub fn euclidean_sandwich(&self, plan: &SamplingPlan) -> Result<Sandwich> {
        let class = self.classify(plan)?;
        if !(class.finite && class.separating) {
            return Err(Error::NotSeparating(
                "Euclidean comparison constants exist only for finite separating norms".into(),
            ));
        }
        let n = self.dimension;
        let dirs = self.probe_directions(plan);
        let vals: Vec<f64> = dirs.par_iter().map(|u| self.eval(u)).collect();

        let mut order: Vec<usize> = (0..dirs.len()).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
        const K: usize = 8;
        let f = |u: &[f64]| self.eval(u);
        let lower = order
            .iter()
            .take(K)
            .map(|&i| refine_on_sphere(&f, &dirs[i], false).0)
            .fold(f64::INFINITY, f64::min);
        let upper = order
            .iter()
            .rev()
            .take(K)
            .map(|&i| refine_on_sphere(&f, &dirs[i], true).0)
            .fold(0.0, f64::max);

        let fresh: Vec<f64> = (0..plan.samples)
            .into_par_iter()
            .map(|i| self.eval(&plan.sphere(Stream::Fresh, i, n)))
            .collect();
        let lower = fresh.iter().copied().fold(lower, f64::min);
        let upper = fresh.iter().copied().fold(upper, f64::max);
        Ok(Sandwich { lower, upper })
    }

    /// Smallest value of `F` on the Euclidean unit sphere found by probing
    /// and pattern-search refinement, with the direction attaining it.
    pub fn sphere_minimum(&self, plan: &SamplingPlan) -> (f64, Vec<f64>) {
        let dirs = self.probe_directions(plan);
        let vals: Vec<f64> = dirs.par_iter().map(|u| self.eval(u)).collect();
        let mut order: Vec<usize> = (0..dirs.len()).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
        let f = |u: &[f64]| self.eval(u);
        order
            .iter()
            .take(8)
            .map(|&i| refine_on_sphere(&f, &dirs[i], false))
            .fold((f64::INFINITY, dirs[order[0]].clone()), |a, b| if b.0 < a.0 { b } else { a })
    }

    fn probe_directions(&self, plan: &SamplingPlan) -> Vec<Vec<f64>> {
        let n = self.dimension;
        let mut dirs = if n == 2 {
            circle_grid(plan.samples.max(8))
        } else {
            (0..plan.samples)
                .map(|i| plan.sphere(Stream::Primary, i, n))
                .collect()
        };
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                dirs.push(e);
            }
        }
        dirs
    }

    /// Boundary points of the unit ball: [`Self::indicatrix_point`] over a
    /// uniform angular grid (`n = 2`) or a latitude/longitude grid (`n = 3`).
    pub fn reconstruct_ball(&self, resolution: usize) -> Result<Vec<Vec<f64>>> {
        let dirs = match self.dimension {
            2 => circle_grid(resolution),
            3 => {
                let lat = (resolution / 2).max(1);
                let mut d = Vec::new();
                for i in 0..=lat {
                    let theta = std::f64::consts::PI * i as f64 / lat as f64;
                    let lon = if i == 0 || i == lat { 1 } else { resolution };
                    for j in 0..lon {
                        let phi = std::f64::consts::TAU * j as f64 / resolution as f64;
                        d.push(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                    }
                }
                d
            }
            n => {
                return Err(Error::InvalidArgument(format!(
                    "ball reconstruction supports dimensions 2 and 3, not {n}"
                )))
            }
        };
        Ok(dirs
            .par_iter()
            .filter_map(|u| self.indicatrix_point(u))
            .collect())
    }
}

#[derive(Default)]
struct AnalyticFlags {
    finite: Option<bool>,
    separating: Option<bool>,
    weakly_separating: Option<bool>,
    reversible: Option<bool>,
}

impl AnalyticFlags {
    fn complete(&self) -> bool {
        self.finite.is_some()
            && self.separating.is_some()
            && self.weakly_separating.is_some()
            && self.reversible.is_some()
    }
}

/// Pattern search for a local extremum of `f` on the unit sphere, moving
/// along coordinate directions and renormalising.
pub(crate) fn refine_on_sphere(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    maximize: bool,
) -> (f64, Vec<f64>) {
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut u = start.to_vec();
    let mut best = f(&u);
    let mut step = 0.05;
    while step > 1e-12 {
        let mut improved = false;
        for i in 0..u.len() {
            for s in [1.0, -1.0] {
                let mut cand = u.clone();
                cand[i] += s * step;
                let Some(cand) = linalg::normalized(&cand) else {
                    continue;
                };
                let v = f(&cand);
                if better(v, best) {
                    best = v;
                    u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, u)
}

/// Default tolerance-aware equality for gauge values.
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= EPS_NUM * (1.0 + a.abs().max(b.abs()))
}
