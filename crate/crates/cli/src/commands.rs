//! One handler per subcommand. Each returns the artifact text; exit-code
//! policy lives in `main`.

use std::path::{Path, PathBuf};

use minkgeo::body::parse_body;
use minkgeo::checks::{run_suite, Suite};
use minkgeo::differential::{classify_convexity, euler_residual, fundamental_tensor, recover_norm, ConvexityClass, TensorAtPoint};
use minkgeo::ellipsoid::{boundary_cloud, conjugate_to_orthogonal, is_euclidean, mvee, normalizer, ConjugationReport, EuclideanFit, LinearMapCandidate, MveeResult};
use minkgeo::linalg::{from_rows, to_rows};
use minkgeo::metric::{metric_from_norm, pathological};
use minkgeo::norm::{norm_from_body, NormClassification, Sandwich};
use minkgeo::projective::{compare_pair_tol, funk_distance_tol, funk_oracle, hilbert_oracle, minkowski_ratio_distance, reverse_funk_oracle, ComparisonRow};
use minkgeo::report::{ext_real, to_json};
use minkgeo::svg::{render_svg, Ball, RenderOptions};
use minkgeo::{ConvexBody, Error, MetricOracle};
use serde::{Deserialize, Serialize};

use crate::{CliError, Context, MetricKind, Outcome, PairArgs, SuiteArg};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_body(path: &Path) -> Result<ConvexBody, CliError> {
    Ok(parse_body(&read(path)?)?)
}

fn expect_dim(body: &ConvexBody, x: &[f64]) -> Result<(), CliError> {
    if x.len() != body.dimension() {
        return Err(Error::DimensionMismatch {
            expected: body.dimension(),
            got: x.len(),
        }
        .into());
    }
    Ok(())
}

fn line<T: Serialize>(report: &T) -> String {
    let mut s = to_json(report);
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DistanceReport {
    metric: &'static str,
    from: Vec<f64>,
    to: Vec<f64>,
    #[serde(serialize_with = "ext_real::serialize")]
    distance: f64,
}

pub fn dist(ctx: &Context, path: &Path, pair: &PairArgs, metric: MetricKind) -> Result<Outcome, CliError> {
    let body = load_body(path)?;
    let (x, y) = (&pair.from.0, &pair.to.0);
    expect_dim(&body, x)?;
    expect_dim(&body, y)?;
    let (name, distance) = match metric {
        MetricKind::Minkowski => ("minkowski", minkowski_ratio_distance(&body, x, y)?),
        MetricKind::Funk => ("funk", funk_distance_tol(&body, x, y, ctx.tol_root)?),
        MetricKind::ReverseFunk => ("reverse_funk", funk_distance_tol(&body, y, x, ctx.tol_root)?),
        MetricKind::Hilbert => (
            "hilbert",
            0.5 * (funk_distance_tol(&body, x, y, ctx.tol_root)? + funk_distance_tol(&body, y, x, ctx.tol_root)?),
        ),
    };
    Ok(Outcome::ok(line(&DistanceReport {
        metric: name,
        from: x.clone(),
        to: y.clone(),
        distance,
    })))
}

#[derive(Serialize)]
struct ClassifyReport {
    #[serde(flatten)]
    classification: NormClassification,
    /// Present for finite separating norms only.
    sandwich: Option<Sandwich>,
    recession_ray: Option<Vec<f64>>,
}

pub fn classify(ctx: &Context, path: &Path) -> Result<Outcome, CliError> {
    let body = load_body(path)?;
    let recession_ray = body.recession_ray()?;
    let norm = norm_from_body(body);
    let classification = norm.classify(&ctx.plan)?;
    let sandwich = if classification.finite && classification.separating {
        Some(norm.euclidean_sandwich(&ctx.plan)?)
    } else {
        None
    };
    Ok(Outcome::ok(line(&ClassifyReport {
        classification,
        sandwich,
        recession_ray,
    })))
}

pub enum CheckTarget {
    Body { path: PathBuf, metric: Option<MetricKind> },
    Named { name: String, alpha: Option<f64>, dim: usize },
}

pub fn check(ctx: &Context, target: CheckTarget, suite: SuiteArg) -> Result<Outcome, CliError> {
    let suite = match suite {
        SuiteArg::Axioms => Suite::Axioms,
        SuiteArg::Minkowski => Suite::Minkowski,
        SuiteArg::Funk => Suite::Funk,
    };
    let oracle: MetricOracle = match target {
        CheckTarget::Body { path, metric } => {
            let body = load_body(&path)?;
            let metric = metric.unwrap_or(match suite {
                Suite::Funk => MetricKind::Funk,
                _ => MetricKind::Minkowski,
            });
            let (label, oracle) = match metric {
                MetricKind::Minkowski => ("minkowski", metric_from_norm(&norm_from_body(body))),
                MetricKind::Funk => ("funk", funk_oracle(&body)),
                MetricKind::ReverseFunk => ("reverse_funk", reverse_funk_oracle(&body)),
                MetricKind::Hilbert => ("hilbert", hilbert_oracle(&body)),
            };
            let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            oracle.with_name(format!("{label}:{stem}"))
        }
        CheckTarget::Named { name, alpha, dim } => {
            if dim == 0 {
                return Err(CliError::Usage("--dim must be positive".into()));
            }
            pathological(&name, alpha, dim)?
        }
    };
    let report = run_suite(&oracle, suite, &ctx.plan)?;
    Ok(Outcome {
        passed: report.passed,
        text: line(&report),
    })
}

#[derive(Serialize)]
struct TensorReport {
    #[serde(flatten)]
    tensor: TensorAtPoint,
    norm: f64,
    recovered: f64,
    euler_residual: f64,
    convexity: Option<ConvexityClass>,
}

pub fn tensor(ctx: &Context, path: &Path, at: &[f64], step: Option<f64>, convexity: bool) -> Result<Outcome, CliError> {
    let body = load_body(path)?;
    expect_dim(&body, at)?;
    let convexity = if convexity {
        Some(classify_convexity(&body, &ctx.plan)?)
    } else {
        None
    };
    let norm = norm_from_body(body);
    let tensor = fundamental_tensor(&norm, at, step)?;
    Ok(Outcome::ok(line(&TensorReport {
        norm: norm.eval(at),
        recovered: recover_norm(&norm, at)?,
        euler_residual: euler_residual(&norm, at)?,
        tensor,
        convexity,
    })))
}

#[derive(Serialize)]
struct EllipsoidReport {
    #[serde(flatten)]
    mvee: MveeResult,
    normalizer: Vec<Vec<f64>>,
    /// Quadratic fit of the gauge; absent for point-list input.
    euclidean: Option<EuclideanFit>,
}

pub fn ellipsoid(ctx: &Context, body: Option<PathBuf>, points: Option<PathBuf>, eps: f64) -> Result<Outcome, CliError> {
    if !(eps > 0.0) {
        return Err(CliError::Usage("--eps must be positive".into()));
    }
    let (cloud, fit) = match (body, points) {
        (Some(path), _) => {
            let norm = norm_from_body(load_body(&path)?);
            let fit = is_euclidean(&norm, &ctx.plan)?;
            (boundary_cloud(&norm, &ctx.plan)?, Some(fit))
        }
        (None, Some(path)) => {
            let pts: Vec<Vec<f64>> = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
            (pts, None)
        }
        (None, None) => unreachable!("clap requires one of --body/--points"),
    };
    let result = mvee(&cloud, eps)?;
    let normalizer = to_rows(&normalizer(&result.ellipsoid)?);
    Ok(Outcome::ok(line(&EllipsoidReport {
        mvee: result,
        normalizer,
        euclidean: fit,
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    matrix: Vec<Vec<f64>>,
    #[serde(default)]
    translation: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct IsometryReport {
    #[serde(flatten)]
    conjugation: ConjugationReport,
    isometry: bool,
}

pub fn isometry(ctx: &Context, path: &Path, map: &Path, max_residual: f64) -> Result<Outcome, CliError> {
    let norm = norm_from_body(load_body(path)?);
    let spec: MapSpec = serde_json::from_str(&read(map)?).map_err(Error::from)?;
    let n = spec.matrix.len();
    if let Some(bad) = spec.matrix.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        }
        .into());
    }
    let candidate = LinearMapCandidate {
        matrix: from_rows(&spec.matrix),
        translation: spec.translation.unwrap_or_else(|| vec![0.0; n]),
    };
    let conjugation = conjugate_to_orthogonal(&norm, &candidate, &ctx.plan)?;
    let isometry = conjugation.orth_residual <= max_residual && conjugation.isometry_residual <= max_residual;
    Ok(Outcome {
        passed: isometry,
        text: line(&IsometryReport { conjugation, isometry }),
    })
}

pub fn projective(ctx: &Context, path: &Path, pair: &PairArgs) -> Result<Outcome, CliError> {
    let body = load_body(path)?;
    let (x, y) = (&pair.from.0, &pair.to.0);
    expect_dim(&body, x)?;
    expect_dim(&body, y)?;
    let row: ComparisonRow = compare_pair_tol(&body, x, y, ctx.tol_root)?;
    Ok(Outcome::ok(line(&row)))
}

fn ball(spec: Option<Vec<f64>>, flag: &str) -> Result<Option<Ball>, CliError> {
    spec.map(|v| match v.as_slice() {
        [cx, cy, r] if *r >= 0.0 => Ok(Ball {
            center: vec![*cx, *cy],
            radius: *r,
        }),
        _ => Err(CliError::Usage(format!("--{flag} expects cx,cy,r with r ≥ 0"))),
    })
    .transpose()
}

pub fn render(
    path: &Path,
    resolution: usize,
    indicatrix: bool,
    funk: Option<Vec<f64>>,
    hilbert: Option<Vec<f64>>,
) -> Result<Outcome, CliError> {
    let body = load_body(path)?;
    if resolution < 3 {
        return Err(CliError::Usage("--resolution must be at least 3".into()));
    }
    let opts = RenderOptions {
        resolution,
        indicatrix,
        funk_ball: ball(funk, "funk-ball")?,
        hilbert_ball: ball(hilbert, "hilbert-ball")?,
    };
    Ok(Outcome::ok(render_svg(&body, &opts)?))
}
