//! `minkgeo`: distances, classifications, property suites, tensors,
//! enclosing ellipsoids and Funk/Hilbert comparisons from the command line.
//!
//! Exit codes: 0 on success, 1 when a checked property fails (the report
//! with its witness is still written), 2 on any input error.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minkgeo::tolerance::{EPS_NUM, EPS_ROOT};

#[derive(Parser, Debug)]
#[command(name = "minkgeo", version, about = "Weak Minkowski geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Sampling seed. Falls back to MINKGEO_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,

    /// Tolerance for algebraic identities.
    #[arg(long = "tol-num", global = true, default_value_t = EPS_NUM)]
    tol_num: f64,

    /// Relative width at which boundary bisection stops.
    #[arg(long = "tol-root", global = true, default_value_t = EPS_ROOT)]
    tol_root: f64,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct BodyArg {
    /// JSON body description.
    #[arg(long)]
    pub body: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub from: Point,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Point,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Minkowski,
    Funk,
    ReverseFunk,
    Hilbert,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteArg {
    Axioms,
    Minkowski,
    Funk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two points.
    Dist {
        #[command(flatten)]
        body: BodyArg,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = MetricKind::Minkowski)]
        metric: MetricKind,
    },
    /// Finiteness, separation and reversibility of the body's gauge.
    Classify {
        #[command(flatten)]
        body: BodyArg,
    },
    /// Run a property suite against a body metric or a named counterexample.
    Check {
        #[arg(long, conflicts_with = "pathological")]
        body: Option<PathBuf>,
        /// capped_norm, power or exp_coordinates.
        #[arg(long, required_unless_present = "body")]
        pathological: Option<String>,
        /// Exponent for `power`.
        #[arg(long)]
        alpha: Option<f64>,
        /// Dimension for named counterexamples.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Metric built from the body; defaults to funk for the funk suite.
        #[arg(long, value_enum)]
        metric: Option<MetricKind>,
    },
    /// Fundamental tensor, recovered norm and Euler residual at a point.
    Tensor {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        /// Second-difference step; scaled default when absent.
        #[arg(long)]
        step: Option<f64>,
        /// Also classify strict and strong convexity.
        #[arg(long)]
        convexity: bool,
    },
    /// Löwner ellipsoid of the unit ball, or of a JSON point list.
    Ellipsoid {
        #[arg(long, required_unless_present = "points", conflicts_with = "points")]
        body: Option<PathBuf>,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = minkgeo::ellipsoid::DEFAULT_MVEE_EPS)]
        eps: f64,
    },
    /// Conjugate a candidate isometry into the orthogonal group.
    Isometry {
        #[command(flatten)]
        body: BodyArg,
        /// JSON {"matrix": [[...]], "translation": [...]}; translation optional.
        #[arg(long)]
        map: PathBuf,
        /// Largest accepted orthogonality and isometry residual.
        #[arg(long, default_value_t = 1e-5)]
        max_residual: f64,
    },
    /// Minkowski, Funk and Hilbert distances for one pair.
    Projective {
        #[command(flatten)]
        body: BodyArg,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// SVG of a planar body with optional metric balls.
    Render {
        #[command(flatten)]
        body: BodyArg,
        #[arg(long, default_value_t = minkgeo::svg::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        no_indicatrix: bool,
        /// Center and radius as cx,cy,r.
        #[arg(long, allow_hyphen_values = true)]
        funk_ball: Option<Point>,
        #[arg(long, allow_hyphen_values = true)]
        hilbert_ball: Option<Point>,
    },
}

/// A point given as comma-separated decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl std::str::FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|c| {
                let c = c.trim();
                match c.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(format!("`{c}` is not a finite decimal")),
                }
            })
            .collect::<Result<_, _>>()
            .map(Point)
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(minkgeo::Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<minkgeo::Error> for CliError {
    fn from(e: minkgeo::Error) -> Self {
        CliError::Core(e)
    }
}

/// What a command produced: the artifact text and whether its property held.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

pub struct Context {
    pub plan: minkgeo::SamplingPlan,
    pub tol_root: f64,
}

fn seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("MINKGEO_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("MINKGEO_SEED=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    if !(cli.tol_num > 0.0) || !(cli.tol_root > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    if cli.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let ctx = Context {
        plan: minkgeo::SamplingPlan::new(seed(cli.seed)?, cli.samples).with_tolerance(cli.tol_num),
        tol_root: cli.tol_root,
    };
    match cli.command {
        Command::Dist { body, pair, metric } => commands::dist(&ctx, &body.body, &pair, metric),
        Command::Classify { body } => commands::classify(&ctx, &body.body),
        Command::Check {
            body,
            pathological,
            alpha,
            dim,
            suite,
            metric,
        } => {
            let target = match (body, pathological) {
                (Some(path), _) => commands::CheckTarget::Body { path, metric },
                (None, Some(name)) => commands::CheckTarget::Named { name, alpha, dim },
                (None, None) => unreachable!("clap requires one of --body/--pathological"),
            };
            commands::check(&ctx, target, suite)
        }
        Command::Tensor {
            body,
            at,
            step,
            convexity,
        } => commands::tensor(&ctx, &body.body, &at.0, step, convexity),
        Command::Ellipsoid { body, points, eps } => commands::ellipsoid(&ctx, body, points, eps),
        Command::Isometry {
            body,
            map,
            max_residual,
        } => commands::isometry(&ctx, &body.body, &map, max_residual),
        Command::Projective { body, pair } => commands::projective(&ctx, &body.body, &pair),
        Command::Render {
            body,
            resolution,
            no_indicatrix,
            funk_ball,
            hilbert_ball,
        } => commands::render(
            &body.body,
            resolution,
            !no_indicatrix,
            funk_ball.map(|p| p.0),
            hilbert_ball.map(|p| p.0),
        ),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn fail(err: &CliError) -> ExitCode {
    let doc = serde_json::json!({ "error": { "kind": err.kind(), "detail": err.to_string() } });
    eprintln!("{doc}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            return fail(&CliError::Usage(e.render().to_string().trim_end().to_string()));
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(&CliError::Usage("--threads must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = cli.out.clone();
    match dispatch(cli).and_then(|o| emit(out.as_ref(), &o.text).map(|_| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
