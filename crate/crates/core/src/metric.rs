//! Two-point distance functions treated as black boxes.

use std::fmt;
use std::sync::Arc;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg::{norm2, sub};
use crate::norm::WeakNorm;

pub type DistanceFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Where an oracle is defined.
#[derive(Clone, Debug)]
pub enum MetricDomain {
    Whole,
    /// Open body interior `{x : gauge(x) < 1}`.
    Interior(ConvexBody),
}

impl MetricDomain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            MetricDomain::Whole => x.iter().all(|v| v.is_finite()),
            MetricDomain::Interior(body) => body.gauge(x) < 1.0,
        }
    }
}

#[derive(Clone)]
pub struct MetricOracle {
    name: String,
    dimension: usize,
    domain: MetricDomain,
    eval: DistanceFn,
}

impl fmt::Debug for MetricOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricOracle")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MetricOracle {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        domain: MetricDomain,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dimension,
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same metric under a different label.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn domain(&self) -> &MetricDomain {
        &self.domain
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.eval)(x, y)
    }
}

/// `δ_F(x, y) = F(y − x)`: translation invariant and projective.
pub fn metric_from_norm(norm: &WeakNorm) -> MetricOracle {
    let f = norm.clone();
    MetricOracle::new(
        format!("norm:{:?}", norm.source()),
        norm.dimension(),
        MetricDomain::Whole,
        move |x, y| f.eval(&sub(y, x)),
    )
}

/// Closed-form counterexamples built on the Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pathological {
    /// `max{‖y−x‖, 1}` for `x ≠ y`, and 0 on the diagonal.
    CappedNorm,
    /// `‖y−x‖^α`, `0 < α ≤ 1`.
    Power(f64),
    /// `maxⱼ |e^{yⱼ} − e^{xⱼ}|`.
    ExpCoordinates,
}

impl Pathological {
    pub fn parse(name: &str, alpha: Option<f64>) -> Result<Self> {
        match name {
            "capped_norm" => Ok(Self::CappedNorm),
            "power" => {
                let a = alpha.ok_or_else(|| Error::InvalidArgument("power needs alpha".into()))?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {a}")));
                }
                Ok(Self::Power(a))
            }
            "exp_coordinates" => Ok(Self::ExpCoordinates),
            other => Err(Error::InvalidArgument(format!("unknown pathological metric `{other}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::CappedNorm => "capped_norm".into(),
            Self::Power(a) => format!("power({a})"),
            Self::ExpCoordinates => "exp_coordinates".into(),
        }
    }
}

/// Oracle for a named counterexample on `ℝⁿ`.
pub fn pathological(name: &str, alpha: Option<f64>, dimension: usize) -> Result<MetricOracle> {
    Ok(pathological_oracle(Pathological::parse(name, alpha)?, dimension))
}

pub fn pathological_oracle(kind: Pathological, dimension: usize) -> MetricOracle {
    let label = kind.name();
    match kind {
        Pathological::CappedNorm => {
            MetricOracle::new(label, dimension, MetricDomain::Whole, |x, y| {
                if x == y {
                    0.0
                } else {
                    norm2(&sub(y, x)).max(1.0)
                }
            })
        }
        Pathological::Power(a) => MetricOracle::new(label, dimension, MetricDomain::Whole, move |x, y| {
            norm2(&sub(y, x)).powf(a)
        }),
        Pathological::ExpCoordinates => {
            MetricOracle::new(label, dimension, MetricDomain::Whole, |x, y| {
                x.iter()
                    .zip(y)
                    .map(|(a, b)| (b.exp() - a.exp()).abs())
                    .fold(0.0, f64::max)
            })
        }
    }
}
