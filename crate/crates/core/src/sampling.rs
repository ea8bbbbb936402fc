//! Deterministic, index-addressed sampling.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, stream)`,
//! so results never depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::tolerance::EPS_NUM;

/// Seed, sample count and reporting tolerance for sampled checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            tolerance: EPS_NUM,
        }
    }
}

/// Distinguishes independent families of draws under one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Primary = 0,
    Fresh = 1,
    Refine = 2,
    Auxiliary = 3,
}

impl SamplingPlan {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self {
            seed,
            samples,
            ..Self::default()
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Generator for sample `index` of the given family.
    pub fn rng(&self, stream: Stream, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((stream as u64) << 48) | index as u64);
        rng
    }

    /// Uniform direction on the Euclidean unit sphere for sample `index`.
    pub fn sphere(&self, stream: Stream, index: usize, n: usize) -> Vec<f64> {
        sphere_point(&mut self.rng(stream, index), n)
    }
}

pub fn sphere_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point in `[-half, half]ⁿ`.
pub fn cube_point<R: Rng>(rng: &mut R, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half..half)).collect()
}

/// `resolution` equally spaced unit vectors in the plane, starting at angle 0.
pub fn circle_grid(resolution: usize) -> Vec<Vec<f64>> {
    (0..resolution)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / resolution as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}
