//! The classical seven-function unimodal benchmark suite (sphere through
//! quartic-with-noise), each a scalable minimization problem over a symmetric
//! box with known optimum 0.
//!
//! | id | definition                                   | box              |
//! |----|----------------------------------------------|------------------|
//! | f1 | sum x_i^2                                    | [-100, 100]^n    |
//! | f2 | sum |x_i| + prod |x_i|                       | [-10, 10]^n      |
//! | f3 | sum_i (sum_{j<=i} x_j)^2                     | [-100, 100]^n    |
//! | f4 | max_i |x_i|                                  | [-100, 100]^n    |
//! | f5 | sum 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2    | [-30, 30]^n      |
//! | f6 | sum floor(x_i + 0.5)^2                       | [-100, 100]^n    |
//! | f7 | sum i x_i^4 + uniform[0, 1) noise            | [-1.28, 1.28]^n  |
//!
//! f7 draws exactly one fresh noise term per evaluation; its noiseless
//! variant drops the noise term and is what the optimum refers to.

use std::sync::Arc;

use thiserror::Error;

use crate::core::{Bounds, CoreError, Problem, RngStream};

/// Default dimensionality of the suite.
pub const DEFAULT_DIMENSION: usize = 10;

/// Errors from constructing or evaluating a benchmark.
#[derive(Debug, Error)]
pub enum BenchmarkError {
    /// Name not in the registry.
    #[error("unknown benchmark '{0}' (available: f1..f7)")]
    UnknownBenchmark(String),
    /// Dimension outside what the function family supports.
    #[error("invalid dimension {0}: must be >= 1")]
    InvalidDimension(usize),
    /// A stochastic benchmark was evaluated without a noise stream.
    #[error("benchmark {0} is stochastic and needs a noise stream")]
    MissingNoiseStream(BenchmarkId),
    /// Evaluation point lies outside the benchmark box.
    #[error("coordinate {value} in dimension {dim} is outside the benchmark bounds")]
    OutOfBounds { dim: usize, value: f64 },
    /// Structural problem with the evaluation point.
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Identifier of one function in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchmarkId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl BenchmarkId {
    /// All identifiers in suite order.
    pub const ALL: [BenchmarkId; 7] = [
        BenchmarkId::F1,
        BenchmarkId::F2,
        BenchmarkId::F3,
        BenchmarkId::F4,
        BenchmarkId::F5,
        BenchmarkId::F6,
        BenchmarkId::F7,
    ];

    /// Canonical lower-case name (`f1`..`f7`).
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::F1 => "f1",
            BenchmarkId::F2 => "f2",
            BenchmarkId::F3 => "f3",
            BenchmarkId::F4 => "f4",
            BenchmarkId::F5 => "f5",
            BenchmarkId::F6 => "f6",
            BenchmarkId::F7 => "f7",
        }
    }

    /// Short human description for listings.
    pub fn description(self) -> &'static str {
        match self {
            BenchmarkId::F1 => "sphere",
            BenchmarkId::F2 => "sum + product of absolute values",
            BenchmarkId::F3 => "rotated hyper-ellipsoid (nested sums)",
            BenchmarkId::F4 => "max absolute coordinate",
            BenchmarkId::F5 => "Rosenbrock valley",
            BenchmarkId::F6 => "step function",
            BenchmarkId::F7 => "weighted quartic with noise",
        }
    }
}

impl std::str::FromStr for BenchmarkId {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchmarkId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s.to_ascii_lowercase())
            .ok_or_else(|| BenchmarkError::UnknownBenchmark(s.to_string()))
    }
}

impl std::fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One benchmark instance: a function identifier at a concrete dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    id: BenchmarkId,
    dimension: usize,
    bounds: Bounds,
    f_min: f64,
    stochastic: bool,
}

impl BenchmarkSpec {
    /// Instantiates a benchmark at the given dimension.
    pub fn new(id: BenchmarkId, dimension: usize) -> Result<Self, BenchmarkError> {
        if dimension == 0 {
            return Err(BenchmarkError::InvalidDimension(dimension));
        }
        let (lo, hi) = match id {
            BenchmarkId::F2 => (-10.0, 10.0),
            BenchmarkId::F5 => (-30.0, 30.0),
            BenchmarkId::F7 => (-1.28, 1.28),
            _ => (-100.0, 100.0),
        };
        Ok(Self {
            id,
            dimension,
            bounds: Bounds::symmetric(lo, hi, dimension).expect("fixed finite limits"),
            f_min: 0.0,
            stochastic: id == BenchmarkId::F7,
        })
    }

    /// Looks a benchmark up by name (`f1`..`f7`).
    pub fn by_name(name: &str, dimension: usize) -> Result<Self, BenchmarkError> {
        Self::new(name.parse()?, dimension)
    }

    /// The whole suite at one dimension, in suite order.
    pub fn all(dimension: usize) -> Result<Vec<Self>, BenchmarkError> {
        BenchmarkId::ALL
            .iter()
            .map(|&id| Self::new(id, dimension))
            .collect()
    }

    /// Function identifier.
    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    /// Instance dimension.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The benchmark box.
    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Known optimal value (0 for the whole suite).
    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    /// Whether evaluations consume noise draws.
    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    /// The same function with any noise term removed. For deterministic
    /// benchmarks this is an identical copy.
    pub fn noiseless_variant(&self) -> Self {
        Self {
            stochastic: false,
            ..self.clone()
        }
    }

    /// Evaluates the benchmark at `x`.
    ///
    /// `x` must lie inside the bounds (optimizers clamp before evaluating;
    /// out-of-bounds points are an argument error here). A noise stream is
    /// required exactly when the instance is stochastic; a stream passed to
    /// a deterministic instance is left untouched.
    pub fn evaluate(
        &self,
        x: &[f64],
        noise: Option<&mut RngStream>,
    ) -> Result<f64, BenchmarkError> {
        if x.len() != self.dimension {
            return Err(CoreError::DimensionMismatch {
                expected: self.dimension,
                actual: x.len(),
            }
            .into());
        }
        if let Some(d) = x
            .iter()
            .zip(self.bounds.lower())
            .zip(self.bounds.upper())
            .position(|((&v, &lo), &hi)| !(v >= lo && v <= hi))
        {
            return Err(BenchmarkError::OutOfBounds { dim: d, value: x[d] });
        }
        if self.stochastic {
            let rng = noise.ok_or(BenchmarkError::MissingNoiseStream(self.id))?;
            Ok(raw_value(self.id, true, x, rng))
        } else {
            // A provided stream is deliberately not consumed: noiseless
            // evaluations must not perturb the caller's draw sequence.
            Ok(deterministic_value(self.id, x))
        }
    }

    /// Wraps this benchmark as a generic [`Problem`] for the optimizers.
    pub fn to_problem(&self) -> Problem {
        let id = self.id;
        let stochastic = self.stochastic;
        Problem::new(
            id.name(),
            self.bounds.clone(),
            Some(self.f_min),
            stochastic,
            Arc::new(move |x, rng| raw_value(id, stochastic, x, rng)),
        )
    }
}

/// Formula dispatch for in-bounds points; `stochastic` controls whether f7
/// adds its per-evaluation noise draw.
fn raw_value(id: BenchmarkId, stochastic: bool, x: &[f64], rng: &mut RngStream) -> f64 {
    if stochastic {
        debug_assert_eq!(id, BenchmarkId::F7);
        deterministic_value(id, x) + rng.next_unit()
    } else {
        deterministic_value(id, x)
    }
}

fn deterministic_value(id: BenchmarkId, x: &[f64]) -> f64 {
    match id {
        BenchmarkId::F1 => x.iter().map(|&v| v * v).sum(),
        BenchmarkId::F2 => {
            let sum: f64 = x.iter().map(|&v| v.abs()).sum();
            let prod: f64 = x.iter().map(|&v| v.abs()).product();
            sum + prod
        }
        BenchmarkId::F3 => {
            // Running prefix sum: each term is the square of the partial sum
            // of the first i coordinates.
            let mut prefix = 0.0;
            let mut total = 0.0;
            for &v in x {
                prefix += v;
                total += prefix * prefix;
            }
            total
        }
        BenchmarkId::F4 => x.iter().map(|&v| v.abs()).fold(0.0, f64::max),
        BenchmarkId::F5 => x
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                100.0 * (b - a * a) * (b - a * a) + (a - 1.0) * (a - 1.0)
            })
            .sum(),
        BenchmarkId::F6 => x
            .iter()
            .map(|&v| {
                let s = (v + 0.5).floor();
                s * s
            })
            .sum(),
        BenchmarkId::F7 => x
            .iter()
            .enumerate()
            .map(|(i, &v)| (i + 1) as f64 * v * v * v * v)
            .sum(),
    }
}
