//! Shared domain types: box bounds, problems, agents, random-draw bundles,
//! and the seeded random stream that makes every run reproducible.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// Errors from constructing or using the core domain types.
#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    /// A vector's length does not match the problem dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    /// Lower/upper arrays are unusable as a box constraint.
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    /// A uniform draw was requested over an empty or inverted interval.
    #[error("invalid uniform range: lo {lo} must be < hi {hi}")]
    InvalidRange { lo: f64, hi: f64 },
}

/// Axis-aligned box constraint `lower[d] <= x[d] <= upper[d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    /// Builds a box from per-dimension limits; every pair must satisfy
    /// `lower[d] < upper[d]` and both arrays must be finite, non-empty, and
    /// of equal length.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, CoreError> {
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(CoreError::InvalidBounds("dimension must be >= 1".into()));
        }
        for (d, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(CoreError::InvalidBounds(format!(
                    "non-finite limit in dimension {d}"
                )));
            }
            if lo >= hi {
                return Err(CoreError::InvalidBounds(format!(
                    "lower {lo} must be < upper {hi} in dimension {d}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Builds the symmetric box `[-half_range, half_range]^dimension`
    /// (or any constant box) used by the classical benchmark definitions.
    pub fn symmetric(lo: f64, hi: f64, dimension: usize) -> Result<Self, CoreError> {
        Self::new(vec![lo; dimension], vec![hi; dimension])
    }

    /// Number of dimensions of the box.
    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    /// Per-dimension lower limits.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Per-dimension upper limits.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// True when every coordinate lies inside the box (limits inclusive).
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((&v, &lo), &hi)| v >= lo && v <= hi)
    }
}

/// Projects `x` onto the box by clamping each coordinate to its limits;
/// coordinates already in range are returned unchanged.
pub fn clamp_to_bounds(x: &[f64], bounds: &Bounds) -> Result<Vec<f64>, CoreError> {
    if x.len() != bounds.dimension() {
        return Err(CoreError::DimensionMismatch {
            expected: bounds.dimension(),
            actual: x.len(),
        });
    }
    Ok(x.iter()
        .zip(bounds.lower())
        .zip(bounds.upper())
        .map(|((&v, &lo), &hi)| v.clamp(lo, hi))
        .collect())
}

/// Deterministic per-run random stream.
///
/// Backed by the ChaCha8 stream cipher (via `rand_chacha`), seeded with a
/// single `u64`: the same seed yields the same draw sequence on every
/// platform. One stream drives an entire run, including stochastic
/// objective noise, so a run is a pure function of its configuration and
/// seed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Creates a stream from a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Next uniform draw in `[0, 1)` with 53-bit resolution.
    pub fn next_unit(&mut self) -> f64 {
        // Standard construction: take the top 53 bits of a u64 and scale by
        // 2^-53, giving uniform multiples of 2^-53 in [0, 1).
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Next uniform draw in the half-open interval `[lo, hi)`.
    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> Result<f64, CoreError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(CoreError::InvalidRange { lo, hi });
        }
        let v = lo + self.next_unit() * (hi - lo);
        // Rounding can land exactly on `hi` when the unit draw is close to 1
        // and the interval is wide; nudge back inside to keep the interval
        // half-open.
        Ok(if v < hi { v } else { hi.next_down() })
    }

    /// Next uniform index in `0..n` (`n >= 1`).
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n >= 1);
        // Multiply-shift mapping of a unit draw; bias is < 2^-53 per draw,
        // far below anything observable at benchmark population sizes.
        let u = self.next_unit();
        ((u * n as f64) as usize).min(n - 1)
    }

    /// Next uniform index in `0..n` excluding `skip` (`n >= 2`).
    pub fn next_index_excluding(&mut self, n: usize, skip: usize) -> usize {
        debug_assert!(n >= 2 && skip < n);
        let k = self.next_index(n - 1);
        if k >= skip {
            k + 1
        } else {
            k
        }
    }

    /// Samples a position uniformly inside the box (one draw per dimension,
    /// in dimension order).
    pub fn next_position(&mut self, bounds: &Bounds) -> Vec<f64> {
        bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(&lo, &hi)| {
                // Bounds::new guarantees lo < hi, so this cannot fail.
                self.next_uniform(lo, hi).expect("valid bounds")
            })
            .collect()
    }
}

/// Objective function evaluated at an in-bounds point. Stochastic objectives
/// draw their noise from the supplied stream; deterministic ones ignore it.
pub type ObjectiveFn = dyn Fn(&[f64], &mut RngStream) -> f64 + Send + Sync;

/// A minimization problem: an objective over a box, with the optimal value
/// when it is known.
#[derive(Clone)]
pub struct Problem {
    id: String,
    bounds: Bounds,
    known_min: Option<f64>,
    stochastic: bool,
    objective: Arc<ObjectiveFn>,
}

impl Problem {
    /// Wraps an objective closure as a problem. `stochastic` declares whether
    /// the objective consumes random draws when evaluated.
    pub fn new(
        id: impl Into<String>,
        bounds: Bounds,
        known_min: Option<f64>,
        stochastic: bool,
        objective: Arc<ObjectiveFn>,
    ) -> Self {
        Self {
            id: id.into(),
            bounds,
            known_min,
            stochastic,
            objective,
        }
    }

    /// Convenience constructor for a deterministic objective.
    pub fn from_fn(
        id: impl Into<String>,
        bounds: Bounds,
        known_min: Option<f64>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(id, bounds, known_min, false, Arc::new(move |x, _| f(x)))
    }

    /// Problem identifier (e.g. `f1`).
    pub fn id(&self) -> &str {
        &self.id
    }

    /// The box constraint.
    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Optimal objective value, when known.
    pub fn known_min(&self) -> Option<f64> {
        self.known_min
    }

    /// Whether evaluations consume random draws.
    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    /// Evaluates the objective. The caller must keep `x` inside the bounds
    /// (optimizers clamp before evaluating); this is not re-checked here.
    pub fn evaluate(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        debug_assert_eq!(x.len(), self.bounds.dimension());
        (self.objective)(x, rng)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("dimension", &self.bounds.dimension())
            .field("known_min", &self.known_min)
            .field("stochastic", &self.stochastic)
            .finish()
    }
}

/// One search agent (a "crow"): its current position and the best position
/// it has personally found so far (its memory).
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    /// Current position, always inside the problem bounds.
    pub position: Vec<f64>,
    /// Objective value at `position`.
    pub fitness: f64,
    /// Best position this agent has evaluated so far.
    pub memory: Vec<f64>,
    /// Objective value at `memory`; never worse than any evaluation the
    /// agent has made.
    pub memory_fitness: f64,
}

impl Agent {
    /// Creates an agent whose memory starts at its initial position.
    pub fn new(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            memory: position.clone(),
            memory_fitness: fitness,
            position,
            fitness,
        }
    }
}

/// Best position found by any agent so far in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalBest {
    /// Best position seen so far.
    pub position: Vec<f64>,
    /// Objective value at that position.
    pub fitness: f64,
}

/// The random numbers consumed by a single agent update, bundled so the
/// movement operators are pure functions that tests can drive directly.
///
/// Draw granularity is fixed: `r2` and `r3` are per-dimension; every other
/// field is drawn once per agent per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDraws {
    /// Target-selection draw: below the selection threshold the agent moves
    /// toward the global best, otherwise toward a partner's memory.
    pub r_select: f64,
    /// Movement amplitude (schedule-driven or drawn, depending on mode).
    pub r1: f64,
    /// Per-dimension angle arguments of the sine/cosine movement.
    pub r2: Vec<f64>,
    /// Per-dimension target weights of the sine/cosine movement.
    pub r3: Vec<f64>,
    /// Branch selector between sine, cosine, and crow movement.
    pub r4: f64,
    /// Flight multiplier of the crow movement.
    pub r_flight: f64,
    /// Compared against the awareness probability in standalone crow search.
    pub awareness_draw: f64,
}

impl StepDraws {
    /// A neutral bundle (all scalars 0, per-dimension vectors of zeros);
    /// tests overwrite the fields they exercise.
    pub fn zeroed(dimension: usize) -> Self {
        Self {
            r_select: 0.0,
            r1: 0.0,
            r2: vec![0.0; dimension],
            r3: vec![0.0; dimension],
            r4: 0.0,
            r_flight: 0.0,
            awareness_draw: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_reject_bad_shapes() {
        assert!(matches!(
            Bounds::new(vec![0.0], vec![1.0, 2.0]),
            Err(CoreError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Bounds::new(vec![], vec![]),
            Err(CoreError::InvalidBounds(_))
        ));
        assert!(matches!(
            Bounds::new(vec![1.0], vec![1.0]),
            Err(CoreError::InvalidBounds(_))
        ));
        assert!(matches!(
            Bounds::new(vec![f64::NAN], vec![1.0]),
            Err(CoreError::InvalidBounds(_))
        ));
    }

    #[test]
    fn clamp_projects_only_out_of_range_coordinates() {
        let b = Bounds::symmetric(-1.0, 1.0, 3).unwrap();
        // In-range point is unchanged.
        assert_eq!(
            clamp_to_bounds(&[0.5, -0.5, 0.0], &b).unwrap(),
            vec![0.5, -0.5, 0.0]
        );
        // Out-of-range coordinates land exactly on the violated limit.
        assert_eq!(
            clamp_to_bounds(&[2.0, -3.0, 0.25], &b).unwrap(),
            vec![1.0, -1.0, 0.25]
        );
        // A coordinate exactly on a limit stays there.
        assert_eq!(
            clamp_to_bounds(&[1.0, -1.0, 1.0], &b).unwrap(),
            vec![1.0, -1.0, 1.0]
        );
    }

    #[test]
    fn clamp_rejects_dimension_mismatch() {
        let b = Bounds::symmetric(-1.0, 1.0, 2).unwrap();
        assert_eq!(
            clamp_to_bounds(&[0.0; 3], &b),
            Err(CoreError::DimensionMismatch {
                expected: 2,
                actual: 3
            })
        );
    }

    #[test]
    fn clamp_is_idempotent_and_contained() {
        let b = Bounds::new(vec![-2.0, 0.0, 10.0], vec![2.0, 1.0, 12.0]).unwrap();
        let mut rng = RngStream::new(7);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3)
                .map(|_| rng.next_uniform(-100.0, 100.0).unwrap())
                .collect();
            let once = clamp_to_bounds(&x, &b).unwrap();
            assert!(b.contains(&once), "clamped point must lie in bounds");
            let twice = clamp_to_bounds(&once, &b).unwrap();
            assert_eq!(once, twice, "clamping must be idempotent");
        }
    }

    #[test]
    fn stream_is_deterministic_per_seed() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        let da: Vec<f64> = (0..100).map(|_| a.next_unit()).collect();
        let db: Vec<f64> = (0..100).map(|_| b.next_unit()).collect();
        assert_eq!(da, db, "same seed must reproduce the same sequence");

        let mut c = RngStream::new(43);
        let dc: Vec<f64> = (0..100).map(|_| c.next_unit()).collect();
        assert_ne!(da, dc, "different seeds should diverge");
    }

    #[test]
    fn uniform_respects_half_open_interval() {
        let mut rng = RngStream::new(1);
        let two_pi = 2.0 * std::f64::consts::PI;
        for _ in 0..10_000 {
            let v = rng.next_uniform(0.0, two_pi).unwrap();
            assert!((0.0..two_pi).contains(&v));
        }
        for _ in 0..10_000 {
            let v = rng.next_uniform(-5.0, -1.0).unwrap();
            assert!((-5.0..-1.0).contains(&v));
        }
    }

    #[test]
    fn uniform_rejects_empty_ranges() {
        let mut rng = RngStream::new(1);
        assert!(matches!(
            rng.next_uniform(1.0, 1.0),
            Err(CoreError::InvalidRange { .. })
        ));
        assert!(matches!(
            rng.next_uniform(2.0, 1.0),
            Err(CoreError::InvalidRange { .. })
        ));
        assert!(matches!(
            rng.next_uniform(0.0, f64::INFINITY),
            Err(CoreError::InvalidRange { .. })
        ));
    }

    #[test]
    fn uniform_mean_matches_law_of_large_numbers() {
        // Mean of 10^6 unit draws: expectation 0.5, standard error
        // 1/sqrt(12e6) ~ 2.9e-4, so a +/-0.005 band is ~17 sigma.
        let mut rng = RngStream::new(2024);
        let n = 1_000_000;
        let mean = (0..n).map(|_| rng.next_unit()).sum::<f64>() / n as f64;
        assert!(
            (mean - 0.5).abs() < 0.005,
            "mean of unit draws was {mean}, expected within 0.5 +/- 0.005"
        );
    }

    #[test]
    fn uniform_passes_kolmogorov_smirnov_at_one_percent() {
        // One-sample KS test against U(0.1): for large n the 1% critical
        // value is 1.628 / sqrt(n).
        let n = 100_000usize;
        let mut rng = RngStream::new(99);
        let mut draws: Vec<f64> = (0..n).map(|_| rng.next_unit()).collect();
        draws.sort_unstable_by(f64::total_cmp);
        let mut d_stat: f64 = 0.0;
        for (i, &u) in draws.iter().enumerate() {
            let upper = (i + 1) as f64 / n as f64 - u;
            let lower = u - i as f64 / n as f64;
            d_stat = d_stat.max(upper).max(lower);
        }
        let critical = 1.628 / (n as f64).sqrt();
        assert!(
            d_stat < critical,
            "KS statistic {d_stat} not below 1% critical value {critical}"
        );
    }

    #[test]
    fn index_draws_cover_range_and_respect_exclusion() {
        let mut rng = RngStream::new(5);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[rng.next_index(7)] = true;
        }
        assert!(seen.iter().all(|&s| s), "all indices should appear");
        for _ in 0..1000 {
            let j = rng.next_index_excluding(7, 3);
            assert!(j < 7 && j != 3);
        }
    }

    #[test]
    fn position_sampling_stays_in_bounds() {
        let b = Bounds::new(vec![-3.0, 100.0], vec![-1.0, 101.0]).unwrap();
        let mut rng = RngStream::new(8);
        for _ in 0..1000 {
            let p = rng.next_position(&b);
            assert!(b.contains(&p));
        }
    }

    #[test]
    fn agent_memory_starts_at_position() {
        let a = Agent::new(vec![1.0, 2.0], 5.0);
        assert_eq!(a.memory, a.position);
        assert_eq!(a.memory_fitness, a.fitness);
    }

    proptest::proptest! {
        #[test]
        fn uniform_draws_stay_in_arbitrary_ranges(
            seed in proptest::num::u64::ANY,
            lo in -1e9_f64..1e9,
            width in f64::MIN_POSITIVE..1e9,
        ) {
            let hi = lo + width;
            proptest::prop_assume!(hi > lo && hi.is_finite());
            let mut stream = RngStream::new(seed);
            for _ in 0..32 {
                let v = stream.next_uniform(lo, hi).unwrap();
                proptest::prop_assert!(v >= lo && v < hi, "{v} outside [{lo}, {hi})");
            }
        }

        #[test]
        fn clamp_is_idempotent_for_arbitrary_points(
            x in proptest::collection::vec(-1e12_f64..1e12, 1..8),
            half_width in 1e-6_f64..1e6,
        ) {
            let bounds = Bounds::symmetric(-half_width, half_width, x.len()).unwrap();
            let once = clamp_to_bounds(&x, &bounds).unwrap();
            proptest::prop_assert!(bounds.contains(&once));
            let twice = clamp_to_bounds(&once, &bounds).unwrap();
            proptest::prop_assert_eq!(once, twice);
        }
    }
}
