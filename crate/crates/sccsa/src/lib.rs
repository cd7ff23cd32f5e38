//! Global-optimization toolkit built around the Sine Cosine Crow Search
//! Algorithm (SCCSA), a hybrid of the Sine Cosine Algorithm (SCA) and the
//! Crow Search Algorithm (CSA), together with both parent heuristics, a
//! random-search control, a seven-function benchmark suite, and a seeded
//! experiment harness that produces summary statistics, comparison reports,
//! and convergence traces.
//!
//! All algorithms minimize a boxed objective `f: R^n -> R`. Runs are fully
//! deterministic: one [`core::RngStream`] per run, seeded from a base seed
//! and the run's coordinates, drives every random draw including benchmark
//! noise.

pub mod algorithms;
pub mod benchmarks;
pub mod core;
pub mod harness;
pub mod plot;
