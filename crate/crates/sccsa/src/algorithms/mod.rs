//! The optimizers: the hybrid sine-cosine crow search, its two parents, and
//! a random-search control, all sharing one population engine.
//!
//! A run is a pure function of `(problem, algorithm, pop_size, budget_fe,
//! seed)`. It spends `pop_size` evaluations on uniform initialization and
//! then performs `floor(budget_fe / pop_size) - 1` iterations of `pop_size`
//! evaluations each, so `fe_count == pop_size * floor(budget_fe / pop_size)`
//! never exceeds the budget. The best-so-far fitness is recorded after
//! initialization and after every iteration.
//!
//! The hybrid update works per agent: a selection draw picks the movement
//! target (global best below the selection threshold, otherwise a random
//! partner's memory), and a branch draw `r4` picks the movement form — sine
//! below 0.3, cosine in [0.3, 0.6), crow flight toward the target at or
//! above 0.6. Unlike the standalone crow search there is no random
//! reposition. Amplitude handling, draw ranges, and the crow difference term
//! are configurable through [`R1Mode`] and [`DiffMode`]; defaults follow the
//! conventions that perform well in practice (decaying amplitude schedule,
//! absolute difference).

mod ops;
mod steps;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use ops::{
    amplitude_r1, csa_update, sca_update, sccsa_update, select_target, update_memory,
    SCA_BRANCH_THRESHOLD,
};
pub use steps::sample_step_draws;

use crate::core::{Agent, GlobalBest, Problem, RngStream};

/// Errors detected while validating a run configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    /// Fewer than two agents cannot form partner relations.
    #[error("population size {0} too small: need at least 2 agents")]
    PopulationTooSmall(usize),
    /// The budget does not even cover initialization.
    #[error("evaluation budget {budget_fe} too small for population size {pop_size}")]
    BudgetTooSmall { budget_fe: usize, pop_size: usize },
    /// A parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Algorithm name not in the registry.
    #[error("unknown algorithm '{0}' (available: sccsa, csa, sca, random)")]
    UnknownAlgorithm(String),
}

/// How the movement amplitude `r1` (and with it the `r2`/`r3` draw ranges)
/// is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum R1Mode {
    /// `r1`, `r2`, `r3` are all fresh uniform draws from `[0, 1)`.
    PaperLiteral,
    /// `r1 = a - t * a / T` decays linearly over the run while `r2` is drawn
    /// from `[0, 2*pi)` and `r3` from `[0, 2)`.
    ScaOriginal {
        /// Initial amplitude of the schedule.
        a: f64,
    },
}

impl Default for R1Mode {
    fn default() -> Self {
        R1Mode::ScaOriginal { a: 2.0 }
    }
}

/// Difference term used by the crow flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    /// Elementwise absolute difference `|m - x|`.
    PaperAbs,
    /// Signed difference `m - x`.
    Signed,
}

impl Default for DiffMode {
    fn default() -> Self {
        DiffMode::PaperAbs
    }
}

/// What a hybrid agent aims at when the partner branch is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartnerTarget {
    /// The partner's memory (its best position so far).
    Memory,
    /// The partner's current position.
    Position,
}

impl Default for PartnerTarget {
    fn default() -> Self {
        PartnerTarget::Memory
    }
}

/// Parameters of the standalone crow search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsaParams {
    /// Probability that an agent repositions uniformly instead of flying
    /// toward its partner's memory; in `[0, 1]`.
    pub awareness_probability: f64,
    /// Flight-length factor of the crow movement; positive.
    pub flight_length: f64,
    /// Difference term of the flight.
    pub diff_mode: DiffMode,
}

impl Default for CsaParams {
    fn default() -> Self {
        Self {
            awareness_probability: 0.1,
            flight_length: 2.0,
            diff_mode: DiffMode::PaperAbs,
        }
    }
}

impl CsaParams {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.awareness_probability) {
            return Err(ConfigError::InvalidParameter(format!(
                "awareness probability {} must lie in [0, 1]",
                self.awareness_probability
            )));
        }
        validate_flight_length(self.flight_length)
    }
}

/// Parameters of the standalone sine-cosine optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScaParams {
    /// Amplitude mode (schedule or literal draws).
    pub r1_mode: R1Mode,
}

impl ScaParams {
    fn validate(&self) -> Result<(), ConfigError> {
        validate_r1_mode(self.r1_mode)
    }
}

/// Parameters of the hybrid optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SccsaParams {
    /// Selection draws below this go to the global best, the rest to a
    /// partner's memory; in `[0, 1]`.
    pub target_threshold: f64,
    /// Branch draws below this take the sine form.
    pub sine_threshold: f64,
    /// Branch draws in `[sine_threshold, cosine_threshold)` take the cosine
    /// form; the rest take the crow flight.
    pub cosine_threshold: f64,
    /// Flight-length factor of the crow branch; positive.
    pub flight_length: f64,
    /// Amplitude mode (schedule or literal draws).
    pub r1_mode: R1Mode,
    /// Difference term of the crow branch.
    pub diff_mode: DiffMode,
    /// Whether the partner branch aims at the partner's memory or position.
    pub partner_target: PartnerTarget,
}

impl Default for SccsaParams {
    fn default() -> Self {
        Self {
            target_threshold: 0.5,
            sine_threshold: 0.3,
            cosine_threshold: 0.6,
            flight_length: 2.0,
            r1_mode: R1Mode::default(),
            diff_mode: DiffMode::default(),
            partner_target: PartnerTarget::default(),
        }
    }
}

impl SccsaParams {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.target_threshold) {
            return Err(ConfigError::InvalidParameter(format!(
                "target threshold {} must lie in [0, 1]",
                self.target_threshold
            )));
        }
        if !(0.0 <= self.sine_threshold
            && self.sine_threshold <= self.cosine_threshold
            && self.cosine_threshold <= 1.0)
        {
            return Err(ConfigError::InvalidParameter(format!(
                "branch thresholds must satisfy 0 <= sine ({}) <= cosine ({}) <= 1",
                self.sine_threshold, self.cosine_threshold
            )));
        }
        validate_flight_length(self.flight_length)?;
        validate_r1_mode(self.r1_mode)
    }
}

fn validate_flight_length(fl: f64) -> Result<(), ConfigError> {
    if fl.is_finite() && fl > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::InvalidParameter(format!(
            "flight length {fl} must be positive"
        )))
    }
}

fn validate_r1_mode(mode: R1Mode) -> Result<(), ConfigError> {
    match mode {
        R1Mode::ScaOriginal { a } if !(a.is_finite() && a > 0.0) => Err(
            ConfigError::InvalidParameter(format!("amplitude a = {a} must be positive")),
        ),
        _ => Ok(()),
    }
}

/// One optimizer with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    /// Hybrid sine-cosine crow search.
    Sccsa(SccsaParams),
    /// Standalone crow search.
    Csa(CsaParams),
    /// Standalone sine-cosine optimizer.
    Sca(ScaParams),
    /// Uniform random sampling, as a control.
    RandomSearch,
}

impl Algorithm {
    /// Registry identifiers in suite order.
    pub const IDS: [&'static str; 4] = ["sccsa", "csa", "sca", "random"];

    /// Stable identifier used in filenames, reports, and seed derivation.
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Sccsa(_) => "sccsa",
            Algorithm::Csa(_) => "csa",
            Algorithm::Sca(_) => "sca",
            Algorithm::RandomSearch => "random",
        }
    }

    /// Looks an algorithm up by identifier, with default parameters.
    pub fn from_id(id: &str) -> Result<Self, ConfigError> {
        match id.to_ascii_lowercase().as_str() {
            "sccsa" => Ok(Algorithm::Sccsa(SccsaParams::default())),
            "csa" => Ok(Algorithm::Csa(CsaParams::default())),
            "sca" => Ok(Algorithm::Sca(ScaParams::default())),
            "random" => Ok(Algorithm::RandomSearch),
            other => Err(ConfigError::UnknownAlgorithm(other.to_string())),
        }
    }

    /// The full suite with default parameters, in suite order.
    pub fn default_suite() -> Vec<Self> {
        Self::IDS
            .iter()
            .map(|id| Self::from_id(id).expect("registry ids are valid"))
            .collect()
    }

    /// Applies an amplitude mode to the algorithms that have one.
    pub fn with_r1_mode(mut self, mode: R1Mode) -> Self {
        match &mut self {
            Algorithm::Sccsa(p) => p.r1_mode = mode,
            Algorithm::Sca(p) => p.r1_mode = mode,
            _ => {}
        }
        self
    }

    /// Applies a crow difference mode to the algorithms that have one.
    pub fn with_diff_mode(mut self, mode: DiffMode) -> Self {
        match &mut self {
            Algorithm::Sccsa(p) => p.diff_mode = mode,
            Algorithm::Csa(p) => p.diff_mode = mode,
            _ => {}
        }
        self
    }

    /// Checks all parameters against their documented ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Algorithm::Sccsa(p) => p.validate(),
            Algorithm::Csa(p) => p.validate(),
            Algorithm::Sca(p) => p.validate(),
            Algorithm::RandomSearch => Ok(()),
        }
    }
}

/// Mutable state of one running population.
#[derive(Debug, Clone)]
pub struct PopulationState {
    /// The agents, in a fixed order.
    pub agents: Vec<Agent>,
    /// Best position found so far (ties keep the first finder).
    pub best: GlobalBest,
    /// Completed iterations (0 right after initialization).
    pub iteration: usize,
    /// Total iterations the run will perform.
    pub max_iterations: usize,
    /// Objective evaluations consumed so far.
    pub fe_count: usize,
}

/// Samples and evaluates the initial population (one evaluation per agent).
pub fn init_population(problem: &Problem, pop_size: usize, stream: &mut RngStream) -> PopulationState {
    let positions: Vec<Vec<f64>> = (0..pop_size)
        .map(|_| stream.next_position(problem.bounds()))
        .collect();
    let mut agents = Vec::with_capacity(pop_size);
    let mut best: Option<GlobalBest> = None;
    for position in positions {
        let fitness = problem.evaluate(&position, stream);
        if best.as_ref().is_none_or(|b| fitness < b.fitness) {
            best = Some(GlobalBest {
                position: position.clone(),
                fitness,
            });
        }
        agents.push(Agent::new(position, fitness));
    }
    PopulationState {
        agents,
        best: best.expect("pop_size >= 1"),
        iteration: 0,
        max_iterations: 0,
        fe_count: pop_size,
    }
}

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Seed of the run's random stream.
    pub seed: u64,
    /// Identifier of the algorithm that ran.
    pub algorithm_id: String,
    /// Identifier of the problem it ran on.
    pub problem_id: String,
    /// Best-so-far fitness after initialization and after each iteration.
    pub trace: Vec<f64>,
    /// Final best fitness (equals the last trace entry).
    pub final_best_fitness: f64,
    /// Final best position.
    pub final_best_position: Vec<f64>,
    /// Objective evaluations actually consumed.
    pub fe_count: usize,
    /// Wall-clock duration of the run (informational; never part of
    /// deterministic outputs).
    pub wall_time: Duration,
}

/// Executes one complete run.
///
/// Initialization consumes `pop_size` evaluations, then
/// `floor(budget_fe / pop_size) - 1` iterations consume `pop_size`
/// evaluations each. Identical arguments produce an identical record
/// (except `wall_time`) on every platform.
pub fn run(
    problem: &Problem,
    algorithm: &Algorithm,
    pop_size: usize,
    budget_fe: usize,
    seed: u64,
) -> Result<RunRecord, ConfigError> {
    if pop_size < 2 {
        return Err(ConfigError::PopulationTooSmall(pop_size));
    }
    if budget_fe < pop_size {
        return Err(ConfigError::BudgetTooSmall { budget_fe, pop_size });
    }
    algorithm.validate()?;

    let started = Instant::now();
    let mut stream = RngStream::new(seed);
    let mut state = init_population(problem, pop_size, &mut stream);
    state.max_iterations = budget_fe / pop_size - 1;

    let mut trace = Vec::with_capacity(state.max_iterations + 1);
    trace.push(state.best.fitness);
    for _ in 0..state.max_iterations {
        match algorithm {
            Algorithm::Sccsa(p) => steps::sccsa_step(&mut state, p, problem, &mut stream),
            Algorithm::Csa(p) => steps::csa_step(&mut state, p, problem, &mut stream),
            Algorithm::Sca(p) => steps::sca_step(&mut state, p, problem, &mut stream),
            Algorithm::RandomSearch => steps::random_step(&mut state, problem, &mut stream),
        }
        trace.push(state.best.fitness);
    }

    Ok(RunRecord {
        seed,
        algorithm_id: algorithm.id().to_string(),
        problem_id: problem.id().to_string(),
        final_best_fitness: state.best.fitness,
        final_best_position: state.best.position,
        fe_count: state.fe_count,
        trace,
        wall_time: started.elapsed(),
    })
}
