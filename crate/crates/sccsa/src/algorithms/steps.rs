//! Per-iteration population updates.
//!
//! Every step works in two passes so an iteration reads a consistent
//! snapshot: pass 1 walks the agents in index order and proposes one new
//! position each (consuming that agent's draws), pass 2 clamps nothing
//! further (proposals are already clamped), evaluates the proposals in the
//! same order (stochastic objectives consume one noise draw per evaluation
//! here), and applies memory and global-best updates. Targets therefore
//! always refer to the population as it stood when the iteration began.
//!
//! Draw schedule per agent, in order:
//!
//! * hybrid: partner index, then the full [`StepDraws`] bundle
//!   (`r_select`, `r1` when in the literal mode, `r2` and `r3` per
//!   dimension, `r4`, `r_flight`, `awareness_draw`); the bundle is always
//!   drawn in full even where a branch ignores parts of it, so the stream
//!   layout does not depend on branch outcomes;
//! * sine-cosine: the same full bundle (no partner index);
//! * crow search: partner index, awareness draw, flight multiplier, then —
//!   only when the awareness draw falls below the awareness probability —
//!   one fresh coordinate per dimension for the reposition;
//! * random search: one fresh coordinate per dimension.

use crate::core::{clamp_to_bounds, Problem, RngStream, StepDraws};

use super::ops::{
    amplitude_r1, csa_update, sca_update, sccsa_update, select_target, update_memory,
};
use super::{CsaParams, PopulationState, R1Mode, ScaParams, SccsaParams};

/// Draws the full per-agent bundle used by the sine-cosine family, in the
/// documented order.
pub fn sample_step_draws(
    stream: &mut RngStream,
    dimension: usize,
    r1_mode: R1Mode,
    t: usize,
    max_iter: usize,
) -> StepDraws {
    let two_pi = 2.0 * std::f64::consts::PI;
    let (r2_hi, r3_hi) = match r1_mode {
        R1Mode::PaperLiteral => (1.0, 1.0),
        R1Mode::ScaOriginal { .. } => (two_pi, 2.0),
    };
    let r_select = stream.next_unit();
    let r1 = amplitude_r1(r1_mode, t, max_iter, stream);
    let r2 = (0..dimension)
        .map(|_| stream.next_uniform(0.0, r2_hi).expect("fixed range"))
        .collect();
    let r3 = (0..dimension)
        .map(|_| stream.next_uniform(0.0, r3_hi).expect("fixed range"))
        .collect();
    StepDraws {
        r_select,
        r1,
        r2,
        r3,
        r4: stream.next_unit(),
        r_flight: stream.next_unit(),
        awareness_draw: stream.next_unit(),
    }
}

/// Evaluates the proposed positions in agent order and applies memory and
/// global-best updates (strict improvement only, so first-found wins ties).
fn apply_proposals(
    state: &mut PopulationState,
    proposals: Vec<Vec<f64>>,
    problem: &Problem,
    stream: &mut RngStream,
) {
    for (agent, position) in state.agents.iter_mut().zip(proposals) {
        let fitness = problem.evaluate(&position, stream);
        state.fe_count += 1;
        if fitness < state.best.fitness {
            state.best.position = position.clone();
            state.best.fitness = fitness;
        }
        update_memory(agent, position, fitness);
    }
    state.iteration += 1;
}

/// One iteration of the hybrid optimizer.
pub(super) fn sccsa_step(
    state: &mut PopulationState,
    params: &SccsaParams,
    problem: &Problem,
    stream: &mut RngStream,
) {
    let bounds = problem.bounds();
    let dim = bounds.dimension();
    let pop = state.agents.len();
    let mut proposals = Vec::with_capacity(pop);
    for i in 0..pop {
        let partner = stream.next_index_excluding(pop, i);
        let draws = sample_step_draws(stream, dim, params.r1_mode, state.iteration, state.max_iterations);
        let target = select_target(
            &state.best.position,
            &state.agents,
            partner,
            draws.r_select,
            params.target_threshold,
            params.partner_target,
        );
        let raw = sccsa_update(&state.agents[i].position, target, draws.r1, &draws, params)
            .expect("population positions share the problem dimension");
        proposals.push(clamp_to_bounds(&raw, bounds).expect("dimension preserved"));
    }
    apply_proposals(state, proposals, problem, stream);
}

/// One iteration of the standalone sine-cosine optimizer: every agent moves
/// toward the global best.
pub(super) fn sca_step(
    state: &mut PopulationState,
    params: &ScaParams,
    problem: &Problem,
    stream: &mut RngStream,
) {
    let bounds = problem.bounds();
    let dim = bounds.dimension();
    let pop = state.agents.len();
    let mut proposals = Vec::with_capacity(pop);
    for i in 0..pop {
        let draws = sample_step_draws(stream, dim, params.r1_mode, state.iteration, state.max_iterations);
        let raw = sca_update(&state.agents[i].position, &state.best.position, draws.r1, &draws)
            .expect("population positions share the problem dimension");
        proposals.push(clamp_to_bounds(&raw, bounds).expect("dimension preserved"));
    }
    apply_proposals(state, proposals, problem, stream);
}

/// One iteration of the standalone crow search: each agent either flies
/// toward a random partner's memory or, when the awareness draw falls below
/// the awareness probability, repositions uniformly inside the bounds.
pub(super) fn csa_step(
    state: &mut PopulationState,
    params: &CsaParams,
    problem: &Problem,
    stream: &mut RngStream,
) {
    let bounds = problem.bounds();
    let pop = state.agents.len();
    let mut proposals = Vec::with_capacity(pop);
    for i in 0..pop {
        let partner = stream.next_index_excluding(pop, i);
        let awareness_draw = stream.next_unit();
        let r_flight = stream.next_unit();
        let raw = if awareness_draw < params.awareness_probability {
            stream.next_position(bounds)
        } else {
            csa_update(
                &state.agents[i].position,
                &state.agents[partner].memory,
                r_flight,
                params.flight_length,
                params.diff_mode,
            )
            .expect("population positions share the problem dimension")
        };
        proposals.push(clamp_to_bounds(&raw, bounds).expect("dimension preserved"));
    }
    apply_proposals(state, proposals, problem, stream);
}

/// One iteration of the random-search control: every agent is replaced by a
/// fresh uniform sample.
pub(super) fn random_step(state: &mut PopulationState, problem: &Problem, stream: &mut RngStream) {
    let bounds = problem.bounds();
    let proposals = (0..state.agents.len())
        .map(|_| stream.next_position(bounds))
        .collect();
    apply_proposals(state, proposals, problem, stream);
}
