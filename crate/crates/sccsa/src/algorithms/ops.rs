//! Pure movement operators shared by the optimizers.
//!
//! Every operator takes its random numbers as explicit arguments (usually a
//! [`StepDraws`] bundle), so tests can drive each formula deterministically.
//! The hybrid operator delegates to the same code paths as the parent
//! operators, keeping their branches bit-identical.

use crate::core::{Agent, CoreError, RngStream, StepDraws};

use super::{DiffMode, PartnerTarget, R1Mode, SccsaParams};

/// Branch threshold of the standalone sine-cosine update: below it the sine
/// form fires, at or above it the cosine form.
pub const SCA_BRANCH_THRESHOLD: f64 = 0.5;

/// Produces the movement amplitude `r1` for iteration `t` of `max_iter`.
///
/// In the literal mode it is a fresh uniform draw from `[0, 1)`; in the
/// schedule mode it decays linearly as `a - t * a / max_iter` and consumes
/// no draw.
pub fn amplitude_r1(mode: R1Mode, t: usize, max_iter: usize, stream: &mut RngStream) -> f64 {
    debug_assert!(t < max_iter);
    match mode {
        R1Mode::PaperLiteral => stream.next_unit(),
        R1Mode::ScaOriginal { a } => a - t as f64 * a / max_iter as f64,
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<(), CoreError> {
    if expected == actual {
        Ok(())
    } else {
        Err(CoreError::DimensionMismatch { expected, actual })
    }
}

/// Shared sine/cosine displacement: `x_d + r1 * trig(r2_d) * |r3_d * target_d - x_d|`.
fn sine_cosine_move(
    x: &[f64],
    target: &[f64],
    r1: f64,
    r2: &[f64],
    r3: &[f64],
    sine: bool,
) -> Result<Vec<f64>, CoreError> {
    check_dims(x.len(), target.len())?;
    check_dims(x.len(), r2.len())?;
    check_dims(x.len(), r3.len())?;
    Ok(x.iter()
        .enumerate()
        .map(|(d, &xd)| {
            let trig = if sine { r2[d].sin() } else { r2[d].cos() };
            xd + r1 * trig * (r3[d] * target[d] - xd).abs()
        })
        .collect())
}

/// Sine-cosine position update: the sine form when `draws.r4` is below
/// [`SCA_BRANCH_THRESHOLD`], the cosine form otherwise.
pub fn sca_update(
    x: &[f64],
    target: &[f64],
    r1: f64,
    draws: &StepDraws,
) -> Result<Vec<f64>, CoreError> {
    sine_cosine_move(
        x,
        target,
        r1,
        &draws.r2,
        &draws.r3,
        draws.r4 < SCA_BRANCH_THRESHOLD,
    )
}

/// Crow flight toward a memory target:
/// `x_d + r_flight * flight_length * |m_d - x_d|` in the absolute mode, with
/// the signed difference `m_d - x_d` replacing the absolute value in the
/// signed mode.
pub fn csa_update(
    x: &[f64],
    memory_target: &[f64],
    r_flight: f64,
    flight_length: f64,
    diff_mode: DiffMode,
) -> Result<Vec<f64>, CoreError> {
    check_dims(x.len(), memory_target.len())?;
    Ok(x.iter()
        .zip(memory_target)
        .map(|(&xd, &md)| {
            let diff = match diff_mode {
                DiffMode::PaperAbs => (md - xd).abs(),
                DiffMode::Signed => md - xd,
            };
            xd + r_flight * flight_length * diff
        })
        .collect())
}

/// Hybrid position update: sine form below `sine_threshold`, cosine form
/// below `cosine_threshold`, crow flight toward the target at or above it.
/// There is no random-reposition branch.
pub fn sccsa_update(
    x: &[f64],
    target: &[f64],
    r1: f64,
    draws: &StepDraws,
    params: &SccsaParams,
) -> Result<Vec<f64>, CoreError> {
    if draws.r4 < params.sine_threshold {
        sine_cosine_move(x, target, r1, &draws.r2, &draws.r3, true)
    } else if draws.r4 < params.cosine_threshold {
        sine_cosine_move(x, target, r1, &draws.r2, &draws.r3, false)
    } else {
        csa_update(
            x,
            target,
            draws.r_flight,
            params.flight_length,
            params.diff_mode,
        )
    }
}

/// Picks the movement target for one hybrid agent: the global best when
/// `r_select` falls below the selection threshold, otherwise the chosen
/// partner's memory (or current position, under that configuration).
pub fn select_target<'a>(
    best_position: &'a [f64],
    agents: &'a [Agent],
    partner_index: usize,
    r_select: f64,
    target_threshold: f64,
    partner_target: PartnerTarget,
) -> &'a [f64] {
    if r_select < target_threshold {
        best_position
    } else {
        match partner_target {
            PartnerTarget::Memory => &agents[partner_index].memory,
            PartnerTarget::Position => &agents[partner_index].position,
        }
    }
}

/// Moves an agent to an evaluated position, refreshing its memory only on
/// strict improvement (ties keep the incumbent memory).
pub fn update_memory(agent: &mut Agent, new_position: Vec<f64>, new_fitness: f64) {
    if new_fitness < agent.memory_fitness {
        agent.memory = new_position.clone();
        agent.memory_fitness = new_fitness;
    }
    agent.position = new_position;
    agent.fitness = new_fitness;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: f64, want: f64) {
        let err = (got - want).abs();
        assert!(
            err <= 1e-12 * want.abs().max(1.0),
            "got {got}, want {want} (err {err:e})"
        );
    }

    fn draws_1d(r2: f64, r3: f64, r4: f64) -> StepDraws {
        StepDraws {
            r2: vec![r2],
            r3: vec![r3],
            r4,
            ..StepDraws::zeroed(1)
        }
    }

    // --- amplitude_r1 ------------------------------------------------------

    #[test]
    fn schedule_amplitude_decays_linearly() {
        let mut stream = RngStream::new(0);
        let mode = R1Mode::ScaOriginal { a: 2.0 };
        assert_eq!(amplitude_r1(mode, 0, 100, &mut stream), 2.0);
        assert_eq!(amplitude_r1(mode, 50, 100, &mut stream), 1.0);
        assert_eq!(amplitude_r1(mode, 99, 100, &mut stream), 0.020000000000000018);
        // The schedule consumes no draws.
        let mut fresh = RngStream::new(0);
        assert_eq!(stream.next_unit(), fresh.next_unit());
    }

    #[test]
    fn literal_amplitude_is_a_unit_draw() {
        let mut stream = RngStream::new(9);
        let mut mirror = RngStream::new(9);
        let r1 = amplitude_r1(R1Mode::PaperLiteral, 3, 10, &mut stream);
        assert_eq!(r1, mirror.next_unit());
        assert!((0.0..1.0).contains(&r1));
    }

    // --- sca_update --------------------------------------------------------

    #[test]
    fn sine_branch_matches_hand_value() {
        // 0 + 1 * sin(0.5) * |0.5 * 1 - 0| = 0.2397127693021015.
        let got = sca_update(&[0.0], &[1.0], 1.0, &draws_1d(0.5, 0.5, 0.2)).unwrap();
        assert_close(got[0], 0.2397127693021015);
    }

    #[test]
    fn cosine_branch_matches_hand_value() {
        // 0 + 1 * cos(0.5) * |0.5 * 1 - 0| = 0.4387912809451864.
        let got = sca_update(&[0.0], &[1.0], 1.0, &draws_1d(0.5, 0.5, 0.9)).unwrap();
        assert_close(got[0], 0.4387912809451864);
    }

    #[test]
    fn weighted_target_equal_to_position_is_a_fixed_point() {
        // |r3 * target - x| = |1 * 2 - 2| = 0, so the agent does not move.
        let got = sca_update(&[2.0], &[2.0], 1.0, &draws_1d(0.5, 1.0, 0.2)).unwrap();
        assert_eq!(got, vec![2.0]);
    }

    #[test]
    fn sca_branch_threshold_is_half_open() {
        // Exactly 0.5 must take the cosine form.
        let sine = sca_update(&[0.0], &[1.0], 1.0, &draws_1d(0.5, 0.5, 0.4999)).unwrap();
        let cosine = sca_update(&[0.0], &[1.0], 1.0, &draws_1d(0.5, 0.5, 0.5)).unwrap();
        assert_close(sine[0], 0.2397127693021015);
        assert_close(cosine[0], 0.4387912809451864);
    }

    #[test]
    fn sca_update_rejects_dimension_mismatch() {
        assert!(matches!(
            sca_update(&[0.0, 1.0], &[1.0], 1.0, &draws_1d(0.5, 0.5, 0.2)),
            Err(CoreError::DimensionMismatch { .. })
        ));
    }

    // --- csa_update --------------------------------------------------------

    #[test]
    fn crow_flight_absolute_matches_hand_value() {
        // 2 + 0.4 * 2 * |5 - 2| = 4.4.
        let got = csa_update(&[2.0], &[5.0], 0.4, 2.0, DiffMode::PaperAbs).unwrap();
        assert_close(got[0], 4.4);
    }

    #[test]
    fn crow_flight_signed_matches_hand_value() {
        // 5 + 0.4 * 2 * (2 - 5) = 2.6.
        let got = csa_update(&[5.0], &[2.0], 0.4, 2.0, DiffMode::Signed).unwrap();
        assert_close(got[0], 2.6);
    }

    #[test]
    fn crow_flight_from_its_memory_is_a_fixed_point() {
        for mode in [DiffMode::PaperAbs, DiffMode::Signed] {
            let got = csa_update(&[3.0], &[3.0], 0.9, 2.0, mode).unwrap();
            assert_eq!(got, vec![3.0]);
        }
    }

    // --- sccsa_update ------------------------------------------------------

    #[test]
    fn hybrid_sine_branch_is_bit_identical_to_parent() {
        let params = SccsaParams::default();
        let mut rng = RngStream::new(17);
        for _ in 0..200 {
            let dim = 1 + rng.next_index(5);
            let x: Vec<f64> = (0..dim).map(|_| rng.next_uniform(-10.0, 10.0).unwrap()).collect();
            let target: Vec<f64> = (0..dim).map(|_| rng.next_uniform(-10.0, 10.0).unwrap()).collect();
            let draws = StepDraws {
                r2: (0..dim).map(|_| rng.next_uniform(0.0, 6.28).unwrap()).collect(),
                r3: (0..dim).map(|_| rng.next_uniform(0.0, 2.0).unwrap()).collect(),
                r4: rng.next_uniform(0.0, 0.3).unwrap(),
                ..StepDraws::zeroed(dim)
            };
            let r1 = rng.next_uniform(0.0, 2.0).unwrap();
            let hybrid = sccsa_update(&x, &target, r1, &draws, &params).unwrap();
            // r4 < 0.3 < 0.5, so the parent update takes its sine form too.
            let parent = sca_update(&x, &target, r1, &draws).unwrap();
            let hb: Vec<u64> = hybrid.iter().map(|v| v.to_bits()).collect();
            let pb: Vec<u64> = parent.iter().map(|v| v.to_bits()).collect();
            assert_eq!(hb, pb, "sine branch must delegate bit-identically");
        }
    }

    #[test]
    fn hybrid_crow_branch_is_bit_identical_to_parent() {
        let params = SccsaParams::default();
        let mut rng = RngStream::new(18);
        for _ in 0..200 {
            let dim = 1 + rng.next_index(5);
            let x: Vec<f64> = (0..dim).map(|_| rng.next_uniform(-10.0, 10.0).unwrap()).collect();
            let target: Vec<f64> = (0..dim).map(|_| rng.next_uniform(-10.0, 10.0).unwrap()).collect();
            let draws = StepDraws {
                r4: rng.next_uniform(0.6, 1.0).unwrap(),
                r_flight: rng.next_unit(),
                ..StepDraws::zeroed(dim)
            };
            let hybrid = sccsa_update(&x, &target, 1.0, &draws, &params).unwrap();
            let parent = csa_update(
                &x,
                &target,
                draws.r_flight,
                params.flight_length,
                params.diff_mode,
            )
            .unwrap();
            let hb: Vec<u64> = hybrid.iter().map(|v| v.to_bits()).collect();
            let pb: Vec<u64> = parent.iter().map(|v| v.to_bits()).collect();
            assert_eq!(hb, pb, "crow branch must delegate bit-identically");
        }
    }

    #[test]
    fn hybrid_crow_branch_matches_hand_value() {
        // r4 = 0.7 routes to the crow flight: 2 + 0.4 * 2 * |5 - 2| = 4.4.
        let params = SccsaParams::default();
        let draws = StepDraws {
            r4: 0.7,
            r_flight: 0.4,
            ..StepDraws::zeroed(1)
        };
        let got = sccsa_update(&[2.0], &[5.0], 1.0, &draws, &params).unwrap();
        assert_close(got[0], 4.4);
    }

    #[test]
    fn hybrid_cosine_branch_matches_hand_value() {
        let params = SccsaParams::default();
        let draws = draws_1d(0.5, 0.5, 0.45);
        let got = sccsa_update(&[0.0], &[1.0], 1.0, &draws, &params).unwrap();
        assert_close(got[0], 0.4387912809451864);
    }

    #[test]
    fn hybrid_branch_boundaries_are_half_open() {
        let params = SccsaParams::default();
        // Distinguishable outputs: sine -> sin(0.5)*0.5 ~ 0.2397, cosine ->
        // cos(0.5)*0.5 ~ 0.4388, crow -> 0 + 0.9 * 2 * |1 - 0| = 1.8.
        let out = |r4: f64| {
            let draws = StepDraws {
                r_flight: 0.9,
                ..draws_1d(0.5, 0.5, r4)
            };
            sccsa_update(&[0.0], &[1.0], 1.0, &draws, &params).unwrap()[0]
        };
        assert_close(out(0.2999), 0.2397127693021015);
        assert_close(out(0.3), 0.4387912809451864); // boundary joins the cosine form
        assert_close(out(0.5999), 0.4387912809451864);
        assert_close(out(0.6), 1.8); // boundary joins the crow flight
        assert_close(out(0.9), 1.8);
    }

    #[test]
    fn hybrid_has_no_reposition_branch() {
        // Every r4 maps to one of the three movement forms; with x == target
        // and r3 == 1 all of them are fixed points, so the position can never
        // jump anywhere else.
        let params = SccsaParams::default();
        let mut rng = RngStream::new(23);
        for _ in 0..500 {
            let draws = StepDraws {
                r2: vec![rng.next_uniform(0.0, 6.28).unwrap()],
                r3: vec![1.0],
                r4: rng.next_unit(),
                r_flight: rng.next_unit(),
                ..StepDraws::zeroed(1)
            };
            let got = sccsa_update(&[1.5], &[1.5], rng.next_unit(), &draws, &params).unwrap();
            assert_eq!(got, vec![1.5]);
        }
    }

    // --- select_target -----------------------------------------------------

    fn two_agents() -> Vec<Agent> {
        let mut a = Agent::new(vec![1.0], 10.0);
        a.memory = vec![7.0];
        let b = Agent::new(vec![2.0], 20.0);
        vec![a, b]
    }

    #[test]
    fn selection_below_threshold_returns_global_best() {
        let agents = two_agents();
        let best = [0.5];
        let t = select_target(&best, &agents, 0, 0.0, 0.5, PartnerTarget::Memory);
        assert_eq!(t, &[0.5]);
    }

    #[test]
    fn selection_above_threshold_returns_partner_memory() {
        let agents = two_agents();
        let best = [0.5];
        let t = select_target(&best, &agents, 0, 0.99, 0.5, PartnerTarget::Memory);
        assert_eq!(t, &[7.0]);
    }

    #[test]
    fn selection_at_threshold_takes_the_partner_branch() {
        let agents = two_agents();
        let best = [0.5];
        let t = select_target(&best, &agents, 0, 0.5, 0.5, PartnerTarget::Memory);
        assert_eq!(t, &[7.0]);
    }

    #[test]
    fn selection_can_target_partner_position_when_configured() {
        let agents = two_agents();
        let best = [0.5];
        let t = select_target(&best, &agents, 1, 0.9, 0.5, PartnerTarget::Position);
        assert_eq!(t, &[2.0]);
    }

    // --- update_memory -----------------------------------------------------

    #[test]
    fn memory_updates_only_on_strict_improvement() {
        let mut agent = Agent::new(vec![1.0], 5.0);

        // Improvement: both position and memory move.
        update_memory(&mut agent, vec![2.0], 3.0);
        assert_eq!(agent.position, vec![2.0]);
        assert_eq!(agent.fitness, 3.0);
        assert_eq!(agent.memory, vec![2.0]);
        assert_eq!(agent.memory_fitness, 3.0);

        // Regression: position moves, memory stays.
        update_memory(&mut agent, vec![9.0], 8.0);
        assert_eq!(agent.position, vec![9.0]);
        assert_eq!(agent.fitness, 8.0);
        assert_eq!(agent.memory, vec![2.0]);
        assert_eq!(agent.memory_fitness, 3.0);

        // Tie: the incumbent memory wins.
        update_memory(&mut agent, vec![4.0], 3.0);
        assert_eq!(agent.position, vec![4.0]);
        assert_eq!(agent.memory, vec![2.0]);
        assert_eq!(agent.memory_fitness, 3.0);
    }
}
