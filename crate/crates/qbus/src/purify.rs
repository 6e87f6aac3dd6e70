//! Two-way entanglement purification of noisy pairs, built at circuit
//! level on a four-qubit register, plus a simple nested schedule that
//! alternates purification and swapping with resource and time accounting.

use crate::belldiag::{compose_chain, swap_recursion_step, BellDiagonal};
use crate::cmatrix::gates;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::noise::{depolarizing_gate, noisy_measure, NoiseModel};
use crate::swap::ErrorModel;
use crate::timing::TimeModel;
use std::f64::consts::FRAC_PI_2;

/// Knobs for a purification run.
#[derive(Clone, Copy, Debug)]
pub struct PurifyConfig {
    /// Round budget; each round consumes two copies of the current pair.
    pub rounds: u32,
    /// When set, the two bilateral entangling gates carry the depolarizing
    /// channel at the model's p and the target-pair readouts use its eta.
    /// One-qubit rotations are ideal either way.
    pub noisy_ops: bool,
    pub noise: NoiseModel,
    /// Nesting levels for the repeater schedule; 0 means a single stage.
    pub nesting_depth: u32,
}

const MAX_ROUNDS: u32 = 32;

impl PurifyConfig {
    pub fn new(rounds: u32, noisy_ops: bool, noise: NoiseModel, nesting_depth: u32) -> Result<Self> {
        if rounds > MAX_ROUNDS {
            return Err(Error::OutOfRange {
                name: "rounds",
                value: rounds as f64,
                range: "[0, 32]",
            });
        }
        if nesting_depth > MAX_ROUNDS {
            return Err(Error::OutOfRange {
                name: "nesting_depth",
                value: nesting_depth as f64,
                range: "[0, 32]",
            });
        }
        Ok(PurifyConfig {
            rounds,
            noisy_ops,
            noise,
            nesting_depth,
        })
    }

    pub fn ideal(rounds: u32) -> Self {
        PurifyConfig {
            rounds,
            noisy_ops: false,
            noise: NoiseModel::ideal(),
            nesting_depth: 0,
        }
    }
}

/// Result of one purification round.
#[derive(Clone, Copy, Debug)]
pub struct DeutschRound {
    pub kept: BellDiagonal,
    pub p_success: f64,
    /// Largest matrix element of the kept state outside its Bell-diagonal
    /// part (diagnostic; stays at rounding level for this protocol).
    pub off_bell_residual: f64,
}

/// One two-way purification round on two identical copies of `pair`.
///
/// Register layout (A = one party, B = the other):
/// qubit 0 = A's half of the kept pair, 1 = B's half of the kept pair,
/// qubit 2 = A's half of the sacrificed pair, 3 = B's half.
/// A rotates both halves by +pi/2 about x, B by -pi/2; each party applies
/// a controlled-not from their kept half onto their sacrificed half; the
/// sacrificed pair is measured and the round succeeds when the reported
/// bits coincide.
pub fn deutsch_round(pair: &BellDiagonal, config: &PurifyConfig) -> Result<DeutschRound> {
    let single = pair.renormalized().to_density();
    let state = single.tensor(&single)?;

    let rot_a = gates::rx(FRAC_PI_2);
    let rot_b = gates::rx(-FRAC_PI_2);
    let mut state = state
        .apply_unitary(&rot_a, &[0])?
        .apply_unitary(&rot_b, &[1])?
        .apply_unitary(&rot_a, &[2])?
        .apply_unitary(&rot_b, &[3])?;

    let cnot = gates::cnot();
    let (p, eta) = if config.noisy_ops {
        (config.noise.p, config.noise.eta)
    } else {
        (1.0, 1.0)
    };
    state = depolarizing_gate(&state, (0, 2), &cnot, p)?;
    state = depolarizing_gate(&state, (1, 3), &cnot, p)?;

    let mut kept_sum: Option<DensityMatrix> = None;
    let mut p_success = 0.0;
    for b3 in noisy_measure(&state, 3, eta)? {
        let Some(post3) = b3.post_state else { continue };
        let reduced = post3.trace_out_qubit(3)?;
        for b2 in noisy_measure(&reduced, 2, eta)? {
            let Some(post2) = b2.post_state else { continue };
            if b2.outcome != b3.outcome {
                continue;
            }
            let weight = b3.probability * b2.probability;
            let kept = post2.trace_out_qubit(2)?;
            p_success += weight;
            kept_sum = Some(match kept_sum {
                None => kept.scaled(weight),
                Some(sum) => sum.mix(1.0, &kept, weight)?,
            });
        }
    }
    let kept_sum = kept_sum.ok_or_else(|| {
        Error::InvalidState("purification round succeeded with probability zero".into())
    })?;
    let kept_state = kept_sum.scaled(1.0 / p_success);
    let (kept, off_bell_residual) = BellDiagonal::from_density(&kept_state)?;
    Ok(DeutschRound {
        kept: kept.renormalized(),
        p_success,
        off_bell_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PurifyStatus {
    ReachedTarget,
    BudgetExhausted,
}

/// Outcome of an iterated purification (or nested repeater) run.
#[derive(Clone, Debug)]
pub struct PurifyOutcome {
    pub state: BellDiagonal,
    pub status: PurifyStatus,
    pub rounds_used: u32,
    pub success_prob_per_round: Vec<f64>,
    /// Initial pairs consumed per output pair when every round succeeds:
    /// 2^rounds for a flat run.
    pub pairs_consumed: u64,
    /// Expected initial-pair count with retries: 2^rounds over the product
    /// of the round success probabilities.
    pub expected_pairs: f64,
    /// Wall time under the given time model; zero when none was supplied.
    pub expected_time: f64,
}

/// Iterates purification rounds until `target_fidelity` is reached or the
/// round budget runs out. A target at or below the input fidelity returns
/// immediately; an unreachable target yields a budget-exhausted outcome
/// carrying the best state achieved, not an error.
pub fn purify_to_target(
    pair: &BellDiagonal,
    config: &PurifyConfig,
    target_fidelity: f64,
    time_model: Option<&TimeModel>,
) -> Result<PurifyOutcome> {
    if !(0.0..=1.0).contains(&target_fidelity) {
        return Err(Error::OutOfRange {
            name: "target_fidelity",
            value: target_fidelity,
            range: "[0, 1]",
        });
    }
    let mut state = *pair;
    let mut success_prob_per_round = Vec::new();
    let mut rounds_used = 0;
    let mut status = if state.fidelity() >= target_fidelity {
        PurifyStatus::ReachedTarget
    } else {
        PurifyStatus::BudgetExhausted
    };
    while state.fidelity() < target_fidelity && rounds_used < config.rounds {
        let round = deutsch_round(&state, config)?;
        state = round.kept;
        success_prob_per_round.push(round.p_success);
        rounds_used += 1;
        if state.fidelity() >= target_fidelity {
            status = PurifyStatus::ReachedTarget;
        }
    }
    Ok(assemble_outcome(
        state,
        status,
        rounds_used,
        success_prob_per_round,
        time_model,
    ))
}

fn assemble_outcome(
    state: BellDiagonal,
    status: PurifyStatus,
    rounds_used: u32,
    success_prob_per_round: Vec<f64>,
    time_model: Option<&TimeModel>,
) -> PurifyOutcome {
    let pairs_consumed = 1u64 << rounds_used;
    let expected_pairs = success_prob_per_round
        .iter()
        .fold(pairs_consumed as f64, |acc, p| acc / p.max(1e-300));
    let expected_time = time_model
        .map(|tm| rounds_used as f64 * tm.t_purify_round())
        .unwrap_or(0.0);
    PurifyOutcome {
        state,
        status,
        rounds_used,
        success_prob_per_round,
        pairs_consumed,
        expected_pairs,
        expected_time,
    }
}

/// Nested repeater schedule over a length-l connection split into
/// 2^nesting_depth segments: build all segment pairs in parallel via the
/// fast path, then alternate purification and swapping of neighboring
/// pairs, halving the segment count each stage. The first stage purifies
/// with its whole round budget; later stages purify until they recover
/// the fidelity that entered the previous swap, with the same cap.
pub fn nested_repeater(
    l: usize,
    segments: usize,
    config: &PurifyConfig,
    time_model: Option<&TimeModel>,
) -> Result<PurifyOutcome> {
    if segments == 0 || !segments.is_power_of_two() {
        return Err(Error::BadSegmentation(format!(
            "segment count {segments} must be a power of two"
        )));
    }
    if segments != 1 << config.nesting_depth {
        return Err(Error::BadSegmentation(format!(
            "segment count {segments} inconsistent with nesting depth {}",
            config.nesting_depth
        )));
    }
    if !l.is_multiple_of(segments) || !(l / segments).is_multiple_of(2) || l / segments < 2 {
        return Err(Error::BadSegmentation(format!(
            "length {l} does not split into {segments} even segments"
        )));
    }
    let model = ErrorModel::Dep;
    let seg_len = l / segments;
    let mut pair = compose_chain(seg_len, &config.noise, model)?;

    let mut success_prob_per_round = Vec::new();
    let mut rounds_used = 0u32;
    let mut pairs_per_output = 1.0f64;
    let mut expected_factor = 1.0f64;
    let mut time = time_model.map(|tm| tm.t_entswap()).unwrap_or(0.0);

    // The first stage spends its whole round budget; each later stage
    // purifies only until it recovers the fidelity its predecessor fed
    // into the swap, capped by the same budget.
    let mut stage_target = 1.0;
    let mut remaining = segments;
    while remaining > 1 {
        if config.rounds > 0 {
            let purified = purify_to_target(&pair, config, stage_target, time_model)?;
            rounds_used += purified.rounds_used;
            pairs_per_output *= (1u64 << purified.rounds_used) as f64;
            for p in &purified.success_prob_per_round {
                expected_factor /= p.max(1e-300);
            }
            pairs_per_output_sanity(pairs_per_output)?;
            time += purified.expected_time;
            success_prob_per_round.extend(purified.success_prob_per_round);
            pair = purified.state;
        }
        stage_target = pair.fidelity();
        pair = swap_recursion_step(&pair, &pair, &config.noise, model)?;
        if let Some(tm) = time_model {
            time += tm.t_joint();
        }
        remaining /= 2;
    }

    let elementary_per_segment = pairs_per_output;
    let pairs_consumed = (segments as f64 * elementary_per_segment).round() as u64;
    Ok(PurifyOutcome {
        state: pair,
        status: PurifyStatus::ReachedTarget,
        rounds_used,
        success_prob_per_round: success_prob_per_round.clone(),
        pairs_consumed,
        expected_pairs: segments as f64 * elementary_per_segment * expected_factor,
        expected_time: time,
    })
}

fn pairs_per_output_sanity(pairs: f64) -> Result<()> {
    if pairs > 1e18 {
        return Err(Error::OutOfRange {
            name: "pairs_consumed",
            value: pairs,
            range: "< 1e18",
        });
    }
    Ok(())
}
