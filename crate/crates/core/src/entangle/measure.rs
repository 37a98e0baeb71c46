use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::branch::{Branch, BranchState, ModeId};
use crate::error::{Error, Result};
use crate::optics::{coherent_overlap, CoherentAmplitude};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementModel {
    /// Pointer states treated as exactly orthogonal: each branch is assigned
    /// to its nearest outcome.
    IdealizedOrthogonal,
    /// Projection onto the coherent outcome kets, overlaps included.
    #[default]
    CoherentProjection,
}

/// One measurement record together with the post-measurement state, which
/// no longer carries the measured mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    pub state: BranchState,
}

const COMPLETENESS_TOL: f64 = 1e-6;

fn check_outcomes(outcomes: &[CoherentAmplitude]) -> Result<()> {
    if outcomes.is_empty() {
        return Err(Error::Measurement("empty outcome list".into()));
    }
    for (i, a) in outcomes.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::Measurement(format!("non-finite outcome {a:?}")));
        }
        for b in &outcomes[..i] {
            if (a.0 - b.0).norm() <= 1e-12 * (1.0 + a.0.norm()) {
                return Err(Error::Measurement(format!("outcomes {a:?} and {b:?} coincide")));
            }
        }
    }
    Ok(())
}

fn nearest(outcomes: &[CoherentAmplitude], a: CoherentAmplitude) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, b) in outcomes.iter().enumerate() {
        let d = (a.0 - b.0).norm();
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Unnormalized conditional states for every outcome, before the
/// probabilities are formed.
fn conditionals(
    state: &BranchState,
    idx: usize,
    outcomes: &[CoherentAmplitude],
    model: MeasurementModel,
) -> Vec<BranchState> {
    let reduced = state.without_mode(idx);
    outcomes
        .iter()
        .enumerate()
        .map(|(k, &beta)| {
            let branches = state
                .branches()
                .iter()
                .zip(reduced.branches())
                .filter_map(|(full, red)| {
                    let alpha = full.fields[idx];
                    let coefficient = match model {
                        MeasurementModel::CoherentProjection => {
                            full.coefficient * coherent_overlap(beta, alpha)
                        }
                        MeasurementModel::IdealizedOrthogonal => {
                            if nearest(outcomes, alpha) != k {
                                return None;
                            }
                            full.coefficient
                        }
                    };
                    Some(Branch {
                        config: full.config,
                        coefficient,
                        fields: red.fields.clone(),
                    })
                })
                .collect();
            reduced.with_branches(branches)
        })
        .collect()
}

/// Probabilities and conditional states of every outcome, in input order.
/// Probabilities are the conditional norms normalized over the outcome set.
pub fn measure_pointer_all(
    state: &BranchState,
    mode: ModeId,
    outcomes: &[CoherentAmplitude],
    model: MeasurementModel,
) -> Result<Vec<Outcome>> {
    check_outcomes(outcomes)?;
    let idx = state.mode_index(mode)?;
    let cond = conditionals(state, idx, outcomes, model);
    let weights: Vec<f64> = cond.iter().map(|s| s.norm_sqr().max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Measurement(format!(
            "outcome set has zero total weight on mode {mode}"
        )));
    }
    if model == MeasurementModel::IdealizedOrthogonal {
        let before = state.norm_sqr();
        if (total / before - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::Measurement(format!(
                "idealized outcome probabilities sum to {}",
                total / before
            )));
        }
    }
    cond.into_iter()
        .zip(weights)
        .enumerate()
        .map(|(index, (s, w))| {
            let state = if w > 0.0 { s.normalized()? } else { s };
            Ok(Outcome {
                index,
                probability: w / total,
                state,
            })
        })
        .collect()
}

/// Draws one outcome from `all` with `rng`.
pub fn sample_outcome<R: Rng>(all: Vec<Outcome>, rng: &mut R) -> Result<Outcome> {
    let dist = WeightedIndex::new(all.iter().map(|o| o.probability))
        .map_err(|e| Error::Measurement(format!("cannot sample outcomes: {e}")))?;
    let k = dist.sample(rng);
    Ok(all.into_iter().nth(k).expect("index from the same list"))
}

/// Samples a measurement of `mode` with a generator seeded from `seed`.
pub fn measure_pointer(
    state: &BranchState,
    mode: ModeId,
    outcomes: &[CoherentAmplitude],
    model: MeasurementModel,
    seed: u64,
) -> Result<Outcome> {
    let all = measure_pointer_all(state, mode, outcomes, model)?;
    sample_outcome(all, &mut ChaCha8Rng::seed_from_u64(seed))
}
