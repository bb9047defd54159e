//! GSEMO and its matrix-swap / repair variants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{select_best_feasible, SolverConfig, SolverError, SolverResult, TracePoint};
use crate::instance::Instance;
use crate::objective::{bi_objective, Evaluator};
use crate::solution::{bitwise_mutation, matrix_swap_mutation, repair, Assignment, ObjectivePair, SwapAxis};

/// How offspring are produced from a parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct Variation {
    /// Probability of bit-wise mutation; matrix-swap mutation otherwise.
    pub bitwise_prob: f64,
    pub repair: bool,
}

impl Variation {
    pub const BITWISE: Variation = Variation { bitwise_prob: 1.0, repair: false };
}

/// Mutually incomparable `(solution, objectives)` pairs.
#[derive(Debug, Clone)]
pub(super) struct Archive {
    members: Vec<(Assignment, ObjectivePair)>,
}

impl Archive {
    fn new(first: Assignment, value: ObjectivePair) -> Self {
        Archive { members: vec![(first, value)] }
    }

    /// Inserts `x` unless a member strictly dominates it, dropping every member
    /// it weakly dominates. Returns whether `x` was inserted.
    pub(super) fn update(&mut self, x: Assignment, fx: ObjectivePair) -> bool {
        if self.members.iter().any(|(_, fz)| fz.dominates(&fx)) {
            return false;
        }
        self.members.retain(|(_, fz)| !fx.weakly_dominates(fz));
        self.members.push((x, fx));
        true
    }

    pub(super) fn members(&self) -> &[(Assignment, ObjectivePair)] {
        &self.members
    }
}

pub(super) fn gsemo(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
    variation: Variation,
) -> Result<SolverResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = evaluator.evaluations();
    let zero = Assignment::empty_for(instance);
    let n = zero.len();
    let mut archive = Archive::new(zero, ObjectivePair::new(0.0, n));
    let mut trace = vec![TracePoint { evaluations: 0, best_f1: 0.0 }];
    let mut best_f1 = 0.0;

    // Infeasible offspring cost no evaluation, so iterations are capped separately.
    let mut iterations = 0u64;
    while iterations < config.budget && evaluator.evaluations() - start < config.budget {
        iterations += 1;
        let parent = &archive.members()[rng.gen_range(0..archive.members().len())].0;
        let use_bitwise = variation.bitwise_prob >= 1.0 || rng.gen::<f64>() <= variation.bitwise_prob;
        let mut child = if use_bitwise {
            bitwise_mutation(parent, &mut rng)
        } else {
            let axis = if rng.gen_bool(0.5) { SwapAxis::Rows } else { SwapAxis::Columns };
            matrix_swap_mutation(parent, &mut rng, axis)
        };
        if variation.repair {
            child = repair(instance, &child, &mut rng);
        }
        let value = bi_objective(evaluator, instance, &child)?;
        if archive.update(child, value) && value.f1 > best_f1 {
            best_f1 = value.f1;
            trace.push(TracePoint {
                evaluations: evaluator.evaluations() - start,
                best_f1,
            });
        }
    }

    let (best, f1) = select_best_feasible(archive.members().iter().map(|(a, p)| (a, p.f1)))
        .expect("the archive always holds a feasible member");
    Ok(SolverResult {
        best: best.clone(),
        best_f1_in_run: f1,
        evaluations_used: evaluator.evaluations() - start,
        trace,
    })
}
