//! Objective evaluation: single-realization simulators for both employment
//! models, the Monte-Carlo estimator, an exact oracle for tiny instances and the
//! bi-objective wrapper used by the evolutionary solvers.

mod coordination;
mod interview;
mod matching;

pub use coordination::{coordination_sample, MAX_EXACT_FREE_EDGES};
pub use interview::{interview_sample, MAX_EXACT_GROUP};
pub use matching::{max_bipartite_matching, BipartiteGraph};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, ModelKind};
use crate::solution::{is_feasible, Assignment, ObjectivePair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    /// The exact oracle refuses inputs it cannot enumerate; it never approximates.
    #[error("oracle limit exceeded: {what} is {size}, limit {limit}")]
    OracleLimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
}

/// Exact expected number of employed migrants for a feasible assignment.
pub fn exact_objective(instance: &Instance, a: &Assignment) -> Result<f64, ObjectiveError> {
    assert!(is_feasible(instance, a), "objective is defined for feasible assignments only");
    match instance.model() {
        ModelKind::Interview => interview::exact(instance, a),
        ModelKind::Coordination => coordination::exact(instance, a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorKind {
    /// Mean of `samples` independent simulations drawn from a stream seeded by `seed`.
    MonteCarlo { samples: usize, seed: u64 },
    /// The exact oracle.
    Exact,
}

/// Monte-Carlo mean together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Default)]
struct Scratch {
    order: Vec<f64>,
    matching: coordination::MatchingScratch,
}

/// A configured objective estimator. Every call to [`Evaluator::estimate`]
/// counts as exactly one objective evaluation, whatever the sample count.
///
/// Monte-Carlo estimates draw from a single RNG stream, so results are a pure
/// function of the seed and the sequence of calls.
#[derive(Debug)]
pub struct Evaluator {
    kind: EvaluatorKind,
    rng: ChaCha8Rng,
    evaluations: u64,
    scratch: Scratch,
}

impl Evaluator {
    pub fn new(kind: EvaluatorKind) -> Self {
        let seed = match kind {
            EvaluatorKind::MonteCarlo { samples, seed } => {
                assert!(samples > 0, "Monte-Carlo sample count must be positive");
                seed
            }
            EvaluatorKind::Exact => 0,
        };
        Evaluator {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
            evaluations: 0,
            scratch: Scratch::default(),
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self::new(EvaluatorKind::MonteCarlo { samples, seed })
    }

    pub fn exact() -> Self {
        Self::new(EvaluatorKind::Exact)
    }

    pub fn kind(&self) -> EvaluatorKind {
        self.kind
    }

    /// Number of estimates made so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// `f̂(a)` for a feasible assignment.
    pub fn estimate(&mut self, instance: &Instance, a: &Assignment) -> Result<f64, ObjectiveError> {
        self.estimate_with_error(instance, a).map(|e| e.mean)
    }

    /// Like [`Evaluator::estimate`], also reporting the standard error of the
    /// Monte-Carlo mean (zero for the exact oracle).
    pub fn estimate_with_error(
        &mut self,
        instance: &Instance,
        a: &Assignment,
    ) -> Result<Estimate, ObjectiveError> {
        assert!(is_feasible(instance, a), "objective is defined for feasible assignments only");
        self.evaluations += 1;
        if a.count_ones() == 0 {
            return Ok(Estimate {
                mean: 0.0,
                std_error: 0.0,
            });
        }
        let samples = match self.kind {
            EvaluatorKind::Exact => {
                return exact_objective(instance, a).map(|mean| Estimate { mean, std_error: 0.0 });
            }
            EvaluatorKind::MonteCarlo { samples, .. } => samples,
        };
        let (sum, sum_sq) = match instance.model() {
            ModelKind::Interview => {
                let groups = interview::groups(instance, a);
                self.accumulate(samples, |rng, scratch| {
                    interview::sample_groups(&groups, &mut scratch.order, rng)
                })
            }
            ModelKind::Coordination => {
                let graphs = coordination::local_graphs(instance, a);
                self.accumulate(samples, |rng, scratch| {
                    coordination::sample_graphs(&graphs, &mut scratch.matching, rng)
                })
            }
        };
        let m = samples as f64;
        let mean = sum / m;
        let std_error = if samples > 1 {
            let var = ((sum_sq - sum * sum / m) / (m - 1.0)).max(0.0);
            (var / m).sqrt()
        } else {
            0.0
        };
        Ok(Estimate { mean, std_error })
    }

    fn accumulate<F>(&mut self, samples: usize, mut draw: F) -> (f64, f64)
    where
        F: FnMut(&mut ChaCha8Rng, &mut Scratch) -> usize,
    {
        let mut sum = 0u64;
        let mut sum_sq = 0u64;
        for _ in 0..samples {
            let x = draw(&mut self.rng, &mut self.scratch) as u64;
            sum += x;
            sum_sq += x * x;
        }
        (sum as f64, sum_sq as f64)
    }
}

/// The bi-objective value `(f1, f2)`: `f1 = f̂(a)` for feasible `a` and `-1`
/// otherwise, `f2 = |a|_0`. Infeasible assignments cost no evaluation.
pub fn bi_objective(
    evaluator: &mut Evaluator,
    instance: &Instance,
    a: &Assignment,
) -> Result<ObjectivePair, ObjectiveError> {
    let zeros = a.count_zeros();
    if !is_feasible(instance, a) {
        return Ok(ObjectivePair::infeasible(zeros));
    }
    Ok(ObjectivePair::new(evaluator.estimate(instance, a)?, zeros))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Locality, Migrant};
    use rand::SeedableRng;

    /// One locality, one profession, `jobs` jobs, one migrant per probability.
    pub(crate) fn single_locality(model: ModelKind, jobs: usize, probs: &[f64]) -> Instance {
        Instance::new(
            model,
            1,
            (0..probs.len()).map(|id| Migrant { id, profession: 0 }).collect(),
            vec![Locality {
                id: 0,
                capacity: probs.len(),
                jobs_by_profession: vec![jobs],
            }],
            probs.iter().map(|&p| vec![p]).collect(),
        )
        .unwrap()
    }

    fn all_assigned(inst: &Instance) -> Assignment {
        let pairs: Vec<_> = (0..inst.num_migrants()).map(|v| (v, 0)).collect();
        Assignment::from_pairs(inst.num_migrants(), 1, &pairs)
    }

    fn sample_mean(inst: &Instance, a: &Assignment, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total: usize = (0..n)
            .map(|_| match inst.model() {
                ModelKind::Interview => interview_sample(inst, a, &mut rng),
                ModelKind::Coordination => coordination_sample(inst, a, &mut rng),
            })
            .sum();
        total as f64 / n as f64
    }

    #[test]
    fn interview_zero_jobs_employs_nobody() {
        let inst = single_locality(ModelKind::Interview, 0, &[1.0, 0.7]);
        let a = all_assigned(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(interview_sample(&inst, &a, &mut rng), 0);
        }
    }

    #[test]
    fn interview_certain_matches_employ_everyone() {
        let inst = single_locality(ModelKind::Interview, 5, &[1.0, 1.0, 1.0]);
        let a = all_assigned(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(interview_sample(&inst, &a, &mut rng), 3);
        }
    }

    #[test]
    fn interview_two_applicants_one_job() {
        let inst = single_locality(ModelKind::Interview, 1, &[0.5, 0.5]);
        let a = all_assigned(&inst);
        let mean = sample_mean(&inst, &a, 100_000, 1);
        assert!((mean - 0.75).abs() <= 0.01, "{mean}");
        assert!((exact_objective(&inst, &a).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn coordination_single_edge() {
        let inst = single_locality(ModelKind::Coordination, 1, &[0.7]);
        let a = all_assigned(&inst);
        let mean = sample_mean(&inst, &a, 100_000, 2);
        assert!((mean - 0.7).abs() <= 0.01, "{mean}");
        assert!((exact_objective(&inst, &a).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn coordination_two_migrants_one_job() {
        let inst = single_locality(ModelKind::Coordination, 1, &[0.5, 0.5]);
        let a = all_assigned(&inst);
        let mean = sample_mean(&inst, &a, 100_000, 3);
        assert!((mean - 0.75).abs() <= 0.01, "{mean}");
        assert!((exact_objective(&inst, &a).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn coordination_two_by_two_matches_edge_enumeration() {
        // Independent oracle: enumerate the 16 edge subsets of K_{2,2}; a perfect
        // matching exists iff {a1, b2} or {a2, b1} are both present.
        let mut expected = 0.0;
        for mask in 0u32..16 {
            let has = |k: u32| mask >> k & 1 == 1;
            let size = if (has(0) && has(3)) || (has(1) && has(2)) {
                2.0
            } else if mask != 0 {
                1.0
            } else {
                0.0
            };
            expected += size / 16.0;
        }
        assert_eq!(expected, 1.375);
        let inst = single_locality(ModelKind::Coordination, 2, &[0.5, 0.5]);
        let a = all_assigned(&inst);
        assert!((exact_objective(&inst, &a).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn coordination_zero_probabilities() {
        let inst = single_locality(ModelKind::Coordination, 3, &[0.0, 0.0]);
        let a = all_assigned(&inst);
        assert_eq!(sample_mean(&inst, &a, 100, 4), 0.0);
        assert_eq!(exact_objective(&inst, &a).unwrap(), 0.0);
    }

    #[test]
    fn single_trial_both_models() {
        for model in [ModelKind::Interview, ModelKind::Coordination] {
            let inst = single_locality(model, 1, &[0.37]);
            let a = all_assigned(&inst);
            assert!((exact_objective(&inst, &a).unwrap() - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_limits_are_reported() {
        let inst = single_locality(ModelKind::Interview, 2, &[0.5; 9]);
        let err = exact_objective(&inst, &all_assigned(&inst)).unwrap_err();
        assert!(matches!(err, ObjectiveError::OracleLimitExceeded { size: 9, limit: 8, .. }));
        // 3 migrants x 7 jobs = 21 uncertain edges
        let inst = single_locality(ModelKind::Coordination, 7, &[0.5; 3]);
        let err = exact_objective(&inst, &all_assigned(&inst)).unwrap_err();
        assert!(matches!(err, ObjectiveError::OracleLimitExceeded { size: 21, .. }));
        // certain edges do not count toward the limit
        let inst = single_locality(ModelKind::Coordination, 7, &[1.0; 3]);
        assert_eq!(exact_objective(&inst, &all_assigned(&inst)).unwrap(), 3.0);
    }

    #[test]
    fn empty_assignment_is_zero_and_counted() {
        let inst = single_locality(ModelKind::Interview, 1, &[0.9]);
        let mut ev = Evaluator::monte_carlo(50, 1);
        assert_eq!(ev.estimate(&inst, &Assignment::empty_for(&inst)).unwrap(), 0.0);
        assert_eq!(ev.evaluations(), 1);
    }

    #[test]
    fn estimates_are_deterministic_per_seed() {
        let inst = single_locality(ModelKind::Interview, 2, &[0.3, 0.6, 0.2]);
        let a = all_assigned(&inst);
        let run = |seed| {
            let mut ev = Evaluator::monte_carlo(200, seed);
            (0..5).map(|_| ev.estimate(&inst, &a).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(10), run(10));
        assert_ne!(run(10), run(11));
    }

    #[test]
    fn bi_objective_wrapper() {
        let inst = single_locality(ModelKind::Interview, 1, &[0.5, 0.5]);
        let mut ev = Evaluator::exact();
        let empty = Assignment::empty_for(&inst);
        assert_eq!(bi_objective(&mut ev, &inst, &empty).unwrap(), ObjectivePair::new(0.0, 2));
        assert_eq!(ev.evaluations(), 1);

        let mut tight = single_locality(ModelKind::Interview, 1, &[0.5, 0.5]);
        tight = Instance::new(
            tight.model(),
            1,
            tight.migrants().to_vec(),
            vec![Locality {
                id: 0,
                capacity: 1,
                jobs_by_profession: vec![1],
            }],
            tight.prob_rows(),
        )
        .unwrap();
        let over = all_assigned(&tight);
        let pair = bi_objective(&mut ev, &tight, &over).unwrap();
        assert_eq!(pair, ObjectivePair::infeasible(0));
        assert_eq!(ev.evaluations(), 1, "infeasible solutions are not evaluated");

        let one = Assignment::from_pairs(2, 1, &[(1, 0)]);
        let pair = bi_objective(&mut ev, &tight, &one).unwrap();
        assert_eq!(pair.f2, 1);
        assert!((pair.f1 - 0.5).abs() < 1e-12);
    }
}
