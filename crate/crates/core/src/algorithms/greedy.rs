//! Greedy: repeatedly add the feasible pair with the largest marginal gain.

use super::{SolverConfig, SolverError, SolverResult, TracePoint};
use crate::instance::Instance;
use crate::objective::Evaluator;
use crate::solution::Assignment;

pub(super) fn greedy(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    let start = evaluator.evaluations();
    let (m, nl) = (instance.num_migrants(), instance.num_localities());
    let mut x = Assignment::empty(m, nl);
    let mut value = 0.0;
    let mut load = vec![0usize; nl];
    let mut placed = vec![false; m];
    let mut trace = vec![TracePoint { evaluations: 0, best_f1: 0.0 }];

    'rounds: loop {
        let open = (0..m).any(|v| !placed[v]) && (0..nl).any(|l| load[l] < instance.capacity(l));
        if !open {
            break;
        }
        // Re-estimate the current set instead of reusing the winning estimate of
        // the previous round, which is biased upward by the selection.
        let baseline = if x.count_ones() == 0 {
            0.0
        } else {
            if evaluator.evaluations() - start >= config.budget {
                break;
            }
            evaluator.estimate(instance, &x)?
        };
        let mut best: Option<(usize, usize, f64)> = None;
        for v in (0..m).filter(|&v| !placed[v]) {
            for l in (0..nl).filter(|&l| load[l] < instance.capacity(l)) {
                if evaluator.evaluations() - start >= config.budget {
                    break 'rounds;
                }
                x.set(v, l, true);
                let f = evaluator.estimate(instance, &x)?;
                x.set(v, l, false);
                if best.is_none_or(|(_, _, b)| f > b) {
                    best = Some((v, l, f));
                }
            }
        }
        match best {
            Some((v, l, f)) if f - baseline > 0.0 => {
                x.set(v, l, true);
                placed[v] = true;
                load[l] += 1;
                value = f;
                trace.push(TracePoint {
                    evaluations: evaluator.evaluations() - start,
                    best_f1: f,
                });
            }
            _ => break,
        }
    }

    Ok(SolverResult {
        best: x,
        best_f1_in_run: value,
        evaluations_used: evaluator.evaluations() - start,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::instance::{Locality, Migrant, ModelKind};

    fn two_by_two(caps: [usize; 2]) -> Instance {
        Instance::new(
            ModelKind::Interview,
            1,
            vec![Migrant { id: 0, profession: 0 }, Migrant { id: 1, profession: 0 }],
            vec![
                Locality { id: 0, capacity: caps[0], jobs_by_profession: vec![1] },
                Locality { id: 1, capacity: caps[1], jobs_by_profession: vec![1] },
            ],
            vec![vec![0.9, 0.1], vec![0.8, 0.7]],
        )
        .unwrap()
    }

    #[test]
    fn hand_simulated_example() {
        // round 1 singletons: 0.9, 0.1, 0.8, 0.7 -> (0, 0); round 2 re-estimates
        // {(0, 0)} and tries the only pair that fits, (1, 1)
        let inst = two_by_two([1, 1]);
        let config = SolverConfig::new(Algorithm::Greedy, 100, 0);
        let r = greedy(&inst, &mut Evaluator::exact(), &config).unwrap();
        assert_eq!(r.best.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert!((r.best_f1_in_run - 1.6).abs() < 1e-12);
        assert_eq!(r.evaluations_used, 6);
        assert_eq!(r.trace.len(), 3);
        assert!((r.trace[1].best_f1 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn zero_capacities_return_empty() {
        let inst = two_by_two([0, 0]);
        let config = SolverConfig::new(Algorithm::Greedy, 100, 0);
        let r = greedy(&inst, &mut Evaluator::exact(), &config).unwrap();
        assert_eq!(r.best.count_ones(), 0);
        assert_eq!(r.best_f1_in_run, 0.0);
        assert_eq!(r.evaluations_used, 0);
    }

    #[test]
    fn budget_cuts_a_round_short() {
        let inst = two_by_two([1, 1]);
        let config = SolverConfig::new(Algorithm::Greedy, 3, 0);
        let r = greedy(&inst, &mut Evaluator::exact(), &config).unwrap();
        assert_eq!(r.evaluations_used, 3);
        assert_eq!(r.best.count_ones(), 0);
    }
}
