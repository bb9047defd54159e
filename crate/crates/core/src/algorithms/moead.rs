//! MOEA/D with normalized Tchebycheff decomposition over `(f1, f2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::nsga2::ATTEMPTS_PER_EVALUATION;
use super::{random_feasible, BestSoFar, SolverConfig, SolverError, SolverResult};
use crate::instance::Instance;
use crate::objective::Evaluator;
use crate::solution::{bitwise_mutation, is_feasible, one_point_crossover, Assignment, ObjectivePair};

/// `size` weight vectors `(i / (size - 1), 1 - i / (size - 1))`.
pub(super) fn weight_vectors(size: usize) -> Vec<[f64; 2]> {
    let step = (size - 1) as f64;
    (0..size).map(|i| [i as f64 / step, 1.0 - i as f64 / step]).collect()
}

/// Indices of the `t` weight vectors closest to each one, itself included.
/// The vectors are evenly spaced, so distance is proportional to index
/// distance; ties go to the lower index.
pub(super) fn neighborhoods(size: usize, t: usize) -> Vec<Vec<usize>> {
    (0..size)
        .map(|i| {
            let mut idx: Vec<usize> = (0..size).collect();
            idx.sort_by_key(|&j| (j.abs_diff(i), j));
            idx.truncate(t);
            idx
        })
        .collect()
}

fn objectives(f: &ObjectivePair) -> [f64; 2] {
    [f.f1, f.f2 as f64]
}

/// Tchebycheff value to minimize: `max_m w_m (ideal_m - f_m) / range_m`, where
/// a non-positive range falls back to 1.
pub(super) fn tchebycheff(f: [f64; 2], w: [f64; 2], ideal: [f64; 2], nadir: [f64; 2]) -> f64 {
    (0..2)
        .map(|m| {
            let range = ideal[m] - nadir[m];
            let range = if range > 0.0 { range } else { 1.0 };
            w[m] * (ideal[m] - f[m]) / range
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(super) fn moead(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = evaluator.evaluations();
    let used = |ev: &Evaluator| ev.evaluations() - start;
    let size = config.effective_population(instance);
    let weights = weight_vectors(size);
    let hoods = neighborhoods(size, config.neighborhood_size);
    let mut best = BestSoFar::new(instance);

    let zero = Assignment::empty_for(instance);
    let n = zero.len();
    let mut pop: Vec<(Assignment, [f64; 2])> = vec![(zero, [0.0, n as f64])];
    while pop.len() < size {
        if used(evaluator) >= config.budget {
            return Ok(best.finish(used(evaluator)));
        }
        let x = random_feasible(instance, &mut rng);
        let f = evaluator.estimate(instance, &x)?;
        best.offer(&x, f, used(evaluator));
        let zeros = x.count_zeros() as f64;
        pop.push((x, [f, zeros]));
    }
    let mut ideal = [f64::NEG_INFINITY; 2];
    for (_, f) in &pop {
        for m in 0..2 {
            ideal[m] = ideal[m].max(f[m]);
        }
    }

    let max_attempts = config.budget.saturating_mul(ATTEMPTS_PER_EVALUATION);
    let mut attempts = 0u64;
    'run: loop {
        for hood in &hoods {
            if used(evaluator) >= config.budget || attempts >= max_attempts {
                break 'run;
            }
            attempts += 1;
            let a = hood[rng.gen_range(0..hood.len())];
            let b = loop {
                let b = hood[rng.gen_range(0..hood.len())];
                if b != a {
                    break b;
                }
            };
            let mut child = if rng.gen::<f64>() < config.crossover_prob {
                one_point_crossover(&pop[a].0, &pop[b].0, &mut rng).0
            } else {
                pop[a].0.clone()
            };
            if rng.gen::<f64>() < config.mutation_prob {
                child = bitwise_mutation(&child, &mut rng);
            }
            if !is_feasible(instance, &child) {
                continue;
            }
            let f1 = evaluator.estimate(instance, &child)?;
            best.offer(&child, f1, used(evaluator));
            let fy = objectives(&ObjectivePair::new(f1, child.count_zeros()));
            for m in 0..2 {
                ideal[m] = ideal[m].max(fy[m]);
            }
            let mut nadir = fy;
            for (_, f) in &pop {
                for m in 0..2 {
                    nadir[m] = nadir[m].min(f[m]);
                }
            }
            let gy: Vec<f64> = hood.iter().map(|&j| tchebycheff(fy, weights[j], ideal, nadir)).collect();
            for (k, &j) in hood.iter().enumerate() {
                if gy[k] < tchebycheff(pop[j].1, weights[j], ideal, nadir) {
                    pop[j] = (child.clone(), fy);
                }
            }
        }
    }

    let evaluations_used = used(evaluator);
    Ok(best.finish(evaluations_used))
}
