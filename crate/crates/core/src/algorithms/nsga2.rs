//! NSGA-II with external best-so-far tracking. Infeasible offspring are
//! discarded before evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{random_feasible, BestSoFar, SolverConfig, SolverError, SolverResult};
use crate::instance::Instance;
use crate::objective::Evaluator;
use crate::solution::{bitwise_mutation, is_feasible, one_point_crossover, Assignment, ObjectivePair};

/// Generated offspring per unit of budget before a run gives up on finding
/// feasible ones.
pub(super) const ATTEMPTS_PER_EVALUATION: u64 = 100;

#[derive(Debug, Clone)]
struct Member {
    x: Assignment,
    f: ObjectivePair,
    rank: usize,
    crowding: f64,
}

/// Partitions indices into non-dominated fronts, best first.
pub(super) fn non_dominated_fronts(values: &[ObjectivePair]) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if values[i].dominates(&values[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if values[j].dominates(&values[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front, in front order. Boundary
/// members get infinite distance.
pub(super) fn crowding_distances(values: &[ObjectivePair], front: &[usize]) -> Vec<f64> {
    let k = front.len();
    let mut dist = vec![0.0; k];
    if k <= 2 {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        return dist;
    }
    let objectives: [fn(&ObjectivePair) -> f64; 2] = [|p| p.f1, |p| p.f2 as f64];
    for obj in objectives {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| obj(&values[front[a]]).total_cmp(&obj(&values[front[b]])).then(a.cmp(&b)));
        let lo = obj(&values[front[order[0]]]);
        let hi = obj(&values[front[order[k - 1]]]);
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..k - 1 {
                let gap = obj(&values[front[order[w + 1]]]) - obj(&values[front[order[w - 1]]]);
                dist[order[w]] += gap / (hi - lo);
            }
        }
    }
    dist
}

/// Keeps the best `size` of `pool` by rank, then crowding distance.
fn environmental_selection(pool: Vec<(Assignment, ObjectivePair)>, size: usize) -> Vec<Member> {
    let values: Vec<ObjectivePair> = pool.iter().map(|(_, f)| *f).collect();
    let mut slots: Vec<Option<(Assignment, ObjectivePair)>> = pool.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(size);
    for (rank, front) in non_dominated_fronts(&values).into_iter().enumerate() {
        if out.len() >= size {
            break;
        }
        let dist = crowding_distances(&values, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        if out.len() + front.len() > size {
            order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(front[a].cmp(&front[b])));
            order.truncate(size - out.len());
        }
        for k in order {
            let (x, f) = slots[front[k]].take().expect("each index selected once");
            out.push(Member { x, f, rank, crowding: dist[k] });
        }
    }
    out
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Member], rng: &mut R) -> &'a Assignment {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding) {
        &b.x
    } else {
        &a.x
    }
}

pub(super) fn nsga2(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = evaluator.evaluations();
    let size = config.effective_population(instance);
    let used = |ev: &Evaluator| ev.evaluations() - start;
    let mut best = BestSoFar::new(instance);

    let zero = Assignment::empty_for(instance);
    let n = zero.len();
    let mut pool = vec![(zero, ObjectivePair::new(0.0, n))];
    while pool.len() < size && used(evaluator) < config.budget {
        let x = random_feasible(instance, &mut rng);
        let f = evaluator.estimate(instance, &x)?;
        best.offer(&x, f, used(evaluator));
        let zeros = x.count_zeros();
        pool.push((x, ObjectivePair::new(f, zeros)));
    }
    let mut population = environmental_selection(pool, size);

    let max_attempts = config.budget.saturating_mul(ATTEMPTS_PER_EVALUATION);
    let mut attempts = 0u64;
    'run: while used(evaluator) < config.budget {
        let mut offspring: Vec<(Assignment, ObjectivePair)> = Vec::with_capacity(size);
        while offspring.len() < size {
            let p1 = tournament(&population, &mut rng);
            let p2 = tournament(&population, &mut rng);
            let (c1, c2) = if rng.gen::<f64>() < config.crossover_prob {
                one_point_crossover(p1, p2, &mut rng)
            } else {
                (p1.clone(), p2.clone())
            };
            for mut child in [c1, c2] {
                if offspring.len() >= size {
                    break;
                }
                if used(evaluator) >= config.budget || attempts >= max_attempts {
                    break 'run;
                }
                attempts += 1;
                if rng.gen::<f64>() < config.mutation_prob {
                    child = bitwise_mutation(&child, &mut rng);
                }
                if !is_feasible(instance, &child) {
                    continue;
                }
                let f = evaluator.estimate(instance, &child)?;
                best.offer(&child, f, used(evaluator));
                let zeros = child.count_zeros();
                offspring.push((child, ObjectivePair::new(f, zeros)));
            }
        }
        let mut pool: Vec<(Assignment, ObjectivePair)> =
            population.into_iter().map(|m| (m.x, m.f)).collect();
        pool.extend(offspring);
        population = environmental_selection(pool, size);
    }

    let evaluations_used = used(evaluator);
    Ok(best.finish(evaluations_used))
}
