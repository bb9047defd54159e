//! Interview model: within every (locality, profession) group, migrants are
//! interviewed one at a time in random order. A migrant facing `j` open jobs is
//! hired with probability `1 - (1 - p)^j`, i.e. at least one of `j` independent
//! attempts succeeds, and each hire closes one job.

use itertools::Itertools;
use rand::Rng;

use super::ObjectiveError;
use crate::instance::Instance;
use crate::solution::Assignment;

/// Largest group the exact oracle enumerates orders for.
pub const MAX_EXACT_GROUP: usize = 8;

#[derive(Debug, Clone)]
pub(crate) struct Group {
    jobs: usize,
    probs: Vec<f64>,
}

/// Groups with at least one job and one migrant; the others contribute nothing.
pub(crate) fn groups(instance: &Instance, a: &Assignment) -> Vec<Group> {
    let np = instance.num_professions();
    let nl = instance.num_localities();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); nl * np];
    for (v, l) in a.pairs() {
        buckets[l * np + instance.profession_of(v)].push(instance.interview_prob(v, l));
    }
    buckets
        .into_iter()
        .enumerate()
        .filter_map(|(k, probs)| {
            let jobs = instance.jobs(k / np, k % np);
            (jobs > 0 && !probs.is_empty()).then_some(Group { jobs, probs })
        })
        .collect()
}

/// One realization of the employed count over prepared groups.
pub(crate) fn sample_groups<R: Rng + ?Sized>(groups: &[Group], scratch: &mut Vec<f64>, rng: &mut R) -> usize {
    let mut employed = 0;
    for g in groups {
        scratch.clear();
        scratch.extend_from_slice(&g.probs);
        let len = scratch.len();
        let mut open = g.jobs;
        for i in 0..len {
            if open == 0 {
                break;
            }
            // draw the next interviewee uniformly among those not yet seen
            let k = rng.gen_range(i..len);
            scratch.swap(i, k);
            let p = scratch[i];
            let hire = 1.0 - (1.0 - p).powi(open as i32);
            if rng.gen::<f64>() < hire {
                employed += 1;
                open -= 1;
            }
        }
    }
    employed
}

/// One realization of the number of employed migrants under the interview model.
pub fn interview_sample<R: Rng + ?Sized>(instance: &Instance, a: &Assignment, rng: &mut R) -> usize {
    let gs = groups(instance, a);
    sample_groups(&gs, &mut Vec::new(), rng)
}

/// Expected hires for one fixed interview order, tracking the distribution of
/// open jobs.
fn expected_in_order(jobs: usize, order: &[f64]) -> f64 {
    let mut dist = vec![0.0; jobs + 1];
    dist[jobs] = 1.0;
    let mut next = vec![0.0; jobs + 1];
    let mut expected = 0.0;
    for &p in order {
        next.iter_mut().for_each(|x| *x = 0.0);
        next[0] += dist[0];
        for j in 1..=jobs {
            if dist[j] == 0.0 {
                continue;
            }
            let hire = 1.0 - (1.0 - p).powi(j as i32);
            expected += dist[j] * hire;
            next[j - 1] += dist[j] * hire;
            next[j] += dist[j] * (1.0 - hire);
        }
        std::mem::swap(&mut dist, &mut next);
    }
    expected
}

pub(crate) fn exact(instance: &Instance, a: &Assignment) -> Result<f64, ObjectiveError> {
    let mut total = 0.0;
    for g in groups(instance, a) {
        let m = g.probs.len();
        if m > MAX_EXACT_GROUP {
            return Err(ObjectiveError::OracleLimitExceeded {
                what: "interview group size",
                size: m,
                limit: MAX_EXACT_GROUP,
            });
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut order = Vec::with_capacity(m);
        for perm in (0..m).permutations(m) {
            order.clear();
            order.extend(perm.iter().map(|&i| g.probs[i]));
            sum += expected_in_order(g.jobs, &order);
            count += 1;
        }
        total += sum / count as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_order_expectation() {
        // one job, two applicants at p = 0.5: 0.5 + 0.5 * 0.5
        assert!((expected_in_order(1, &[0.5, 0.5]) - 0.75).abs() < 1e-15);
        // no jobs, nobody hired
        assert_eq!(expected_in_order(0, &[1.0, 1.0]), 0.0);
        // plenty of jobs, certain hires
        assert_eq!(expected_in_order(3, &[1.0, 1.0]), 2.0);
        // two jobs: 1-(1-p)^2 for the first applicant
        let p: f64 = 0.3;
        let first = 1.0 - (1.0 - p).powi(2);
        let second = first * p + (1.0 - first) * first;
        assert!((expected_in_order(2, &[p, p]) - (first + second)).abs() < 1e-15);
    }

    #[test]
    fn order_matters_and_is_averaged() {
        // single-job groups are order independent: P(at least one success) = 0.92
        let e1 = expected_in_order(1, &[0.2, 0.9]);
        let e2 = expected_in_order(1, &[0.9, 0.2]);
        assert!((e1 - e2).abs() < 1e-15);
        assert!((e1 - 0.92).abs() < 1e-15);
        // two jobs, three applicants: orders differ
        let a = expected_in_order(2, &[0.1, 0.9, 0.5]);
        let b = expected_in_order(2, &[0.9, 0.5, 0.1]);
        assert!((a - b).abs() > 1e-6);
    }
}
