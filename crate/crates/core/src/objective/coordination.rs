//! Coordination model: at each locality, every assigned migrant is linked to
//! every local job independently with the migrant's probability for the job's
//! profession; the employed count is the size of a maximum matching.

use rand::Rng;

use super::matching::{CsrGraph, HopcroftKarp};
use super::ObjectiveError;
use crate::instance::Instance;
use crate::solution::Assignment;

/// Largest number of uncertain edges per locality the exact oracle enumerates.
pub const MAX_EXACT_FREE_EDGES: usize = 20;

/// Potential edges of one locality's graph: for each assigned migrant, the
/// `(job index, probability)` pairs with non-zero probability.
#[derive(Debug, Clone)]
pub(crate) struct LocalGraph {
    jobs: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

pub(crate) fn local_graphs(instance: &Instance, a: &Assignment) -> Vec<LocalGraph> {
    let nl = instance.num_localities();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); nl];
    for (v, l) in a.pairs() {
        assigned[l].push(v);
    }
    let mut out = Vec::new();
    for (l, migrants) in assigned.into_iter().enumerate() {
        let loc = &instance.localities()[l];
        let total = loc.total_jobs();
        if migrants.is_empty() || total == 0 {
            continue;
        }
        let job_professions: Vec<usize> = loc
            .jobs_by_profession
            .iter()
            .enumerate()
            .flat_map(|(p, &c)| std::iter::repeat_n(p, c))
            .collect();
        let rows = migrants
            .iter()
            .map(|&v| {
                job_professions
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &p)| {
                        let prob = instance.coordination_prob(v, p);
                        (prob > 0.0).then_some((j, prob))
                    })
                    .collect()
            })
            .collect();
        out.push(LocalGraph { jobs: total, rows });
    }
    out
}

#[derive(Debug, Default, Clone)]
pub(crate) struct MatchingScratch {
    graph: CsrGraph,
    matcher: HopcroftKarp,
}

pub(crate) fn sample_graphs<R: Rng + ?Sized>(
    graphs: &[LocalGraph],
    scratch: &mut MatchingScratch,
    rng: &mut R,
) -> usize {
    let mut employed = 0;
    for g in graphs {
        scratch.graph.reset(g.jobs);
        for row in &g.rows {
            for &(j, p) in row {
                if p >= 1.0 || rng.gen::<f64>() < p {
                    scratch.graph.push_target(j);
                }
            }
            scratch.graph.end_row();
        }
        employed += scratch.matcher.solve(&scratch.graph);
    }
    employed
}

/// One realization of the number of employed migrants under the coordination model.
pub fn coordination_sample<R: Rng + ?Sized>(instance: &Instance, a: &Assignment, rng: &mut R) -> usize {
    let gs = local_graphs(instance, a);
    sample_graphs(&gs, &mut MatchingScratch::default(), rng)
}

pub(crate) fn exact(instance: &Instance, a: &Assignment) -> Result<f64, ObjectiveError> {
    let mut total = 0.0;
    let mut scratch = MatchingScratch::default();
    for g in local_graphs(instance, a) {
        // (row, job) of every edge whose presence is uncertain
        let free: Vec<(usize, usize, f64)> = g
            .rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(|e| e.1 < 1.0).map(move |&(j, p)| (u, j, p)))
            .collect();
        if free.len() > MAX_EXACT_FREE_EDGES {
            return Err(ObjectiveError::OracleLimitExceeded {
                what: "uncertain edges at one locality",
                size: free.len(),
                limit: MAX_EXACT_FREE_EDGES,
            });
        }
        let mut expected = 0.0;
        for mask in 0u64..(1u64 << free.len()) {
            let mut prob = 1.0;
            for (k, &(_, _, p)) in free.iter().enumerate() {
                prob *= if mask >> k & 1 == 1 { p } else { 1.0 - p };
            }
            if prob == 0.0 {
                continue;
            }
            scratch.graph.reset(g.jobs);
            let mut k = 0;
            for (u, row) in g.rows.iter().enumerate() {
                for &(j, p) in row {
                    if p >= 1.0 {
                        scratch.graph.push_target(j);
                    } else {
                        debug_assert_eq!((free[k].0, free[k].1), (u, j));
                        if mask >> k & 1 == 1 {
                            scratch.graph.push_target(j);
                        }
                        k += 1;
                    }
                }
                scratch.graph.end_row();
            }
            expected += prob * scratch.matcher.solve(&scratch.graph) as f64;
        }
        total += expected;
    }
    Ok(total)
}
