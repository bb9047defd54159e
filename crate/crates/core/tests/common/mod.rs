//! Reference oracles shared by the integration and acceptance tests. They use
//! only the public instance/solution API and never call into the library's
//! evaluators, so agreement with them is a real cross-check.
#![allow(dead_code)]

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resettle::instance::{Instance, Locality, Migrant, ModelKind};
use resettle::solution::{is_feasible, Assignment};

/// Expected employment by full enumeration: every interview order of every
/// (locality, profession) group times every success/failure outcome.
pub fn interview_oracle(inst: &Instance, a: &Assignment) -> f64 {
    let mut total = 0.0;
    for l in 0..inst.num_localities() {
        for pi in 0..inst.num_professions() {
            let group: Vec<usize> = (0..inst.num_migrants())
                .filter(|&v| a.get(v, l) && inst.profession_of(v) == pi)
                .collect();
            if group.is_empty() {
                continue;
            }
            let jobs = inst.jobs(l, pi);
            let probs: Vec<f64> = group.iter().map(|&v| inst.interview_prob(v, l)).collect();
            let k = group.len();
            let mut sum = 0.0;
            let mut orders = 0usize;
            for order in (0..k).permutations(k) {
                orders += 1;
                for outcome in 0u32..(1 << k) {
                    // weight of this outcome pattern and number hired
                    let mut remaining = jobs;
                    let mut weight = 1.0;
                    let mut hired = 0;
                    for (step, &m) in order.iter().enumerate() {
                        let q = 1.0 - (1.0 - probs[m]).powi(remaining as i32);
                        if outcome >> step & 1 == 1 {
                            weight *= q;
                            if remaining > 0 {
                                remaining -= 1;
                                hired += 1;
                            }
                        } else {
                            weight *= 1.0 - q;
                        }
                    }
                    sum += weight * hired as f64;
                }
            }
            total += sum / orders as f64;
        }
    }
    total
}

/// Kuhn's augmenting-path matching on an adjacency list.
fn kuhn(adj: &[Vec<usize>], right: usize) -> usize {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                if owner[w].is_none_or(|o| augment(o, adj, seen, owner)) {
                    owner[w] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; right];
    (0..adj.len())
        .filter(|&u| augment(u, adj, &mut vec![false; right], &mut owner))
        .count()
}

/// Expected maximum matching by enumerating every subset of candidate edges,
/// including those with probability 0 or 1.
pub fn coordination_oracle(inst: &Instance, a: &Assignment) -> f64 {
    let mut total = 0.0;
    for l in 0..inst.num_localities() {
        let placed: Vec<usize> = (0..inst.num_migrants()).filter(|&v| a.get(v, l)).collect();
        let mut jobs = Vec::new();
        for pi in 0..inst.num_professions() {
            jobs.extend(std::iter::repeat_n(pi, inst.jobs(l, pi)));
        }
        let mut edges = Vec::new();
        for (i, &v) in placed.iter().enumerate() {
            for (j, &pi) in jobs.iter().enumerate() {
                let p = inst.coordination_prob(v, pi);
                if p > 0.0 {
                    edges.push((i, j, p));
                }
            }
        }
        assert!(edges.len() <= 16, "coordination oracle is limited to 16 edges");
        for mask in 0u32..(1 << edges.len()) {
            let mut weight = 1.0;
            let mut adj = vec![Vec::new(); placed.len()];
            for (k, &(i, j, p)) in edges.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    weight *= p;
                    adj[i].push(j);
                } else {
                    weight *= 1.0 - p;
                }
            }
            if weight > 0.0 {
                total += weight * kuhn(&adj, jobs.len()) as f64;
            }
        }
    }
    total
}

pub fn oracle(inst: &Instance, a: &Assignment) -> f64 {
    match inst.model() {
        ModelKind::Interview => interview_oracle(inst, a),
        ModelKind::Coordination => coordination_oracle(inst, a),
    }
}

/// Every feasible assignment, by enumerating one locality (or none) per migrant.
pub fn feasible_assignments(inst: &Instance) -> Vec<Assignment> {
    let (nv, nl) = (inst.num_migrants(), inst.num_localities());
    let mut out = Vec::new();
    for choice in (0..nv).map(|_| 0..=nl).multi_cartesian_product() {
        let pairs: Vec<(usize, usize)> =
            choice.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, &c)| (v, c - 1)).collect();
        let a = Assignment::from_pairs(nv, nl, &pairs);
        if is_feasible(inst, &a) {
            out.push(a);
        }
    }
    out
}

/// Best value over all feasible assignments under `f`.
pub fn brute_force_opt(inst: &Instance, f: impl Fn(&Assignment) -> f64) -> f64 {
    feasible_assignments(inst).iter().map(f).fold(0.0, f64::max)
}

/// A random tiny instance with arbitrary small capacities and job counts.
pub fn random_tiny(model: ModelKind, migrants: usize, localities: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let professions = rng.gen_range(1..=2);
    let ms: Vec<Migrant> = (0..migrants)
        .map(|id| Migrant { id, profession: rng.gen_range(0..professions) })
        .collect();
    let ls: Vec<Locality> = (0..localities)
        .map(|id| Locality {
            id,
            capacity: rng.gen_range(1..=3),
            jobs_by_profession: (0..professions).map(|_| rng.gen_range(0..=2)).collect(),
        })
        .collect();
    let probs = ms
        .iter()
        .map(|m| match model {
            ModelKind::Interview => (0..localities).map(|_| rng.gen::<f64>()).collect(),
            ModelKind::Coordination => {
                (0..professions).map(|p| if p == m.profession { rng.gen() } else { 0.0 }).collect()
            }
        })
        .collect();
    Instance::new(model, professions, ms, ls, probs).unwrap()
}

/// Number of probabilistic edges the coordination oracle would enumerate.
pub fn coordination_edges(inst: &Instance, a: &Assignment) -> usize {
    a.pairs()
        .map(|(v, l)| {
            let pi = inst.profession_of(v);
            if inst.coordination_prob(v, pi) > 0.0 { inst.jobs(l, pi) } else { 0 }
        })
        .sum()
}

/// Largest (locality, profession) interview group in `a`.
pub fn largest_group(inst: &Instance, a: &Assignment) -> usize {
    let mut counts = vec![0; inst.num_localities() * inst.num_professions()];
    for (v, l) in a.pairs() {
        counts[l * inst.num_professions() + inst.profession_of(v)] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}
