//! Additive baseline: score every migrant-locality pair on its own, then solve
//! the maximum-weight assignment exactly as a min-cost flow.

use std::collections::VecDeque;

use super::{SolverConfig, SolverError, SolverResult, TracePoint};
use crate::instance::Instance;
use crate::objective::Evaluator;
use crate::solution::Assignment;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: usize,
    cap: usize,
    cost: f64,
}

#[derive(Debug, Default)]
struct FlowGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds an arc and its residual twin; returns the arc id.
    fn add(&mut self, from: usize, to: usize, cap: usize, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge { to: from, cap: 0, cost: -cost });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Shortest path by label-correcting search; returns `(cost, arc per node)`.
    fn shortest_path(&self, s: usize, t: usize) -> Option<(f64, Vec<usize>)> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![usize::MAX; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        dist[s] = 0.0;
        queue.push_back(s);
        queued[s] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &id in &self.adj[u] {
                let e = self.edges[id];
                if e.cap > 0 && dist[u] + e.cost < dist[e.to] - EPS {
                    dist[e.to] = dist[u] + e.cost;
                    via[e.to] = id;
                    if !queued[e.to] {
                        queued[e.to] = true;
                        queue.push_back(e.to);
                    }
                }
            }
        }
        dist[t].is_finite().then_some((dist[t], via))
    }
}

/// Maximum-weight assignment with at most one locality per migrant and at most
/// `capacities[l]` migrants per locality. `weights` is row-major, migrants by
/// localities; pairs with non-positive weight are never selected.
pub fn max_weight_assignment(weights: &[f64], migrants: usize, capacities: &[usize]) -> Assignment {
    let localities = capacities.len();
    assert_eq!(weights.len(), migrants * localities, "weight matrix shape");
    let source = 0;
    let sink = migrants + localities + 1;
    let mut g = FlowGraph::new(sink + 1);
    for v in 0..migrants {
        g.add(source, 1 + v, 1, 0.0);
    }
    let mut pair_arcs = Vec::new();
    for v in 0..migrants {
        for l in 0..localities {
            let w = weights[v * localities + l];
            if w > 0.0 && capacities[l] > 0 {
                pair_arcs.push((g.add(1 + v, 1 + migrants + l, 1, -w), v, l));
            }
        }
    }
    for (l, &cap) in capacities.iter().enumerate() {
        g.add(1 + migrants + l, sink, cap, 0.0);
    }

    // Path costs are non-decreasing across augmentations, so stopping at the
    // first non-negative one gives the minimum over all flow values.
    while let Some((cost, via)) = g.shortest_path(source, sink) {
        if cost >= -EPS {
            break;
        }
        let mut node = sink;
        while node != source {
            let id = via[node];
            g.edges[id].cap -= 1;
            g.edges[id ^ 1].cap += 1;
            node = g.edges[id ^ 1].to;
        }
    }

    let mut a = Assignment::empty(migrants, localities);
    for (id, v, l) in pair_arcs {
        if g.edges[id].cap == 0 {
            a.set(v, l, true);
        }
    }
    a
}

pub(super) fn additive(
    instance: &Instance,
    evaluator: &mut Evaluator,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    let (m, nl) = (instance.num_migrants(), instance.num_localities());
    let needed = (m * nl) as u64;
    if config.budget < needed {
        return Err(SolverError::BudgetExhausted {
            needed,
            budget: config.budget,
        });
    }
    let start = evaluator.evaluations();
    let capacities: Vec<usize> = (0..nl).map(|l| instance.capacity(l)).collect();
    let mut weights = vec![0.0; m * nl];
    for v in 0..m {
        for l in 0..nl {
            // a singleton at a zero-capacity locality is infeasible and worth nothing
            if capacities[l] > 0 {
                let single = Assignment::from_pairs(m, nl, &[(v, l)]);
                weights[v * nl + l] = evaluator.estimate(instance, &single)?;
            }
        }
    }
    let best = max_weight_assignment(&weights, m, &capacities);
    let f1 = if evaluator.evaluations() - start < config.budget {
        evaluator.estimate(instance, &best)?
    } else {
        best.pairs().map(|(v, l)| weights[v * nl + l]).sum()
    };
    let evaluations_used = evaluator.evaluations() - start;
    Ok(SolverResult {
        best,
        best_f1_in_run: f1,
        evaluations_used,
        trace: vec![TracePoint { evaluations: evaluations_used, best_f1: f1 }],
    })
}
