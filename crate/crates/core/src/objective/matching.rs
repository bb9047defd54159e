//! Maximum-cardinality bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const NIL: usize = usize::MAX;
const INF: u32 = u32::MAX;

/// A bipartite graph given by its side sizes and an edge list `(left, right)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Self {
        for &(u, v) in &edges {
            assert!(u < left && v < right, "edge ({u}, {v}) out of range {left}x{right}");
        }
        BipartiteGraph { left, right, edges }
    }
}

/// Size of a maximum matching of `g`.
pub fn max_bipartite_matching(g: &BipartiteGraph) -> usize {
    let mut csr = CsrGraph::default();
    csr.reset(g.right);
    let mut by_left: Vec<Vec<usize>> = vec![Vec::new(); g.left];
    for &(u, v) in &g.edges {
        by_left[u].push(v);
    }
    for targets in by_left {
        csr.push_row(targets);
    }
    HopcroftKarp::default().solve(&csr)
}

/// Compressed adjacency rows, filled one left vertex at a time. Reused across
/// Monte-Carlo samples to avoid reallocating.
#[derive(Debug, Default, Clone)]
pub(crate) struct CsrGraph {
    pub(crate) right: usize,
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<usize>,
}

impl CsrGraph {
    pub(crate) fn reset(&mut self, right: usize) {
        self.right = right;
        self.offsets.clear();
        self.offsets.push(0);
        self.targets.clear();
    }

    pub(crate) fn push_row<I: IntoIterator<Item = usize>>(&mut self, row: I) {
        self.targets.extend(row);
        self.offsets.push(self.targets.len());
    }

    /// Adds a target to the row being built; close it with [`CsrGraph::end_row`].
    pub(crate) fn push_target(&mut self, v: usize) {
        self.targets.push(v);
    }

    pub(crate) fn end_row(&mut self) {
        self.offsets.push(self.targets.len());
    }

    fn left(&self) -> usize {
        self.offsets.len() - 1
    }

    fn row(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Hopcroft–Karp with reusable buffers.
#[derive(Debug, Default, Clone)]
pub(crate) struct HopcroftKarp {
    match_left: Vec<usize>,
    match_right: Vec<usize>,
    dist: Vec<u32>,
    cursor: Vec<usize>,
    queue: VecDeque<usize>,
}

impl HopcroftKarp {
    pub(crate) fn solve(&mut self, g: &CsrGraph) -> usize {
        let left = g.left();
        self.match_left.clear();
        self.match_left.resize(left, NIL);
        self.match_right.clear();
        self.match_right.resize(g.right, NIL);
        self.dist.clear();
        self.dist.resize(left, INF);
        self.cursor.clear();
        self.cursor.resize(left, 0);

        let mut size = 0;
        // Greedy warm start.
        for u in 0..left {
            if let Some(&v) = g.row(u).iter().find(|&&v| self.match_right[v] == NIL) {
                self.match_left[u] = v;
                self.match_right[v] = u;
                size += 1;
            }
        }
        while self.bfs(g) {
            for u in 0..left {
                self.cursor[u] = 0;
            }
            for u in 0..left {
                if self.match_left[u] == NIL && self.dfs(g, u) {
                    size += 1;
                }
            }
        }
        size
    }

    fn bfs(&mut self, g: &CsrGraph) -> bool {
        self.queue.clear();
        for u in 0..g.left() {
            if self.match_left[u] == NIL {
                self.dist[u] = 0;
                self.queue.push_back(u);
            } else {
                self.dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = self.queue.pop_front() {
            for &v in g.row(u) {
                let w = self.match_right[v];
                if w == NIL {
                    found = true;
                } else if self.dist[w] == INF {
                    self.dist[w] = self.dist[u] + 1;
                    self.queue.push_back(w);
                }
            }
        }
        found
    }

    fn dfs(&mut self, g: &CsrGraph, u: usize) -> bool {
        let row = g.offsets[u]..g.offsets[u + 1];
        while self.cursor[u] < row.len() {
            let v = g.targets[row.start + self.cursor[u]];
            self.cursor[u] += 1;
            let w = self.match_right[v];
            let advance = w == NIL || (self.dist[w] == self.dist[u] + 1 && self.dfs(g, w));
            if advance {
                self.match_left[u] = v;
                self.match_right[v] = u;
                return true;
            }
        }
        self.dist[u] = INF;
        false
    }
}
