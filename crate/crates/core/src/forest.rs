//! Union-find, Kruskal's maximum spanning forest and forest orientation.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::scalar::Scalar;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false when they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// Kruskal's algorithm over weighted undirected edges on nodes `0..n_nodes`.
///
/// Edges are taken by descending weight, ties by ascending `(min, max)`
/// endpoint pair. Weights that agree up to rounding (see
/// [`Scalar::tie_tolerance`]) count as tied, so that mathematically equal
/// weights are ordered the same way whatever path computed them. Returns the
/// selected edges as `(min, max)` pairs in the order they were accepted.
/// Every connected component of the input graph is spanned.
pub fn max_spanning_forest<W: Scalar>(
    edges: &[(usize, usize, W)],
    n_nodes: usize,
) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize, W)> = edges
        .iter()
        .map(|&(i, j, w)| (i.min(j), i.max(j), w))
        .collect();
    order.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(Ordering::Equal)
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    // Runs of near-equal weights are re-sorted by endpoints alone.
    let tolerance = W::tie_tolerance();
    let mut start = 0;
    for k in 1..=order.len() {
        let breaks = k == order.len() || {
            let (prev, next) = (order[k - 1].2, order[k].2);
            let scale = W::one().max(prev.abs()).max(next.abs());
            prev - next > tolerance * scale
        };
        if breaks {
            order[start..k].sort_by_key(|e| (e.0, e.1));
            start = k;
        }
    }
    let mut sets = DisjointSet::new(n_nodes);
    let mut chosen = Vec::new();
    for (i, j, _) in order {
        if sets.union(i, j) {
            chosen.push((i, j));
        }
    }
    chosen
}

/// True when the undirected edges contain no cycle (and no self loop).
pub fn is_forest(edges: &[(usize, usize)], n_nodes: usize) -> bool {
    let mut sets = DisjointSet::new(n_nodes);
    edges.iter().all(|&(i, j)| i != j && sets.union(i, j))
}

/// Directs each tree of an undirected forest away from its lowest-index node.
///
/// Returns `(parent, child)` pairs in breadth-first order, trees taken by
/// ascending root and neighbours by ascending index.
pub fn orient_forest(edges: &[(usize, usize)], n_nodes: usize) -> Vec<(usize, usize)> {
    let mut adjacency = vec![Vec::new(); n_nodes];
    for &(i, j) in edges {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let mut visited = vec![false; n_nodes];
    let mut arcs = Vec::with_capacity(edges.len());
    let mut queue = VecDeque::new();
    for root in 0..n_nodes {
        if visited[root] || adjacency[root].is_empty() {
            continue;
        }
        visited[root] = true;
        queue.push_back(root);
        while let Some(node) = queue.pop_front() {
            for &next in &adjacency[node] {
                if !visited[next] {
                    visited[next] = true;
                    arcs.push((node, next));
                    queue.push_back(next);
                }
            }
        }
    }
    arcs
}
