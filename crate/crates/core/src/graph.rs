//! Undirected simple graphs and breadth-first distance profiles.
//!
//! Nodes are the contiguous integers `0..n`. A [`Graph`] is immutable after
//! construction and stores its adjacency in compressed rows with every
//! neighbor list sorted ascending, so iteration order is deterministic.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = usize;

const UNVISITED: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds the canonical graph on `n` nodes from an edge list.
    ///
    /// Edges are unordered; `(u, v)` and `(v, u)` are the same edge and
    /// repeats are collapsed. Self-loops and out-of-range ids are rejected.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("node count {n} too large")));
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_canonical_pairs(n, &pairs))
    }

    /// `pairs` must be sorted, deduplicated, in range and satisfy `u < v`.
    pub(crate) fn from_canonical_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; 2 * pairs.len()];
        // Sorted (u, v) with u < v fills every row in ascending order: a row
        // first receives its smaller neighbors (as v), then its larger ones.
        let mut by_second: Vec<(NodeId, NodeId)> = pairs.iter().map(|&(u, v)| (v, u)).collect();
        by_second.sort_unstable();
        for &(v, u) in &by_second {
            targets[cursor[v]] = u as u32;
            cursor[v] += 1;
        }
        for &(u, v) in pairs {
            targets[cursor[u]] = v as u32;
            cursor[u] += 1;
        }
        Graph { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, node: NodeId) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as NodeId)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u as NodeId) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        reached == n
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Result<Vec<Option<u32>>> {
        self.check_node(source)?;
        let mut scratch = BfsScratch::new(self.node_count());
        scratch.run(self, source);
        Ok(scratch
            .dist
            .iter()
            .map(|&d| (d != UNVISITED).then_some(d))
            .collect())
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        let n = self.node_count();
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
        Ok(())
    }
}

/// Number of nodes at each geodesic distance from one node.
///
/// `counts[l - 1]` is the number of nodes at distance exactly `l`; the
/// vector always has length `n - 1`, padded with trailing zeros past the
/// node's eccentricity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DistanceProfile {
    pub node: NodeId,
    pub counts: Vec<u32>,
}

impl DistanceProfile {
    pub fn new(node: NodeId, counts: Vec<u32>) -> Self {
        DistanceProfile { node, counts }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.counts.first().copied().unwrap_or(0)
    }

    /// Sum of geodesic distances to all other nodes.
    pub fn farness(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(l, &c)| (l as u64 + 1) * c as u64)
            .sum()
    }

    /// Largest distance with a nonzero count (0 for a single node).
    pub fn eccentricity(&self) -> usize {
        self.counts.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1)
    }

    pub fn reached(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// Reusable BFS buffers; one per worker.
pub(crate) struct BfsScratch {
    dist: Vec<u32>,
    queue: VecDeque<u32>,
}

impl BfsScratch {
    pub(crate) fn new(n: usize) -> Self {
        BfsScratch {
            dist: vec![UNVISITED; n],
            queue: VecDeque::with_capacity(n),
        }
    }

    fn run(&mut self, g: &Graph, source: NodeId) {
        self.dist.clear();
        self.dist.resize(g.node_count(), UNVISITED);
        self.queue.clear();
        self.dist[source] = 0;
        self.queue.push_back(source as u32);
        while let Some(u) = self.queue.pop_front() {
            let next = self.dist[u as usize] + 1;
            for &v in g.neighbors(u as NodeId) {
                if self.dist[v as usize] == UNVISITED {
                    self.dist[v as usize] = next;
                    self.queue.push_back(v);
                }
            }
        }
    }

    pub(crate) fn profile(&mut self, g: &Graph, source: NodeId) -> Result<DistanceProfile> {
        self.run(g, source);
        let n = g.node_count();
        let mut counts = vec![0u32; n.saturating_sub(1)];
        for (v, &d) in self.dist.iter().enumerate() {
            if v == source {
                continue;
            }
            if d == UNVISITED {
                return Err(Error::Disconnected);
            }
            counts[d as usize - 1] += 1;
        }
        Ok(DistanceProfile::new(source, counts))
    }
}

/// Distance profile of node `i` in a connected graph.
pub fn distance_profile(g: &Graph, i: NodeId) -> Result<DistanceProfile> {
    g.check_node(i)?;
    BfsScratch::new(g.node_count()).profile(g, i)
}

/// Profiles of every node, in node order. One BFS per node.
pub fn all_profiles(g: &Graph) -> Result<Vec<DistanceProfile>> {
    let mut scratch = BfsScratch::new(g.node_count());
    (0..g.node_count()).map(|i| scratch.profile(g, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn builds_path_and_star() {
        let g = p3();
        assert_eq!((0..3).map(|i| g.degree(i)).collect::<Vec<_>>(), [1, 2, 1]);
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree(0), 3);
        assert_eq!(star.edge_count(), 3);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::new(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g, p3());
    }

    #[test]
    fn neighbor_lists_are_sorted_and_symmetric() {
        let g = Graph::new(5, &[(4, 0), (2, 0), (0, 3), (1, 0), (3, 2)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2, 3, 4]);
        assert_eq!(g.neighbors(3), &[0, 2]);
        for (u, v) in g.edges() {
            assert!(g.has_edge(u, v) && g.has_edge(v, u));
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::new(3, &[(0, 3)]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        );
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(Error::SelfLoop(1)));
    }

    #[test]
    fn connectivity() {
        assert!(p3().is_connected());
        assert!(!Graph::new(4, &[(0, 1), (2, 3)]).unwrap().is_connected());
        assert!(Graph::new(1, &[]).unwrap().is_connected());
        assert!(Graph::new(0, &[]).unwrap().is_connected());
    }

    #[test]
    fn path_profiles() {
        let g = p3();
        assert_eq!(distance_profile(&g, 0).unwrap().counts, [1, 1]);
        assert_eq!(distance_profile(&g, 1).unwrap().counts, [2, 0]);
        let all: Vec<_> = all_profiles(&g).unwrap().into_iter().map(|p| p.counts).collect();
        assert_eq!(all, [vec![1, 1], vec![2, 0], vec![1, 1]]);
    }

    #[test]
    fn star_profiles() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let all: Vec<_> = all_profiles(&g).unwrap().into_iter().map(|p| p.counts).collect();
        assert_eq!(
            all,
            [vec![3, 0, 0], vec![1, 2, 0], vec![1, 2, 0], vec![1, 2, 0]]
        );
    }

    #[test]
    fn five_cycle_matches_floyd_warshall() {
        let g = cycle(5);
        // Floyd-Warshall on the 5-cycle.
        let n = 5;
        let inf = u32::MAX / 2;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        for i in 0..n {
            let mut counts = vec![0u32; n - 1];
            for j in 0..n {
                if j != i {
                    counts[d[i][j] as usize - 1] += 1;
                }
            }
            assert_eq!(counts, [2, 2, 0, 0]);
            assert_eq!(distance_profile(&g, i).unwrap().counts, counts);
        }
    }

    #[test]
    fn disconnected_profile_is_an_error() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(distance_profile(&g, 0), Err(Error::Disconnected));
        assert_eq!(all_profiles(&g), Err(Error::Disconnected));
        let d = g.bfs_distances(0).unwrap();
        assert_eq!(d, [Some(0), Some(1), None, None]);
    }

    #[test]
    fn profile_summaries() {
        let p = DistanceProfile::new(0, vec![1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.farness(), 5);
        assert_eq!(p.eccentricity(), 2);
        assert_eq!(p.reached(), 3);
    }
}
