//! Social graphs and hop-count distances.
//!
//! A [`SocialGraph`] is immutable once built and carries its all-pairs
//! distance matrix, so it can be shared freely between replicate workers.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Domain, Streams};

/// Attempts made by [`gen_small_world`] before giving up on connectivity.
pub const MAX_CONNECT_ATTEMPTS: u64 = 100;

/// Dense matrix of shortest-path hop counts. `None` marks an unreachable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    hops: Vec<u32>,
}

impl DistanceMatrix {
    const UNREACHABLE: u32 = u32::MAX;

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match self.hops[i * self.n + j] {
            Self::UNREACHABLE => None,
            h => Some(h),
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = Option<u32>> + '_ {
        self.hops[i * self.n..(i + 1) * self.n]
            .iter()
            .map(|&h| (h != Self::UNREACHABLE).then_some(h))
    }

    /// Ordered pairs `(i, j)` with no path between them.
    pub fn unreachable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.hops[i * self.n + j] == Self::UNREACHABLE {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        !self.hops.contains(&Self::UNREACHABLE)
    }
}

/// Hop-count shortest paths by one breadth-first traversal per source.
pub fn all_pairs_distance(adjacency: &[Vec<usize>]) -> DistanceMatrix {
    let n = adjacency.len();
    let mut hops = vec![DistanceMatrix::UNREACHABLE; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for src in 0..n {
        let row = &mut hops[src * n..(src + 1) * n];
        row[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let next = row[u] + 1;
            for &v in &adjacency[u] {
                if row[v] == DistanceMatrix::UNREACHABLE {
                    row[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }
    DistanceMatrix { n, hops }
}

/// Undirected, unweighted, connected graph of agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<Vec<usize>>,
    distance: DistanceMatrix,
}

impl SocialGraph {
    /// Build from an edge list. Rejects self-loops, out-of-range ids and
    /// disconnected graphs; duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "graph needs at least one node"));
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::param("edges", format!("edge ({a}, {b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::param("edges", format!("self-loop on node {a}")));
            }
            sets[a].insert(b);
            sets[b].insert(a);
        }
        Self::from_sets(sets)
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        let adjacency: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let distance = all_pairs_distance(&adjacency);
        let bad = distance.unreachable_pairs();
        if let Some(&first) = bad.first() {
            return Err(Error::Disconnected {
                count: bad.len(),
                first,
            });
        }
        Ok(SocialGraph {
            adjacency,
            distance,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sorted neighbours of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distance
    }

    /// Hop count between two agents. Always finite for a constructed graph.
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.distance
            .get(i, j)
            .expect("SocialGraph is connected by construction")
    }

    /// Edges as `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Mean hop count over distinct ordered pairs.
    pub fn mean_path_length(&self) -> f64 {
        let n = self.node_count();
        if n < 2 {
            return 0.0;
        }
        let total: u64 = (0..n)
            .flat_map(|i| self.distance.row(i).map(|h| u64::from(h.unwrap_or(0))))
            .sum();
        total as f64 / (n * (n - 1)) as f64
    }

    pub fn to_document(&self, center: Option<usize>) -> GraphDocument {
        GraphDocument {
            n: self.node_count(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            center,
        }
    }
}

/// Star graph: node `center` joined to every other node, no other edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarGraph {
    center: usize,
    graph: SocialGraph,
}

impl StarGraph {
    /// Wrap an existing graph, checking it really is a star around `center`.
    pub fn from_graph(graph: SocialGraph, center: usize) -> Result<Self> {
        let n = graph.node_count();
        if center >= n {
            return Err(Error::param("center", format!("{center} out of range for n={n}")));
        }
        let ok = graph.degree(center) == n - 1
            && (0..n).filter(|&v| v != center).all(|v| graph.neighbors(v) == [center]);
        if !ok {
            return Err(Error::param("center", format!("graph is not a star around node {center}")));
        }
        Ok(StarGraph { center, graph })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn into_graph(self) -> SocialGraph {
        self.graph
    }
}

/// Watts–Strogatz small-world graph, regenerated until connected.
///
/// Attempt `a` uses the sub-stream `(seed, Graph, a)`; up to
/// [`MAX_CONNECT_ATTEMPTS`] attempts are made.
pub fn gen_small_world(n: usize, k: usize, p_rewire: f64, seed: u64) -> Result<SocialGraph> {
    if n < 3 {
        return Err(Error::param("n", format!("small-world graph needs n >= 3, got {n}")));
    }
    if !k.is_multiple_of(2) || k < 2 || k >= n {
        return Err(Error::param("k", format!("need even k with 2 <= k < n, got k={k}, n={n}")));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::param("p_rewire", format!("must lie in [0, 1], got {p_rewire}")));
    }
    let streams = Streams::new(seed);
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let mut rng = streams.rng(Domain::Graph, 0, attempt);
        let sets = watts_strogatz_sets(n, k, p_rewire, &mut rng);
        match SocialGraph::from_sets(sets) {
            Ok(g) => return Ok(g),
            Err(Error::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation(format!(
        "no connected small-world graph (n={n}, k={k}, p={p_rewire}) in {MAX_CONNECT_ATTEMPTS} attempts"
    )))
}

fn watts_strogatz_sets(n: usize, k: usize, p: f64, rng: &mut impl Rng) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            sets[u].insert(v);
            sets[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.gen::<f64>() >= p {
                continue;
            }
            // edge may already have been rewired away from the other endpoint
            if !sets[u].contains(&v) || sets[u].len() >= n - 1 {
                continue;
            }
            let candidates: Vec<usize> = (0..n).filter(|&w| w != u && !sets[u].contains(&w)).collect();
            let w = candidates[rng.gen_range(0..candidates.len())];
            sets[u].remove(&v);
            sets[v].remove(&u);
            sets[u].insert(w);
            sets[w].insert(u);
        }
    }
    sets
}

pub fn gen_star(n: usize) -> Result<StarGraph> {
    if n < 2 {
        return Err(Error::param("n", format!("star graph needs n >= 2, got {n}")));
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|j| (0, j)).collect();
    let graph = SocialGraph::from_edges(n, &edges)?;
    Ok(StarGraph { center: 0, graph })
}

/// Mean hop count from agent `i` to the members of `members`.
///
/// `i` may itself be a member, in which case its zero self-distance is part
/// of the mean. Returns `None` for an empty set or an unreachable member.
pub fn community_distance(dm: &DistanceMatrix, i: usize, members: &[usize]) -> Option<f64> {
    if members.is_empty() {
        return None;
    }
    let mut total = 0u64;
    for &j in members {
        total += u64::from(dm.get(i, j)?);
    }
    Some(total as f64 / members.len() as f64)
}

/// On-disk graph format: `{"n": int, "edges": [[i, j], ...], "center": int|null}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub center: Option<usize>,
}

impl GraphDocument {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn into_graph(self) -> Result<(SocialGraph, Option<usize>)> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = SocialGraph::from_edges(self.n, &edges)?;
        if let Some(c) = self.center {
            let star = StarGraph::from_graph(g, c)?;
            return Ok((star.into_graph(), Some(c)));
        }
        Ok((g, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_metric(g: &SocialGraph) {
        let n = g.node_count();
        let d = g.distances();
        for i in 0..n {
            assert_eq!(d.get(i, i), Some(0));
            for j in 0..n {
                assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..n {
                    assert!(g.distance(i, k) <= g.distance(i, j) + g.distance(j, k));
                }
            }
        }
    }

    #[test]
    fn lattice_without_rewiring() {
        let g = gen_small_world(50, 4, 0.0, 11).unwrap();
        assert!((0..50).all(|i| g.degree(i) == 4));
        assert_eq!(g.edge_count(), 100);
        assert!(g.has_edge(0, 49) && g.has_edge(0, 48) && g.has_edge(0, 2));
        assert!(g.distances().is_connected());
    }

    #[test]
    fn rewired_graph_keeps_edge_count() {
        for seed in 0..20 {
            let g = gen_small_world(50, 4, 0.3, seed).unwrap();
            assert_eq!(g.edge_count(), 100);
            assert!(g.distances().is_connected());
            assert!((0..50).all(|i| !g.has_edge(i, i)));
        }
    }

    #[test]
    fn full_rewiring_shortens_paths() {
        let lattice = gen_small_world(50, 4, 0.0, 0).unwrap();
        for seed in 0..10 {
            let g = gen_small_world(50, 4, 1.0, seed).unwrap();
            assert!(g.mean_path_length() < lattice.mean_path_length());
        }
    }

    #[test]
    fn small_world_parameter_errors() {
        assert!(matches!(gen_small_world(2, 2, 0.1, 0), Err(Error::Parameter { field: "n", .. })));
        assert!(matches!(gen_small_world(10, 3, 0.1, 0), Err(Error::Parameter { field: "k", .. })));
        assert!(matches!(gen_small_world(10, 10, 0.1, 0), Err(Error::Parameter { field: "k", .. })));
        assert!(matches!(gen_small_world(10, 4, 1.5, 0), Err(Error::Parameter { field: "p_rewire", .. })));
    }

    #[test]
    fn small_world_is_reproducible() {
        let a = gen_small_world(60, 6, 0.3, 99).unwrap();
        let b = gen_small_world(60, 6, 0.3, 99).unwrap();
        assert_eq!(a, b);
        let c = gen_small_world(60, 6, 0.3, 100).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn generated_graphs_are_metric() {
        assert_metric(&gen_small_world(40, 4, 0.3, 5).unwrap());
        assert_metric(gen_star(9).unwrap().graph());
    }

    #[test]
    fn star_shapes() {
        let s2 = gen_star(2).unwrap();
        assert_eq!(s2.graph().edge_count(), 1);
        assert_eq!(s2.graph().distance(0, 1), 1);
        assert_eq!(s2.graph().distance(1, 0), 1);

        let s5 = gen_star(5).unwrap();
        assert_eq!(s5.center(), 0);
        assert_eq!(s5.graph().distance(1, 3), 2);
        assert_eq!(s5.graph().distance(0, 4), 1);
        let row: Vec<_> = s5.graph().distances().row(0).map(Option::unwrap).collect();
        assert_eq!(row, vec![0, 1, 1, 1, 1]);

        let mut degrees: Vec<usize> = (0..5).map(|i| s5.graph().degree(i)).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 1, 4]);

        assert!(matches!(gen_star(1), Err(Error::Parameter { .. })));
    }

    #[test]
    fn path_distance() {
        let dm = all_pairs_distance(&[vec![1], vec![0, 2], vec![1]]);
        assert_eq!(dm.get(0, 2), Some(2));
    }

    #[test]
    fn disconnected_pairs_reported() {
        let dm = all_pairs_distance(&[vec![1], vec![0], vec![]]);
        assert!(!dm.is_connected());
        assert_eq!(dm.unreachable_pairs(), vec![(0, 2), (1, 2), (2, 0), (2, 1)]);
        assert!(matches!(
            SocialGraph::from_edges(3, &[(0, 1)]),
            Err(Error::Disconnected { count: 4, .. })
        ));
    }

    #[test]
    fn rejects_self_loops() {
        assert!(SocialGraph::from_edges(3, &[(0, 1), (1, 1), (1, 2)]).is_err());
    }

    #[test]
    fn community_distances_on_star() {
        let s = gen_star(5).unwrap();
        let dm = s.graph().distances();
        assert_eq!(community_distance(dm, 1, &[0]), Some(1.0));
        assert_eq!(community_distance(dm, 1, &[2, 3, 4]), Some(2.0));
        assert_eq!(community_distance(dm, 1, &[0, 2]), Some(1.5));
        // own zero distance counts
        assert_eq!(community_distance(dm, 1, &[1, 2]), Some(1.0));
        assert_eq!(community_distance(dm, 1, &[]), None);
    }

    #[test]
    fn singleton_community_distance_is_pair_distance() {
        let g = gen_small_world(30, 4, 0.3, 3).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(
                    community_distance(g.distances(), i, &[j]),
                    Some(f64::from(g.distance(i, j)))
                );
            }
        }
    }

    #[test]
    fn json_is_sorted_and_reloads() {
        let g = gen_small_world(12, 4, 0.5, 8).unwrap();
        let doc = g.to_document(None);
        assert!(doc.edges.windows(2).all(|w| w[0] < w[1]));
        assert!(doc.edges.iter().all(|e| e[0] < e[1]));
        let text = doc.to_json().unwrap();
        let (back, center) = GraphDocument::from_json(&text).unwrap().into_graph().unwrap();
        assert_eq!(back, g);
        assert_eq!(center, None);

        let star = gen_star(4).unwrap();
        let text = star.graph().to_document(Some(0)).to_json().unwrap();
        assert_eq!(text, "{\"n\":4,\"edges\":[[0,1],[0,2],[0,3]],\"center\":0}\n");
        let (_, center) = GraphDocument::from_json(&text).unwrap().into_graph().unwrap();
        assert_eq!(center, Some(0));
    }

    #[test]
    fn json_rejects_false_center() {
        let g = gen_small_world(10, 4, 0.0, 0).unwrap();
        assert!(g.to_document(Some(0)).into_graph().is_err());
    }
}
