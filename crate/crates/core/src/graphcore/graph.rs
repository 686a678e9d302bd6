use std::collections::VecDeque;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Simple connected undirected graph on vertices `0..n`.
///
/// Edges keep their insertion index, which doubles as the fixed tie-break
/// order used by the spreading processes. Adjacency is stored in CSR form
/// as `(neighbor, edge index)` pairs, sorted by edge index per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    incidence: Vec<(u32, u32)>,
}

impl Graph {
    /// Validates that the edge list describes a simple connected graph.
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let g = Self::build(n, edges)?;
        if !g.is_connected() {
            return Err(Error::structural("graph is not connected"));
        }
        Ok(g)
    }

    fn build(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::structural("graph needs at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(Error::resource("vertex count exceeds u32 range"));
        }
        let mut keys = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::structural(format!(
                    "edge {i} = ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::structural(format!("edge {i} is a self-loop at {u}")));
            }
            keys.push(((u.min(v) as u64) << 32) | u.max(v) as u64);
        }
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::structural(format!(
                "duplicate edge ({}, {})",
                w[0] >> 32,
                w[0] & 0xffff_ffff
            )));
        }
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut incidence = vec![(0u32, 0u32); 2 * edges.len()];
        for (i, &(u, v)) in edges.iter().enumerate() {
            incidence[fill[u as usize]] = (v, i as u32);
            fill[u as usize] += 1;
            incidence[fill[v as usize]] = (u, i as u32);
            fill[v as usize] += 1;
        }
        Ok(Graph {
            n,
            edges,
            offsets,
            incidence,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    /// The endpoint of edge `e` that is not `v`.
    pub fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edge(e);
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbor, edge index)` pairs at `v`.
    pub fn incident(&self, v: usize) -> &[(u32, u32)] {
        &self.incidence[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident(v).iter().map(|&(w, _)| w as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).any(|w| w == b)
    }

    pub(crate) fn is_connected(&self) -> bool {
        self.component_of(0).len() == self.n
    }

    /// Vertices reachable from `start`, in BFS order.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut order = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Subgraph induced by `keep`, relabelled so that `keep[i]` becomes `i`.
    ///
    /// Edges keep their relative order. Fails if the result is disconnected.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut label = vec![u32::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            label[v] = i as u32;
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                let (a, b) = (label[u as usize], label[v as usize]);
                (a != u32::MAX && b != u32::MAX).then_some((a, b))
            })
            .collect();
        Graph::new(keep.len(), edges)
    }

    /// Attaches a root.
    pub fn rooted(self, root: usize) -> Result<RootedGraph> {
        RootedGraph::from_graph(Arc::new(self), root)
    }
}

/// A [`Graph`] with a distinguished root vertex.
///
/// The underlying graph is shared, so re-rooting is cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    graph: Arc<Graph>,
    root: usize,
}

impl RootedGraph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>, root: usize) -> Result<Self> {
        Graph::new(n, edges)?.rooted(root)
    }

    pub fn from_graph(graph: Arc<Graph>, root: usize) -> Result<Self> {
        if root >= graph.n() {
            return Err(Error::structural(format!(
                "root {root} outside 0..{}",
                graph.n()
            )));
        }
        Ok(RootedGraph { graph, root })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    /// Same graph, different root.
    pub fn with_root(&self, root: usize) -> Result<Self> {
        Self::from_graph(Arc::clone(&self.graph), root)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize, root: usize) -> Result<Self> {
        let edges = (1..n as u32).map(|i| (i - 1, i)).collect();
        Self::new(n, edges, root)
    }

    /// Cycle on `n ≥ 3` vertices.
    pub fn cycle(n: usize, root: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("a cycle needs at least 3 vertices"));
        }
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        edges.push((n as u32 - 1, 0));
        Self::new(n, edges, root)
    }

    /// Star with center 0 and leaves `1..n`.
    pub fn star(n: usize, root: usize) -> Result<Self> {
        let edges = (1..n as u32).map(|i| (0, i)).collect();
        Self::new(n, edges, root)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize, root: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Self::new(n, edges, root)
    }
}

impl Deref for RootedGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_graphs() {
        assert!(matches!(Graph::new(3, vec![(0, 1)]), Err(Error::Structural(_))));
        assert!(Graph::new(2, vec![(0, 0), (0, 1)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
        assert!(Graph::new(0, vec![]).is_err());
        assert!(RootedGraph::path(3, 3).is_err());
    }

    #[test]
    fn adjacency_in_edge_order() {
        let g = RootedGraph::star(5, 0).unwrap();
        let edges: Vec<u32> = g.incident(0).iter().map(|p| p.1).collect();
        assert_eq!(edges, vec![0, 1, 2, 3]);
        assert_eq!(g.degree(0), 4);
        assert!(g.has_edge(3, 0));
        assert!(!g.has_edge(3, 2));
        assert_eq!(g.other(2, 0), 3);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = RootedGraph::cycle(5, 0).unwrap();
        let h = g.induced(&[1, 2, 3]).unwrap();
        assert_eq!(h.edges(), &[(0, 1), (1, 2)]);
        assert!(g.induced(&[0, 2]).is_err());
    }

    #[test]
    fn single_vertex_graph() {
        let g = RootedGraph::new(1, vec![], 0).unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(g.component_of(0), vec![0]);
    }
}
