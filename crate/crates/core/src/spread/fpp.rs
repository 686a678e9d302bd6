use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;

use super::trace::{Arrival, SpreadTrace};
use super::weights::EdgeWeights;
use crate::graphcore::RootedGraph;
use crate::randsrc::WeightLaw;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key {
    dist: f64,
    edge: u32,
    vertex: u32,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.edge.cmp(&other.edge))
            .then(self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First passage percolation from the root with fresh i.i.d. weights.
pub fn run_spread<R: Rng + ?Sized>(g: &RootedGraph, law: WeightLaw, rng: &mut R) -> SpreadTrace {
    let mut w = EdgeWeights::lazy(g.m(), law);
    run_spread_with(g, &mut w, rng)
}

/// First passage percolation with the given weight table.
///
/// Dijkstra from the root. Equal tentative distances are resolved by the
/// smaller final edge index, which fixes both the infection order and the
/// infector edge of every vertex.
pub fn run_spread_with<R: Rng + ?Sized>(g: &RootedGraph, w: &mut EdgeWeights, rng: &mut R) -> SpreadTrace {
    spread_prefix(g, w, g.n(), rng)
}

/// `T_1, …, T_k` of [`run_spread`], stopping at the `k`-th infection. Draws
/// the same weights in the same order, so the times agree with the full run
/// on the same stream.
pub fn first_passage_times<R: Rng + ?Sized>(g: &RootedGraph, law: WeightLaw, k: usize, rng: &mut R) -> Vec<f64> {
    let mut w = EdgeWeights::lazy(g.m(), law);
    let t = spread_prefix(g, &mut w, k.min(g.n()), rng);
    t.times[..k.min(g.n())].iter().filter_map(|a| a.time()).collect()
}

fn spread_prefix<R: Rng + ?Sized>(g: &RootedGraph, w: &mut EdgeWeights, limit: usize, rng: &mut R) -> SpreadTrace {
    let n = g.n();
    let mut done = vec![false; n];
    let mut infector = vec![None; n];
    let mut times = Vec::with_capacity(n);
    let mut order = Vec::with_capacity(n);
    let mut fronts = Vec::with_capacity(n);
    let mut front = 0i64;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Key {
        dist: 0.0,
        edge: u32::MAX,
        vertex: g.root() as u32,
    }));
    while let Some(Reverse(key)) = heap.pop() {
        let v = key.vertex as usize;
        if done[v] {
            continue;
        }
        done[v] = true;
        if key.edge != u32::MAX {
            infector[v] = Some(key.edge);
        }
        times.push(Arrival::At(key.dist));
        order.push(v as u32);
        for &(u, e) in g.incident(v) {
            let u = u as usize;
            if done[u] {
                front -= 1;
            } else {
                front += 1;
                let d = key.dist + w.get(e as usize, rng);
                heap.push(Reverse(Key {
                    dist: d,
                    edge: e,
                    vertex: u as u32,
                }));
            }
        }
        fronts.push(front as u32);
        if order.len() == limit {
            break;
        }
    }
    SpreadTrace::finish(n, times, order, infector, fronts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::RngStream;

    #[test]
    fn prefix_matches_full_run() {
        let g = RootedGraph::cycle(30, 4).unwrap();
        let law = WeightLaw::power(0.8, 1.0).unwrap();
        let full = run_spread(&g, law, &mut RngStream::new(5, 2));
        let head = first_passage_times(&g, law, 7, &mut RngStream::new(5, 2));
        let want: Vec<f64> = full.times[..7].iter().map(|a| a.time().unwrap()).collect();
        assert_eq!(head, want);
        assert_eq!(first_passage_times(&g, law, 100, &mut RngStream::new(5, 2)).len(), 30);
    }

    #[test]
    fn single_edge() {
        let g = RootedGraph::path(2, 0).unwrap();
        let mut w = EdgeWeights::fixed(vec![3.5]);
        let t = run_spread_with(&g, &mut w, &mut RngStream::new(0, 0));
        assert_eq!(t.times, vec![Arrival::At(0.0), Arrival::At(3.5)]);
        assert_eq!(t.front_sizes, vec![1, 0]);
        assert_eq!(t.first_bottleneck, Some(1));
    }

    #[test]
    fn path_of_three() {
        let g = RootedGraph::path(3, 0).unwrap();
        let mut w = EdgeWeights::fixed(vec![1.5, 2.0]);
        let t = run_spread_with(&g, &mut w, &mut RngStream::new(0, 0));
        assert_eq!(t.times, vec![Arrival::At(0.0), Arrival::At(1.5), Arrival::At(3.5)]);
        assert_eq!(t.front_sizes, vec![1, 1, 0]);
    }

    #[test]
    fn triangle_by_hand() {
        // s = 0, a = 1, b = 2; edges sa, sb, ab.
        let g = RootedGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], 0).unwrap();
        let mut w = EdgeWeights::fixed(vec![5.0, 2.0, 1.0]);
        let t = run_spread_with(&g, &mut w, &mut RngStream::new(0, 0));
        assert_eq!(t.times, vec![Arrival::At(0.0), Arrival::At(2.0), Arrival::At(3.0)]);
        assert_eq!(t.order, vec![0, 2, 1]);
        assert_eq!(t.infector_edge, vec![None, Some(2), Some(1)]);
        assert_eq!(t.front_sizes, vec![2, 2, 0]);
        assert_eq!(t.first_bottleneck, None);
    }

    #[test]
    fn ties_prefer_smaller_edge() {
        // Square 0-1-2-3-0 with unit weights: vertex 2 is reached at 2 via
        // edge 1 (1-2) or edge 2 (2-3); edge 1 wins.
        let g = RootedGraph::cycle(4, 0).unwrap();
        let mut w = EdgeWeights::fixed(vec![1.0; 4]);
        let t = run_spread_with(&g, &mut w, &mut RngStream::new(0, 0));
        assert_eq!(t.order, vec![0, 1, 3, 2]);
        assert_eq!(t.infector_edge[2], Some(1));
    }

    #[test]
    fn trace_csv() {
        let g = RootedGraph::path(2, 0).unwrap();
        let mut w = EdgeWeights::fixed(vec![0.5]);
        let t = run_spread_with(&g, &mut w, &mut RngStream::new(0, 0));
        assert_eq!(t.to_csv(), "k,T_k,front_size,infector_edge\n1,0,1,\n2,0.5,0,0\n");
    }
}
