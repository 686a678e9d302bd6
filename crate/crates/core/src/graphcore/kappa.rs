use std::collections::VecDeque;

use itertools::Itertools;
use serde::Serialize;

use super::graph::{Graph, RootedGraph};
use crate::error::{Error, Result};

/// Default cap on the number of edge subsets [`kappa_d`] may enumerate.
pub const KAPPA_D_DEFAULT_CAP: u64 = 10_000_000;
/// Largest vertex count accepted by [`kappa_oracle`].
pub const ORACLE_MAX_N: usize = 14;

/// A bridge and the sizes of the two sides it separates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bridge {
    pub edge: usize,
    pub root_side: usize,
    pub far_side: usize,
}

/// Bottleneck index at the root plus the bridge structure behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaProfile {
    pub kappa_at_root: usize,
    /// Bridges in increasing edge order.
    pub bridges: Vec<Bridge>,
    /// `κ(G, v)` for every vertex, when requested.
    pub kappa_per_vertex: Option<Vec<usize>>,
}

/// Depth-first bridge scan from `root`.
struct Scan {
    /// Preorder discovery time; `u32::MAX` if unreached.
    tin: Vec<u32>,
    /// DFS subtree sizes.
    sub: Vec<u32>,
    /// `(edge, child)` for each bridge, child being the far endpoint.
    bridges: Vec<(usize, usize)>,
}

fn scan(g: &Graph, root: usize) -> Scan {
    let n = g.n();
    let mut tin = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut parent_edge = vec![u32::MAX; n];
    let mut sub = vec![1u32; n];
    let mut bridges = Vec::new();
    let mut timer = 0u32;
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    tin[root] = timer;
    low[root] = timer;
    timer += 1;
    while let Some(top) = stack.last_mut() {
        let v = top.0;
        let inc = g.incident(v);
        if top.1 < inc.len() {
            let (w, e) = inc[top.1];
            top.1 += 1;
            let w = w as usize;
            if e == parent_edge[v] {
                continue;
            }
            if tin[w] == u32::MAX {
                tin[w] = timer;
                low[w] = timer;
                timer += 1;
                parent_edge[w] = e;
                stack.push((w, 0));
            } else {
                low[v] = low[v].min(tin[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                sub[p] += sub[v];
                if low[v] > tin[p] {
                    bridges.push((parent_edge[v] as usize, v));
                }
            }
        }
    }
    bridges.sort_unstable();
    Scan {
        tin,
        sub,
        bridges,
    }
}

fn profile(g: &RootedGraph, per_vertex: bool) -> KappaProfile {
    let n = g.n();
    let s = scan(g, g.root());
    debug_assert!(s.tin.iter().all(|&t| t != u32::MAX));
    let bridges: Vec<Bridge> = s
        .bridges
        .iter()
        .map(|&(edge, child)| {
            let far = s.sub[child] as usize;
            Bridge {
                edge,
                root_side: n - far,
                far_side: far,
            }
        })
        .collect();
    let kappa_at_root = bridges.iter().map(|b| b.root_side).min().unwrap_or(n);
    let kappa_per_vertex = per_vertex.then(|| per_vertex_kappa(g, &s));
    KappaProfile {
        kappa_at_root,
        bridges,
        kappa_per_vertex,
    }
}

/// `κ(G, v)` for all `v` through the bridge-block tree: the largest far side
/// seen from `v` is always a bridge incident to the 2-edge-connected block
/// containing `v`.
fn per_vertex_kappa(g: &Graph, s: &Scan) -> Vec<usize> {
    let n = g.n();
    let mut is_bridge = vec![false; g.m()];
    for &(e, _) in &s.bridges {
        is_bridge[e] = true;
    }
    let mut block = vec![u32::MAX; n];
    let mut blocks = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if block[start] != u32::MAX {
            continue;
        }
        block[start] = blocks;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in g.incident(v) {
                if !is_bridge[e as usize] && block[w as usize] == u32::MAX {
                    block[w as usize] = blocks;
                    queue.push_back(w as usize);
                }
            }
        }
        blocks += 1;
    }
    let mut far_max = vec![0usize; blocks as usize];
    for &(e, child) in &s.bridges {
        let parent = g.other(e, child);
        let below = s.sub[child] as usize;
        let bp = block[parent] as usize;
        let bc = block[child] as usize;
        far_max[bp] = far_max[bp].max(below);
        far_max[bc] = far_max[bc].max(n - below);
    }
    (0..n).map(|v| n - far_max[block[v] as usize]).collect()
}

/// `κ(G, s)` with the bridge list, in `O(n + m)`.
pub fn kappa(g: &RootedGraph) -> KappaProfile {
    profile(g, false)
}

/// Like [`kappa`], also filling `kappa_per_vertex`.
pub fn kappa_with_per_vertex(g: &RootedGraph) -> KappaProfile {
    profile(g, true)
}

/// Vertex maximizing `κ(G, v)` (smallest id on ties) and the maximum.
pub fn max_kappa_over_roots(g: &Graph) -> (usize, usize) {
    let s = scan(g, 0);
    let per = per_vertex_kappa(g, &s);
    let mut best = (0, per[0]);
    for (v, &k) in per.iter().enumerate() {
        if k > best.1 {
            best = (v, k);
        }
    }
    best
}

/// Parent array of a BFS from `root`, plus the visiting order.
fn bfs_tree(g: &Graph, root: usize) -> (Vec<usize>, Vec<usize>) {
    let mut parent = vec![usize::MAX; g.n()];
    parent[root] = root;
    let mut order = Vec::with_capacity(g.n());
    order.push(root);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for w in g.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                order.push(w);
            }
        }
    }
    (parent, order)
}

/// `|T|` minus the largest subtree hanging from the root.
pub fn kappa_tree(g: &RootedGraph) -> Result<usize> {
    let n = g.n();
    if g.m() + 1 != n {
        return Err(Error::structural(format!(
            "not a tree: {n} vertices and {} edges",
            g.m()
        )));
    }
    let root = g.root();
    let (parent, order) = bfs_tree(g, root);
    let mut size = vec![1usize; n];
    for &v in order.iter().skip(1).rev() {
        size[parent[v]] += size[v];
    }
    let largest = g.neighbors(root).map(|c| size[c]).max().unwrap_or(0);
    Ok(n - largest)
}

/// `|G|` minus the largest tree hanging off the unique cycle, for a
/// unicyclic graph whose root lies on the cycle.
pub fn kappa_cycle_decomposition(g: &RootedGraph) -> Result<usize> {
    let n = g.n();
    if g.m() != n {
        return Err(Error::structural(format!(
            "not unicyclic: {n} vertices and {} edges",
            g.m()
        )));
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut on_cycle = vec![true; n];
    let mut leaves: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = leaves.pop() {
        on_cycle[v] = false;
        for w in g.neighbors(v) {
            if on_cycle[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    leaves.push(w);
                }
            }
        }
    }
    if !on_cycle[g.root()] {
        return Err(Error::structural("root is not on the cycle"));
    }
    let mut seen = on_cycle.clone();
    let mut largest = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        largest = largest.max(size);
    }
    Ok(n - largest)
}

/// Root component size after deleting the edges flagged in `removed`.
fn root_component_size(g: &RootedGraph, removed: &[bool], seen: &mut [bool], stack: &mut Vec<usize>) -> usize {
    seen.iter_mut().for_each(|x| *x = false);
    let root = g.root();
    seen[root] = true;
    stack.clear();
    stack.push(root);
    let mut size = 0;
    while let Some(v) = stack.pop() {
        size += 1;
        for &(w, e) in g.incident(v) {
            let w = w as usize;
            if !removed[e as usize] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    size
}

/// `κ_d(G, s)`: smallest root component after deleting `d − 1` edges.
pub fn kappa_d(g: &RootedGraph, d: usize) -> Result<usize> {
    kappa_d_with_cap(g, d, KAPPA_D_DEFAULT_CAP)
}

/// [`kappa_d`] with an explicit cap on the number of enumerated subsets.
pub fn kappa_d_with_cap(g: &RootedGraph, d: usize, cap: u64) -> Result<usize> {
    if d < 2 {
        return Err(Error::param(format!("d must be at least 2, got {d}")));
    }
    let r = d - 1;
    let m = g.m();
    if r > m {
        return Err(Error::param(format!("d - 1 = {r} exceeds the edge count {m}")));
    }
    let subsets = binomial(m as u64, r as u64);
    if subsets.is_none_or(|c| c > cap) {
        return Err(Error::resource(format!(
            "C({m}, {r}) edge subsets exceed the cap {cap}"
        )));
    }
    let mut removed = vec![false; m];
    let mut seen = vec![false; g.n()];
    let mut stack = Vec::new();
    let mut best = g.n();
    for combo in (0..m).combinations(r) {
        for &e in &combo {
            removed[e] = true;
        }
        best = best.min(root_component_size(g, &removed, &mut seen, &mut stack));
        for &e in &combo {
            removed[e] = false;
        }
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Brute-force `κ`: smallest connected vertex set containing the root whose
/// edge boundary is a single edge, or `n` if there is none.
pub fn kappa_oracle(g: &RootedGraph) -> Result<usize> {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return Err(Error::resource(format!(
            "oracle enumeration limited to {ORACLE_MAX_N} vertices, got {n}"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |acc, w| acc | (1 << w)))
        .collect();
    let root_bit = 1u32 << g.root();
    let full = (1u32 << n) - 1;
    let mut best = n;
    for set in 1..=full {
        if set & root_bit == 0 || (set.count_ones() as usize) >= best {
            continue;
        }
        let boundary: u32 = (0..n)
            .filter(|&v| set & (1 << v) != 0)
            .map(|v| (adj[v] & !set).count_ones())
            .sum();
        if boundary != 1 {
            continue;
        }
        let mut reach = root_bit;
        loop {
            let grown = (0..n)
                .filter(|&v| reach & (1 << v) != 0)
                .fold(reach, |acc, v| acc | (adj[v] & set));
            if grown == reach {
                break;
            }
            reach = grown;
        }
        if reach == set {
            best = set.count_ones() as usize;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broom() -> RootedGraph {
        // Root 0 with a path 0-1-2-3-4 and five leaves 5..=9.
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        edges.extend((5..10).map(|v| (0, v)));
        RootedGraph::new(10, edges, 0).unwrap()
    }

    fn barbell() -> RootedGraph {
        let edges = vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)];
        RootedGraph::new(6, edges, 0).unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&RootedGraph::path(5, 0).unwrap()).kappa_at_root, 1);
        assert_eq!(kappa(&RootedGraph::star(10, 0).unwrap()).kappa_at_root, 9);
        for r in 0..5 {
            let p = kappa(&RootedGraph::cycle(5, r).unwrap());
            assert_eq!(p.kappa_at_root, 5);
            assert!(p.bridges.is_empty());
        }
    }

    #[test]
    fn bridge_sides_sum_to_n() {
        let p = kappa(&barbell());
        assert_eq!(
            p.bridges,
            vec![Bridge {
                edge: 3,
                root_side: 3,
                far_side: 3
            }]
        );
        let b = kappa(&broom());
        assert_eq!(b.bridges.len(), 9);
        assert!(b.bridges.iter().all(|x| x.root_side + x.far_side == 10));
    }

    #[test]
    fn tree_formula_examples() {
        assert_eq!(kappa_tree(&RootedGraph::star(10, 0).unwrap()).unwrap(), 9);
        let p7 = RootedGraph::path(7, 3).unwrap();
        assert_eq!(kappa_tree(&p7).unwrap(), 4);
        assert_eq!(kappa(&p7).kappa_at_root, 4);
        assert_eq!(kappa_tree(&broom()).unwrap(), 6);
        assert_eq!(kappa(&broom()).kappa_at_root, 6);
        assert!(kappa_tree(&RootedGraph::cycle(4, 0).unwrap()).is_err());
        assert_eq!(kappa_tree(&RootedGraph::new(1, vec![], 0).unwrap()).unwrap(), 1);
    }

    #[test]
    fn cycle_decomposition_examples() {
        assert_eq!(kappa_cycle_decomposition(&RootedGraph::cycle(8, 5).unwrap()).unwrap(), 8);
        // C_4 on 0..4 with the path 4-5-6 hanging from vertex 2.
        let g = RootedGraph::new(
            7,
            vec![(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 6)],
            0,
        )
        .unwrap();
        assert_eq!(kappa_cycle_decomposition(&g).unwrap(), 4);
        assert_eq!(kappa(&g).kappa_at_root, 4);
        // C_3 with hanging trees of sizes 2 and 5.
        let g = RootedGraph::new(
            10,
            vec![
                (0, 1),
                (1, 2),
                (2, 0),
                (1, 3),
                (3, 4),
                (2, 5),
                (5, 6),
                (5, 7),
                (7, 8),
                (7, 9),
            ],
            0,
        )
        .unwrap();
        assert_eq!(kappa_cycle_decomposition(&g).unwrap(), 5);
        assert_eq!(kappa(&g).kappa_at_root, 5);
        let off = g.with_root(4).unwrap();
        assert!(matches!(kappa_cycle_decomposition(&off), Err(Error::Structural(_))));
        assert!(kappa_cycle_decomposition(&broom()).is_err());
    }

    #[test]
    fn kappa_d_examples() {
        for r in 0..6 {
            assert_eq!(kappa_d(&RootedGraph::cycle(6, r).unwrap(), 3).unwrap(), 1);
        }
        assert_eq!(kappa_d(&RootedGraph::complete(4, 0).unwrap(), 3).unwrap(), 4);
        assert_eq!(kappa_d(&broom(), 2).unwrap(), kappa(&broom()).kappa_at_root);
        assert_eq!(kappa_d(&barbell(), 2).unwrap(), 3);
        assert!(kappa_d(&barbell(), 1).is_err());
        assert!(kappa_d(&RootedGraph::path(3, 0).unwrap(), 4).is_err());
        let k8 = RootedGraph::complete(8, 0).unwrap();
        assert!(matches!(kappa_d_with_cap(&k8, 4, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(kappa_oracle(&RootedGraph::path(5, 0).unwrap()).unwrap(), 1);
        assert_eq!(kappa_oracle(&RootedGraph::cycle(5, 2).unwrap()).unwrap(), 5);
        assert_eq!(kappa_oracle(&barbell()).unwrap(), 3);
        assert_eq!(kappa_oracle(&broom()).unwrap(), 6);
        assert!(kappa_oracle(&RootedGraph::path(15, 0).unwrap()).is_err());
    }

    #[test]
    fn max_over_roots_examples() {
        assert_eq!(max_kappa_over_roots(&RootedGraph::path(7, 0).unwrap()), (3, 4));
        assert_eq!(max_kappa_over_roots(&RootedGraph::complete(5, 0).unwrap()), (0, 5));
        assert_eq!(max_kappa_over_roots(&barbell()), (0, 3));
        assert_eq!(max_kappa_over_roots(&RootedGraph::path(6, 0).unwrap()), (2, 3));
    }

    #[test]
    fn per_vertex_matches_rerooting() {
        for g in [broom(), barbell(), RootedGraph::path(9, 4).unwrap()] {
            let per = kappa_with_per_vertex(&g).kappa_per_vertex.unwrap();
            for (v, &k) in per.iter().enumerate() {
                assert_eq!(k, kappa(&g.with_root(v).unwrap()).kappa_at_root);
            }
        }
    }
}
