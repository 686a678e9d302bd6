use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::dsu::Dsu;
use crate::error::{Error, Result};
use crate::graphcore::Graph;
use crate::randsrc::open_unit;

/// Largest cluster of a near-critical `G(n, p)` sample.
#[derive(Clone, Debug)]
pub struct ErSample {
    pub lambda: f64,
    pub n: usize,
    pub p: f64,
    /// The largest cluster, relabelled so that vertex `i` is
    /// `cluster_vertices[i]` of the full graph.
    pub largest_cluster: Graph,
    /// Original ids of the cluster's vertices, increasing.
    pub cluster_vertices: Vec<u32>,
    /// All cluster sizes, largest first.
    pub cluster_sizes: Vec<usize>,
    /// Edges of the largest cluster beyond a spanning tree.
    pub surplus_of_largest: usize,
    /// Total number of edges in the sample.
    pub edge_count: usize,
}

/// `p = 1/n + λ n^(-4/3)`, clamped to `[0, 1]`.
pub fn er_probability(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    (1.0 / nf + lambda * nf.powf(-4.0 / 3.0)).clamp(0.0, 1.0)
}

fn check_n(n: usize) -> Result<()> {
    if n < 10 {
        return Err(Error::param(format!("need n >= 10, got {n}")));
    }
    if n > 1 << 31 {
        return Err(Error::resource("n too large"));
    }
    Ok(())
}

/// `G(n, p)` with `p` from [`er_probability`], sampled by geometric skipping
/// over the lexicographic pair sequence `(0,1), (0,2), …, (n−2,n−1)`.
pub fn sample_er<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> Result<ErSample> {
    check_n(n)?;
    if !lambda.is_finite() {
        return Err(Error::param("lambda must be finite"));
    }
    let p = er_probability(n, lambda);
    let mut edges = Vec::new();
    if p > 0.0 {
        let pairs = n as u64 * (n as u64 - 1) / 2;
        let skip = Geometric::new(p).map_err(|e| Error::param(e.to_string()))?;
        let mut row = 0u64;
        let mut row_start = 0u64;
        let mut pos = 0u64;
        let nn = n as u64;
        loop {
            pos = match pos.checked_add(skip.sample(rng)) {
                Some(x) if x < pairs => x,
                _ => break,
            };
            while pos >= row_start + (nn - 1 - row) {
                row_start += nn - 1 - row;
                row += 1;
            }
            let col = row + 1 + (pos - row_start);
            edges.push((row as u32, col as u32));
            pos += 1;
        }
    }
    Ok(assemble(n, lambda, p, edges))
}

/// One uniform label per vertex pair, in lexicographic pair order. Thresholding
/// the same labels at increasing `p` gives nested graphs.
pub fn er_labels<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    check_n(n)?;
    if n > 2000 {
        return Err(Error::resource("label-based sampling is limited to n <= 2000"));
    }
    Ok((0..n * (n - 1) / 2).map(|_| open_unit(rng)).collect())
}

/// `G(n, p)` keeping the pairs whose label is below `p`.
pub fn sample_er_from_labels(n: usize, lambda: f64, labels: &[f64]) -> Result<ErSample> {
    check_n(n)?;
    if labels.len() != n * (n - 1) / 2 {
        return Err(Error::param("label count does not match n"));
    }
    let p = er_probability(n, lambda);
    let mut edges = Vec::new();
    let mut idx = 0;
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if labels[idx] < p {
                edges.push((u, v));
            }
            idx += 1;
        }
    }
    Ok(assemble(n, lambda, p, edges))
}

fn assemble(n: usize, lambda: f64, p: f64, edges: Vec<(u32, u32)>) -> ErSample {
    let mut dsu = Dsu::new(n);
    for &(u, v) in &edges {
        dsu.union(u as usize, v as usize);
    }
    let roots: Vec<usize> = (0..n).map(|v| dsu.find(v)).collect();
    let mut size = vec![0usize; n];
    let mut min_vertex = vec![usize::MAX; n];
    for (v, &r) in roots.iter().enumerate() {
        size[r] += 1;
        min_vertex[r] = min_vertex[r].min(v);
    }
    let best = (0..n)
        .filter(|&r| size[r] > 0)
        .max_by(|&a, &b| size[a].cmp(&size[b]).then(min_vertex[b].cmp(&min_vertex[a])))
        .expect("n >= 1");
    let mut cluster_sizes: Vec<usize> = size.iter().copied().filter(|&s| s > 0).collect();
    cluster_sizes.sort_unstable_by(|a, b| b.cmp(a));

    let cluster_vertices: Vec<u32> = (0..n as u32).filter(|&v| roots[v as usize] == best).collect();
    let mut label = vec![u32::MAX; n];
    for (i, &v) in cluster_vertices.iter().enumerate() {
        label[v as usize] = i as u32;
    }
    let inner: Vec<(u32, u32)> = edges
        .iter()
        .filter(|&&(u, _)| roots[u as usize] == best)
        .map(|&(u, v)| (label[u as usize], label[v as usize]))
        .collect();
    let surplus = inner.len() + 1 - cluster_vertices.len();
    let largest_cluster =
        Graph::new(cluster_vertices.len(), inner).expect("a union-find cluster is simple and connected");
    ErSample {
        lambda,
        n,
        p,
        largest_cluster,
        cluster_vertices,
        cluster_sizes,
        surplus_of_largest: surplus,
        edge_count: edges.len(),
    }
}
