//! Uniform spanning tree of `K_n` plus a root edge, grown by Wilson's
//! algorithm with a red/blue coloring of the branches.
//!
//! Vertices are `x_i = i`. The first loop-erased walk runs from `x_1` to
//! `x_0` and forms `C_{-1}`; together with the edge `(x_0, x_1)` it closes
//! the cycle through the root. The second walk starts at the first vertex
//! not yet covered; its path including the hit point is red, the rest of
//! `C_{-1}` is blue. Every later walk starts at the next uncovered vertex
//! and takes the color of the vertex it hits. The sizes `|Δ_i|` of the
//! newly covered sets feed a Pólya urn.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graphcore::RootedGraph;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mark {
    Uncovered,
    /// Covered by the first walk, not yet split into red and blue.
    Plain,
    Red,
    Blue,
}

/// Result of [`sample_ust_colored`].
#[derive(Clone, Debug)]
pub struct ColoredUstResult {
    pub n: usize,
    /// Spanning tree as parent pointers towards `x_0` (`u32::MAX` at `x_0`).
    pub parent: Vec<u32>,
    /// Vertices in the order they joined the tree, `x_0` first; each
    /// vertex appears after its parent.
    pub order: Vec<u32>,
    /// The extra edge `(x_0, x_1)` coincides with a tree edge, which happens
    /// exactly when the first walk has length 1.
    pub parallel_extra_edge: bool,
    pub red_count: usize,
    pub blue_count: usize,
    /// `|Δ_{-1}|, |Δ_0|, |Δ_1|, …`; the first entry is the first-walk length.
    pub increment_sizes: Vec<u32>,
    /// All `n` vertices are covered; `false` only for stopped runs.
    pub complete: bool,
}

impl ColoredUstResult {
    /// Length of the first loop-erased walk, `d(x_0, x_1)` in the tree.
    pub fn first_path_length(&self) -> usize {
        self.increment_sizes[0] as usize
    }

    /// `|C_i|` just before each increment: pairs `(c, |Δ|)` where the walk
    /// producing `Δ` ran into a covered set of size `c`.
    pub fn cover_increments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut covered = 1usize;
        self.increment_sizes.iter().map(move |&d| {
            let pair = (covered, d as usize);
            covered += d as usize;
            pair
        })
    }

    /// The urn increments after the initial split: `|Δ_1|, |Δ_2|, …`.
    pub fn urn_increments(&self) -> &[u32] {
        self.increment_sizes.get(2..).unwrap_or(&[])
    }

    /// `(|R_0|, |B_0|)`, or `None` when the first walk covered everything.
    pub fn initial_urn(&self) -> Option<(u64, u64)> {
        let l = *self.increment_sizes.first()? as u64;
        let d0 = *self.increment_sizes.get(1)? as u64;
        Some((d0 + 1, l))
    }

    /// Tree plus extra edge as a rooted graph at `x_0`. A parallel extra edge
    /// is not duplicated, so the graph then has `n − 1` edges.
    pub fn graph(&self) -> Result<RootedGraph> {
        let mut edges: Vec<(u32, u32)> = self.order[1..]
            .iter()
            .map(|&v| (v, self.parent[v as usize]))
            .collect();
        if !self.parallel_extra_edge {
            edges.push((0, 1));
        }
        RootedGraph::new(self.n, edges, 0)
    }

    /// `κ` at `x_0` of the tree plus the extra edge: `n` minus the largest
    /// tree hanging off the cycle `x_0 → x_1 → x_0`. A parallel extra edge
    /// makes the cycle a doubled edge, which is still not a bridge.
    pub fn kappa_at_root(&self) -> usize {
        let n = self.n;
        let mut size = vec![1u32; n];
        for &v in self.order[1..].iter().rev() {
            size[self.parent[v as usize] as usize] += size[v as usize];
        }
        let mut on_cycle = vec![false; n];
        let mut v = 1usize;
        while v != 0 {
            on_cycle[v] = true;
            v = self.parent[v] as usize;
        }
        on_cycle[0] = true;
        let largest = self.order[1..]
            .iter()
            .map(|&v| v as usize)
            .filter(|&v| !on_cycle[v] && on_cycle[self.parent[v] as usize])
            .map(|v| size[v] as usize)
            .max()
            .unwrap_or(0);
        n - largest
    }
}

/// Reusable buffers for repeated colored Wilson runs on `K_n`.
pub struct ColoredWilson {
    n: usize,
    next: Vec<u32>,
    mark: Vec<Mark>,
}

impl ColoredWilson {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param(format!("need n >= 3, got {n}")));
        }
        if n >= NONE as usize {
            return Err(Error::resource("n exceeds u32 range"));
        }
        Ok(ColoredWilson {
            n,
            next: vec![NONE; n],
            mark: vec![Mark::Uncovered; n],
        })
    }

    /// Simple random walk on `K_n` from `start` until it hits a covered
    /// vertex; returns the hit point. `next` holds the last exit of each
    /// visited vertex, which encodes the chronological loop erasure.
    fn walk<R: Rng + ?Sized>(&mut self, start: usize, rng: &mut R) -> usize {
        let n1 = (self.n - 1) as u32;
        let mut cur = start as u32;
        while self.mark[cur as usize] == Mark::Uncovered {
            let mut nxt = rng.random_range(0..n1);
            if nxt >= cur {
                nxt += 1;
            }
            self.next[cur as usize] = nxt;
            cur = nxt;
        }
        cur as usize
    }

    /// Full run.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ColoredUstResult {
        self.sample_until(self.n, rng)
    }

    /// Runs until at least `stop_cover` vertices are covered. With
    /// `stop_cover < n` the result is a prefix: counts and increments are
    /// those of the rounds performed so far.
    pub fn sample_until<R: Rng + ?Sized>(&mut self, stop_cover: usize, rng: &mut R) -> ColoredUstResult {
        let n = self.n;
        self.mark.iter_mut().for_each(|m| *m = Mark::Uncovered);
        let mut parent = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut increments = Vec::new();

        self.mark[0] = Mark::Plain;
        order.push(0u32);
        self.walk(1, rng);
        let mut v = 1usize;
        let mut path = Vec::new();
        while self.mark[v] == Mark::Uncovered {
            self.mark[v] = Mark::Plain;
            parent[v] = self.next[v];
            path.push(v as u32);
            v = self.next[v] as usize;
        }
        order.extend(path.iter().rev());
        let first = order.len() - 1;
        increments.push(first as u32);
        let parallel = first == 1;
        let mut covered = order.len();
        let (mut red, mut blue) = (0usize, covered);

        let mut cursor = 2usize;
        let mut split_done = false;
        while covered < n && covered < stop_cover {
            while self.mark[cursor] != Mark::Uncovered {
                cursor += 1;
            }
            let hit = self.walk(cursor, rng);
            let color = if split_done { self.mark[hit] } else { Mark::Red };
            let mut v = cursor;
            path.clear();
            while self.mark[v] == Mark::Uncovered {
                self.mark[v] = color;
                parent[v] = self.next[v];
                path.push(v as u32);
                v = self.next[v] as usize;
            }
            let added = path.len();
            order.extend(path.iter().rev());
            increments.push(added as u32);
            covered += added;
            if !split_done {
                // The hit point turns red, the rest of the first path blue.
                for &u in &order[..=first] {
                    self.mark[u as usize] = Mark::Blue;
                }
                self.mark[hit] = Mark::Red;
                red = added + 1;
                blue = first;
                split_done = true;
            } else if color == Mark::Red {
                red += added;
            } else {
                blue += added;
            }
        }
        if !split_done {
            // The first walk covered every vertex: no red branch exists.
            red = 0;
            blue = covered;
        }
        ColoredUstResult {
            n,
            parent,
            order,
            parallel_extra_edge: parallel,
            red_count: red,
            blue_count: blue,
            increment_sizes: increments,
            complete: covered == n,
        }
    }
}

/// One colored Wilson run on `K_n`.
pub fn sample_ust_colored<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ColoredUstResult> {
    Ok(ColoredWilson::new(n)?.sample(rng))
}

/// `P[|Δ_{i+1}| = k | |C_i| = c] = ((k + c)/n) ∏_{j=1}^{k−1} (1 − (j + c)/n)`.
pub fn delta_law(n: usize, c: usize, k: usize) -> Result<f64> {
    if c < 1 || c >= n || k < 1 || k > n - c {
        return Err(Error::param(format!(
            "need 1 <= c < n and 1 <= k <= n - c, got n={n} c={c} k={k}"
        )));
    }
    let nf = n as f64;
    let mut p = (k + c) as f64 / nf;
    for j in 1..k {
        p *= 1.0 - (j + c) as f64 / nf;
    }
    Ok(p)
}

/// Law of the first-walk length `L = d(x_0, x_1)`: `delta_law(n, 1, k)`.
pub fn first_path_law(n: usize, k: usize) -> Result<f64> {
    delta_law(n, 1, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::kappa;
    use crate::randsrc::RngStream;

    #[test]
    fn rejects_small_n() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(sample_ust_colored(2, &mut rng), Err(Error::Parameter(_))));
    }

    /// Largest component left after deleting vertices 0 and 1.
    fn largest_off_pair(g: &RootedGraph) -> usize {
        let mut seen = vec![false; g.n()];
        seen[0] = true;
        seen[1] = true;
        let mut best = 0;
        for s in 2..g.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
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
            best = best.max(size);
        }
        best
    }

    #[test]
    fn structure_invariants() {
        let mut rng = RngStream::new(17, 0);
        for n in [3usize, 4, 5, 10, 60] {
            let mut w = ColoredWilson::new(n).unwrap();
            for _ in 0..300 {
                let r = w.sample(&mut rng);
                assert!(r.complete);
                assert_eq!(r.red_count + r.blue_count, n);
                assert_eq!(r.increment_sizes.iter().map(|&d| d as usize).sum::<usize>() + 1, n);
                assert!(r.increment_sizes.iter().all(|&d| d >= 1));
                let g = r.graph().unwrap();
                let expect = if r.parallel_extra_edge { n - 1 } else { n };
                assert_eq!(g.m(), expect);
                assert_eq!(r.parallel_extra_edge, r.first_path_length() == 1);
                if r.parallel_extra_edge {
                    assert_eq!(r.kappa_at_root(), n - largest_off_pair(&g));
                } else {
                    assert_eq!(r.kappa_at_root(), kappa(&g).kappa_at_root);
                }
                assert!(r.kappa_at_root() >= 2);
                if let Some((r0, b0)) = r.initial_urn() {
                    let sum: u64 = r.urn_increments().iter().map(|&d| d as u64).sum();
                    assert_eq!(r0 + b0 + sum, n as u64);
                }
            }
        }
    }

    #[test]
    fn stopped_runs_are_prefixes() {
        let mut w = ColoredWilson::new(200).unwrap();
        let mut rng = RngStream::new(4, 0);
        for _ in 0..200 {
            let r = w.sample_until(30, &mut rng);
            let covered = 1 + r.increment_sizes.iter().map(|&d| d as usize).sum::<usize>();
            assert!(covered >= 30 || r.complete);
            let before = covered - *r.increment_sizes.last().unwrap() as usize;
            assert!(before < 30 || r.increment_sizes.len() <= 2);
        }
    }

    #[test]
    fn delta_law_normalizes() {
        for n in [5usize, 50, 500] {
            for c in 1..n {
                let total: f64 = (1..=n - c).map(|k| delta_law(n, c, k).unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} c={c}");
            }
        }
        assert_eq!(delta_law(10, 9, 1).unwrap(), 1.0);
        assert!(delta_law(10, 0, 1).is_err());
        assert!(delta_law(10, 3, 8).is_err());
    }
}
