use rand::Rng;

use super::offspring::OffspringLaw;
use crate::error::{Error, Result};
use crate::graphcore::RootedGraph;

/// Attempts allowed per unit of conditioning depth before
/// [`sample_gw_conditioned`] gives up.
pub const CONDITIONED_BUDGET_PER_DEPTH: u64 = 10_000;

const NO_PARENT: u32 = u32::MAX;

/// Rooted plane tree with vertices numbered in breadth-first order.
///
/// Vertex 0 is the root, every parent precedes its children, siblings are
/// contiguous, and generation `g` occupies a contiguous id range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    parent: Vec<u32>,
    generation_sizes: Vec<u64>,
}

impl LabeledTree {
    /// Builds a tree from a BFS-ordered parent array (`None` for the root).
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        if n == 0 || parents[0].is_some() {
            return Err(Error::structural("vertex 0 must be the root"));
        }
        let mut parent = vec![NO_PARENT; n];
        let mut depth = vec![0u32; n];
        let mut generation_sizes = vec![1u64];
        for v in 1..n {
            let p = parents[v].ok_or_else(|| Error::structural("only vertex 0 may lack a parent"))?;
            if p >= v || (v > 1 && (p as u32) < parent[v - 1]) {
                return Err(Error::structural("parents must be in breadth-first order"));
            }
            parent[v] = p as u32;
            depth[v] = depth[p] + 1;
            if depth[v] < depth[v - 1] {
                return Err(Error::structural("parents must be in breadth-first order"));
            }
            let d = depth[v] as usize;
            if d == generation_sizes.len() {
                generation_sizes.push(0);
            }
            generation_sizes[d] += 1;
        }
        Ok(LabeledTree {
            parent,
            generation_sizes,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NO_PARENT).then_some(self.parent[v] as usize)
    }

    /// `Z_0, Z_1, …, Z_H`.
    pub fn generation_sizes(&self) -> &[u64] {
        &self.generation_sizes
    }

    /// Generation size `Z_g`, zero beyond the height.
    pub fn generation(&self, g: usize) -> u64 {
        self.generation_sizes.get(g).copied().unwrap_or(0)
    }

    pub fn height(&self) -> usize {
        self.generation_sizes.len() - 1
    }

    pub fn depths(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        for (g, &z) in self.generation_sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(g as u32, z as usize));
        }
        out
    }

    pub fn root_degree(&self) -> usize {
        self.generation(1) as usize
    }

    /// Number of vertices in each vertex's subtree.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let mut size = vec![1u32; self.len()];
        for v in (1..self.len()).rev() {
            size[self.parent[v] as usize] += size[v];
        }
        size
    }

    /// `|T|` minus the largest subtree hanging from the root.
    pub fn kappa_at_root(&self) -> usize {
        let size = self.subtree_sizes();
        let largest = (1..=self.root_degree()).map(|c| size[c] as usize).max().unwrap_or(0);
        self.len() - largest
    }

    fn check_target(&self, target: usize) -> Result<()> {
        if target >= self.len() || target <= self.root_degree() {
            return Err(Error::structural(format!(
                "vertex {target} is the root, a root neighbor or out of range"
            )));
        }
        Ok(())
    }

    /// Bottleneck index at the root after adding the edge `(root, target)`:
    /// `|T|` minus the largest tree hanging off the cycle it closes.
    pub fn kappa_with_root_edge(&self, target: usize) -> Result<usize> {
        self.check_target(target)?;
        let n = self.len();
        let size = self.subtree_sizes();
        let mut on_cycle = vec![false; n];
        let mut v = target;
        while v != 0 {
            on_cycle[v] = true;
            v = self.parent[v] as usize;
        }
        on_cycle[0] = true;
        let largest = (1..n)
            .filter(|&v| !on_cycle[v] && on_cycle[self.parent[v] as usize])
            .map(|v| size[v] as usize)
            .max()
            .unwrap_or(0);
        Ok(n - largest)
    }

    /// A vertex drawn uniformly from those not equal or adjacent to the root.
    pub fn random_root_edge_target<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.len() < 3 {
            return Err(Error::param("need at least 3 vertices to add a root edge"));
        }
        let first = self.root_degree() + 1;
        if first >= self.len() {
            return Err(Error::structural("every vertex is the root or adjacent to it"));
        }
        Ok(rng.random_range(first..self.len()))
    }

    fn tree_edges(&self) -> Vec<(u32, u32)> {
        (1..self.len() as u32).map(|v| (self.parent[v as usize], v)).collect()
    }

    /// The tree as a rooted graph; edge `v − 1` joins `v` to its parent.
    pub fn to_rooted_graph(&self) -> Result<RootedGraph> {
        RootedGraph::new(self.len(), self.tree_edges(), 0)
    }

    /// The tree plus the edge `(root, target)`, which gets the last index.
    pub fn with_root_edge(&self, target: usize) -> Result<RootedGraph> {
        self.check_target(target)?;
        let mut edges = self.tree_edges();
        edges.push((0, target as u32));
        RootedGraph::new(self.len(), edges, 0)
    }
}

/// Output of [`sample_gw`].
#[derive(Clone, Debug)]
pub struct GwDraw {
    pub tree: LabeledTree,
    /// The size cap was hit; `tree` is then a breadth-first prefix.
    pub truncated: bool,
}

/// Output of [`sample_gw_conditioned`].
#[derive(Clone, Debug)]
pub struct ConditionedGw {
    pub tree: LabeledTree,
    /// Number of unconditioned trees drawn, including the accepted one.
    pub attempts: u64,
    /// The accepted tree exceeded the size cap; `tree` is a prefix.
    pub truncated: bool,
}

enum Grow {
    Grew,
    Extinct,
    /// Cap reached while expanding the parents from this id on.
    Capped { next_parent: usize, partial: u64 },
}

struct Grower {
    parent: Vec<u32>,
    gens: Vec<u64>,
}

impl Grower {
    fn new() -> Self {
        Grower {
            parent: Vec::new(),
            gens: Vec::new(),
        }
    }

    fn reset(&mut self) {
        self.parent.clear();
        self.parent.push(NO_PARENT);
        self.gens.clear();
        self.gens.push(1);
    }

    fn height(&self) -> usize {
        self.gens.len() - 1
    }

    fn grow<R: Rng + ?Sized>(&mut self, law: OffspringLaw, cap: usize, rng: &mut R) -> Grow {
        let end = self.parent.len();
        let start = end - *self.gens.last().expect("root generation") as usize;
        for v in start..end {
            let c = law.sample(rng) as usize;
            if self.parent.len() + c > cap {
                let partial = (self.parent.len() - end + c) as u64;
                return Grow::Capped {
                    next_parent: v + 1,
                    partial,
                };
            }
            self.parent.extend(std::iter::repeat_n(v as u32, c));
        }
        let added = (self.parent.len() - end) as u64;
        if added == 0 {
            Grow::Extinct
        } else {
            self.gens.push(added);
            Grow::Grew
        }
    }

    /// After a cap hit, decides by counting alone whether generation
    /// `target` is nonempty.
    fn reaches_by_counting<R: Rng + ?Sized>(
        &self,
        law: OffspringLaw,
        next_parent: usize,
        partial: u64,
        target: usize,
        rng: &mut R,
    ) -> bool {
        let end = self.parent_end();
        let mut z = partial;
        for _ in next_parent..end {
            z += law.sample(rng);
        }
        let mut depth = self.height() + 1;
        while depth < target && z > 0 {
            let mut next = 0;
            for _ in 0..z {
                next += law.sample(rng);
            }
            z = next;
            depth += 1;
        }
        z > 0
    }

    /// One past the last vertex of the last complete generation.
    fn parent_end(&self) -> usize {
        self.gens.iter().sum::<u64>() as usize
    }

    fn finish(&mut self) -> LabeledTree {
        // Drop any partially expanded generation.
        let complete = self.parent_end();
        let mut parent = std::mem::take(&mut self.parent);
        let mut gens = std::mem::take(&mut self.gens);
        if parent.len() > complete {
            gens.push((parent.len() - complete) as u64);
        }
        parent.shrink_to_fit();
        LabeledTree {
            parent,
            generation_sizes: gens,
        }
    }
}

fn check_cap(size_cap: usize) -> Result<()> {
    if size_cap == 0 {
        return Err(Error::param("size cap must be at least 1"));
    }
    Ok(())
}

/// Unconditioned critical GW tree, generated breadth-first.
pub fn sample_gw<R: Rng + ?Sized>(law: OffspringLaw, size_cap: usize, rng: &mut R) -> Result<GwDraw> {
    law.validate()?;
    check_cap(size_cap)?;
    let mut g = Grower::new();
    g.reset();
    loop {
        match g.grow(law, size_cap, rng) {
            Grow::Grew => {}
            Grow::Extinct => {
                return Ok(GwDraw {
                    tree: g.finish(),
                    truncated: false,
                })
            }
            Grow::Capped { .. } => {
                return Ok(GwDraw {
                    tree: g.finish(),
                    truncated: true,
                })
            }
        }
    }
}

/// GW tree conditioned on `Z_N > 0`, by rejection.
///
/// Draws unconditioned trees, abandoning each as soon as it dies out before
/// depth `depth`, and completes the first survivor. If the survivor grows past
/// `size_cap` vertices the returned tree is a flagged breadth-first prefix.
/// Gives up after `10^4·depth` attempts.
pub fn sample_gw_conditioned<R: Rng + ?Sized>(
    law: OffspringLaw,
    depth: usize,
    size_cap: usize,
    rng: &mut R,
) -> Result<ConditionedGw> {
    law.validate()?;
    check_cap(size_cap)?;
    if depth == 0 {
        return Err(Error::param("conditioning depth must be at least 1"));
    }
    let budget = CONDITIONED_BUDGET_PER_DEPTH.saturating_mul(depth as u64);
    let mut g = Grower::new();
    for attempts in 1..=budget {
        g.reset();
        let accepted = loop {
            if g.height() >= depth {
                break true;
            }
            match g.grow(law, size_cap, rng) {
                Grow::Grew => {}
                Grow::Extinct => break false,
                Grow::Capped {
                    next_parent,
                    partial,
                } => {
                    if g.reaches_by_counting(law, next_parent, partial, depth, rng) {
                        return Ok(ConditionedGw {
                            tree: g.finish(),
                            attempts,
                            truncated: true,
                        });
                    }
                    break false;
                }
            }
        };
        if !accepted {
            continue;
        }
        loop {
            match g.grow(law, size_cap, rng) {
                Grow::Grew => {}
                Grow::Extinct => {
                    return Ok(ConditionedGw {
                        tree: g.finish(),
                        attempts,
                        truncated: false,
                    })
                }
                Grow::Capped { .. } => {
                    return Ok(ConditionedGw {
                        tree: g.finish(),
                        attempts,
                        truncated: true,
                    })
                }
            }
        }
    }
    Err(Error::resource(format!(
        "no tree reached depth {depth} within {budget} attempts"
    )))
}

/// Kesten's tree truncated at `depth`, with its spine.
#[derive(Clone, Debug)]
pub struct KestenTree {
    pub tree: LabeledTree,
    /// Spine vertices from the root down, `depth + 1` of them.
    pub spine: Vec<usize>,
}

/// Kesten's tree cut at generation `depth`: spine vertices reproduce with the
/// size-biased law and pass the spine to a uniform child; all other
/// vertices reproduce with `law`.
pub fn sample_kesten<R: Rng + ?Sized>(law: OffspringLaw, depth: usize, rng: &mut R) -> Result<KestenTree> {
    law.validate()?;
    if depth == 0 {
        return Err(Error::param("depth must be at least 1"));
    }
    let mut parent = vec![NO_PARENT];
    let mut gens = vec![1u64];
    let mut spine = vec![0usize];
    let mut start = 0;
    for _ in 0..depth {
        let end = parent.len();
        let tip = *spine.last().expect("spine is nonempty");
        for v in start..end {
            if v == tip {
                let c = law.sample_size_biased(rng) as usize;
                let special = rng.random_range(0..c);
                spine.push(parent.len() + special);
                parent.extend(std::iter::repeat_n(v as u32, c));
            } else {
                let c = law.sample(rng) as usize;
                parent.extend(std::iter::repeat_n(v as u32, c));
            }
        }
        gens.push((parent.len() - end) as u64);
        start = end;
    }
    Ok(KestenTree {
        tree: LabeledTree {
            parent,
            generation_sizes: gens,
        },
        spine,
    })
}

/// The tree plus one edge from the root to a uniform vertex that is neither
/// the root nor one of its neighbors.
pub fn add_root_edge<R: Rng + ?Sized>(tree: &LabeledTree, rng: &mut R) -> Result<RootedGraph> {
    let target = tree.random_root_edge_target(rng)?;
    tree.with_root_edge(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{kappa, kappa_cycle_decomposition, kappa_tree};
    use crate::randsrc::RngStream;

    fn path_tree(n: usize) -> LabeledTree {
        let parents: Vec<Option<usize>> = (0..n).map(|v| v.checked_sub(1)).collect();
        LabeledTree::from_parents(&parents).unwrap()
    }

    #[test]
    fn from_parents_validates_order() {
        assert!(LabeledTree::from_parents(&[None, Some(0), Some(0), Some(1)]).is_ok());
        assert!(LabeledTree::from_parents(&[None, Some(0), Some(1), Some(0)]).is_err());
        assert!(LabeledTree::from_parents(&[Some(0)]).is_err());
        let t = LabeledTree::from_parents(&[None, Some(0), Some(0), Some(1), Some(2)]).unwrap();
        assert_eq!(t.generation_sizes(), &[1, 2, 2]);
        assert_eq!(t.depths(), vec![0, 1, 1, 2, 2]);
        assert_eq!(t.height(), 2);
    }

    #[test]
    fn forced_target_on_path_gives_cycle() {
        let t = path_tree(10);
        let g = t.with_root_edge(9).unwrap();
        assert_eq!(g.m(), 10);
        assert!((0..10).all(|v| g.degree(v) == 2));
        assert_eq!(kappa(&g).kappa_at_root, 10);
        assert!(t.with_root_edge(1).is_err());
        assert!(t.with_root_edge(0).is_err());
    }

    #[test]
    fn star_has_no_eligible_target() {
        let t = LabeledTree::from_parents(&[None, Some(0), Some(0), Some(0)]).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(add_root_edge(&t, &mut rng), Err(Error::Structural(_))));
        let tiny = path_tree(2);
        assert!(matches!(add_root_edge(&tiny, &mut rng), Err(Error::Parameter(_))));
    }

    #[test]
    fn tree_native_kappa_matches_graph_kappa() {
        let mut rng = RngStream::new(5, 0);
        let mut checked = 0;
        while checked < 200 {
            let t = sample_gw(OffspringLaw::Poisson1, 500, &mut rng).unwrap().tree;
            if t.len() < 3 || t.root_degree() + 1 >= t.len() {
                continue;
            }
            let g = t.to_rooted_graph().unwrap();
            assert_eq!(t.kappa_at_root(), kappa_tree(&g).unwrap());
            assert_eq!(t.kappa_at_root(), kappa(&g).kappa_at_root);
            let target = t.random_root_edge_target(&mut rng).unwrap();
            let h = t.with_root_edge(target).unwrap();
            let k = t.kappa_with_root_edge(target).unwrap();
            assert_eq!(k, kappa_cycle_decomposition(&h).unwrap());
            assert_eq!(k, kappa(&h).kappa_at_root);
            checked += 1;
        }
    }

    #[test]
    fn generation_sizes_sum_to_size() {
        let mut rng = RngStream::new(9, 0);
        for _ in 0..200 {
            let d = sample_gw(OffspringLaw::GeometricHalf, 10_000, &mut rng).unwrap();
            let t = &d.tree;
            assert_eq!(t.generation(0), 1);
            assert_eq!(t.generation_sizes().iter().sum::<u64>() as usize, t.len());
            assert_eq!(*t.depths().iter().max().unwrap() as usize, t.height());
        }
    }

    #[test]
    fn cap_truncates() {
        let mut rng = RngStream::new(3, 0);
        let mut saw = false;
        for _ in 0..2000 {
            let d = sample_gw(OffspringLaw::Poisson1, 20, &mut rng).unwrap();
            assert!(d.tree.len() <= 20);
            if d.truncated {
                saw = true;
                assert_eq!(d.tree.generation_sizes().iter().sum::<u64>() as usize, d.tree.len());
            }
        }
        assert!(saw);
        assert!(sample_gw(OffspringLaw::Poisson1, 0, &mut rng).is_err());
    }

    #[test]
    fn conditioned_trees_reach_depth() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..100 {
            let c = sample_gw_conditioned(OffspringLaw::Poisson1, 20, 1 << 20, &mut rng).unwrap();
            assert!(c.tree.generation(20) > 0);
            assert!(c.attempts >= 1);
        }
        let c = sample_gw_conditioned(OffspringLaw::Poisson1, 30, 50, &mut rng).unwrap();
        assert!(c.truncated && c.tree.len() <= 50);
    }

    #[test]
    fn kesten_spine_has_depth_edges() {
        let mut rng = RngStream::new(2, 0);
        for depth in [1, 5, 40] {
            let k = sample_kesten(OffspringLaw::BinomialCritical(3), depth, &mut rng).unwrap();
            assert_eq!(k.spine.len(), depth + 1);
            assert_eq!(k.tree.height(), depth);
            for w in k.spine.windows(2) {
                assert_eq!(k.tree.parent(w[1]), Some(w[0]));
            }
        }
    }
}
