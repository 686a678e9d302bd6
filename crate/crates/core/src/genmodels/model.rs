use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{add_root_edge, sample_er, sample_gw_conditioned, sample_ust_colored, OffspringLaw};
use crate::error::{Error, Result};
use crate::graphcore::RootedGraph;

/// Default size cap for conditioned Galton–Watson trees.
pub const GW_DEFAULT_SIZE_CAP: usize = 10_000_000;

fn default_size_cap() -> usize {
    GW_DEFAULT_SIZE_CAP
}

/// A rooted graph family that can be sampled from a random stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphModel {
    /// Path rooted at an endpoint.
    Path { n: usize },
    Cycle { n: usize },
    /// Star rooted at the center.
    Star { n: usize },
    Complete { n: usize },
    /// GW tree conditioned on `Z_depth > 0`, rooted at the ancestor,
    /// optionally with one extra edge from the root to a uniform vertex.
    GwConditioned {
        offspring: OffspringLaw,
        depth: usize,
        #[serde(default)]
        extra_edge: bool,
        #[serde(default = "default_size_cap")]
        size_cap: usize,
    },
    /// Uniform spanning tree of `K_n` plus an edge at the root `x_0`.
    Ust { n: usize },
    /// Largest cluster of near-critical `G(n, p)`, rooted at a uniform vertex.
    Er { n: usize, lambda: f64 },
}

/// A sampled graph with model-specific statistics for the metadata sidecar.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: RootedGraph,
    pub stats: Value,
}

impl GraphModel {
    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::Path { .. } => "path",
            GraphModel::Cycle { .. } => "cycle",
            GraphModel::Star { .. } => "star",
            GraphModel::Complete { .. } => "complete",
            GraphModel::GwConditioned { .. } => "gw-conditioned",
            GraphModel::Ust { .. } => "ust",
            GraphModel::Er { .. } => "er",
        }
    }

    /// Whether every sample is the same graph.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            GraphModel::Path { .. } | GraphModel::Cycle { .. } | GraphModel::Star { .. } | GraphModel::Complete { .. }
        )
    }

    /// Model parameters as a JSON object, without the model name.
    pub fn params(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        if let Value::Object(m) = &mut v {
            m.remove("model");
        }
        v
    }

    /// Samples one graph. A conditioned GW tree that exceeds its size cap is
    /// a resource error.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Generated> {
        match *self {
            GraphModel::Path { n } => plain(RootedGraph::path(n, 0)),
            GraphModel::Cycle { n } => plain(RootedGraph::cycle(n, 0)),
            GraphModel::Star { n } => plain(RootedGraph::star(n, 0)),
            GraphModel::Complete { n } => plain(RootedGraph::complete(n, 0)),
            GraphModel::GwConditioned {
                offspring,
                depth,
                extra_edge,
                size_cap,
            } => {
                let draw = sample_gw_conditioned(offspring, depth, size_cap, rng)?;
                if draw.truncated {
                    return Err(Error::resource(format!(
                        "conditioned tree exceeded the size cap of {size_cap} vertices"
                    )));
                }
                let tree = &draw.tree;
                let graph = if extra_edge {
                    add_root_edge(tree, rng)?
                } else {
                    tree.to_rooted_graph()?
                };
                let stats = json!({
                    "attempts": draw.attempts,
                    "rejections": draw.attempts - 1,
                    "tree_size": tree.len(),
                    "height": tree.height(),
                    "kappa_tree": tree.kappa_at_root(),
                });
                Ok(Generated { graph, stats })
            }
            GraphModel::Ust { n } => {
                let r = sample_ust_colored(n, rng)?;
                let graph = r.graph()?;
                let stats = json!({
                    "first_path_length": r.first_path_length(),
                    "parallel_extra_edge": r.parallel_extra_edge,
                    "red_count": r.red_count,
                    "blue_count": r.blue_count,
                    "kappa_at_root": r.kappa_at_root(),
                });
                Ok(Generated { graph, stats })
            }
            GraphModel::Er { n, lambda } => {
                let s = sample_er(n, lambda, rng)?;
                let root = rng.random_range(0..s.largest_cluster.n());
                let stats = json!({
                    "p": s.p,
                    "cluster_size": s.largest_cluster.n(),
                    "surplus": s.surplus_of_largest,
                    "second_cluster_size": s.cluster_sizes.get(1).copied().unwrap_or(0),
                    "root_original_id": s.cluster_vertices[root],
                });
                Ok(Generated {
                    graph: s.largest_cluster.rooted(root)?,
                    stats,
                })
            }
        }
    }
}

fn plain(g: Result<RootedGraph>) -> Result<Generated> {
    Ok(Generated {
        graph: g?,
        stats: json!({}),
    })
}
