//! Rooted simple graphs and exact bottleneck indices.
//!
//! The bottleneck index of a rooted connected graph `(G, s)` is
//! `κ(G, s) = min_e |C(s, G∖e)|`, the smallest root component left after
//! deleting one edge. Only bridges can disconnect, so `κ` is the smallest
//! root-side size over bridges, and `n` when there are none.

mod graph;
mod io;
mod kappa;

pub use graph::{Graph, RootedGraph};
pub use io::{read_edge_list, read_edge_list_file, write_edge_list, write_edge_list_file};
pub use kappa::{
    kappa, kappa_cycle_decomposition, kappa_d, kappa_d_with_cap, kappa_oracle, kappa_tree,
    kappa_with_per_vertex, max_kappa_over_roots, Bridge, KappaProfile, KAPPA_D_DEFAULT_CAP, ORACLE_MAX_N,
};
