//! Random graph families: critical Galton–Watson trees (plain, conditioned
//! on survival to a given depth, and the Kesten spine tree), uniform
//! spanning trees of `K_n` through a colored variant of Wilson's algorithm,
//! and near-critical Erdős–Rényi clusters.

mod dsu;
mod er;
mod gw;
mod model;
mod offspring;
mod wilson;

pub use er::{er_labels, er_probability, sample_er, sample_er_from_labels, ErSample};
pub use gw::{
    add_root_edge, sample_gw, sample_gw_conditioned, sample_kesten, ConditionedGw, GwDraw,
    KestenTree, LabeledTree, CONDITIONED_BUDGET_PER_DEPTH,
};
pub use model::{Generated, GraphModel, GW_DEFAULT_SIZE_CAP};
pub use offspring::OffspringLaw;
pub use wilson::{delta_law, first_path_law, sample_ust_colored, ColoredUstResult, ColoredWilson};
