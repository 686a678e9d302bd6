//! Spreading processes driven by i.i.d. passage times.
//!
//! [`run_spread`] is first passage percolation from the root: vertex
//! infection times are shortest-path distances. [`run_delayed`] is the
//! comparison process that keeps at most two edges transmitting at once,
//! picked by edge index. [`run_q`] is the scalar recursion in which one of
//! the two competing clocks is always old.

mod delayed;
mod fpp;
mod q;
mod trace;
mod weights;

pub use delayed::{run_delayed, run_delayed_with};
pub use fpp::{first_passage_times, run_spread, run_spread_with};
pub use q::{bound_recursion, recursion_constant, run_q, star_tail, QTrace};
pub use trace::{Arrival, SpreadTrace};
pub use weights::EdgeWeights;
