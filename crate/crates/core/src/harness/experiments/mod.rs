//! Packaged experiments. Each one samples, summarizes and compares against
//! [`Thresholds`](super::Thresholds), returning a [`TheoremReport`].
//!
//! Random streams: cell `c` of an experiment grid (one depth, one `n`, one
//! `λ`, …) gives run `i` the stream `(c << 32) | i` of the master seed, so
//! every run is reproducible on its own and cells never share draws.

mod bottleneck;
mod er;
mod gw;
mod scaling;
mod urn;
mod ust;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::randsrc::RngStream;

pub use bottleneck::{bottleneck_tail, plateau_scan, BottleneckTail, PlateauScan};
pub use er::{experiment_er, ErParams};
pub use gw::{experiment_gw_extra_edge, experiment_gw_tightness, GwExtraEdgeParams, GwTightnessParams};
pub use scaling::{
    experiment_cycle_scaling, experiment_q_scaling, experiment_star_scaling, CycleScalingParams, QScalingParams,
    StarScalingParams,
};
pub use urn::{experiment_urn, UrnParams};
pub use ust::{experiment_ust, UstParams};

/// Stream of run `run` in grid cell `cell`.
pub fn cell_stream(seed: u64, cell: usize, run: usize) -> RngStream {
    RngStream::new(seed, ((cell as u64) << 32) | run as u64)
}

/// `f(0), …, f(runs − 1)` evaluated on the current pool, in run order.
pub(crate) fn par_runs<T: Send>(runs: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..runs).into_par_iter().map(f).collect()
}

pub(crate) fn fraction<T>(xs: &[T], pred: impl Fn(&T) -> bool) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().filter(|x| pred(x)).count() as f64 / xs.len() as f64
}

pub(crate) fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(msg))
    }
}

/// Identifiers accepted by the `experiment` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentId {
    GwTightness,
    GwExtraEdge,
    Ust,
    Er,
    Urn,
    QScaling,
    CycleScaling,
    StarScaling,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::GwTightness,
        ExperimentId::GwExtraEdge,
        ExperimentId::Ust,
        ExperimentId::Er,
        ExperimentId::Urn,
        ExperimentId::QScaling,
        ExperimentId::CycleScaling,
        ExperimentId::StarScaling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::GwTightness => "gw-tightness",
            ExperimentId::GwExtraEdge => "gw-extra-edge",
            ExperimentId::Ust => "ust",
            ExperimentId::Er => "er",
            ExperimentId::Urn => "urn",
            ExperimentId::QScaling => "q-scaling",
            ExperimentId::CycleScaling => "cycle-scaling",
            ExperimentId::StarScaling => "star-scaling",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown experiment {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("gw".parse::<ExperimentId>().is_err());
    }
}
