use serde::Serialize;

use super::par_runs;
use crate::error::{Error, Result};
use crate::graphcore::{kappa, RootedGraph};
use crate::harness::ensemble::{plateau_detect, run_ensemble, Ensemble, GraphSource, PlateauReport, PlateauRule, Process};
use crate::harness::stats::{hill_tail_index, Estimate};
use crate::randsrc::{RngStream, WeightLaw};
use crate::spread::first_passage_times;

/// Increments `T_{κ+1} − T_κ` over independent spreads on one graph.
#[derive(Clone, Debug, Serialize)]
pub struct BottleneckTail {
    pub kappa: usize,
    pub increments: Vec<f64>,
    pub hill: Estimate,
}

/// Samples the increment across the bottleneck and estimates its tail
/// index from the top `top_fraction` of `runs` spreads (stream `i` for run `i`).
pub fn bottleneck_tail(g: &RootedGraph, law: WeightLaw, runs: usize, seed: u64, top_fraction: f64) -> Result<BottleneckTail> {
    law.validate()?;
    let k = kappa(g).kappa_at_root;
    if k >= g.n() {
        return Err(Error::structural("graph has no bottleneck below n"));
    }
    let increments = par_runs(runs, |i| {
        let t = first_passage_times(g, law, k + 1, &mut RngStream::new(seed, i as u64));
        match t.get(k) {
            Some(&a) => Ok(a - t[k - 1]),
            None => Err(Error::data(format!("run {i} never reached {} vertices", k + 1))),
        }
    })?;
    let hill = hill_tail_index(&increments, top_fraction)?;
    Ok(BottleneckTail { kappa: k, increments, hill })
}

/// Plateau detection on a fixed graph next to its bottleneck index.
#[derive(Clone, Debug, Serialize)]
pub struct PlateauScan {
    pub kappa: usize,
    pub report: PlateauReport,
}

impl PlateauScan {
    /// The detector fired strictly before the bottleneck.
    pub fn premature(&self) -> bool {
        self.report.first_unstable.is_some_and(|k| k < self.kappa)
    }
}

pub fn plateau_scan(g: &RootedGraph, law: WeightLaw, runs: usize, batches: usize, seed: u64, rule: PlateauRule) -> Result<PlateauScan> {
    let spec = Ensemble {
        source: GraphSource::Given(g.clone()),
        law,
        runs,
        batches,
        master_seed: seed,
        process: Process::Spread,
    };
    let stats = run_ensemble(&spec)?;
    Ok(PlateauScan {
        kappa: kappa(g).kappa_at_root,
        report: plateau_detect(&stats, rule)?,
    })
}
