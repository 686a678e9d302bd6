use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_stream, fraction, par_runs, require};
use crate::error::Result;
use crate::genmodels::{sample_gw_conditioned, OffspringLaw, GW_DEFAULT_SIZE_CAP};
use crate::harness::report::TheoremReport;
use crate::harness::stats::{mean, quantile};
use crate::harness::thresholds::Thresholds;

const QUANTILES: [f64; 6] = [0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwTightnessParams {
    pub offspring: OffspringLaw,
    /// Conditioning depths `N`, at least three.
    pub depths: Vec<usize>,
    pub runs: usize,
    pub size_cap: usize,
}

impl Default for GwTightnessParams {
    fn default() -> Self {
        GwTightnessParams {
            offspring: OffspringLaw::Poisson1,
            depths: vec![50, 100, 200],
            runs: 2000,
            size_cap: GW_DEFAULT_SIZE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GwExtraEdgeParams {
    pub offspring: OffspringLaw,
    pub depth: usize,
    pub runs: usize,
    pub size_cap: usize,
}

impl Default for GwExtraEdgeParams {
    fn default() -> Self {
        GwExtraEdgeParams {
            offspring: OffspringLaw::Poisson1,
            depth: 100,
            runs: 2000,
            size_cap: GW_DEFAULT_SIZE_CAP,
        }
    }
}

struct TreeDraw {
    /// `None` when the tree hit the size cap.
    size: Option<usize>,
    kappa: Option<usize>,
    kappa_extra: Option<usize>,
    attempts: u64,
}

fn draw_trees(offspring: OffspringLaw, depth: usize, runs: usize, size_cap: usize, seed: u64, cell: usize, extra: bool) -> Result<Vec<TreeDraw>> {
    par_runs(runs, |i| {
        let mut rng = cell_stream(seed, cell, i);
        let d = sample_gw_conditioned(offspring, depth, size_cap, &mut rng)?;
        if d.truncated {
            return Ok(TreeDraw {
                size: None,
                kappa: None,
                kappa_extra: None,
                attempts: d.attempts,
            });
        }
        let kappa_extra = if extra && d.tree.len() > d.tree.root_degree() + 1 {
            let target = d.tree.random_root_edge_target(&mut rng)?;
            Some(d.tree.kappa_with_root_edge(target)?)
        } else {
            None
        };
        Ok(TreeDraw {
            size: Some(d.tree.len()),
            kappa: Some(d.tree.kappa_at_root()),
            kappa_extra,
            attempts: d.attempts,
        })
    })
}

/// κ at the root of conditioned GW trees across a depth grid. Passes when
/// the 95th percentile at the largest depth is within the configured ratio
/// of that at the smallest, and the median at the largest depth is small.
/// Trees that hit the size cap count as `κ = ∞`.
pub fn experiment_gw_tightness(p: &GwTightnessParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    p.offspring.validate()?;
    require(p.depths.len() >= 3, "need at least 3 depths")?;
    require(p.runs >= 20, "need at least 20 runs")?;
    let mut depths = p.depths.clone();
    depths.sort_unstable();
    let mut rep = TheoremReport::new("gw-tightness", seed, p, th, &["gw"]);
    let delta = th.gw.extra_edge_delta.value;
    let mut p95 = Vec::new();
    let mut median_last = f64::NAN;
    let mut per_depth = Vec::new();
    for (cell, &depth) in depths.iter().enumerate() {
        let draws = draw_trees(p.offspring, depth, p.runs, p.size_cap, seed, cell, false)?;
        let kappas: Vec<f64> = draws
            .iter()
            .map(|d| d.kappa.map_or(f64::INFINITY, |k| k as f64))
            .collect();
        let qs: Vec<f64> = QUANTILES.iter().map(|&q| quantile(&kappas, q)).collect();
        p95.push(quantile(&kappas, 0.95));
        median_last = quantile(&kappas, 0.5);
        let cdf: Vec<(usize, f64)> = [1usize, 2, 3, 5, 10, 20, 50, 100]
            .iter()
            .map(|&v| (v, fraction(&kappas, |&k| k <= v as f64)))
            .collect();
        let ratio_mass = fraction(&draws, |d| match (d.kappa, d.size) {
            (Some(k), Some(n)) => k as f64 / n as f64 > delta,
            _ => false,
        });
        let attempts: Vec<f64> = draws.iter().map(|d| d.attempts as f64).collect();
        per_depth.push(json!({
            "depth": depth,
            "quantiles": QUANTILES.iter().zip(&qs).map(|(q, v)| json!({"q": q, "kappa": v})).collect::<Vec<_>>(),
            "cdf": cdf.iter().map(|(v, f)| json!({"kappa_le": v, "fraction": f})).collect::<Vec<_>>(),
            "truncated": draws.iter().filter(|d| d.size.is_none()).count(),
            "mean_attempts": mean(&attempts),
            "p_ratio_above_delta_without_edge": ratio_mass,
        }));
    }
    rep.stat("per_depth", per_depth);
    let limit = p.offspring.limit_kappa_quantiles(&QUANTILES[..5], 1_000_000);
    rep.stat(
        "limit_quantiles",
        QUANTILES.iter().zip(&limit).map(|(q, v)| json!({"q": q, "kappa": v})).collect::<Vec<_>>(),
    );
    let ratio = p95.last().unwrap() / p95[0];
    rep.stat("p95_ratio", ratio);
    let rmax = th.gw.p95_ratio_max.value;
    rep.check("p95_ratio", ratio, format!("< {rmax}"), ratio < rmax);
    let mmax = th.gw.median_max.value;
    rep.check("median_at_largest_depth", median_last, format!("< {mmax}"), median_last < mmax);
    Ok(rep)
}

/// κ/|G| after adding one root edge to conditioned GW trees. Passes when
/// `P[κ/|G| > δ]` reaches the configured level. Trees that hit the size
/// cap count as failures.
pub fn experiment_gw_extra_edge(p: &GwExtraEdgeParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    p.offspring.validate()?;
    require(p.runs >= 20, "need at least 20 runs")?;
    require(p.depth >= 2, "need depth >= 2")?;
    let mut rep = TheoremReport::new("gw-extra-edge", seed, p, th, &["gw"]);
    let delta = th.gw.extra_edge_delta.value;
    let draws = draw_trees(p.offspring, p.depth, p.runs, p.size_cap, seed, 0, true)?;
    let ratios: Vec<f64> = draws
        .iter()
        .map(|d| match (d.kappa_extra, d.size) {
            (Some(k), Some(n)) => k as f64 / n as f64,
            _ => 0.0,
        })
        .collect();
    let plain: Vec<f64> = draws
        .iter()
        .map(|d| match (d.kappa, d.size) {
            (Some(k), Some(n)) => k as f64 / n as f64,
            _ => 0.0,
        })
        .collect();
    let with_edge = fraction(&ratios, |&r| r > delta);
    let without = fraction(&plain, |&r| r > delta);
    rep.stat("p_ratio_above_delta", with_edge);
    rep.stat("p_ratio_above_delta_without_edge", without);
    rep.stat(
        "ratio_quantiles",
        QUANTILES.iter().map(|&q| json!({"q": q, "ratio": quantile(&ratios, q)})).collect::<Vec<_>>(),
    );
    rep.stat("truncated", draws.iter().filter(|d| d.size.is_none()).count());
    let rmax = ratios.iter().copied().fold(0.0, f64::max);
    rep.stat("ratio_max", rmax);
    let pmin = th.gw.extra_edge_prob_min.value;
    rep.check("p_ratio_above_delta", with_edge, format!(">= {pmin}"), with_edge >= pmin);
    rep.check("ratio_max", rmax, "<= 1", rmax <= 1.0);
    Ok(rep)
}
