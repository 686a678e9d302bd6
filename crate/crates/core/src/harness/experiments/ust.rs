use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_stream, fraction, require};
use crate::error::Result;
use crate::genmodels::ColoredWilson;
use crate::harness::report::TheoremReport;
use crate::harness::stats::{ks_two_sample, quantile};
use crate::harness::thresholds::Thresholds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UstParams {
    /// Size at which the probability and urn checks are made.
    pub n: usize,
    /// Sizes compared for stability of the law of κ/n; the smallest and
    /// largest are compared.
    pub stability_ns: Vec<usize>,
    pub runs: usize,
}

impl Default for UstParams {
    fn default() -> Self {
        UstParams {
            n: 2000,
            stability_ns: vec![1000, 4000],
            runs: 500,
        }
    }
}

struct UstDraw {
    kappa: usize,
    urn_ratio: f64,
}

fn draw(n: usize, runs: usize, seed: u64, cell: usize) -> Result<Vec<UstDraw>> {
    ColoredWilson::new(n)?;
    Ok((0..runs)
        .into_par_iter()
        .map_init(
            || ColoredWilson::new(n).expect("validated above"),
            |w, i| {
                let r = w.sample(&mut cell_stream(seed, cell, i));
                UstDraw {
                    kappa: r.kappa_at_root(),
                    urn_ratio: r.red_count as f64 / (r.red_count + r.blue_count) as f64,
                }
            },
        )
        .collect())
}

/// κ at `x_0` of the uniform spanning tree of `K_n` plus the edge
/// `(x_0, x_1)`, and the red share of the colored construction.
pub fn experiment_ust(p: &UstParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    require(p.runs >= 20, "need at least 20 runs")?;
    require(!p.stability_ns.is_empty(), "need at least one stability size")?;
    let mut rep = TheoremReport::new("ust", seed, p, th, &["ust"]);
    let delta = th.ust.delta.value;
    let bin = th.urn.boundary_bin.value;

    let main = draw(p.n, p.runs, seed, 0)?;
    let ratios: Vec<f64> = main.iter().map(|d| d.kappa as f64 / p.n as f64).collect();
    let above = fraction(&ratios, |&r| r > delta);
    let interior = fraction(&main, |d| d.urn_ratio > bin && d.urn_ratio < 1.0 - bin);
    let kmin = main.iter().map(|d| d.kappa).min().unwrap_or(0);
    rep.stat("p_ratio_above_delta", above);
    rep.stat("urn_interior", interior);
    rep.stat("kappa_min", kmin);
    rep.stat(
        "ratio_quantiles",
        [0.05, 0.1, 0.25, 0.5, 0.75, 0.9]
            .iter()
            .map(|&q| json!({"q": q, "ratio": quantile(&ratios, q)}))
            .collect::<Vec<_>>(),
    );

    let mut ns = p.stability_ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut laws = Vec::new();
    let mut samples = Vec::new();
    for (j, &n) in ns.iter().enumerate() {
        let d = draw(n, p.runs, seed, j + 1)?;
        let r: Vec<f64> = d.iter().map(|d| d.kappa as f64 / n as f64).collect();
        laws.push(json!({"n": n, "median": quantile(&r, 0.5), "p_ratio_above_delta": fraction(&r, |&x| x > delta)}));
        samples.push(r);
    }
    let ks = ks_two_sample(&samples[0], samples.last().unwrap());
    rep.stat("stability", laws);
    rep.stat("stability_ks", ks);

    let pmin = th.ust.prob_min.value;
    rep.check("p_ratio_above_delta", above, format!(">= {pmin}"), above >= pmin);
    rep.check("kappa_min", kmin as f64, ">= 2", kmin >= 2);
    let ksmax = th.ust.ks_max.value;
    rep.check("stability_ks", ks.statistic, format!("< {ksmax}"), ks.statistic < ksmax);
    let imin = th.ust.urn_interior_min.value;
    rep.check("urn_interior", interior, format!(">= {imin}"), interior >= imin);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let p = UstParams {
            n: 60,
            stability_ns: vec![40, 80],
            runs: 30,
        };
        let r = experiment_ust(&p, 9, &Thresholds::defaults()).unwrap();
        assert!(r.find("kappa_min").unwrap().passed);
        assert_eq!(r.checks.len(), 4);
    }
}
