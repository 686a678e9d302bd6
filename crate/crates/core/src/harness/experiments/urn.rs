use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_stream, fraction, par_runs, require};
use crate::error::Result;
use crate::genmodels::{ColoredUstResult, ColoredWilson};
use crate::harness::report::TheoremReport;
use crate::harness::stats::{chi_square, ks_one_sample, ks_two_sample, ols, quantile};
use crate::harness::thresholds::Thresholds;
use crate::urn::{increment_boundedness_check, urn_run, UrnState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrnParams {
    /// Classic urn from (1, 1) with unit increments.
    pub classic_steps: usize,
    pub classic_runs: usize,
    /// Short classic runs pooled for the one-step regression.
    pub martingale_runs: usize,
    pub martingale_steps: usize,
    /// Urn from (5, 5) with constant increments 5.
    pub scale_steps: usize,
    pub scale_runs: usize,
    /// Urn fed by colored Wilson branch sizes on `K_n`.
    pub wilson_n: usize,
    pub wilson_runs: usize,
    /// Sizes for the stability of the largest branch over `√n`.
    pub increment_ns: Vec<usize>,
    pub increment_runs: usize,
}

impl Default for UrnParams {
    fn default() -> Self {
        UrnParams {
            classic_steps: 1000,
            classic_runs: 100_000,
            martingale_runs: 1000,
            martingale_steps: 100,
            scale_steps: 2000,
            scale_runs: 2000,
            wilson_n: 2000,
            wilson_runs: 1000,
            increment_ns: vec![500, 2000, 8000],
            increment_runs: 1000,
        }
    }
}

struct WilsonDraw {
    result: ColoredUstResult,
    /// Final ratio from the colored initial urn.
    ratio: f64,
    /// Final ratio from `(1, 1)` with the same increments.
    symmetric_ratio: f64,
}

fn wilson_runs(n: usize, runs: usize, seed: u64, cell: usize) -> Result<Vec<WilsonDraw>> {
    ColoredWilson::new(n)?;
    (0..runs)
        .into_par_iter()
        .map_init(
            || ColoredWilson::new(n).expect("validated above"),
            |w, i| {
                let mut rng = cell_stream(seed, cell, i);
                let r = w.sample(&mut rng);
                let incs: Vec<u64> = r.urn_increments().iter().map(|&d| d as u64).collect();
                let ratio = match r.initial_urn() {
                    None => 0.0,
                    Some((red, blue)) if incs.is_empty() => red as f64 / (red + blue) as f64,
                    Some(init) => urn_run(init, &incs, &mut rng)?,
                };
                let symmetric_ratio = if incs.is_empty() { 0.5 } else { urn_run((1, 1), &incs, &mut rng)? };
                Ok(WilsonDraw {
                    result: r,
                    ratio,
                    symmetric_ratio,
                })
            },
        )
        .collect()
}

/// Pólya urn checks: exact uniformity of the classic urn, conservation, the
/// martingale property, scale behaviour with constant increments, and the
/// boundary mass of the urn driven by colored Wilson increments.
pub fn experiment_urn(p: &UrnParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    require(p.classic_steps >= 1 && p.classic_runs >= 100, "classic urn needs steps >= 1 and runs >= 100")?;
    require(p.martingale_runs * p.martingale_steps >= 100, "martingale regression needs at least 100 steps")?;
    require(p.scale_steps >= 1 && p.scale_runs >= 20, "scale test needs steps >= 1 and runs >= 20")?;
    require(p.wilson_runs >= 20 && p.increment_runs >= 20, "Wilson tests need at least 20 runs")?;
    require(!p.increment_ns.is_empty(), "need at least one increment size")?;
    let mut rep = TheoremReport::new("urn", seed, p, th, &["urn"]);
    let t = &th.urn;
    let pmin = t.p_value_min.value;
    let bin = t.boundary_bin.value;

    // Classic urn: red count is uniform on 1..=steps+1.
    let steps = p.classic_steps;
    let ones = vec![1u64; steps];
    let classic: Vec<(u64, bool)> = par_runs(p.classic_runs, |i| {
        let mut rng = cell_stream(seed, 0, i);
        let mut s = UrnState::new(1, 1)?;
        for &inc in &ones {
            s.step(inc, &mut rng)?;
        }
        Ok((s.red(), s.total() == 2 + steps as u64))
    })?;
    let mut counts = vec![0u64; steps + 1];
    for &(red, _) in &classic {
        counts[red as usize - 1] += 1;
    }
    let expected = vec![p.classic_runs as f64 / (steps + 1) as f64; steps + 1];
    let chi = chi_square(&counts, &expected)?;
    let broken = classic.iter().filter(|c| !c.1).count();
    rep.stat("classic_chi_square", chi);

    // Martingale: regress the one-step ratio change on the current ratio.
    let pairs: Vec<Vec<(f64, f64)>> = par_runs(p.martingale_runs, |i| {
        let mut rng = cell_stream(seed, 1, i);
        let mut s = UrnState::new(1, 1)?;
        let mut out = Vec::with_capacity(p.martingale_steps);
        for _ in 0..p.martingale_steps {
            let before = s.ratio();
            s.step(1, &mut rng)?;
            out.push((before, s.ratio() - before));
        }
        Ok(out)
    })?;
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().flatten().unzip();
    let (_, slope) = ols(&x, &y);
    rep.stat("martingale_slope", slope);

    // Constant increments 5 from (5, 5): two independent replicate sets.
    let fives = vec![5u64; p.scale_steps];
    let scale = |cell: usize| {
        par_runs(p.scale_runs, |i| urn_run((5, 5), &fives, &mut cell_stream(seed, cell, i)))
    };
    let (sa, sb) = (scale(2)?, scale(3)?);
    let scale_ks = ks_two_sample(&sa, &sb);
    let uniform_ks = ks_one_sample(&sa, |x| x.clamp(0.0, 1.0));
    let low = fraction(&sa, |&r| r <= bin);
    let high = fraction(&sa, |&r| r >= 1.0 - bin);
    rep.stat("scale_replicate_ks", scale_ks);
    rep.stat("scale_uniform_ks", uniform_ks);
    rep.stat("scale_boundary", json!({"low": low, "high": high}));

    // Wilson-fed urn.
    let wil = wilson_runs(p.wilson_n, p.wilson_runs, seed, 4)?;
    let ratios: Vec<f64> = wil.iter().map(|w| w.ratio).collect();
    let boundary = fraction(&ratios, |&r| r <= bin || r >= 1.0 - bin);
    // Relabeling symmetry needs a symmetric start: same increments from (1, 1).
    let sym: Vec<f64> = wil.iter().map(|w| w.symmetric_ratio).collect();
    let mirrored: Vec<f64> = sym.iter().map(|r| 1.0 - r).collect();
    let symmetry = ks_two_sample(&sym, &mirrored);
    rep.stat("wilson_boundary_mass", boundary);
    rep.stat("wilson_ratio_median", quantile(&ratios, 0.5));
    rep.stat("wilson_symmetry_ks", symmetry);

    // Largest branch over √n across sizes.
    let mut ns = p.increment_ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut p90 = Vec::new();
    for (j, &n) in ns.iter().enumerate() {
        let runs: Vec<ColoredUstResult> = wilson_runs(n, p.increment_runs, seed, 5 + j)?.into_iter().map(|w| w.result).collect();
        let b = increment_boundedness_check(&runs, n)?;
        p90.push(json!({"n": n, "p50": b.p50, "p90": b.p90}));
    }
    let vals: Vec<f64> = p90.iter().map(|v| v["p90"].as_f64().unwrap_or(f64::NAN)).collect();
    let reference = *vals.last().unwrap();
    let spread = vals.iter().map(|v| (v / reference - 1.0).abs()).fold(0.0, f64::max);
    rep.stat("increment_p90", p90);

    rep.check("classic_chi_square_p", chi.p_value, format!("> {pmin}"), chi.p_value > pmin);
    rep.check("conservation_violations", broken as f64, "== 0", broken == 0);
    let smax = t.martingale_slope_max.value;
    rep.check("martingale_slope", slope, format!("|slope| < {smax}"), slope.abs() < smax);
    rep.check("scale_replicate_ks_p", scale_ks.p_value, format!("> {pmin}"), scale_ks.p_value > pmin);
    let side = t.scale_side_max.value;
    rep.check("scale_boundary_low", low, format!("< {side}"), low < side);
    rep.check("scale_boundary_high", high, format!("< {side}"), high < side);
    let wmax = t.wilson_boundary_max.value;
    rep.check("wilson_boundary_mass", boundary, format!("< {wmax}"), boundary < wmax);
    rep.check("wilson_symmetry_ks_p", symmetry.p_value, format!("> {pmin}"), symmetry.p_value > pmin);
    let tol = t.increment_p90_tolerance.value;
    rep.check("increment_p90_spread", spread, format!("<= {tol}"), spread <= tol);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let p = UrnParams {
            classic_steps: 5,
            classic_runs: 600,
            martingale_runs: 20,
            martingale_steps: 10,
            scale_steps: 50,
            scale_runs: 50,
            wilson_n: 50,
            wilson_runs: 30,
            increment_ns: vec![30, 60],
            increment_runs: 30,
        };
        let r = experiment_urn(&p, 5, &Thresholds::defaults()).unwrap();
        assert!(r.find("conservation_violations").unwrap().passed);
        assert_eq!(r.checks.len(), 9);
    }
}
