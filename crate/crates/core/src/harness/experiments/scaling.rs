use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_stream, par_runs, require};
use crate::error::Result;
use crate::graphcore::RootedGraph;
use crate::harness::ensemble::{run_ensemble, Ensemble, GraphSource, Process};
use crate::harness::report::TheoremReport;
use crate::harness::stats::{fit_exponent, mean, std_err};
use crate::harness::thresholds::Thresholds;
use crate::randsrc::WeightLaw;
use crate::spread::run_q;

const BOOTSTRAP: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleScalingParams {
    pub alpha: f64,
    pub n: usize,
    pub runs: usize,
    pub batches: usize,
    /// Fit range `[k_lo, k_hi]` of the log-log slope.
    pub k_lo: usize,
    pub k_hi: usize,
}

impl Default for CycleScalingParams {
    fn default() -> Self {
        CycleScalingParams {
            alpha: 0.8,
            n: 512,
            runs: 2000,
            batches: 20,
            k_lo: 16,
            k_hi: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarScalingParams {
    pub alpha: f64,
    pub ns: Vec<usize>,
    pub runs: usize,
}

impl Default for StarScalingParams {
    fn default() -> Self {
        StarScalingParams {
            alpha: 0.8,
            ns: vec![64, 256, 1024],
            runs: 5000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QScalingParams {
    pub alpha: f64,
    /// The slope is fitted on `k_min, 2k_min, …, k_max`; `k_max/k_min` must
    /// be at least 16. Defaults to `k_max/32` (at least 2).
    pub k_min: Option<usize>,
    pub k_max: usize,
    pub runs: usize,
    /// Ages at which the mean of `min(X, Y − t | Y > t)` is compared with
    /// its quadrature value.
    pub ages: Vec<f64>,
    pub age_samples: usize,
}

impl Default for QScalingParams {
    fn default() -> Self {
        QScalingParams {
            alpha: 0.8,
            k_min: None,
            k_max: 4096,
            runs: 20_000,
            ages: vec![10.0, 100.0],
            age_samples: 1_000_000,
        }
    }
}

/// About four points per octave in `[lo, hi]`.
fn geometric_grid(lo: usize, hi: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let k = (lo as f64 * 2f64.powf(j as f64 / 4.0)).round() as usize;
        if k > hi {
            break;
        }
        if out.last() != Some(&k) {
            out.push(k);
        }
        j += 1;
    }
    out
}

/// `⟨T_k⟩` on the cycle rooted anywhere; passes when the log-log slope on
/// `[k_lo, k_hi]` is within tolerance of `1/α`.
pub fn experiment_cycle_scaling(p: &CycleScalingParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    let law = WeightLaw::power(p.alpha, 1.0)?;
    require(p.k_lo >= 2 && p.k_lo < p.k_hi && p.k_hi <= p.n, "need 2 <= k_lo < k_hi <= n")?;
    let mut rep = TheoremReport::new("cycle-scaling", seed, p, th, &["scaling"]);
    let spec = Ensemble {
        source: GraphSource::Given(RootedGraph::cycle(p.n, 0)?),
        law,
        runs: p.runs,
        batches: p.batches,
        master_seed: seed,
        process: Process::Spread,
    };
    let stats = run_ensemble(&spec)?;
    let grid = geometric_grid(p.k_lo, p.k_hi);
    let ks: Vec<f64> = grid.iter().map(|&k| k as f64).collect();
    let means: Vec<f64> = grid.iter().map(|&k| stats.rows[k - 1].mean).collect();
    let fit = fit_exponent(&ks, &means, BOOTSTRAP, seed)?;
    rep.stat("grid", grid.iter().zip(&means).map(|(k, m)| json!({"k": k, "mean": m})).collect::<Vec<_>>());
    rep.stat("slope", fit);
    let target = 1.0 / p.alpha;
    let tol = th.scaling.cycle_slope_tolerance.value;
    let (lo, hi) = (target - tol, target + tol);
    rep.check("slope", fit.value, format!("in [{lo:.4}, {hi:.4}]"), fit.value >= lo && fit.value <= hi);
    Ok(rep)
}

/// `⟨T_{n−1}⟩ n^{−1/α}` on stars rooted at the center; passes when it
/// varies by less than the configured factor across `n`. Size number `j`
/// is an ensemble with master seed `seed + j`.
pub fn experiment_star_scaling(p: &StarScalingParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    let law = WeightLaw::power(p.alpha, 1.0)?;
    require(p.ns.len() >= 2, "need at least 2 sizes")?;
    require(p.ns.iter().all(|&n| n >= 3), "stars need at least 3 vertices")?;
    let mut rep = TheoremReport::new("star-scaling", seed, p, th, &["scaling"]);
    let mut rows = Vec::new();
    let mut normalized = Vec::new();
    for (cell, &n) in p.ns.iter().enumerate() {
        let spec = Ensemble {
            source: GraphSource::Given(RootedGraph::star(n, 0)?),
            law,
            runs: p.runs,
            batches: 10.min(p.runs),
            master_seed: seed.wrapping_add(cell as u64),
            process: Process::Spread,
        };
        let stats = run_ensemble(&spec)?;
        let m = stats.rows[n - 2].mean;
        let v = m * (n as f64).powf(-1.0 / p.alpha);
        normalized.push(v);
        rows.push(json!({"n": n, "mean_t_n_minus_1": m, "normalized": v}));
    }
    let max = normalized.iter().copied().fold(f64::MIN, f64::max);
    let min = normalized.iter().copied().fold(f64::MAX, f64::min);
    let factor = max / min;
    rep.stat("per_n", rows);
    rep.stat("factor", factor);
    let fmax = th.scaling.star_factor_max.value;
    rep.check("factor", factor, format!("< {fmax}"), factor < fmax);
    Ok(rep)
}

/// The Q recursion: slope of `E[Q_k]`, the exact mean of `Q_2`, and the
/// quadrature of the mean minimum of a fresh and an aged edge.
pub fn experiment_q_scaling(p: &QScalingParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    let law = WeightLaw::power(p.alpha, 1.0)?;
    require(p.alpha > 0.5 && p.alpha < 1.0, "alpha must lie in (1/2, 1)")?;
    let k_min = p.k_min.unwrap_or((p.k_max / 32).max(2));
    require(k_min >= 2 && p.k_max >= 16 * k_min, "need k_min >= 2 and k_max >= 16 k_min")?;
    require(p.runs >= 100 && p.age_samples >= 100, "need at least 100 runs and age samples")?;
    let mut rep = TheoremReport::new("q-scaling", seed, p, th, &["scaling"]);
    let traces = par_runs(p.runs, |i| Ok(run_q(law, p.k_max, &mut cell_stream(seed, 0, i))?.values))?;
    let column = |k: usize| traces.iter().map(|t| t[k - 1]).collect::<Vec<f64>>();

    let mut grid = Vec::new();
    let mut k = k_min;
    while k <= p.k_max {
        grid.push(k);
        k *= 2;
    }
    let ks: Vec<f64> = grid.iter().map(|&k| k as f64).collect();
    let means: Vec<f64> = grid.iter().map(|&k| mean(&column(k))).collect();
    let fit = fit_exponent(&ks, &means, BOOTSTRAP, seed)?;
    rep.stat("grid", grid.iter().zip(&means).map(|(k, m)| json!({"k": k, "mean": m})).collect::<Vec<_>>());
    rep.stat("slope", fit);

    let z = th.scaling.std_errors.value;
    let q2 = column(2);
    let (q2_mean, q2_se) = (mean(&q2), std_err(&q2));
    let q2_exact = 2.0 * p.alpha / (2.0 * p.alpha - 1.0);
    let q2_z = (q2_mean - q2_exact) / q2_se;
    rep.stat("q2", json!({"mean": q2_mean, "std_err": q2_se, "exact": q2_exact, "z": q2_z}));

    let mut ages = Vec::new();
    let mut worst_z: f64 = 0.0;
    for (j, &t) in p.ages.iter().enumerate() {
        let exact = law.residual_min_mean(t)?;
        let xs = par_runs(p.age_samples, |i| {
            let mut rng = cell_stream(seed, 1 + j, i);
            let fresh = law.sample(&mut rng);
            Ok(fresh.min(law.sample_residual(t, &mut rng)?))
        })?;
        let (m, se) = (mean(&xs), std_err(&xs));
        let zt = (m - exact) / se;
        worst_z = worst_z.max(zt.abs());
        ages.push(json!({"t": t, "quadrature": exact, "mean": m, "std_err": se, "z": zt}));
    }
    rep.stat("aged_minimum", ages);

    let target = 1.0 / p.alpha;
    let tol = th.scaling.q_slope_tolerance.value;
    let (lo, hi) = (target - tol, target + tol);
    rep.check("slope", fit.value, format!("in [{lo:.4}, {hi:.4}]"), fit.value >= lo && fit.value <= hi);
    rep.check("q2_z", q2_z, format!("|z| <= {z}"), q2_z.abs() <= z);
    rep.check("aged_minimum_max_z", worst_z, format!("<= {z}"), worst_z <= z);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_geometric() {
        let g = geometric_grid(16, 256);
        assert_eq!(g.first(), Some(&16));
        assert_eq!(g.last(), Some(&256));
        assert_eq!(g.len(), 17);
    }

    #[test]
    fn small_runs() {
        let th = Thresholds::defaults();
        let c = CycleScalingParams {
            n: 64,
            runs: 100,
            batches: 10,
            k_lo: 4,
            k_hi: 32,
            ..Default::default()
        };
        assert_eq!(experiment_cycle_scaling(&c, 1, &th).unwrap().checks.len(), 1);
        let s = StarScalingParams {
            ns: vec![8, 16],
            runs: 100,
            ..Default::default()
        };
        assert_eq!(experiment_star_scaling(&s, 1, &th).unwrap().checks.len(), 1);
        let q = QScalingParams {
            k_max: 32,
            runs: 200,
            age_samples: 200,
            ..Default::default()
        };
        assert_eq!(experiment_q_scaling(&q, 1, &th).unwrap().checks.len(), 3);
        assert!(experiment_q_scaling(&QScalingParams { alpha: 0.4, ..q }, 1, &th).is_err());
    }
}
