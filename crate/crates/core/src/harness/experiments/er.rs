use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_stream, fraction, par_runs, require};
use crate::error::Result;
use crate::genmodels::sample_er;
use crate::graphcore::{kappa, max_kappa_over_roots, Graph, RootedGraph};
use crate::harness::report::TheoremReport;
use crate::harness::stats::{mean, ols, quantile};
use crate::harness::thresholds::Thresholds;
use crate::randsrc::WeightLaw;
use crate::spread::run_spread;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErParams {
    pub n: usize,
    /// Second size for the stability of κ at a uniform root (at `λ = 0`).
    pub n_large: usize,
    pub runs: usize,
    /// Passage times of the spreads behind the escape check.
    pub law: WeightLaw,
    /// `(λ_a, λ_b)`: tree clusters must be at least a factor more frequent at `λ_a`.
    pub tree_lambdas: (f64, f64),
    /// Grid for the growth of the mean surplus.
    pub surplus_lambdas: Vec<f64>,
    /// `(λ_lo, λ_hi)`: the median of `max_s κ/|C|` must increase from `λ_lo` to `λ_hi`.
    pub contrast_lambdas: (f64, f64),
    pub escape_lambda: f64,
}

impl Default for ErParams {
    fn default() -> Self {
        ErParams {
            n: 10_000,
            n_large: 30_000,
            runs: 300,
            law: WeightLaw::power(0.8, 1.0).expect("valid law"),
            tree_lambdas: (0.0, 5.0),
            surplus_lambdas: vec![2.0, 4.0, 6.0, 8.0],
            contrast_lambdas: (-2.0, 5.0),
            escape_lambda: 8.0,
        }
    }
}

struct ClusterDraw {
    size: usize,
    surplus: usize,
    kappa_uniform: usize,
    max_ratio: f64,
    /// Infection index of the first escaping vertex, when checked.
    escape: Option<Option<usize>>,
}

/// Vertices reachable from `s` without entering `removed`, BFS order.
fn component_avoiding(g: &Graph, s: usize, removed: &[bool]) -> Vec<usize> {
    let mut seen = removed.to_vec();
    seen[s] = true;
    let mut out = vec![s];
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out
}

/// Spreads from a uniform vertex of `c` and scans the first `ε|C|` infected
/// vertices `s` in order. With the earlier ones removed, `s` escapes if its
/// bottleneck index in what remains of its component is at least
/// `(1 − ε)|C|`. Returns the infection index of the first escape.
pub(crate) fn escape_index<R: Rng + ?Sized>(c: &Arc<Graph>, law: WeightLaw, eps: f64, rng: &mut R) -> Result<Option<usize>> {
    let n = c.n();
    let sigma = rng.random_range(0..n);
    let g = RootedGraph::from_graph(Arc::clone(c), sigma)?;
    let trace = run_spread(&g, law, rng);
    let limit = ((eps * n as f64).floor() as usize).max(1).min(trace.order.len());
    let need = (1.0 - eps) * n as f64;
    let mut removed = vec![false; n];
    for (j, &s) in trace.order[..limit].iter().enumerate() {
        let s = s as usize;
        let comp = component_avoiding(c, s, &removed);
        if comp.len() as f64 >= need {
            let sub = c.induced(&comp)?.rooted(0)?;
            if kappa(&sub).kappa_at_root as f64 >= need {
                return Ok(Some(j));
            }
        }
        removed[s] = true;
    }
    Ok(None)
}

fn draw_clusters(p: &ErParams, n: usize, lambda: f64, seed: u64, cell: usize, eps: Option<f64>) -> Result<Vec<ClusterDraw>> {
    par_runs(p.runs, |i| {
        let mut rng = cell_stream(seed, cell, i);
        let s = sample_er(n, lambda, &mut rng)?;
        let c = Arc::new(s.largest_cluster);
        let size = c.n();
        let sigma = rng.random_range(0..size);
        let kappa_uniform = kappa(&RootedGraph::from_graph(Arc::clone(&c), sigma)?).kappa_at_root;
        let (_, kmax) = max_kappa_over_roots(&c);
        let escape = match eps {
            Some(e) => Some(escape_index(&c, p.law, e, &mut rng)?),
            None => None,
        };
        Ok(ClusterDraw {
            size,
            surplus: s.surplus_of_largest,
            kappa_uniform,
            max_ratio: kmax as f64 / size as f64,
            escape,
        })
    })
}

/// Near-critical Erdős–Rényi largest clusters: tightness of κ at a uniform
/// root, the law of `max_s κ/|C|`, surplus growth in `λ`, the frequency of
/// tree clusters, and the escape check for spreads on dense clusters.
pub fn experiment_er(p: &ErParams, seed: u64, th: &Thresholds) -> Result<TheoremReport> {
    p.law.validate()?;
    require(p.runs >= 20, "need at least 20 runs")?;
    require(p.surplus_lambdas.len() >= 2, "need at least 2 surplus lambdas")?;
    require(p.surplus_lambdas.iter().all(|&l| l > 0.0), "surplus lambdas must be positive")?;
    let mut rep = TheoremReport::new("er", seed, p, th, &["er"]);
    let eps = th.er.epsilon.value;
    let bin = th.urn.boundary_bin.value;

    let mut lambdas: Vec<f64> = p.surplus_lambdas.clone();
    lambdas.extend([0.0, p.tree_lambdas.0, p.tree_lambdas.1, p.contrast_lambdas.0, p.contrast_lambdas.1, p.escape_lambda]);
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();

    let mut cells = Vec::new();
    let mut per_lambda = Vec::new();
    for (cell, &lambda) in lambdas.iter().enumerate() {
        let e = (lambda == p.escape_lambda).then_some(eps);
        let d = draw_clusters(p, p.n, lambda, seed, cell, e)?;
        let sizes: Vec<f64> = d.iter().map(|x| x.size as f64).collect();
        let surplus: Vec<f64> = d.iter().map(|x| x.surplus as f64).collect();
        let ratios: Vec<f64> = d.iter().map(|x| x.max_ratio).collect();
        let kap: Vec<f64> = d.iter().map(|x| x.kappa_uniform as f64).collect();
        per_lambda.push(json!({
            "lambda": lambda,
            "mean_cluster_size": mean(&sizes),
            "mean_surplus": mean(&surplus),
            "tree_fraction": fraction(&d, |x| x.surplus == 0),
            "kappa_uniform_p50": quantile(&kap, 0.5),
            "kappa_uniform_p95": quantile(&kap, 0.95),
            "max_ratio_p50": quantile(&ratios, 0.5),
            "max_ratio_interior": fraction(&ratios, |&r| r > bin && r < 1.0 - bin),
        }));
        cells.push((lambda, d));
    }
    let cell = |l: f64| &cells.iter().find(|c| c.0 == l).expect("lambda in grid").1;

    let tree = |l: f64| fraction(cell(l), |x| x.surplus == 0);
    let (ta, tb) = (tree(p.tree_lambdas.0), tree(p.tree_lambdas.1));
    let tree_ratio = if tb > 0.0 { ta / tb } else if ta > 0.0 { f64::INFINITY } else { f64::NAN };

    let large = draw_clusters(p, p.n_large, 0.0, seed, lambdas.len(), None)?;
    let p95 = |d: &[ClusterDraw]| quantile(&d.iter().map(|x| x.kappa_uniform as f64).collect::<Vec<_>>(), 0.95);
    let (pa, pb) = (p95(cell(0.0)), p95(&large));
    let p95_factor = pa.max(pb) / pa.min(pb);

    let xs: Vec<f64> = p.surplus_lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = p
        .surplus_lambdas
        .iter()
        .map(|&l| mean(&cell(l).iter().map(|x| x.surplus as f64).collect::<Vec<_>>()).ln())
        .collect();
    let slope = if ys.iter().all(|y| y.is_finite()) { ols(&xs, &ys).1 } else { f64::NAN };

    let interior_min = cells
        .iter()
        .map(|(_, d)| fraction(d, |x| x.max_ratio > bin && x.max_ratio < 1.0 - bin))
        .fold(f64::INFINITY, f64::min);
    let med = |l: f64| quantile(&cell(l).iter().map(|x| x.max_ratio).collect::<Vec<_>>(), 0.5);
    let (m_lo, m_hi) = (med(p.contrast_lambdas.0), med(p.contrast_lambdas.1));

    let esc = cell(p.escape_lambda);
    let escape_rate = fraction(esc, |x| matches!(x.escape, Some(Some(_))));
    let escape_at_start = fraction(esc, |x| x.escape == Some(Some(0)));

    rep.stat("per_lambda", per_lambda);
    rep.stat("tree_fraction", json!({"lambda_a": ta, "lambda_b": tb}));
    rep.stat("kappa_uniform_p95", json!({"n": pa, "n_large": pb}));
    rep.stat("surplus_slope", slope);
    rep.stat("max_ratio_median", json!({"lambda_lo": m_lo, "lambda_hi": m_hi}));
    rep.stat("escape_rate", escape_rate);
    rep.stat("escape_at_first_vertex", escape_at_start);

    let t = &th.er;
    rep.check("tree_fraction_positive", ta, "> 0", ta > 0.0);
    rep.check("tree_fraction_ratio", tree_ratio, format!(">= {}", t.tree_ratio_min.value), tree_ratio >= t.tree_ratio_min.value);
    rep.check("kappa_p95_factor", p95_factor, format!("< {}", t.p95_factor_max.value), p95_factor < t.p95_factor_max.value);
    let (lo, hi) = (t.surplus_slope_lo.value, t.surplus_slope_hi.value);
    rep.check("surplus_slope", slope, format!("in [{lo}, {hi}]"), slope >= lo && slope <= hi);
    rep.check("max_ratio_interior", interior_min, format!(">= {}", t.interior_min.value), interior_min >= t.interior_min.value);
    rep.check("max_ratio_contrast", m_hi - m_lo, "> 0", m_hi > m_lo);
    rep.check("escape_rate", escape_rate, format!(">= {}", t.escape_min.value), escape_rate >= t.escape_min.value);
    Ok(rep)
}
