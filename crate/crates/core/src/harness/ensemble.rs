use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, pairwise_sum, std_dev};
use crate::error::{Error, Result};
use crate::genmodels::GraphModel;
use crate::graphcore::RootedGraph;
use crate::randsrc::{RngStream, WeightLaw};
use crate::spread::{run_delayed, run_spread, Arrival};

/// Share of the per-run increments used for the tail index.
pub const TAIL_FRACTION: f64 = 0.01;
/// Minimum number of order statistics behind a tail index.
pub const TAIL_MIN: usize = 10;

/// Stream index used to draw the single graph of a fixed-graph ensemble.
pub const FIXED_GRAPH_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regeneration {
    /// One graph, fresh weights per run.
    FixedGraph,
    /// A fresh graph and fresh weights per run.
    FreshGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    #[default]
    Spread,
    Delayed,
}

#[derive(Clone, Debug)]
pub enum GraphSource {
    Given(RootedGraph),
    Model(GraphModel, Regeneration),
}

/// `M` seeded runs of a spreading process. Run `i` draws everything it
/// needs (graph, when regenerated, then weights) from stream `i`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub source: GraphSource,
    pub law: WeightLaw,
    pub runs: usize,
    pub batches: usize,
    pub master_seed: u64,
    pub process: Process,
}

/// Per-`k` statistics of an ensemble of traces.
///
/// Row `k` holds the mean of `T_k`; its `batch_cv` and `max_share` describe
/// the increment `T_{k+1} − T_k` over the runs that reach `k + 1` vertices:
/// the coefficient of variation of the per-batch mean increments, and the
/// largest single-run increment as a share of the summed increments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveStats {
    pub batches: usize,
    pub rows: Vec<CurveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub k: usize,
    /// Infinite when any contributing run never reaches `k` vertices.
    pub mean: f64,
    /// Per-batch means of `T_k`.
    pub batch_means: Vec<f64>,
    pub batch_cv: Option<f64>,
    pub max_share: Option<f64>,
    /// Hill estimate of the tail index of the per-run increments, from the
    /// largest [`TAIL_FRACTION`] of them (at least [`TAIL_MIN`]).
    pub tail_index: Option<f64>,
    /// Runs whose graph has at least `k` vertices.
    pub n_runs: usize,
    pub never: usize,
}

impl CurveStats {
    pub fn means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean).collect()
    }

    /// CSV with columns `k,mean,batch_cv,max_share,n_runs`; missing
    /// increment statistics are left empty and infinite means are `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mean,batch_cv,max_share,n_runs\n");
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.k,
                fmt_f64(r.mean),
                opt(r.batch_cv),
                opt(r.max_share),
                r.n_runs
            );
        }
        out
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

struct BatchAgg {
    /// Per k: sum of T_k over runs that reach k.
    t_sum: Vec<f64>,
    t_count: Vec<usize>,
    never: Vec<usize>,
    inc_sum: Vec<f64>,
    inc_count: Vec<usize>,
    inc_max: Vec<f64>,
    /// Largest increments per k, descending, at most `keep` of them.
    inc_top: Vec<Vec<f64>>,
}

fn tail_keep(runs: usize) -> usize {
    ((TAIL_FRACTION * runs as f64) as usize).max(TAIL_MIN) + 1
}

fn merge_top(into: &mut Vec<f64>, more: &[f64], keep: usize) {
    into.extend_from_slice(more);
    into.sort_by(|a, b| b.total_cmp(a));
    into.truncate(keep);
}

/// Hill estimate from the largest values (descending) of a sample of size
/// `count`.
fn tail_index_from_top(top: &[f64], count: usize) -> Option<f64> {
    let k = ((TAIL_FRACTION * count as f64) as usize).max(TAIL_MIN);
    if k >= count || top.len() <= k || !(top[k] > 0.0) {
        return None;
    }
    let threshold = top[k].ln();
    let s: f64 = top[..k].iter().map(|x| x.ln() - threshold).sum();
    Some(k as f64 / s)
}

fn run_one(spec: &Ensemble, fixed: Option<&RootedGraph>, i: u64) -> Result<Vec<Arrival>> {
    let mut rng = RngStream::new(spec.master_seed, i);
    let owned;
    let g = match (fixed, &spec.source) {
        (Some(g), _) => g,
        (None, GraphSource::Model(model, _)) => {
            owned = model
                .sample(&mut rng)
                .map_err(|e| annotate(e, i))?
                .graph;
            &owned
        }
        (None, GraphSource::Given(g)) => g,
    };
    let trace = match spec.process {
        Process::Spread => run_spread(g, spec.law, &mut rng),
        Process::Delayed => run_delayed(g, spec.law, &mut rng),
    };
    Ok(trace.times)
}

fn annotate(e: Error, run: u64) -> Error {
    match e {
        Error::Parameter(m) => Error::Parameter(format!("run {run}: {m}")),
        Error::Structural(m) => Error::Structural(format!("run {run}: {m}")),
        Error::Resource(m) => Error::Resource(format!("run {run}: {m}")),
        Error::Data(m) => Error::Data(format!("run {run}: {m}")),
        other => other,
    }
}

fn column(traces: &[Vec<Arrival>], k: usize, f: impl Fn(&[Arrival]) -> Option<f64>) -> Vec<f64> {
    traces.iter().filter(|t| t.len() > k).filter_map(|t| f(t)).collect()
}

/// Executes the ensemble. Runs are processed batch by batch, in parallel
/// within a batch on the current rayon pool; all reductions follow run
/// order, so the result does not depend on the number of workers.
pub fn run_ensemble(spec: &Ensemble) -> Result<CurveStats> {
    spec.law.validate()?;
    if spec.runs < 2 {
        return Err(Error::param(format!("need at least 2 runs, got {}", spec.runs)));
    }
    if spec.batches < 1 || spec.batches > spec.runs {
        return Err(Error::param(format!(
            "batch count must lie in 1..={}, got {}",
            spec.runs, spec.batches
        )));
    }
    let fixed = match &spec.source {
        GraphSource::Given(g) => Some(g.clone()),
        GraphSource::Model(model, Regeneration::FixedGraph) => {
            let mut rng = RngStream::new(spec.master_seed, FIXED_GRAPH_STREAM);
            Some(model.sample(&mut rng)?.graph)
        }
        GraphSource::Model(_, Regeneration::FreshGraph) => None,
    };

    let (m, b) = (spec.runs, spec.batches);
    let mut aggs = Vec::with_capacity(b);
    for batch in 0..b {
        let (lo, hi) = (batch * m / b, (batch + 1) * m / b);
        let traces: Vec<Vec<Arrival>> = (lo..hi)
            .into_par_iter()
            .map(|i| run_one(spec, fixed.as_ref(), i as u64))
            .collect::<Result<_>>()?;
        let n_max = traces.iter().map(|t| t.len()).max().unwrap_or(0);
        let mut agg = BatchAgg {
            t_sum: vec![0.0; n_max],
            t_count: vec![0; n_max],
            never: vec![0; n_max],
            inc_sum: vec![0.0; n_max],
            inc_count: vec![0; n_max],
            inc_max: vec![0.0; n_max],
            inc_top: vec![Vec::new(); n_max],
        };
        let keep = tail_keep(m);
        for k in 0..n_max {
            let vals = column(&traces, k, |t| t[k].time());
            agg.t_sum[k] = pairwise_sum(&vals);
            agg.t_count[k] = vals.len();
            agg.never[k] = traces.iter().filter(|t| t.len() > k && t[k].is_never()).count();
            if k + 1 < n_max {
                let incs = column(&traces, k + 1, |t| Some(t[k + 1].time()? - t[k].time()?));
                agg.inc_sum[k] = pairwise_sum(&incs);
                agg.inc_count[k] = incs.len();
                agg.inc_max[k] = incs.iter().copied().fold(0.0, f64::max);
                merge_top(&mut agg.inc_top[k], &incs, keep);
            }
        }
        aggs.push(agg);
    }

    let n_max = aggs.iter().map(|a| a.t_sum.len()).max().unwrap_or(0);
    let get = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
    let getc = |v: &Vec<usize>, k: usize| v.get(k).copied().unwrap_or(0);
    let mut rows = Vec::with_capacity(n_max);
    for k in 0..n_max {
        let sums: Vec<f64> = aggs.iter().map(|a| get(&a.t_sum, k)).collect();
        let count: usize = aggs.iter().map(|a| getc(&a.t_count, k)).sum();
        let never: usize = aggs.iter().map(|a| getc(&a.never, k)).sum();
        let n_runs = count + never;
        let mean_k = if never > 0 {
            f64::INFINITY
        } else {
            pairwise_sum(&sums) / count as f64
        };
        let batch_means: Vec<f64> = aggs
            .iter()
            .map(|a| {
                let c = getc(&a.t_count, k);
                if getc(&a.never, k) > 0 {
                    f64::INFINITY
                } else if c == 0 {
                    f64::NAN
                } else {
                    get(&a.t_sum, k) / c as f64
                }
            })
            .collect();

        let inc_means: Vec<f64> = aggs
            .iter()
            .filter(|a| getc(&a.inc_count, k) > 0)
            .map(|a| get(&a.inc_sum, k) / getc(&a.inc_count, k) as f64)
            .collect();
        let inc_total = pairwise_sum(&aggs.iter().map(|a| get(&a.inc_sum, k)).collect::<Vec<_>>());
        let inc_max = aggs.iter().map(|a| get(&a.inc_max, k)).fold(0.0, f64::max);
        let inc_count: usize = aggs.iter().map(|a| getc(&a.inc_count, k)).sum();
        let mut top = Vec::new();
        for a in &aggs {
            if let Some(t) = a.inc_top.get(k) {
                merge_top(&mut top, t, tail_keep(m));
            }
        }
        let tail_index = tail_index_from_top(&top, inc_count);
        let (batch_cv, max_share) = if inc_means.len() >= 2 && inc_total > 0.0 {
            (Some(std_dev(&inc_means) / mean(&inc_means)), Some(inc_max / inc_total))
        } else {
            (None, None)
        };
        rows.push(CurveRow {
            k: k + 1,
            mean: mean_k,
            batch_means,
            batch_cv,
            max_share,
            tail_index,
            n_runs,
            never,
        });
    }
    Ok(CurveStats { batches: b, rows })
}

/// Thresholds of the plateau detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauRule {
    pub cv: f64,
    pub share: f64,
    /// Increments whose estimated tail index is at or above this value are
    /// never flagged.
    pub tail_index: f64,
}

/// Outcome of [`plateau_detect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlateauReport {
    /// Smallest `k` whose increment `⟨T_{k+1}⟩ − ⟨T_k⟩` is flagged.
    pub first_unstable: Option<usize>,
    pub rule: PlateauRule,
    /// Increment statistics at the flagged `k`.
    pub batch_cv: Option<f64>,
    pub max_share: Option<f64>,
    pub tail_index: Option<f64>,
}

/// Whether the increment leaving row `r` looks like an infinite-mean jump:
/// unstable batch means, one run dominating the sum, and a tail index
/// below the rule's bound.
pub fn is_unstable(r: &CurveRow, rule: &PlateauRule) -> bool {
    match (r.batch_cv, r.max_share, r.tail_index) {
        (Some(cv), Some(sh), Some(ti)) => cv > rule.cv && sh > rule.share && ti < rule.tail_index,
        _ => false,
    }
}

/// Finds the first increment flagged by [`is_unstable`].
pub fn plateau_detect(stats: &CurveStats, rule: PlateauRule) -> Result<PlateauReport> {
    if stats.batches < 10 {
        return Err(Error::param(format!(
            "plateau detection needs at least 10 batches, got {}",
            stats.batches
        )));
    }
    let hit = stats.rows.iter().find(|r| is_unstable(r, &rule));
    Ok(PlateauReport {
        first_unstable: hit.map(|r| r.k),
        rule,
        batch_cv: hit.and_then(|r| r.batch_cv),
        max_share: hit.and_then(|r| r.max_share),
        tail_index: hit.and_then(|r| r.tail_index),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::LawKind;

    fn law() -> WeightLaw {
        WeightLaw::power(0.8, 1.0).unwrap()
    }

    #[test]
    fn two_runs_on_single_edge() {
        let g = RootedGraph::path(2, 0).unwrap();
        let spec = Ensemble {
            source: GraphSource::Given(g),
            law: law(),
            runs: 2,
            batches: 1,
            master_seed: 17,
            process: Process::Spread,
        };
        let stats = run_ensemble(&spec).unwrap();
        let draws: Vec<f64> = (0..2).map(|i| law().sample(&mut RngStream::new(17, i))).collect();
        assert_eq!(stats.rows[0].mean, 0.0);
        assert_eq!(stats.rows[1].mean, (draws[0] + draws[1]) / 2.0);
        assert_eq!(stats.rows[1].n_runs, 2);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = RootedGraph::path(3, 0).unwrap();
        let mut spec = Ensemble {
            source: GraphSource::Given(g),
            law: law(),
            runs: 1,
            batches: 1,
            master_seed: 1,
            process: Process::Spread,
        };
        assert!(run_ensemble(&spec).is_err());
        spec.runs = 10;
        spec.batches = 11;
        assert!(run_ensemble(&spec).is_err());
        spec.batches = 5;
        spec.law = WeightLaw {
            kind: LawKind::PowerLaw,
            alpha: -1.0,
            t0: 1.0,
        };
        assert!(run_ensemble(&spec).is_err());
    }

    #[test]
    fn monotone_means_and_csv() {
        let spec = Ensemble {
            source: GraphSource::Model(GraphModel::Cycle { n: 20 }, Regeneration::FixedGraph),
            law: law(),
            runs: 200,
            batches: 10,
            master_seed: 2,
            process: Process::Delayed,
        };
        let stats = run_ensemble(&spec).unwrap();
        assert_eq!(stats.rows.len(), 20);
        assert!(stats.means().windows(2).all(|w| w[0] <= w[1]));
        assert!(stats.rows.iter().all(|r| r.never == 0 && r.n_runs == 200));
        let csv = stats.to_csv();
        assert!(csv.starts_with("k,mean,batch_cv,max_share,n_runs\n1,0,"));
        assert!(csv.trim_end().ends_with(",,200"));
        let rule = PlateauRule {
            cv: 1.0,
            share: 0.5,
            tail_index: 1.0,
        };
        assert!(plateau_detect(&stats, rule).is_ok());
        let few = CurveStats { batches: 9, ..stats };
        assert!(plateau_detect(&few, rule).is_err());
    }

    #[test]
    fn fresh_graphs_vary_in_size() {
        let spec = Ensemble {
            source: GraphSource::Model(GraphModel::Er { n: 200, lambda: 0.0 }, Regeneration::FreshGraph),
            law: law(),
            runs: 40,
            batches: 4,
            master_seed: 5,
            process: Process::Spread,
        };
        let stats = run_ensemble(&spec).unwrap();
        assert_eq!(stats.rows[0].n_runs, 40);
        assert!(stats.rows.last().unwrap().n_runs < 40);
    }
}
