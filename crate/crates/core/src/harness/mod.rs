//! Monte Carlo orchestration: ensembles of spreading runs, curve
//! statistics, plateau detection, estimators and the packaged experiments.

mod ensemble;
pub mod experiments;
mod report;
mod stats;
mod thresholds;

pub use ensemble::{
    is_unstable, plateau_detect, run_ensemble, CurveRow, CurveStats, Ensemble, GraphSource, PlateauReport, PlateauRule,
    Process, Regeneration, FIXED_GRAPH_STREAM, TAIL_FRACTION, TAIL_MIN,
};
pub use report::{Check, TheoremReport, Verdict};
pub use stats::{
    chi_square, dkw_epsilon, fit_exponent, hill_tail_index, kolmogorov_sf, ks_one_sample, ks_two_sample, mean, ols,
    pairwise_sum, quantile, quantile_sorted, std_dev, std_err, tv_distance, ChiSquareResult, Estimate, KsResult,
};
pub use thresholds::{Provenance, Threshold, Thresholds, DEFAULT_THRESHOLDS};

/// Runs `f` on a dedicated pool of `workers` threads (`0` means the rayon
/// default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::resource(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
