//! Estimators and test statistics used by the experiments.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::randsrc::RngStream;

/// Pairwise (cascade) summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample standard deviation (divisor `n − 1`).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (xs.len() - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Linear-interpolation quantile of the sorted sample (type 7). `NaN` for an
/// empty sample.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let b = pairwise_sum(&sxy) / pairwise_sum(&sxx);
    (my - b * mx, b)
}

/// Dvoretzky–Kiefer–Wolfowitz band half-width for `n` samples at level `level`.
pub fn dkw_epsilon(n: usize, level: f64) -> f64 {
    ((2.0 / level).ln() / (2.0 * n as f64)).sqrt()
}

/// Total variation distance between two probability vectors (missing
/// entries count as zero).
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (get(p, i) - get(q, i)).abs()).sum::<f64>()
}

/// Upper tail of the Kolmogorov distribution, `P[K > x]`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * x * x).exp();
        s += if j as u32 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov distance against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
    }
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let sn = ne.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::data("chi-square needs matching vectors of length >= 2"));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::data("expected counts must be positive"));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::data(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: dist.sf(stat),
    })
}

/// Point estimate with a confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Log-log least-squares slope of `means` against `ks`, with a percentile
/// bootstrap interval over the grid points.
pub fn fit_exponent(ks: &[f64], means: &[f64], resamples: usize, seed: u64) -> Result<Estimate> {
    if ks.len() != means.len() {
        return Err(Error::data("grid and means differ in length"));
    }
    if ks.len() < 5 {
        return Err(Error::data(format!("need at least 5 grid points, got {}", ks.len())));
    }
    if ks.iter().chain(means).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::data("grid values and means must be finite and positive"));
    }
    let x: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let (_, slope) = ols(&x, &y);
    let mut rng = RngStream::new(seed, 0);
    let mut boots = Vec::with_capacity(resamples);
    let n = x.len();
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    while boots.len() < resamples {
        for i in 0..n {
            let j = rng.random_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        let (_, b) = ols(&bx, &by);
        if b.is_finite() {
            boots.push(b);
        }
    }
    boots.sort_by(f64::total_cmp);
    let (lo, hi) = if boots.is_empty() {
        (slope, slope)
    } else {
        (quantile_sorted(&boots, 0.025), quantile_sorted(&boots, 0.975))
    };
    Ok(Estimate { value: slope, lo, hi })
}

const JACKKNIFE_GROUPS: usize = 20;

fn hill(sorted_desc: &[f64], k: usize) -> f64 {
    let threshold = sorted_desc[k].ln();
    let s: f64 = sorted_desc[..k].iter().map(|x| x.ln() - threshold).sum();
    k as f64 / s
}

fn hill_of(samples: &[f64], top_fraction: f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = ((top_fraction * v.len() as f64).floor() as usize).clamp(1, v.len() - 1);
    hill(&v, k)
}

/// Hill estimate of the tail index from the top `top_fraction` of the
/// sample, with a 95% interval from a grouped jackknife (20 contiguous
/// groups).
pub fn hill_tail_index(samples: &[f64], top_fraction: f64) -> Result<Estimate> {
    if samples.len() < 1000 {
        return Err(Error::data(format!("need at least 1000 samples, got {}", samples.len())));
    }
    if !(top_fraction > 0.0 && top_fraction <= 0.1) {
        return Err(Error::data(format!("top fraction must lie in (0, 0.1], got {top_fraction}")));
    }
    if samples.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::data("Hill estimator needs finite positive samples"));
    }
    let value = hill_of(samples, top_fraction);
    let g = JACKKNIFE_GROUPS;
    let n = samples.len();
    let mut reps = Vec::with_capacity(g);
    for i in 0..g {
        let (a, b) = (i * n / g, (i + 1) * n / g);
        let rest: Vec<f64> = samples[..a].iter().chain(&samples[b..]).copied().collect();
        reps.push(hill_of(&rest, top_fraction));
    }
    let m = mean(&reps);
    let var = (g - 1) as f64 / g as f64 * reps.iter().map(|r| (r - m) * (r - m)).sum::<f64>();
    let se = var.sqrt();
    Ok(Estimate {
        value,
        lo: value - 1.96 * se,
        hi: value + 1.96 * se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::WeightLaw;

    #[test]
    fn pairwise_matches_plain_sum_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn quantiles() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert_eq!(quantile(&xs, 0.5), 2.5);
    }

    #[test]
    fn exact_power_slope() {
        let ks: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].to_vec();
        let means: Vec<f64> = ks.iter().map(|k: &f64| 3.0 * k.powf(1.25)).collect();
        let e = fit_exponent(&ks, &means, 200, 1).unwrap();
        assert!((e.value - 1.25).abs() < 1e-9);
        assert!((e.lo - 1.25).abs() < 1e-9 && (e.hi - 1.25).abs() < 1e-9);
        assert!(fit_exponent(&ks[..4], &means[..4], 10, 1).is_err());
        let mut bad = means.clone();
        bad[2] = f64::INFINITY;
        assert!(fit_exponent(&ks, &bad, 10, 1).is_err());
    }

    #[test]
    fn kolmogorov_tail_values() {
        // P[K > 1.36] ≈ 0.05, P[K > 1.95] ≈ 0.001.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.9495) - 0.001).abs() < 1e-4);
    }

    #[test]
    fn two_sample_ks_identical() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).statistic, 0.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        assert_eq!(ks_two_sample(&a, &b).statistic, 1.0);
    }

    #[test]
    fn chi_square_uniform() {
        let r = chi_square(&[10, 10, 10], &[10.0, 10.0, 10.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hill_on_pareto() {
        let law = WeightLaw::power(0.8, 1.0).unwrap();
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng)).collect();
        let e = hill_tail_index(&xs, 0.01).unwrap();
        assert!(e.value > 0.65 && e.value < 0.95, "{e:?}");
        assert!(e.lo < e.value && e.value < e.hi);
        assert!(hill_tail_index(&xs[..999], 0.01).is_err());
        assert!(hill_tail_index(&xs, 0.2).is_err());
    }

    #[test]
    fn hill_on_exponential_is_large() {
        let mut rng = RngStream::new(13, 0);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| -crate::randsrc::open_unit(&mut rng).ln())
            .collect();
        let e = hill_tail_index(&xs, 0.01).unwrap();
        assert!(e.value > 2.0, "{e:?}");
    }
}
