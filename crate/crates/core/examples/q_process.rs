//! The Q recursion with one always-old edge: growth of E[Q_k] against
//! k^{1/α}, and the deterministic bound recursion.

use fpplab::harness::{fit_exponent, mean};
use fpplab::randsrc::{RngStream, WeightLaw};
use fpplab::spread::{bound_recursion, recursion_constant, run_q};

fn main() -> fpplab::Result<()> {
    let alpha = 0.8;
    let law = WeightLaw::power(alpha, 1.0)?;
    let (k_max, runs) = (4096, 2000);
    let traces: Vec<Vec<f64>> = (0..runs)
        .map(|i| Ok(run_q(law, k_max, &mut RngStream::new(2, i))?.values))
        .collect::<fpplab::Result<_>>()?;
    let ks: Vec<usize> = (7..=12).map(|j| 1 << j).collect();
    let means: Vec<f64> = ks.iter().map(|&k| mean(&traces.iter().map(|t| t[k - 1]).collect::<Vec<_>>())).collect();
    for (k, m) in ks.iter().zip(&means) {
        println!("E[Q_{k:<4}] = {m:>10.2}   / k^(1/alpha) = {:.4}", m / (*k as f64).powf(1.0 / alpha));
    }
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let fit = fit_exponent(&xs, &means, 500, 1)?;
    println!("slope {:.3} [{:.3}, {:.3}], 1/alpha = {}", fit.value, fit.lo, fit.hi, 1.0 / alpha);

    let b1 = 2.0 * alpha / (2.0 * alpha - 1.0);
    let c = 1.0;
    let d = recursion_constant(c, b1, alpha);
    let b = bound_recursion(c, b1, alpha, 10_000)?;
    println!("bound recursion: b_10000 = {:.1} <= d·10000^(1/alpha) = {:.1}", b[9_999], d * 10_000f64.powf(1.0 / alpha));
    Ok(())
}
