//! The two passage-time laws: sampling, tails, residual (aged) sampling,
//! and the mean of the minimum of a fresh and an aged edge.

use fpplab::harness::{dkw_epsilon, mean, std_err};
use fpplab::randsrc::{RngStream, WeightLaw};

fn main() -> fpplab::Result<()> {
    let mut rng = RngStream::new(1, 0);
    let samples = 200_000;
    for law in [WeightLaw::power(0.8, 1.0)?, WeightLaw::shifted(0.8)?] {
        let xs: Vec<f64> = (0..samples).map(|_| law.sample(&mut rng)).collect();
        println!("{law:?}");
        for t in [2.0, 10.0, 100.0] {
            let emp = xs.iter().filter(|&&x| x > t).count() as f64 / samples as f64;
            println!("  P[X > {t:>5}] = {:.5}  empirical {emp:.5}", law.tail(t));
        }
        println!("  DKW band at level 1e-3: ±{:.5}", dkw_epsilon(samples, 1e-3));
    }

    // Residual life at age t and the mean of min(fresh, aged).
    let law = WeightLaw::power(0.8, 1.0)?;
    let pairs: Vec<f64> = (0..samples).map(|_| law.sample(&mut rng).min(law.sample(&mut rng))).collect();
    println!("\nE[min of two fresh] = {:.4} ± {:.4}, exact {:.4}", mean(&pairs), std_err(&pairs), 2.0 * 0.8 / 0.6);
    for t in [10.0, 100.0] {
        let xs: Vec<f64> = (0..samples)
            .map(|_| Ok(law.sample(&mut rng).min(law.sample_residual(t, &mut rng)?)))
            .collect::<fpplab::Result<_>>()?;
        println!(
            "E[min(fresh, aged {t})] = {:.4} ± {:.4}, quadrature {:.4}",
            mean(&xs),
            std_err(&xs),
            law.residual_min_mean(t)?
        );
    }
    Ok(())
}
