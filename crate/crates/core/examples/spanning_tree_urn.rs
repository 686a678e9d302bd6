//! Colored Wilson's algorithm on K_n and the Pólya urn driven by its
//! branch sizes.

use fpplab::genmodels::ColoredWilson;
use fpplab::harness::quantile;
use fpplab::randsrc::RngStream;
use fpplab::urn::{urn_run, UrnState};

fn main() -> fpplab::Result<()> {
    let n = 2000;
    let mut wilson = ColoredWilson::new(n)?;
    let mut rng = RngStream::new(5, 0);
    let (mut kappas, mut ratios) = (Vec::new(), Vec::new());
    for _ in 0..300 {
        let r = wilson.sample(&mut rng);
        kappas.push(r.kappa_at_root() as f64 / n as f64);
        if let Some(init) = r.initial_urn() {
            let incs: Vec<u64> = r.urn_increments().iter().map(|&d| d as u64).collect();
            if !incs.is_empty() {
                ratios.push(urn_run(init, &incs, &mut rng)?);
            }
        }
    }
    println!("kappa/n: median {:.3}, 10% quantile {:.3}", quantile(&kappas, 0.5), quantile(&kappas, 0.1));
    println!(
        "urn final ratio: 5% {:.3}, median {:.3}, 95% {:.3}",
        quantile(&ratios, 0.05),
        quantile(&ratios, 0.5),
        quantile(&ratios, 0.95)
    );

    // The classic urn: from (1, 1) with unit steps the red count is uniform.
    let mut counts = [0u32; 6];
    for _ in 0..60_000 {
        let mut s = UrnState::new(1, 1)?;
        for _ in 0..5 {
            s.step(1, &mut rng)?;
        }
        counts[s.red() as usize - 1] += 1;
    }
    println!("classic urn, red after 5 steps: {counts:?}");
    Ok(())
}
