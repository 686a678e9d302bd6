//! Largest clusters of near-critical Erdős–Rényi graphs: size, surplus, κ
//! at a uniform vertex and the maximum of κ over roots.

use fpplab::genmodels::sample_er;
use fpplab::graphcore::{kappa, max_kappa_over_roots};
use fpplab::harness::{mean, quantile};
use fpplab::randsrc::RngStream;
use rand::Rng;

fn main() -> fpplab::Result<()> {
    let n = 10_000;
    for lambda in [-2.0, 0.0, 2.0, 5.0] {
        let mut rng = RngStream::new(11, 0);
        let (mut sizes, mut surplus, mut kap, mut maxr) = (vec![], vec![], vec![], vec![]);
        for _ in 0..100 {
            let s = sample_er(n, lambda, &mut rng)?;
            let c = s.largest_cluster;
            let root = rng.random_range(0..c.n());
            sizes.push(c.n() as f64);
            surplus.push(s.surplus_of_largest as f64);
            let (_, kmax) = max_kappa_over_roots(&c);
            maxr.push(kmax as f64 / c.n() as f64);
            kap.push(kappa(&c.rooted(root)?).kappa_at_root as f64);
        }
        println!(
            "lambda {lambda:>4}: |C| {:>7.1}  surplus {:>6.2}  tree share {:.2}  kappa p50 {:>4}  max kappa/|C| p50 {:.3}",
            mean(&sizes),
            mean(&surplus),
            surplus.iter().filter(|&&s| s == 0.0).count() as f64 / surplus.len() as f64,
            quantile(&kap, 0.5),
            quantile(&maxr, 0.5)
        );
    }
    Ok(())
}
