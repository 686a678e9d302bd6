//! Critical Galton–Watson trees conditioned to reach a depth: κ at the
//! root, against its limit law, and κ after adding one root edge.

use fpplab::genmodels::{sample_gw_conditioned, OffspringLaw};
use fpplab::harness::quantile;
use fpplab::randsrc::RngStream;

fn main() -> fpplab::Result<()> {
    let law = OffspringLaw::Poisson1;
    let qs = [0.5, 0.75, 0.9];
    let limit = law.limit_kappa_quantiles(&qs, 100_000);
    println!("limit quantiles of kappa {qs:?}: {limit:?}");
    for depth in [10, 40] {
        let mut rng = RngStream::new(3, depth as u64);
        let (mut kappas, mut ratios) = (Vec::new(), Vec::new());
        for _ in 0..500 {
            let draw = sample_gw_conditioned(law, depth, 1_000_000, &mut rng)?;
            if draw.truncated {
                continue;
            }
            let t = &draw.tree;
            kappas.push(t.kappa_at_root() as f64);
            if t.len() > t.root_degree() + 1 {
                let target = t.random_root_edge_target(&mut rng)?;
                ratios.push(t.kappa_with_root_edge(target)? as f64 / t.len() as f64);
            }
        }
        let q: Vec<String> = qs.iter().map(|&q| format!("{:.1}", quantile(&kappas, q))).collect();
        let above = ratios.iter().filter(|&&r| r > 0.01).count() as f64 / ratios.len() as f64;
        println!("depth {depth:>3}: kappa quantiles [{}], with root edge P[kappa/|T| > 0.01] = {above:.3}", q.join(", "));
    }
    Ok(())
}
