//! One spread on a tree, then averaged spreading curves with plateau
//! detection on a conditioned GW tree with and without an extra root edge,
//! and on a cycle.

use fpplab::genmodels::{sample_gw_conditioned, OffspringLaw};
use fpplab::graphcore::{kappa, RootedGraph};
use fpplab::harness::{plateau_detect, run_ensemble, Ensemble, GraphSource, Process, Thresholds};
use fpplab::randsrc::{RngStream, WeightLaw};
use fpplab::spread::run_spread;

fn main() -> fpplab::Result<()> {
    let law = WeightLaw::power(0.8, 1.0)?;
    let mut rng = RngStream::new(472, 0);
    let tree = sample_gw_conditioned(OffspringLaw::Poisson1, 20, 100_000, &mut rng)?.tree;
    let plain = tree.to_rooted_graph()?;
    let target = tree.random_root_edge_target(&mut rng)?;
    let extra = tree.with_root_edge(target)?;

    let trace = run_spread(&plain, law, &mut rng);
    println!("one spread on a tree with {} vertices:", plain.n());
    for k in [1, 2, 5, 10, plain.n()] {
        println!("  T_{k} = {:.3}", trace.time(k).time().unwrap_or(f64::INFINITY));
    }
    println!("  first bottleneck at k = {:?}", trace.first_bottleneck);

    let rule = Thresholds::defaults().plateau_rule();
    let cycle = RootedGraph::cycle(472, 0)?;
    for (name, g) in [("tree", plain), ("tree + root edge", extra), ("cycle", cycle)] {
        let stats = run_ensemble(&Ensemble {
            source: GraphSource::Given(g.clone()),
            law,
            runs: 100_000,
            batches: 20,
            master_seed: 7,
            process: Process::Spread,
        })?;
        let report = plateau_detect(&stats, rule)?;
        println!(
            "{name:<17} kappa = {:>3}  first plateau = {:?}  <T_kappa> = {:.2}",
            kappa(&g).kappa_at_root,
            report.first_unstable,
            stats.rows[kappa(&g).kappa_at_root - 1].mean
        );
    }
    Ok(())
}
