//! A packaged experiment at reduced size, with the thresholds it is judged
//! against and the resulting JSON report.

use fpplab::harness::experiments::{experiment_cycle_scaling, CycleScalingParams};
use fpplab::harness::Thresholds;

fn main() -> fpplab::Result<()> {
    let th = Thresholds::defaults();
    for (key, t) in th.group("scaling") {
        println!("{key} = {} ({:?})", t.value, t.provenance);
    }
    let p = CycleScalingParams {
        n: 256,
        runs: 1000,
        k_lo: 8,
        k_hi: 128,
        ..Default::default()
    };
    let report = experiment_cycle_scaling(&p, 11, &th)?;
    print!("{}", report.to_json());
    Ok(())
}
