use std::collections::BTreeSet;

use rand::Rng;

use super::trace::{Arrival, SpreadTrace};
use super::weights::EdgeWeights;
use crate::graphcore::RootedGraph;
use crate::randsrc::WeightLaw;

/// The delayed process with fresh i.i.d. weights.
pub fn run_delayed<R: Rng + ?Sized>(g: &RootedGraph, law: WeightLaw, rng: &mut R) -> SpreadTrace {
    let mut w = EdgeWeights::lazy(g.m(), law);
    run_delayed_with(g, &mut w, rng)
}

/// The delayed process with the given weight table.
///
/// At most two active edges transmit at a time. A free slot is filled by the
/// active edge of smallest index that is not already transmitting; its clock
/// starts then and it fires after its own weight unless its far endpoint is
/// infected first, in which case it is dropped. A transmitting edge keeps its
/// start time while the other slot changes hands. When two selected edges
/// lead to the same vertex, the first to fire makes the other internal and
/// both slots are refilled. If the front is empty before every vertex is
/// infected, the remaining times are [`Arrival::Never`].
///
/// On a shared weight table every vertex is infected no earlier than in
/// [`run_spread_with`](super::run_spread_with).
pub fn run_delayed_with<R: Rng + ?Sized>(g: &RootedGraph, w: &mut EdgeWeights, rng: &mut R) -> SpreadTrace {
    let n = g.n();
    let root = g.root();
    let mut infected = vec![false; n];
    let mut infector = vec![None; n];
    let mut times = Vec::with_capacity(n);
    let mut order = Vec::with_capacity(n);
    let mut fronts = Vec::with_capacity(n);
    let mut active = BTreeSet::new();
    // (edge, firing time)
    let mut slots: Vec<(usize, f64)> = Vec::with_capacity(2);
    let mut now = 0.0;

    infect(g, root, &mut infected, &mut active, &mut slots);
    times.push(Arrival::At(0.0));
    order.push(root as u32);
    fronts.push(active.len() as u32);

    loop {
        while slots.len() < 2 {
            let next = active.iter().copied().find(|e| slots.iter().all(|s| s.0 != *e));
            match next {
                Some(e) => slots.push((e, now + w.get(e, rng))),
                None => break,
            }
        }
        let Some(pos) = (0..slots.len()).min_by(|&a, &b| {
            slots[a]
                .1
                .total_cmp(&slots[b].1)
                .then(slots[a].0.cmp(&slots[b].0))
        }) else {
            break;
        };
        let (e, at) = slots.swap_remove(pos);
        now = at;
        let (a, b) = g.edge(e);
        let v = if infected[a] { b } else { a };
        infector[v] = Some(e as u32);
        infect(g, v, &mut infected, &mut active, &mut slots);
        times.push(Arrival::At(now));
        order.push(v as u32);
        fronts.push(active.len() as u32);
    }
    SpreadTrace::finish(n, times, order, infector, fronts)
}

fn infect(
    g: &RootedGraph,
    v: usize,
    infected: &mut [bool],
    active: &mut BTreeSet<usize>,
    slots: &mut Vec<(usize, f64)>,
) {
    infected[v] = true;
    for &(u, e) in g.incident(v) {
        let e = e as usize;
        if infected[u as usize] {
            active.remove(&e);
            slots.retain(|s| s.0 != e);
        } else {
            active.insert(e);
        }
    }
}
