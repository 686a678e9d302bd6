//! Bottleneck indices of small graphs: κ at the root, the bridge table, κ
//! at every vertex, and the brute-force oracle.

use fpplab::graphcore::{kappa, kappa_d, kappa_oracle, kappa_with_per_vertex, max_kappa_over_roots, RootedGraph};

fn main() -> fpplab::Result<()> {
    // Two triangles joined by a bridge, rooted in the first one.
    let barbell = RootedGraph::new(6, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)], 0)?;
    let graphs = [
        ("path(7) at an end", RootedGraph::path(7, 0)?),
        ("path(7) in the middle", RootedGraph::path(7, 3)?),
        ("star(10) at the center", RootedGraph::star(10, 0)?),
        ("cycle(5)", RootedGraph::cycle(5, 0)?),
        ("barbell", barbell.clone()),
    ];
    for (name, g) in &graphs {
        let p = kappa(g);
        println!(
            "{name:<24} n = {:>2}  kappa = {:>2}  oracle = {:>2}  kappa_3 = {:>2}  bridges = {}",
            g.n(),
            p.kappa_at_root,
            kappa_oracle(g)?,
            kappa_d(g, 3)?,
            p.bridges.len()
        );
    }

    let p = kappa_with_per_vertex(&barbell);
    println!("\nbarbell bridges (edge, root side, far side):");
    for b in &p.bridges {
        println!("  {:?} {} {}", barbell.edge(b.edge), b.root_side, b.far_side);
    }
    println!("kappa per vertex: {:?}", p.kappa_per_vertex.unwrap());
    let (v, k) = max_kappa_over_roots(barbell.graph());
    println!("argmax over roots: vertex {v}, kappa {k}");
    Ok(())
}
