//! Seeded random graphs for property tests and the `props` suites.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DomainPartition, Role, WeightedGraph};

/// Connected graph on `n` vertices: a random spanning tree plus each other
/// pair with probability `extra`. Weights and measures are uniform in [0.5, 2].
pub fn random_connected_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, extra: f64) -> WeightedGraph {
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::new();
    for k in 1..n {
        let x = order[k];
        let y = order[rng.gen_range(0..k)];
        adjacent[x * n + y] = true;
        adjacent[y * n + x] = true;
        edges.push((x, y, rng.gen_range(0.5..2.0)));
    }
    for x in 0..n {
        for y in x + 1..n {
            if !adjacent[x * n + y] && rng.gen_bool(extra) {
                edges.push((x, y, rng.gen_range(0.5..2.0)));
            }
        }
    }
    let measure = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    WeightedGraph::from_edges(ids, measure, &edges).expect("generated edges are simple")
}

/// Subgraph induced on `keep`, vertex order preserved.
pub fn induced(graph: &WeightedGraph, keep: &[usize]) -> WeightedGraph {
    let mut edges = Vec::new();
    for (i, &x) in keep.iter().enumerate() {
        for (j, &y) in keep.iter().enumerate().skip(i + 1) {
            let w = graph.weight(x, y);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    let ids: Vec<String> = keep.iter().map(|&x| graph.id(x).to_string()).collect();
    let measure = keep.iter().map(|&x| graph.measure(x)).collect();
    WeightedGraph::from_edges(ids, measure, &edges).expect("induced subgraph is simple")
}

/// Random bounded domain: a connected interior of `interior` vertices grown
/// from a random seed vertex of a random graph on `n` vertices, with the graph
/// then restricted to Ω ∪ ∂Ω so the partition covers every vertex.
///
/// Requires `interior < n`.
pub fn random_domain<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    interior: usize,
    extra: f64,
) -> (WeightedGraph, DomainPartition) {
    assert!(interior >= 1 && interior < n, "need 1 <= interior < n");
    loop {
        let g = random_connected_graph(rng, n, extra);
        let mut inside = vec![false; n];
        let start = rng.gen_range(0..n);
        inside[start] = true;
        let mut members = vec![start];
        while members.len() < interior {
            let frontier: Vec<usize> = members
                .iter()
                .flat_map(|&x| g.neighbors(x).iter().copied())
                .filter(|&y| !inside[y])
                .collect();
            let Some(&next) = frontier.choose(rng) else { break };
            inside[next] = true;
            members.push(next);
        }
        let roles: Vec<Role> = (0..n)
            .map(|x| {
                if inside[x] {
                    Role::Interior
                } else if g.neighbors(x).iter().any(|&y| inside[y]) {
                    Role::Boundary
                } else {
                    Role::Plain
                }
            })
            .collect();
        let keep: Vec<usize> = (0..n).filter(|&x| roles[x] != Role::Plain).collect();
        if keep.len() == members.len() {
            continue;
        }
        let sub = induced(&g, &keep);
        let sub_roles = keep.iter().map(|&x| roles[x]).collect();
        return (sub, DomainPartition::from_roles(sub_roles));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn generated_graphs_validate(seed in any::<u64>(), n in 2usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(&mut rng, n, 0.3);
            prop_assert!(validate(&g, None).is_ok());
            let (g, p) = random_domain(&mut rng, n + 1, (n / 2).max(1), 0.3);
            let report = validate(&g, Some(&p));
            prop_assert!(report.is_ok(), "{}", report);
        }

        #[test]
        fn single_axiom_mutations_are_rejected(seed in any::<u64>(), n in 3usize..10, pick in any::<usize>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_connected_graph(&mut rng, n, 0.3);
            let edges = g.edges();
            let (x, y, w) = edges[pick % edges.len()];
            let asym = g.with_directed_weight(x, y, w * 1.5).unwrap();
            prop_assert!(!validate(&asym, None).is_ok());
            let mut mu = g.measures().to_vec();
            mu[pick % n] = -mu[pick % n];
            prop_assert!(!validate(&g.with_measure(mu).unwrap(), None).is_ok());
            let looped = g.with_directed_weight(x, x, 1.0).unwrap();
            prop_assert!(!validate(&looped, None).is_ok());
            // Cutting every edge at one vertex disconnects the graph.
            let v = pick % n;
            let mut cut = g.clone();
            for &u in g.neighbors(v) {
                cut = cut.with_directed_weight(v, u, 0.0).unwrap().with_directed_weight(u, v, 0.0).unwrap();
            }
            prop_assert!(validate(&cut, None).violations.contains(&crate::graph::Violation::Disconnected));
        }
    }
}
