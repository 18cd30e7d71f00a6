#![allow(dead_code)]

use mesostab::kuramoto::KuramotoSystem;
use mesostab::{SymmetricMatrix, WeightedGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Nonzero integer weight in `[-3, 3]`.
pub fn signed_integer_weight(rng: &mut ChaCha8Rng) -> f64 {
    let w: i32 = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        w as f64
    } else {
        -w as f64
    }
}

/// Random simple graph on `n` vertices with at most `max_edges` edges.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_edges: usize,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> WeightedGraph {
    let mut pairs = all_pairs(n);
    pairs.shuffle(rng);
    let m = rng.gen_range(0..=max_edges.min(pairs.len()));
    let edges: Vec<_> = pairs[..m].iter().map(|&(u, v)| (u, v, weight(rng))).collect();
    WeightedGraph::new(n, edges).unwrap()
}

/// Random connected simple graph: a random spanning tree plus extra edges,
/// at most `max_edges` in total (never fewer than `n - 1`).
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_edges: usize,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut chosen = std::collections::BTreeSet::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        chosen.insert((parent.min(child), parent.max(child)));
    }
    let mut rest: Vec<_> = all_pairs(n).into_iter().filter(|p| !chosen.contains(p)).collect();
    rest.shuffle(rng);
    let budget = max_edges.max(n.saturating_sub(1)) - chosen.len();
    let extra = rng.gen_range(0..=budget.min(rest.len()));
    chosen.extend(rest[..extra].iter().copied());
    let edges: Vec<_> = chosen.into_iter().map(|(u, v)| (u, v, weight(rng))).collect();
    WeightedGraph::new(n, edges).unwrap()
}

/// Brute-force spanning-tree weight sum: every `(n-1)`-subset of edges that
/// joins all vertices without a cycle.
pub fn spanning_tree_sum(g: &WeightedGraph) -> f64 {
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().iter().filter(|e| !e.is_loop()).collect();
    let mut total = 0.0;
    for combo in mesostab::minors::Combinations::new(edges.len(), n - 1) {
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut acyclic = true;
        for &k in &combo {
            let (a, b) = (root(&mut parent, edges[k].u), root(&mut parent, edges[k].v));
            if a == b {
                acyclic = false;
                break;
            }
            parent[a] = b;
        }
        if acyclic {
            total += combo.iter().map(|&k| edges[k].weight).product::<f64>();
        }
    }
    total
}

/// Whether `|c - d| <= max(rel * |d|, abs)`.
pub fn close(c: f64, d: f64, rel: f64, abs: f64) -> bool {
    (c - d).abs() <= (rel * d.abs()).max(abs)
}

/// Zero-row-sum symmetric integer matrix: the Laplacian of a random graph
/// on `n` vertices. With `mostly_positive` the graph is connected and at
/// most one edge is negative, which makes positive semi-definite cases
/// common; otherwise weights are uniform in `[-3, 3] \ {0}`.
pub fn random_zero_row_sum(rng: &mut ChaCha8Rng, n: usize, mostly_positive: bool) -> SymmetricMatrix {
    if mostly_positive {
        let mut negative_left = usize::from(rng.gen_bool(0.5));
        let g = random_connected_graph(rng, n, n * (n - 1) / 2, |r| {
            if negative_left > 0 && r.gen_bool(0.3) {
                negative_left -= 1;
                -(r.gen_range(1..=2) as f64)
            } else {
                r.gen_range(1..=3) as f64
            }
        });
        g.laplacian()
    } else {
        random_graph(rng, n, n * (n - 1) / 2, signed_integer_weight).laplacian()
    }
}

/// Connected coupling network with `B_ij` in `[0.5, 2]` and frequencies
/// small enough that phase locking is typical.
pub fn random_kuramoto(rng: &mut ChaCha8Rng, n: usize) -> KuramotoSystem {
    let g = random_connected_graph(rng, n, n * (n - 1) / 2, |r| r.gen_range(0.5..2.0));
    let mut omega: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mean = omega.iter().sum::<f64>() / n as f64;
    omega.iter_mut().for_each(|w| *w -= mean);
    KuramotoSystem::from_edges(omega, g.edges().iter().map(|e| (e.u, e.v, e.weight))).unwrap()
}

/// Every proper non-empty vertex subset of `0..n`.
pub fn proper_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n) - 1).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Every non-empty vertex subset of `0..n`, including the full set.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Exhaustive negative-cut search: some proper `V1` whose crossing edges
/// are all negative, counting only cuts inside one connected component
/// (a component split off with no crossing edges is not a cut).
pub fn exhaustive_negative_cut(g: &WeightedGraph) -> bool {
    let n = g.vertex_count();
    for comp in g.connected_components() {
        if comp.len() < 2 {
            continue;
        }
        let k = comp.len();
        for mask in 1u32..(1u32 << k) - 1 {
            let side: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| comp[i]).collect();
            let mut inside = vec![false; n];
            side.iter().for_each(|&x| inside[x] = true);
            let crossing: Vec<_> = g
                .edges()
                .iter()
                .filter(|e| !e.is_loop() && inside[e.u] != inside[e.v])
                .collect();
            if !crossing.is_empty() && crossing.iter().all(|e| e.weight < 0.0) {
                return true;
            }
        }
    }
    false
}

/// Proptest strategy for simple graphs on `2..=max_n` vertices with
/// nonzero integer weights in `[-3, 3]`.
pub fn signed_graph_strategy(max_n: usize, max_edges: usize) -> impl proptest::strategy::Strategy<Value = WeightedGraph> {
    use proptest::prelude::*;
    (2..=max_n).prop_flat_map(move |n| {
        let pairs = all_pairs(n);
        let m = pairs.len();
        proptest::sample::subsequence(pairs, 0..=max_edges.min(m))
            .prop_flat_map(move |chosen| {
                let k = chosen.len();
                (Just(chosen), proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], k))
            })
            .prop_map(move |(chosen, weights)| {
                WeightedGraph::new(n, chosen.into_iter().zip(weights).map(|((u, v), w)| (u, v, w as f64))).unwrap()
            })
    })
}
