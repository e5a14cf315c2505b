//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ccq::datagen::{apply_noise, random_signed_graph, NoiseModel, NoiseSpec};
use ccq::{Clustering, SignedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x7e57_0000)
}

/// Pair-by-pair disagreement count.
pub fn disagreements(g: &SignedGraph, assignment: &[usize]) -> u64 {
    let n = g.n();
    let mut d = 0;
    for u in 0..n {
        for v in u + 1..n {
            if g.is_plus(u, v) != (assignment[u] == assignment[v]) {
                d += 1;
            }
        }
    }
    d
}

/// Minimum cost and lexicographically smallest optimal restricted growth
/// string, by visiting every set partition.
pub fn brute_force(g: &SignedGraph) -> (u64, Vec<usize>) {
    fn visit(
        g: &SignedGraph,
        rgs: &mut Vec<usize>,
        max: usize,
        best: &mut Option<(u64, Vec<usize>)>,
    ) {
        if rgs.len() == g.n() {
            let cost = disagreements(g, rgs);
            let better = match best {
                None => true,
                Some((c, a)) => cost < *c || (cost == *c && rgs < a),
            };
            if better {
                *best = Some((cost, rgs.clone()));
            }
            return;
        }
        let limit = if rgs.is_empty() { 0 } else { max + 1 };
        for label in 0..=limit {
            rgs.push(label);
            visit(g, rgs, max.max(label), best);
            rgs.pop();
        }
    }
    if g.n() == 0 {
        return (0, Vec::new());
    }
    let mut best = None;
    visit(g, &mut Vec::new(), 0, &mut best);
    best.unwrap()
}

/// Every `(+,+,-)` triangle as a sorted vertex triple, by scanning all triples.
pub fn ppm_triples(g: &SignedGraph) -> Vec<[usize; 3]> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let plus = [g.is_plus(a, b), g.is_plus(a, c), g.is_plus(b, c)]
                    .iter()
                    .filter(|&&x| x)
                    .count();
                if plus == 2 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn random_clustering(n: usize, rng: &mut ChaCha8Rng) -> Clustering {
    let k = rng.random_range(1..=n.max(1));
    Clustering::from_assignment((0..n).map(|_| rng.random_range(0..k)).collect())
}

/// Small planted instance: random clique sizes, then a few flips.
pub fn planted_small(n: usize, seed: u64) -> (SignedGraph, Clustering) {
    let mut r = rng(seed);
    let mut assignment = Vec::with_capacity(n);
    let mut label = 0;
    while assignment.len() < n {
        let size = r.random_range(1..=4).min(n - assignment.len());
        assignment.extend(std::iter::repeat_n(label, size));
        label += 1;
    }
    let truth = Clustering::from_assignment(assignment);
    let clean = truth.to_graph();
    let model = [
        NoiseModel::Uniform,
        NoiseModel::IntraCluster,
        NoiseModel::IntraInter,
    ][seed as usize % 3];
    let mut spec = NoiseSpec::small(model, seed);
    spec.flips = r.random_range(1..=n as u64);
    (apply_noise(&clean, &truth, &spec).unwrap(), truth)
}

/// Mix of uniform-random and planted-plus-noise graphs, `count` in total,
/// with `n` drawn from `sizes`.
pub fn graph_corpus(
    count: usize,
    sizes: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Vec<SignedGraph> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = r.random_range(sizes.clone());
            let s = seed.wrapping_mul(1000).wrapping_add(i as u64);
            if i % 2 == 0 {
                random_signed_graph(n, r.random_range(0.2..0.8), s)
            } else {
                planted_small(n, s).0
            }
        })
        .collect()
}
