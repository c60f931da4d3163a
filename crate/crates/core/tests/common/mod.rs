//! Brute-force oracles and seeded generators shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snsim::optimizer::ObjectivePoint;
use snsim::scoring::{FeatureMode, ScoringParams};
use snsim::{AttributedNetwork, NodeAttributes};

/// Erdős–Rényi graph with random features, signs and weights.
pub fn random_network(n: usize, p: f64, features: usize, seed: u64) -> AttributedNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attrs = (0..n)
        .map(|_| {
            let f = (0..features).map(|_| rng.random_range(0.0..=1.0)).collect();
            let s = (0..features)
                .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
                .collect();
            let w = (0..features).map(|_| rng.random_range(0.0..=1.0)).collect();
            NodeAttributes::new(f, s, w).unwrap()
        })
        .collect();
    let mut net = AttributedNetwork::with_attributes(attrs).unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                net.add_edge(i, j).unwrap();
            }
        }
    }
    net
}

pub fn random_labels(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

pub fn random_params(seed: u64) -> ScoringParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScoringParams {
        q: rng.random_range(0.0..2.0),
        r: rng.random_range(0.0..2.0),
        c: rng.random_range(0.0..2.0),
        m: rng.random_range(0.0..1.0),
        tau: rng.random_range(0.5..2.0),
        gamma: vec![rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)],
        max_path_len: 3,
        feature_mode: if rng.random_bool(0.5) {
            FeatureMode::Literal
        } else {
            FeatureMode::Similarity
        },
    }
}

/// Floyd–Warshall hop distances.
pub fn hop_matrix(net: &AttributedNetwork) -> Vec<Vec<Option<usize>>> {
    let n = net.node_count();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if net.has_edge(i, j) {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Pair score written directly from its definition.
pub fn oracle_score(
    net: &AttributedNetwork,
    hops: &[Vec<Option<usize>>],
    i: usize,
    j: usize,
    p: &ScoringParams,
) -> f64 {
    let (a, b) = (&net.attributes()[i], &net.attributes()[j]);
    let mut phi = 0.0;
    for k in 0..a.features.len() {
        let diff = (a.features[k] - b.features[k]).abs().powf(p.tau);
        let term = match p.feature_mode {
            FeatureMode::Literal => diff,
            FeatureMode::Similarity => 1.0 - diff,
        };
        phi += term * a.preference_weights[k] * a.preference_signs[k] as f64;
        phi += term * b.preference_weights[k] * b.preference_signs[k] as f64;
    }
    let deg = |v: usize| (0..net.node_count()).filter(|&u| net.has_edge(v, u)).count() as f64;
    let delta = p.m * deg(i) + p.m * deg(j);
    let pi = match hops[i][j] {
        Some(l) if (2..=p.max_path_len).contains(&l) => 2.0 * p.gamma[l - 2].powi(l as i32),
        _ => 0.0,
    };
    p.q * phi + p.r * delta + p.c * pi
}

/// Every unconnected pair scored and fully sorted: score descending, then `(i, j)`.
pub fn oracle_ranking(net: &AttributedNetwork, p: &ScoringParams) -> Vec<((usize, usize), f64)> {
    let hops = hop_matrix(net);
    let n = net.node_count();
    let mut all = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !net.has_edge(i, j) {
                all.push(((i, j), oracle_score(net, &hops, i, j, p)));
            }
        }
    }
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all
}

/// Triangle counts by number of label-0 members, over all triples.
pub fn oracle_census(net: &AttributedNetwork, labels: &[u8]) -> [u64; 4] {
    let n = net.node_count();
    let mut counts = [0; 4];
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if net.has_edge(a, b) && net.has_edge(b, c) && net.has_edge(a, c) {
                    let zeros = [a, b, c].iter().filter(|&&v| labels[v] == 0).count();
                    counts[zeros] += 1;
                }
            }
        }
    }
    counts
}

fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.similarity <= b.similarity && a.cost <= b.cost && (a.similarity < b.similarity || a.cost < b.cost)
}

/// Pareto rank by repeated peeling with pairwise domination checks.
pub fn oracle_fronts(points: &[ObjectivePoint]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

pub fn random_points(count: usize, seed: u64) -> Vec<ObjectivePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // A coarse grid forces ties and duplicates.
    (0..count)
        .map(|_| ObjectivePoint::new(rng.random_range(0..8) as f64 / 8.0, rng.random_range(0..8) as f64))
        .collect()
}

/// Compares a library ranking with the oracle, allowing order swaps only
/// between pairs whose scores agree to within rounding.
pub fn ranking_matches(
    net: &AttributedNetwork,
    p: &ScoringParams,
    got: &[(usize, usize)],
    k: usize,
) -> Result<(), String> {
    let expected = oracle_ranking(net, p);
    let want = k.min(expected.len());
    if got.len() != want {
        return Err(format!("expected {want} pairs, got {}", got.len()));
    }
    let hops = hop_matrix(net);
    for (pos, (&pair, &(oracle_pair, oracle_value))) in got.iter().zip(&expected).enumerate() {
        if pair == oracle_pair {
            continue;
        }
        let (i, j) = pair;
        if i >= j || net.has_edge(i, j) {
            return Err(format!("position {pos}: {pair:?} is not an unconnected ordered pair"));
        }
        let value = oracle_score(net, &hops, i, j, p);
        if (value - oracle_value).abs() > 1e-9 {
            return Err(format!(
                "position {pos}: got {pair:?} ({value}), oracle {oracle_pair:?} ({oracle_value})"
            ));
        }
    }
    let mut seen = got.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != got.len() {
        return Err("duplicate pairs in ranking".into());
    }
    Ok(())
}
