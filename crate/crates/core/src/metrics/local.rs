//! Subgraph-level measures: local clustering and the attributed triangle
//! census with its significance profile against a G(n, m) null ensemble.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Distribution;
use crate::error::{Error, Result};
use crate::graph::AttributedNetwork;
use crate::seeds::derive_seed;

/// |Z| assigned when the ensemble has zero spread but the observed count differs.
pub const ZSCORE_CAP: f64 = 10.0;

/// Per-node local clustering coefficient; nodes of degree < 2 contribute 0.
pub fn clustering_distribution(net: &AttributedNetwork) -> Distribution {
    let samples = (0..net.node_count())
        .map(|v| {
            let nbrs = net.neighbors(v);
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (a, &u) in nbrs.iter().enumerate() {
                links += sorted_intersection_count(net.neighbors(u), &nbrs[a + 1..]);
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    Distribution::new(samples)
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Triangle counts by the number of members whose binary label is `0`
/// ("Mr. Hi" in the karate data): index 0 holds all-`1` triangles, index 3
/// all-`0` triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCensus {
    pub counts: [u64; 4],
}

impl TriadCensus {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Census after swapping the two label values.
    pub fn relabeled(&self) -> Self {
        let [a, b, c, d] = self.counts;
        Self { counts: [d, c, b, a] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { samples: 100, seed: 0 }
    }
}

/// First feature column as 0/1 labels.
pub fn binary_labels(net: &AttributedNetwork) -> Result<Vec<u8>> {
    if net.feature_count() == 0 {
        return Err(Error::validation("triad census needs a binary first feature"));
    }
    net.attributes()
        .iter()
        .enumerate()
        .map(|(i, a)| match a.features[0] {
            0.0 => Ok(0),
            1.0 => Ok(1),
            x => Err(Error::validation(format!("node {i}: first feature {x} is not binary"))),
        })
        .collect()
}

pub fn triad_census(net: &AttributedNetwork) -> Result<TriadCensus> {
    let labels = binary_labels(net)?;
    census_with_labels(net, &labels)
}

/// Census using externally supplied labels (one per node).
pub fn census_with_labels(net: &AttributedNetwork, labels: &[u8]) -> Result<TriadCensus> {
    if labels.len() != net.node_count() {
        return Err(Error::validation(format!(
            "{} labels for {} nodes",
            labels.len(),
            net.node_count()
        )));
    }
    let adjacency: Vec<&[usize]> = (0..net.node_count()).map(|v| net.neighbors(v)).collect();
    Ok(census_of_adjacency(&adjacency, labels))
}

fn census_of_adjacency<A: AsRef<[usize]>>(adjacency: &[A], labels: &[u8]) -> TriadCensus {
    let mut counts = [0u64; 4];
    for (u, nbrs) in adjacency.iter().enumerate() {
        let nbrs = nbrs.as_ref();
        for &v in nbrs.iter().filter(|&&v| v > u) {
            let (a, b) = (nbrs, adjacency[v].as_ref());
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i];
                        if w > v {
                            let zeros = [u, v, w].iter().filter(|&&x| labels[x] == 0).count();
                            counts[zeros] += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    TriadCensus { counts }
}

/// Mean and population standard deviation of the census over a null ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullStats {
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

/// Census statistics over uniform random graphs with `n` nodes and `m` edges,
/// labels held fixed. Sample `s` uses the seed `derive(derive(seed, n·2³²+m), s)`
/// so the result does not depend on evaluation order.
pub fn null_census_stats(n: usize, m: usize, labels: &[u8], ensemble: &EnsembleConfig) -> Result<NullStats> {
    if ensemble.samples == 0 {
        return Err(Error::validation("ensemble needs at least one sample"));
    }
    if labels.len() != n {
        return Err(Error::validation(format!("{} labels for {n} nodes", labels.len())));
    }
    let total = n * n.saturating_sub(1) / 2;
    if m > total {
        return Err(Error::validation(format!("{m} edges exceed {total} node pairs")));
    }
    let mut pairs = Vec::with_capacity(total);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    let family = derive_seed(ensemble.seed, ((n as u64) << 32) | m as u64);
    let censuses: Vec<[u64; 4]> = (0..ensemble.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(family, s as u64));
            let mut adjacency = vec![Vec::new(); n];
            for idx in sample(&mut rng, total, m) {
                let (i, j) = pairs[idx];
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
            for list in &mut adjacency {
                list.sort_unstable();
            }
            census_of_adjacency(&adjacency, labels).counts
        })
        .collect();
    let k = censuses.len() as f64;
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for t in 0..4 {
        mean[t] = censuses.iter().map(|c| c[t] as f64).sum::<f64>() / k;
        let var = censuses.iter().map(|c| (c[t] as f64 - mean[t]).powi(2)).sum::<f64>() / k;
        std[t] = var.sqrt();
    }
    Ok(NullStats { mean, std })
}

/// `Z = (n − mean) / std` per triangle type, with the zero-spread rule:
/// equal counts give 0, otherwise `±ZSCORE_CAP`.
pub fn zscores(census: &TriadCensus, stats: &NullStats) -> [Option<f64>; 4] {
    std::array::from_fn(|t| {
        let diff = census.counts[t] as f64 - stats.mean[t];
        if stats.std[t] > 1e-12 {
            Some(diff / stats.std[t])
        } else if diff.abs() <= 1e-12 {
            Some(0.0)
        } else {
            Some(diff.signum() * ZSCORE_CAP)
        }
    })
}

/// Z-scores of the network's own census against its null ensemble.
pub fn triad_zscores(net: &AttributedNetwork, ensemble: &EnsembleConfig) -> Result<[Option<f64>; 4]> {
    let labels = binary_labels(net)?;
    let census = census_with_labels(net, &labels)?;
    let stats = null_census_stats(net.node_count(), net.edge_count(), &labels, ensemble)?;
    Ok(zscores(&census, &stats))
}

/// Unit-normalises the present Z-scores; all-zero input yields all missing.
pub fn significance_profile(z: [Option<f64>; 4]) -> [Option<f64>; 4] {
    let norm = z.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return [None; 4];
    }
    z.map(|v| v.map(|v| v / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeAttributes;

    fn labelled(n: usize, edges: &[(usize, usize)], labels: &[f64]) -> AttributedNetwork {
        let attrs = labels
            .iter()
            .map(|&l| NodeAttributes::from_features(vec![l]).unwrap())
            .collect();
        let mut net = AttributedNetwork::with_attributes(attrs).unwrap();
        for &(i, j) in edges {
            net.add_edge(i, j).unwrap();
        }
        assert_eq!(net.node_count(), n);
        net
    }

    #[test]
    fn clustering_triangle_and_star() {
        let tri = AttributedNetwork::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(clustering_distribution(&tri).samples.iter().all(|&c| c == 1.0));
        let star = AttributedNetwork::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(clustering_distribution(&star).samples.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn census_basic_cases() {
        let tri = labelled(3, &[(0, 1), (1, 2), (0, 2)], &[0.0, 0.0, 0.0]);
        assert_eq!(triad_census(&tri).unwrap().counts, [0, 0, 0, 1]);
        let path = labelled(3, &[(0, 1), (1, 2)], &[0.0, 1.0, 0.0]);
        assert_eq!(triad_census(&path).unwrap().counts, [0, 0, 0, 0]);
    }

    #[test]
    fn census_rejects_non_binary() {
        let net = labelled(2, &[(0, 1)], &[0.5, 1.0]);
        assert!(triad_census(&net).is_err());
        assert!(triad_census(&AttributedNetwork::empty(3)).is_err());
    }

    #[test]
    fn zscore_zero_spread_rules() {
        let stats = NullStats {
            mean: [2.0, 0.0, 0.0, 1.0],
            std: [0.0, 0.0, 1.0, 0.5],
        };
        let census = TriadCensus { counts: [2, 3, 0, 2] };
        let z = zscores(&census, &stats);
        assert_eq!(z, [Some(0.0), Some(ZSCORE_CAP), Some(0.0), Some(2.0)]);
    }

    #[test]
    fn zscore_zero_when_ensemble_matches() {
        // A complete graph is the only graph with its edge count.
        let mut net = labelled(5, &[], &[0.0, 1.0, 0.0, 1.0, 1.0]);
        for i in 0..5 {
            for j in (i + 1)..5 {
                net.add_edge(i, j).unwrap();
            }
        }
        let z = triad_zscores(&net, &EnsembleConfig { samples: 5, seed: 3 }).unwrap();
        assert_eq!(z, [Some(0.0); 4]);
    }

    #[test]
    fn significance_profile_cases() {
        let sp = significance_profile([Some(3.0), Some(0.0), Some(0.0), Some(4.0)]);
        assert_eq!(sp, [Some(0.6), Some(0.0), Some(0.0), Some(0.8)]);
        let sp = significance_profile([Some(2.5), Some(0.0), Some(0.0), Some(0.0)]);
        assert_eq!(sp, [Some(1.0), Some(0.0), Some(0.0), Some(0.0)]);
        assert_eq!(significance_profile([Some(0.0); 4]), [None; 4]);
        let sp = significance_profile([Some(3.0), None, Some(0.0), Some(4.0)]);
        assert_eq!(sp, [Some(0.6), None, Some(0.0), Some(0.8)]);
    }

    #[test]
    fn null_stats_reproducible() {
        let labels = [0, 1, 0, 1, 0, 1, 0, 1];
        let e = EnsembleConfig { samples: 20, seed: 9 };
        let a = null_census_stats(8, 12, &labels, &e).unwrap();
        assert_eq!(a, null_census_stats(8, 12, &labels, &e).unwrap());
        assert!(null_census_stats(8, 40, &labels, &e).is_err());
    }
}
