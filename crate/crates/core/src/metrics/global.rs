//! Whole-network measures: density, modularity, degree assortativity, and the
//! degree and shortest-path-length distributions.

use std::collections::BTreeMap;

use super::Distribution;
use crate::error::{Error, Result};
use crate::graph::AttributedNetwork;

/// `|E| / (N(N-1)/2)`.
pub fn density(net: &AttributedNetwork) -> Result<f64> {
    if net.node_count() < 2 {
        return Err(Error::validation("density needs at least 2 nodes"));
    }
    Ok(net.edge_count() as f64 / net.max_edges() as f64)
}

/// Newman modularity of the greedy agglomerative partition; `None` without edges.
pub fn modularity(net: &AttributedNetwork) -> Option<f64> {
    if net.edge_count() == 0 {
        return None;
    }
    partition_modularity(net, &greedy_partition(net))
}

/// Newman's `Q` for a given community assignment; `None` without edges.
pub fn partition_modularity(net: &AttributedNetwork, community: &[usize]) -> Option<f64> {
    let m = net.edge_count() as f64;
    if m == 0.0 {
        return None;
    }
    let k = community.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; k];
    let mut degree_sum = vec![0.0; k];
    for (i, j) in net.edges() {
        if community[i] == community[j] {
            internal[community[i]] += 1.0;
        }
    }
    for (i, d) in net.degrees().into_iter().enumerate() {
        degree_sum[community[i]] += d as f64;
    }
    Some(
        internal
            .iter()
            .zip(&degree_sum)
            .map(|(l, d)| l / m - (d / (2.0 * m)).powi(2))
            .sum(),
    )
}

/// Greedy agglomerative modularity maximisation (Clauset–Newman–Moore).
///
/// Starts from singletons and repeatedly merges the adjacent pair of
/// communities with the largest modularity gain, preferring the
/// lexicographically smallest pair on ties, until no merge gains. Returns a
/// community label per node, labels numbered by smallest member.
pub fn greedy_partition(net: &AttributedNetwork) -> Vec<usize> {
    let n = net.node_count();
    let two_m = 2.0 * net.edge_count() as f64;
    let mut owner: Vec<usize> = (0..n).collect();
    if two_m == 0.0 {
        return owner;
    }
    // between[i][j]: fraction of edge ends joining communities i and j.
    let mut between: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for (i, j) in net.edges() {
        *between[i].entry(j).or_default() += 1.0 / two_m;
        *between[j].entry(i).or_default() += 1.0 / two_m;
    }
    let mut share: Vec<f64> = net.degrees().into_iter().map(|d| d as f64 / two_m).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();

    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, row) in between.iter().enumerate() {
            for (&j, &e) in row.range(i + 1..) {
                let gain = 2.0 * (e - share[i] * share[j]);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, i, j));
                }
            }
        }
        let Some((gain, keep, gone)) = best else { break };
        if gain <= 0.0 {
            break;
        }
        let moved = std::mem::take(&mut between[gone]);
        for (k, e) in moved {
            between[k].remove(&gone);
            if k == keep {
                continue;
            }
            *between[keep].entry(k).or_default() += e;
            *between[k].entry(keep).or_default() += e;
        }
        share[keep] += share[gone];
        share[gone] = 0.0;
        let absorbed = std::mem::take(&mut members[gone]);
        members[keep].extend(absorbed);
    }

    for (label, group) in members.iter().filter(|g| !g.is_empty()).enumerate() {
        for &v in group {
            owner[v] = label;
        }
    }
    owner
}

/// Pearson correlation of endpoint degrees over edges; `None` when the
/// endpoint degrees have no variance or there are no edges.
pub fn degree_assortativity(net: &AttributedNetwork) -> Option<f64> {
    let deg = net.degrees();
    let (mut sx, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0);
    for (i, j) in net.edges() {
        let (a, b) = (deg[i] as f64, deg[j] as f64);
        // Both orientations of each undirected edge.
        sx += a + b;
        sxx += a * a + b * b;
        sxy += 2.0 * a * b;
        count += 2.0;
    }
    if count == 0.0 {
        return None;
    }
    let mean = sx / count;
    let var = sxx / count - mean * mean;
    if var <= 1e-12 * mean.max(1.0).powi(2) {
        return None;
    }
    let cov = sxy / count - mean * mean;
    Some((cov / var).clamp(-1.0, 1.0))
}

pub fn degree_distribution(net: &AttributedNetwork) -> Distribution {
    Distribution::new(net.degrees().into_iter().map(|d| d as f64).collect())
}

/// Hop distance of every unordered node pair; unreachable pairs count as `N`.
pub fn shortest_path_distribution(net: &AttributedNetwork) -> Result<Distribution> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::validation("path distribution needs at least 2 nodes"));
    }
    let mut samples = Vec::with_capacity(net.max_edges());
    for s in 0..n {
        let dist = net.bfs_unchecked(s);
        samples.extend(dist[s + 1..].iter().map(|d| d.unwrap_or(n) as f64));
    }
    Ok(Distribution::new(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> AttributedNetwork {
        let mut net = AttributedNetwork::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                net.add_edge(i, j).unwrap();
            }
        }
        net
    }

    fn star(n: usize) -> AttributedNetwork {
        let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
        AttributedNetwork::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn density_cases() {
        assert_eq!(density(&AttributedNetwork::empty(5)).unwrap(), 0.0);
        assert_eq!(density(&complete(4)).unwrap(), 1.0);
        assert!(density(&AttributedNetwork::empty(1)).is_err());
    }

    #[test]
    fn modularity_complete_graph_is_zero() {
        let q = modularity(&complete(5)).unwrap();
        assert!(q.abs() < 1e-12, "{q}");
        assert!(greedy_partition(&complete(5)).iter().all(|&c| c == 0));
    }

    #[test]
    fn modularity_two_triangles() {
        let net = AttributedNetwork::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!((modularity(&net).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(greedy_partition(&net), vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn modularity_missing_without_edges() {
        assert!(modularity(&AttributedNetwork::empty(4)).is_none());
    }

    #[test]
    fn assortativity_cases() {
        assert!((degree_assortativity(&star(5)).unwrap() + 1.0).abs() < 1e-12);
        let cycle = AttributedNetwork::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(degree_assortativity(&cycle).is_none());
        assert!(degree_assortativity(&AttributedNetwork::empty(3)).is_none());
    }

    #[test]
    fn degree_distribution_cases() {
        assert!(degree_distribution(&AttributedNetwork::empty(3))
            .samples
            .iter()
            .all(|&d| d == 0.0));
        assert!(degree_distribution(&complete(4)).samples.iter().all(|&d| d == 3.0));
    }

    #[test]
    fn path_distribution_cases() {
        let path = AttributedNetwork::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut s = shortest_path_distribution(&path).unwrap().samples;
        s.sort_by(f64::total_cmp);
        assert_eq!(s, vec![1.0, 1.0, 2.0]);
        let pair = AttributedNetwork::empty(2);
        assert_eq!(shortest_path_distribution(&pair).unwrap().samples, vec![2.0]);
    }
}
