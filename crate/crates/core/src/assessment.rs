//! Distances between a simulated network and a target over ten measures,
//! and the composite indexes built from them.
//!
//! Value-based measures use a normalised Manhattan distance, distribution-based
//! measures a smoothed and clipped KL divergence `KL(sim ‖ target)`. Any measure
//! that cannot be computed scores the maximal distance 1.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AttributedNetwork;
use crate::metrics::global::{
    degree_assortativity, degree_distribution, density, modularity, shortest_path_distribution,
};
use crate::metrics::local::{
    binary_labels, census_with_labels, clustering_distribution, null_census_stats, significance_profile, zscores,
    EnsembleConfig, NullStats, TriadCensus,
};
use crate::metrics::Distribution;

/// Additive smoothing applied to every histogram bin before normalising.
pub const KL_SMOOTHING: f64 = 1e-6;

pub const MODULARITY_RANGE: (f64, f64) = (-0.5, 1.0);
pub const CORRELATION_RANGE: (f64, f64) = (-1.0, 1.0);
pub const UNIT_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Density,
    Modularity,
    Assortativity,
    DegreeKl,
    PathKl,
    ClusteringKl,
    Sp1,
    Sp2,
    Sp3,
    Sp4,
}

impl Measure {
    pub const ALL: [Measure; 10] = [
        Measure::Density,
        Measure::Modularity,
        Measure::Assortativity,
        Measure::DegreeKl,
        Measure::PathKl,
        Measure::ClusteringKl,
        Measure::Sp1,
        Measure::Sp2,
        Measure::Sp3,
        Measure::Sp4,
    ];

    pub fn is_global(self) -> bool {
        matches!(
            self,
            Measure::Density | Measure::Modularity | Measure::Assortativity | Measure::DegreeKl | Measure::PathKl
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Density => "density",
            Measure::Modularity => "modularity",
            Measure::Assortativity => "assortativity",
            Measure::DegreeKl => "degree_kl",
            Measure::PathKl => "path_kl",
            Measure::ClusteringKl => "clustering_kl",
            Measure::Sp1 => "sp1",
            Measure::Sp2 => "sp2",
            Measure::Sp3 => "sp3",
            Measure::Sp4 => "sp4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDistance {
    pub name: Measure,
    pub value: f64,
    pub missing: bool,
}

impl MeasureDistance {
    fn new(name: Measure, value: Option<f64>) -> Self {
        match value {
            Some(v) => Self {
                name,
                value: v.clamp(0.0, 1.0),
                missing: false,
            },
            None => Self {
                name,
                value: 1.0,
                missing: true,
            },
        }
    }
}

/// Measure weights in [`Measure::ALL`] order; non-negative, summing to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub [f64; 10]);

impl Default for Weights {
    fn default() -> Self {
        Weights([0.1; 10])
    }
}

impl Weights {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::validation("measure weights must be finite and non-negative"));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("measure weights sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub per_measure: Vec<MeasureDistance>,
    pub global_index: f64,
    pub local_index: f64,
    pub combined_index: f64,
    pub weights: Weights,
}

impl IndexReport {
    pub fn distance(&self, measure: Measure) -> f64 {
        self.per_measure
            .iter()
            .find(|d| d.name == measure)
            .map_or(1.0, |d| d.value)
    }
}

/// Histogram layout for a distribution-based measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Binning {
    /// One bin per integer in `lo..=hi`; values are rounded and clamped.
    Integer { lo: i64, hi: i64 },
    /// `bins` equal-width bins on `[lo, hi]`, the last one closed.
    Uniform { lo: f64, hi: f64, bins: usize },
}

impl Binning {
    fn len(&self) -> usize {
        match *self {
            Binning::Integer { lo, hi } => (hi - lo + 1).max(1) as usize,
            Binning::Uniform { bins, .. } => bins.max(1),
        }
    }

    fn index(&self, x: f64) -> usize {
        match *self {
            Binning::Integer { lo, hi } => (x.round() as i64).clamp(lo, hi.max(lo)).saturating_sub(lo) as usize,
            Binning::Uniform { lo, hi, bins } => {
                let pos = ((x - lo) / (hi - lo) * bins as f64).floor();
                (pos.max(0.0) as usize).min(bins.max(1) - 1)
            }
        }
    }

    /// Smoothed, normalised histogram of `samples`.
    pub fn histogram(&self, samples: &[f64]) -> Vec<f64> {
        let mut counts = vec![0.0; self.len()];
        for &x in samples {
            counts[self.index(x)] += 1.0;
        }
        let n = samples.len() as f64;
        let mut p: Vec<f64> = counts.into_iter().map(|c| c / n + KL_SMOOTHING).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p
    }
}

/// Unclipped `KL(sim ‖ target)` over smoothed histograms; `None` if either side is empty.
pub fn kl_divergence(sim: &Distribution, target: &Distribution, binning: &Binning) -> Option<f64> {
    if sim.is_empty() || target.is_empty() {
        return None;
    }
    let p = binning.histogram(&sim.samples);
    let q = binning.histogram(&target.samples);
    Some(p.iter().zip(&q).map(|(p, q)| p * (p / q).ln()).sum())
}

/// KL divergence clipped to `[0, 1]`; empty inputs score 1.
pub fn kl_distance(sim: &Distribution, target: &Distribution, binning: &Binning) -> f64 {
    kl_distance_opt(sim, target, binning).unwrap_or(1.0)
}

fn kl_distance_opt(sim: &Distribution, target: &Distribution, binning: &Binning) -> Option<f64> {
    kl_divergence(sim, target, binning).map(|kl| kl.clamp(0.0, 1.0))
}

/// `|norm(x) − norm(y)|` with `norm(v) = (v − lo)/(hi − lo)`, clipped to `[0, 1]`;
/// a missing operand scores 1.
pub fn scalar_distance(x: Option<f64>, y: Option<f64>, range: (f64, f64)) -> f64 {
    scalar_distance_opt(x, y, range).unwrap_or(1.0)
}

fn scalar_distance_opt(x: Option<f64>, y: Option<f64>, (lo, hi): (f64, f64)) -> Option<f64> {
    let (x, y) = (x?, y?);
    if !(x.is_finite() && y.is_finite()) {
        return None;
    }
    let norm = |v: f64| (v - lo) / (hi - lo);
    Some((norm(x) - norm(y)).abs().clamp(0.0, 1.0))
}

/// The ten measures of one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: Option<f64>,
    pub modularity: Option<f64>,
    pub assortativity: Option<f64>,
    pub degree: Distribution,
    pub path: Distribution,
    pub clustering: Distribution,
    pub census: Option<TriadCensus>,
    pub significance: [Option<f64>; 4],
}

impl NetworkMetrics {
    /// Measures with the triad profile left missing.
    pub fn structural(net: &AttributedNetwork) -> Self {
        Self {
            node_count: net.node_count(),
            edge_count: net.edge_count(),
            density: density(net).ok(),
            modularity: modularity(net),
            assortativity: degree_assortativity(net),
            degree: degree_distribution(net),
            path: shortest_path_distribution(net).unwrap_or_else(|_| Distribution::new(Vec::new())),
            clustering: clustering_distribution(net),
            census: None,
            significance: [None; 4],
        }
    }

    /// Full measures; the triad census uses `labels` against null statistics `stats`.
    pub fn with_profile(net: &AttributedNetwork, labels: &[u8], stats: &NullStats) -> Result<Self> {
        let mut metrics = Self::structural(net);
        let census = census_with_labels(net, labels)?;
        metrics.significance = significance_profile(zscores(&census, stats));
        metrics.census = Some(census);
        Ok(metrics)
    }
}

/// Combines per-measure distances into the global, local and combined indexes.
pub fn composite_index(sim: &NetworkMetrics, target: &NetworkMetrics, weights: &Weights) -> Result<IndexReport> {
    weights.validate()?;
    if sim.node_count != target.node_count {
        return Err(Error::validation(format!(
            "simulated network has {} nodes, target has {}",
            sim.node_count, target.node_count
        )));
    }
    let n = target.node_count as i64;
    let degree_bins = Binning::Integer {
        lo: 0,
        hi: (n - 1).max(0),
    };
    let path_bins = Binning::Integer { lo: 1, hi: n.max(1) };
    let clustering_bins = Binning::Uniform {
        lo: 0.0,
        hi: 1.0,
        bins: 10,
    };

    let per_measure: Vec<MeasureDistance> = Measure::ALL
        .iter()
        .map(|&m| {
            let value = match m {
                Measure::Density => scalar_distance_opt(sim.density, target.density, UNIT_RANGE),
                Measure::Modularity => scalar_distance_opt(sim.modularity, target.modularity, MODULARITY_RANGE),
                Measure::Assortativity => {
                    scalar_distance_opt(sim.assortativity, target.assortativity, CORRELATION_RANGE)
                }
                Measure::DegreeKl => kl_distance_opt(&sim.degree, &target.degree, &degree_bins),
                Measure::PathKl => kl_distance_opt(&sim.path, &target.path, &path_bins),
                Measure::ClusteringKl => kl_distance_opt(&sim.clustering, &target.clustering, &clustering_bins),
                Measure::Sp1 => scalar_distance_opt(sim.significance[0], target.significance[0], CORRELATION_RANGE),
                Measure::Sp2 => scalar_distance_opt(sim.significance[1], target.significance[1], CORRELATION_RANGE),
                Measure::Sp3 => scalar_distance_opt(sim.significance[2], target.significance[2], CORRELATION_RANGE),
                Measure::Sp4 => scalar_distance_opt(sim.significance[3], target.significance[3], CORRELATION_RANGE),
            };
            MeasureDistance::new(m, value)
        })
        .collect();
    Ok(index_from_distances(per_measure, *weights))
}

/// Indexes from precomputed distances (in [`Measure::ALL`] order).
pub fn index_from_distances(per_measure: Vec<MeasureDistance>, weights: Weights) -> IndexReport {
    let group = |global: bool| {
        let (mut num, mut den, mut plain, mut count) = (0.0, 0.0, 0.0, 0.0);
        for (d, w) in per_measure.iter().zip(weights.0) {
            if d.name.is_global() == global {
                num += w * d.value;
                den += w;
                plain += d.value;
                count += 1.0;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            plain / count
        }
    };
    let global_index = group(true);
    let local_index = group(false);
    // Divided by the weight sum so rounding in weights that sum to one
    // cannot pull an all-ones vector below 1.
    let total: f64 = weights.0.iter().sum();
    let weighted: f64 = per_measure.iter().zip(weights.0).map(|(d, w)| w * d.value).sum();
    let combined_index = if total > 0.0 {
        (weighted / total).clamp(0.0, 1.0)
    } else {
        0.0
    };
    IndexReport {
        per_measure,
        global_index,
        local_index,
        combined_index,
        weights,
    }
}

/// Assesses many networks against one target, memoising the null-ensemble
/// statistics per edge count.
pub struct Assessor {
    labels: Option<Vec<u8>>,
    ensemble: EnsembleConfig,
    weights: Weights,
    target: NetworkMetrics,
    null_cache: Mutex<HashMap<usize, NullStats>>,
}

impl Assessor {
    /// `labels` defaults to the target's binary first feature; without labels
    /// the four profile measures are always missing.
    pub fn new(
        target: &AttributedNetwork,
        labels: Option<Vec<u8>>,
        ensemble: EnsembleConfig,
        weights: Weights,
    ) -> Result<Self> {
        weights.validate()?;
        let labels = match labels {
            Some(l) => Some(l),
            None => binary_labels(target).ok(),
        };
        if let Some(l) = &labels {
            if l.len() != target.node_count() {
                return Err(Error::validation(format!(
                    "{} census labels for {} target nodes",
                    l.len(),
                    target.node_count()
                )));
            }
        }
        let mut assessor = Self {
            labels,
            ensemble,
            weights,
            target: NetworkMetrics::structural(target),
            null_cache: Mutex::new(HashMap::new()),
        };
        assessor.target = assessor.metrics(target)?;
        Ok(assessor)
    }

    pub fn target(&self) -> &NetworkMetrics {
        &self.target
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn ensemble(&self) -> &EnsembleConfig {
        &self.ensemble
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn null_stats(&self, node_count: usize, edge_count: usize) -> Result<Option<NullStats>> {
        let Some(labels) = &self.labels else { return Ok(None) };
        if let Some(stats) = self.null_cache.lock().expect("cache lock").get(&edge_count) {
            return Ok(Some(*stats));
        }
        // Computed outside the lock; the result depends only on the key.
        let stats = null_census_stats(node_count, edge_count, labels, &self.ensemble)?;
        self.null_cache.lock().expect("cache lock").insert(edge_count, stats);
        Ok(Some(stats))
    }

    pub fn metrics(&self, net: &AttributedNetwork) -> Result<NetworkMetrics> {
        if net.node_count() != self.target.node_count {
            return Err(Error::validation(format!(
                "network has {} nodes, target has {}",
                net.node_count(),
                self.target.node_count
            )));
        }
        match (&self.labels, self.null_stats(net.node_count(), net.edge_count())?) {
            (Some(labels), Some(stats)) => NetworkMetrics::with_profile(net, labels, &stats),
            _ => Ok(NetworkMetrics::structural(net)),
        }
    }

    pub fn assess(&self, net: &AttributedNetwork) -> Result<IndexReport> {
        let metrics = self.metrics(net)?;
        composite_index(&metrics, &self.target, &self.weights)
    }
}
