//! Pair-attachment scores.
//!
//! A candidate pair `(i, j)` is scored as `q·Φ + r·Δ + c·Π` where `Φ` rewards
//! feature (dis)similarity weighted by each endpoint's sDNA, `Δ` rewards
//! high-degree endpoints and `Π` rewards endpoints at preferred hop distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedNetwork, NodeId};

/// How a feature difference enters the feature score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// `|Δf|^τ · (w·p)`: a positive sign rewards differing features.
    #[default]
    Literal,
    /// `(1 − |Δf|^τ) · (w·p)`: a positive sign rewards matching features.
    Similarity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringParams {
    /// Feature-score weight.
    pub q: f64,
    /// Popularity-score weight.
    pub r: f64,
    /// Path-score weight.
    pub c: f64,
    /// Preferential-attachment factor.
    pub m: f64,
    /// Exponent on feature differences.
    pub tau: f64,
    /// Preference weight for hop distance `l`, stored at index `l - 2`.
    pub gamma: Vec<f64>,
    /// Largest hop distance that earns a path score.
    pub max_path_len: usize,
    pub feature_mode: FeatureMode,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            q: 1.0,
            r: 1.0,
            c: 1.0,
            m: 0.5,
            tau: 1.0,
            gamma: vec![0.8, 0.5],
            max_path_len: 3,
            feature_mode: FeatureMode::Literal,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("q", self.q), ("r", self.r), ("c", self.c), ("m", self.m)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::validation(format!(
                    "scoring weight {name} = {v} must be finite and >= 0"
                )));
            }
        }
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::validation(format!("tau = {} must be finite and > 0", self.tau)));
        }
        if self.max_path_len < 2 {
            return Err(Error::validation("max_path_len must be at least 2"));
        }
        if self.gamma.len() != self.max_path_len - 1 {
            return Err(Error::validation(format!(
                "gamma has {} entries, expected {} for max_path_len {}",
                self.gamma.len(),
                self.max_path_len - 1,
                self.max_path_len
            )));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::validation(format!("gamma entry {g} outside [0, 1]")));
        }
        Ok(())
    }

    /// Contribution of one endpoint for a pair at hop distance `dist`.
    fn path_term(&self, dist: Option<usize>) -> f64 {
        match dist {
            Some(l) if (2..=self.max_path_len).contains(&l) => self.gamma[l - 2].powi(l as i32),
            _ => 0.0,
        }
    }
}

fn check_pair(net: &AttributedNetwork, i: NodeId, j: NodeId) -> Result<()> {
    let n = net.node_count();
    if i >= n || j >= n {
        return Err(Error::validation(format!("pair ({i}, {j}) out of range for {n} nodes")));
    }
    if i == j {
        return Err(Error::validation(format!("pair ({i}, {i}) is not a node pair")));
    }
    Ok(())
}

/// Feature-based score `Φ(i, j)`.
pub fn feature_score(net: &AttributedNetwork, i: NodeId, j: NodeId, params: &ScoringParams) -> Result<f64> {
    check_pair(net, i, j)?;
    let (a, b) = (&net.attributes()[i], &net.attributes()[j]);
    if a.len() != b.len() {
        return Err(Error::validation(format!(
            "nodes {i} and {j} have {} and {} features",
            a.len(),
            b.len()
        )));
    }
    Ok(feature_score_unchecked(net, i, j, params))
}

fn feature_score_unchecked(net: &AttributedNetwork, i: NodeId, j: NodeId, params: &ScoringParams) -> f64 {
    let (a, b) = (&net.attributes()[i], &net.attributes()[j]);
    let mut total = 0.0;
    for k in 0..a.len() {
        let diff = (a.features[k] - b.features[k]).abs().powf(params.tau);
        let term = match params.feature_mode {
            FeatureMode::Literal => diff,
            FeatureMode::Similarity => 1.0 - diff,
        };
        let pref_i = a.preference_weights[k] * f64::from(a.preference_signs[k]);
        let pref_j = b.preference_weights[k] * f64::from(b.preference_signs[k]);
        total += term * pref_i + term * pref_j;
    }
    total
}

/// Popularity score `Δ(i, j) = m·deg(i) + m·deg(j)`.
pub fn popularity_score(net: &AttributedNetwork, i: NodeId, j: NodeId, params: &ScoringParams) -> Result<f64> {
    check_pair(net, i, j)?;
    Ok(params.m * net.neighbors(i).len() as f64 + params.m * net.neighbors(j).len() as f64)
}

/// Path score `Π(i, j)`, read off the current graph as-is.
pub fn path_score(net: &AttributedNetwork, i: NodeId, j: NodeId, params: &ScoringParams) -> Result<f64> {
    check_pair(net, i, j)?;
    let dist = net.bfs_unchecked(i)[j];
    let term = params.path_term(dist);
    Ok(term + term)
}

/// Combined score `q·Φ + r·Δ + c·Π`.
pub fn pair_score(net: &AttributedNetwork, i: NodeId, j: NodeId, params: &ScoringParams) -> Result<f64> {
    let phi = feature_score(net, i, j, params)?;
    let delta = popularity_score(net, i, j, params)?;
    let pi = path_score(net, i, j, params)?;
    Ok(params.q * phi + params.r * delta + params.c * pi)
}

/// Scores pairs against one frozen graph state, sharing degrees and hop
/// distances across all evaluations.
pub struct PairScorer<'a> {
    net: &'a AttributedNetwork,
    params: &'a ScoringParams,
    degrees: Vec<usize>,
    distances: Option<Vec<Vec<Option<usize>>>>,
}

impl<'a> PairScorer<'a> {
    pub fn new(net: &'a AttributedNetwork, params: &'a ScoringParams) -> Result<Self> {
        params.validate()?;
        // Hop distances only matter when the path term can be non-zero.
        let distances = (params.c > 0.0 && params.gamma.iter().any(|g| *g > 0.0)).then(|| net.all_pairs_distances());
        Ok(Self {
            net,
            params,
            degrees: net.degrees(),
            distances,
        })
    }

    pub fn score(&self, i: NodeId, j: NodeId) -> f64 {
        let p = self.params;
        let phi = if p.q > 0.0 {
            feature_score_unchecked(self.net, i, j, p)
        } else {
            0.0
        };
        let delta = p.m * self.degrees[i] as f64 + p.m * self.degrees[j] as f64;
        let pi = match &self.distances {
            Some(d) => {
                let term = p.path_term(d[i][j]);
                term + term
            }
            None => 0.0,
        };
        p.q * phi + p.r * delta + p.c * pi
    }
}

/// Result of ranking the unconnected pairs of one graph state.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    pub pairs: Vec<(NodeId, NodeId)>,
    /// Number of pair-score evaluations performed.
    pub evaluations: u64,
}

/// The `k` highest-scoring unconnected pairs, ties broken by `(i, j)` ascending.
pub fn rank_unconnected_pairs(
    net: &AttributedNetwork,
    params: &ScoringParams,
    k: usize,
) -> Result<Vec<(NodeId, NodeId)>> {
    Ok(rank_with_cost(net, params, k)?.pairs)
}

pub fn rank_with_cost(net: &AttributedNetwork, params: &ScoringParams, k: usize) -> Result<Ranking> {
    let scorer = PairScorer::new(net, params)?;
    let n = net.node_count();
    let mut scored: Vec<(f64, NodeId, NodeId)> = Vec::with_capacity(net.max_edges() - net.edge_count());
    for i in 0..n {
        for j in (i + 1)..n {
            if !net.has_edge(i, j) {
                scored.push((scorer.score(i, j), i, j));
            }
        }
    }
    let evaluations = scored.len() as u64;
    let order = |a: &(f64, NodeId, NodeId), b: &(f64, NodeId, NodeId)| {
        b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    };
    if k < scored.len() {
        if k > 0 {
            scored.select_nth_unstable_by(k - 1, order);
        }
        scored.truncate(k);
    }
    scored.sort_by(order);
    Ok(Ranking {
        pairs: scored.into_iter().map(|(_, i, j)| (i, j)).collect(),
        evaluations,
    })
}
