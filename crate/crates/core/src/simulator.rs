//! Iterative network growth.
//!
//! Each iteration scores every unconnected pair on the current graph and adds
//! the top-ranked batch at once. Growth starts from the empty edge set and
//! edges are never removed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedNetwork, NodeAttributes};
use crate::scoring::{rank_with_cost, ScoringParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub iterations: usize,
    /// Fraction of all `N(N-1)/2` node pairs added per iteration.
    pub edge_rate: f64,
    pub scoring: ScoringParams,
    pub seed: u64,
    pub initial_attributes: Vec<NodeAttributes>,
    /// Stop emitting snapshots once the graph is complete.
    #[serde(default)]
    pub stop_on_saturation: bool,
}

impl SimulationConfig {
    pub fn new(initial_attributes: Vec<NodeAttributes>) -> Self {
        Self {
            iterations: 8,
            edge_rate: 0.04,
            scoring: ScoringParams::default(),
            seed: 0,
            initial_attributes,
            stop_on_saturation: false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.initial_attributes.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::validation("iterations must be >= 1"));
        }
        if !(self.edge_rate > 0.0 && self.edge_rate <= 1.0) {
            return Err(Error::validation(format!(
                "edge_rate {} outside (0, 1]",
                self.edge_rate
            )));
        }
        edges_per_iteration(self.node_count(), self.edge_rate)?;
        self.scoring.validate()
    }
}

/// Frozen network state after one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub network: AttributedNetwork,
    /// Cumulative pair-score evaluations up to and including this iteration.
    pub cost: u64,
    /// Cumulative wall-clock seconds; never used for comparisons.
    pub wall_seconds: f64,
    /// True when the iteration found no unconnected pair left.
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub snapshots: Vec<Snapshot>,
    pub config: SimulationConfig,
}

impl GrowthTrace {
    pub fn final_network(&self) -> &AttributedNetwork {
        &self
            .snapshots
            .last()
            .expect("trace holds at least one snapshot")
            .network
    }
}

/// Edges added per iteration: `max(1, round_half_up(rate · n(n-1)/2))`.
pub fn edges_per_iteration(n: usize, rate: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::validation(format!("need at least 2 nodes, got {n}")));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::validation(format!("edge rate {rate} outside (0, 1]")));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(((rate * pairs + 0.5).floor() as usize).max(1))
}

/// Owns one growing network.
pub struct Simulator {
    config: SimulationConfig,
    state: AttributedNetwork,
    per_step: usize,
    iteration: usize,
    cost: u64,
    wall_seconds: f64,
}

impl Simulator {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let state = AttributedNetwork::with_attributes(config.initial_attributes.clone())?;
        Self::from_network(state, config)
    }

    /// Continues growth from an existing network.
    pub fn from_network(state: AttributedNetwork, config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        if state.node_count() != config.node_count() {
            return Err(Error::validation(format!(
                "network has {} nodes, config describes {}",
                state.node_count(),
                config.node_count()
            )));
        }
        let per_step = edges_per_iteration(state.node_count(), config.edge_rate)?;
        Ok(Self {
            config,
            state,
            per_step,
            iteration: 0,
            cost: 0,
            wall_seconds: 0.0,
        })
    }

    pub fn network(&self) -> &AttributedNetwork {
        &self.state
    }

    pub fn edges_per_step(&self) -> usize {
        self.per_step
    }

    /// Adds the next batch of top-ranked pairs and returns the new snapshot.
    pub fn step(&mut self) -> Result<Snapshot> {
        let started = Instant::now();
        self.iteration += 1;
        let saturated = self.state.is_complete();
        if !saturated {
            let ranking = rank_with_cost(&self.state, &self.config.scoring, self.per_step)?;
            self.cost += ranking.evaluations;
            for (i, j) in ranking.pairs {
                self.state.add_edge(i, j)?;
            }
        }
        self.wall_seconds += started.elapsed().as_secs_f64();
        Ok(Snapshot {
            iteration: self.iteration,
            network: self.state.clone(),
            cost: self.cost,
            wall_seconds: self.wall_seconds,
            saturated,
        })
    }
}

/// Runs a full simulation from the empty edge set.
pub fn run(config: &SimulationConfig) -> Result<GrowthTrace> {
    let mut sim = Simulator::new(config.clone())?;
    let mut snapshots = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let snap = sim.step()?;
        let stop = snap.saturated && config.stop_on_saturation;
        snapshots.push(snap);
        if stop {
            break;
        }
    }
    Ok(GrowthTrace {
        snapshots,
        config: config.clone(),
    })
}

/// One uniformly random binary feature per node, reproducible from `seed`.
pub fn synthesize_binary_feature(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect()
}
