//! Attributed social network simulation.
//!
//! Networks grow from an empty edge set by repeatedly adding the top-ranked
//! unconnected pairs under a score that mixes feature preferences (social DNA),
//! popularity and hop distance. Simulated snapshots are compared with a target
//! network over ten global and local measures, and the shared sDNA is tuned
//! with NSGA-II for similarity and cost.

pub mod assessment;
pub mod data;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod optimizer;
pub mod scoring;
pub mod seeds;
pub mod simulator;

pub use error::{Error, Result};
pub use graph::{load_network, AttributedNetwork, NodeAttributes, NodeId};
