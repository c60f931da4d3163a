//! Bundled datasets.

use crate::error::Result;
use crate::graph::{load_network, AttributedNetwork};

/// Zachary karate club edge list, 1-based member ids.
pub const KARATE_EDGES: &str = include_str!("../data/karate.edges");

/// Faction of each member: `0` = "Mr. Hi", `1` = "Officer".
pub const KARATE_CLUB: &str = include_str!("../data/karate_club.csv");

/// The karate club network with its binary `club` attribute.
pub fn karate_club() -> AttributedNetwork {
    load_network(KARATE_EDGES, Some(KARATE_CLUB), None).expect("bundled karate data is valid")
}

/// Resolves `karate` to the bundled dataset, anything else to files on disk.
pub fn load_target(edges: &str, attributes: Option<&str>) -> Result<AttributedNetwork> {
    use crate::error::Error;
    if edges == "karate" {
        return Ok(karate_club());
    }
    let edge_text = std::fs::read_to_string(edges).map_err(|e| Error::io(edges, e))?;
    let attr_text = attributes
        .map(|p| std::fs::read_to_string(p).map_err(|e| Error::io(p, e)))
        .transpose()?;
    load_network(&edge_text, attr_text.as_deref(), None)
}
