//! Network statistics: five whole-network measures in [`global`] and five
//! subgraph-level measures in [`local`].

pub mod global;
pub mod local;

use serde::{Deserialize, Serialize};

/// Summary statistics of a sample set. `std` is the population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub samples: Vec<f64>,
    /// `None` for an empty sample set.
    pub summary: Option<Summary>,
}

impl Distribution {
    pub fn new(samples: Vec<f64>) -> Self {
        let summary = summarize(&samples);
        Self { samples, summary }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn summarize(samples: &[f64]) -> Option<Summary> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(Summary {
        mean,
        std: var.sqrt(),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
