//! Summary statistics over bootstrap iterations.

use serde::{Deserialize, Serialize};

/// Mean, population standard deviation and range of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Summarizes `values` in the order given. Returns `None` for an empty slice.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut sum = 0.0;
        for &v in values {
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        // Rounding in the running sum can push the mean a few ulps past the range.
        let mean = (sum / n).clamp(min, max);
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Summary {
            mean,
            std: var.sqrt(),
            min,
            max,
        })
    }
}
