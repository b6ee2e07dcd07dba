use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 99;

/// Strictly increasing decay parameters inside the open interval (0, 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DeltaGrid {
    values: Vec<f64>,
}

impl DeltaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(&bad) = values.iter().find(|&&d| !(d > 0.0 && d < 1.0)) {
            return Err(Error::InvalidGrid(format!("{bad} is outside (0, 1)")));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "values not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(DeltaGrid { values })
    }

    /// `points` evenly spaced values `k / (points + 1)`, `k = 1..=points`.
    ///
    /// `uniform(99)` is `0.01, 0.02, ..., 0.99`.
    pub fn uniform(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        let denom = (points + 1) as f64;
        DeltaGrid::new((1..=points).map(|k| k as f64 / denom).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}

impl Default for DeltaGrid {
    fn default() -> Self {
        DeltaGrid::uniform(DEFAULT_GRID_POINTS).expect("default grid is valid")
    }
}
