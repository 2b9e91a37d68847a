use serde::{Deserialize, Serialize};

use super::classify::strong_opinions;
use crate::dynamics::{gap, Configuration, OpinionId};

/// Pairwise gaps `g_ij = (p_i - p_j) / p_j` among the strong opinions of one
/// round. Strong opinions always have nonzero support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSnapshot {
    pub round: u64,
    pub opinions: Vec<OpinionId>,
    pub pairs: Vec<Vec<f64>>,
}

impl GapSnapshot {
    pub fn of(config: &Configuration) -> Self {
        let opinions = strong_opinions(config);
        let pairs = opinions
            .iter()
            .map(|&i| {
                opinions
                    .iter()
                    .map(|&j| {
                        gap(config.fraction(i), config.fraction(j))
                            .expect("strong opinions have support")
                    })
                    .collect()
            })
            .collect();
        GapSnapshot {
            round: config.round(),
            opinions,
            pairs,
        }
    }

    pub fn get(&self, i: OpinionId, j: OpinionId) -> Option<f64> {
        let a = self.opinions.iter().position(|&o| o == i)?;
        let b = self.opinions.iter().position(|&o| o == j)?;
        Some(self.pairs[a][b])
    }

    /// Largest `max(g_ij, g_ji)` over all strong pairs.
    pub fn max_gap(&self) -> f64 {
        self.pairs.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// `max(g_ij, g_ji)` between two opinions; infinite once one is extinct.
pub fn symmetric_gap(config: &Configuration, i: OpinionId, j: OpinionId) -> f64 {
    let (ci, cj) = (config.count(i), config.count(j));
    if ci == 0 && cj == 0 {
        return 0.0;
    }
    let (hi, lo) = (ci.max(cj) as f64, ci.min(cj) as f64);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        (hi - lo) / lo
    }
}
