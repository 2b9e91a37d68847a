use serde::{Deserialize, Serialize};

use crate::dynamics::{Configuration, OpinionId};
use crate::scalar::Scalar;

/// Support class of a valid opinion in a given round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpinionClass {
    /// `p_i <= 1/(10k)`.
    SuperWeak,
    /// Not super-weak and `p_i < p_max/5`.
    Weak,
    /// `p_i >= p_max/5` and not super-weak.
    Strong,
}

/// Class of a single fraction. The boundary `p == p_max/5` is strong.
pub fn classify_fraction<S: Scalar>(p: S, p_max: S, k: usize) -> OpinionClass {
    let ten_k = S::from_count(10 * k as u64);
    if p.clone() * ten_k <= S::one() {
        OpinionClass::SuperWeak
    } else if p * S::from_count(5) >= p_max {
        OpinionClass::Strong
    } else {
        OpinionClass::Weak
    }
}

/// Classes of the `k` valid opinions, computed in exact integer arithmetic.
/// `p_max` ranges over all opinions, the grouped non-valid one included.
pub fn classify(config: &Configuration) -> Vec<OpinionClass> {
    let n = u128::from(config.n());
    let ten_k = 10 * config.k() as u128;
    let c_max = u128::from(config.max_count());
    config
        .valid_counts()
        .iter()
        .map(|&c| {
            let c = u128::from(c);
            if ten_k * c <= n {
                OpinionClass::SuperWeak
            } else if 5 * c >= c_max {
                OpinionClass::Strong
            } else {
                OpinionClass::Weak
            }
        })
        .collect()
}

pub fn is_super_weak(config: &Configuration, opinion: OpinionId) -> bool {
    10 * config.k() as u128 * u128::from(config.count(opinion)) <= u128::from(config.n())
}

/// `p_i <= p_max / 5`, the weak threshold taken inclusively.
pub fn is_at_most_fifth_of_max(config: &Configuration, opinion: OpinionId) -> bool {
    5 * u128::from(config.count(opinion)) <= u128::from(config.max_count())
}

pub fn strong_opinions(config: &Configuration) -> Vec<OpinionId> {
    classify(config)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c == OpinionClass::Strong)
        .map(|(i, _)| OpinionId::from_index(i))
        .collect()
}

pub fn not_super_weak_count(config: &Configuration) -> usize {
    classify(config)
        .iter()
        .filter(|c| **c != OpinionClass::SuperWeak)
        .count()
}

/// Strong opinions whose support lies outside `[0.18/kappa, 1.5/kappa]`.
/// Before the end of time every strong opinion should sit inside this band;
/// this reports rather than enforces.
pub fn strong_band_violations(config: &Configuration, kappa: u64) -> Vec<OpinionId> {
    let n = u128::from(config.n());
    let kappa = u128::from(kappa.max(1));
    strong_opinions(config)
        .into_iter()
        .filter(|&id| {
            let c = u128::from(config.count(id));
            // 0.18 n / kappa <= c <= 1.5 n / kappa, scaled by 50 kappa
            let scaled = 50 * kappa * c;
            scaled < 9 * n || scaled > 75 * n
        })
        .collect()
}
