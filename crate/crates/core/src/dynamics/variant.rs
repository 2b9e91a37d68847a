use std::fmt;

use serde::{Deserialize, Serialize};

/// Per-node update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MajorityRule {
    /// Own opinion plus two pulled samples; a node switches only when both
    /// samples agree on another opinion.
    TwoSamplePlusOwn,
    /// Majority of three pulled samples; a three-way tie is broken uniformly
    /// at random.
    ThreeSampleRandom,
}

/// A majority rule together with the sampling universe.
///
/// With `self_sampling` every sample is uniform with replacement over all
/// `n` nodes, the sampler included. Without it samples are uniform with
/// replacement over the other `n - 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProtocolVariant {
    pub rule: MajorityRule,
    pub self_sampling: bool,
}

impl ProtocolVariant {
    pub const fn two_sample_plus_own() -> Self {
        ProtocolVariant {
            rule: MajorityRule::TwoSamplePlusOwn,
            self_sampling: true,
        }
    }

    pub const fn three_sample_random() -> Self {
        ProtocolVariant {
            rule: MajorityRule::ThreeSampleRandom,
            self_sampling: true,
        }
    }

    pub const fn excluding_self(mut self) -> Self {
        self.self_sampling = false;
        self
    }

    pub fn samples_per_node(&self) -> usize {
        match self.rule {
            MajorityRule::TwoSamplePlusOwn => 2,
            MajorityRule::ThreeSampleRandom => 3,
        }
    }

    /// Whether a node of opinion `i` switches to `j` with probability exactly
    /// `p_j^2`, which is what the multinomial fast path samples.
    pub fn has_aggregate_path(&self) -> bool {
        self.rule == MajorityRule::TwoSamplePlusOwn && self.self_sampling
    }
}

impl Default for ProtocolVariant {
    fn default() -> Self {
        Self::two_sample_plus_own()
    }
}

impl fmt::Display for ProtocolVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.rule {
            MajorityRule::TwoSamplePlusOwn => "two-sample-own",
            MajorityRule::ThreeSampleRandom => "three-random",
        };
        if self.self_sampling {
            write!(f, "{rule}")
        } else {
            write!(f, "{rule}/exclude-self")
        }
    }
}
