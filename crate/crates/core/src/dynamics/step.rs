//! One synchronous round of the dynamics.
//!
//! Every node samples against the start-of-round opinions and all updates
//! land simultaneously.

use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::config::{Configuration, OpinionId};
use super::population::{NodeId, Population};
use super::variant::{MajorityRule, ProtocolVariant};
use crate::error::{Error, Result};
use crate::rng::{trial_stream, SeededRandomSource};

/// Sampled node ids of one update (two or three of them).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    ids: [NodeId; 3],
    len: u8,
}

impl SampleSet {
    pub fn two(a: NodeId, b: NodeId) -> Self {
        SampleSet {
            ids: [a, b, 0],
            len: 2,
        }
    }

    pub fn three(a: NodeId, b: NodeId, c: NodeId) -> Self {
        SampleSet {
            ids: [a, b, c],
            len: 3,
        }
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.ids[..self.len as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchCause {
    /// At least two samples held the adopted opinion.
    Majority,
    /// Three pairwise distinct samples; the adopted one was drawn at random.
    Tie,
    /// Rewritten by the adversary; carries no samples.
    Adversary,
}

/// A node that changed opinion during a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub node: NodeId,
    pub from: OpinionId,
    pub to: OpinionId,
    pub samples: SampleSet,
    pub cause: SwitchCause,
}

/// Everything that moved in one round, in ascending node order for protocol
/// switches, followed by adversary rewrites.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundMoves {
    pub round: u64,
    pub switches: Vec<Switch>,
}

impl RoundMoves {
    pub fn is_empty(&self) -> bool {
        self.switches.is_empty()
    }

    pub fn push_adversarial(&mut self, node: NodeId, from: OpinionId, to: OpinionId) {
        self.switches.push(Switch {
            node,
            from,
            to,
            samples: SampleSet::default(),
            cause: SwitchCause::Adversary,
        });
    }
}

#[inline]
fn draw_peer<R: Rng + ?Sized>(rng: &mut R, v: usize, n: usize, self_sampling: bool) -> usize {
    if self_sampling {
        rng.random_range(0..n)
    } else {
        let r = rng.random_range(0..n - 1);
        if r >= v {
            r + 1
        } else {
            r
        }
    }
}

/// Agent-level round. Mutates `population` and returns the switch record,
/// including the sampled node ids of each switcher.
pub fn step_agent<R: Rng + ?Sized>(
    population: &mut Population,
    variant: ProtocolVariant,
    rng: &mut R,
) -> RoundMoves {
    let n = population.len();
    let round = population.configuration().round() + 1;
    let mut switches = Vec::new();
    // with n = 1 and no self-sampling there is nobody to pull from
    if n > 1 || variant.self_sampling {
        let start = population.raw_opinions();
        for v in 0..n {
            let own = start[v];
            let outcome = match variant.rule {
                MajorityRule::TwoSamplePlusOwn => {
                    let a = draw_peer(rng, v, n, variant.self_sampling);
                    let b = draw_peer(rng, v, n, variant.self_sampling);
                    let (oa, ob) = (start[a], start[b]);
                    (oa == ob && oa != own).then(|| {
                        (
                            oa,
                            SampleSet::two(a as NodeId, b as NodeId),
                            SwitchCause::Majority,
                        )
                    })
                }
                MajorityRule::ThreeSampleRandom => {
                    let a = draw_peer(rng, v, n, variant.self_sampling);
                    let b = draw_peer(rng, v, n, variant.self_sampling);
                    let c = draw_peer(rng, v, n, variant.self_sampling);
                    let (oa, ob, oc) = (start[a], start[b], start[c]);
                    let (adopted, cause) = if oa == ob || oa == oc {
                        (oa, SwitchCause::Majority)
                    } else if ob == oc {
                        (ob, SwitchCause::Majority)
                    } else {
                        ([oa, ob, oc][rng.random_range(0..3)], SwitchCause::Tie)
                    };
                    (adopted != own).then(|| {
                        (
                            adopted,
                            SampleSet::three(a as NodeId, b as NodeId, c as NodeId),
                            cause,
                        )
                    })
                }
            };
            if let Some((to, samples, cause)) = outcome {
                switches.push(Switch {
                    node: v as NodeId,
                    from: OpinionId::from_index(own as usize),
                    to: OpinionId::from_index(to as usize),
                    samples,
                    cause,
                });
            }
        }
    }
    for s in &switches {
        population.set_opinion(s.node, s.to);
    }
    population.advance_round();
    RoundMoves { round, switches }
}

/// Agent-level round starting from an aggregate configuration, laid out
/// canonically (see [`Population::from_configuration`]).
pub fn step_agent_from(
    config: &Configuration,
    variant: ProtocolVariant,
    rng: &mut SeededRandomSource,
) -> Result<(Configuration, RoundMoves)> {
    let mut population = Population::from_configuration(config)?;
    let moves = step_agent(&mut population, variant, rng);
    Ok((population.configuration().clone(), moves))
}

/// Distribution-equivalent round on counts alone.
///
/// For each opinion `i` in ascending order, the `c_i` holders are split by a
/// multinomial draw: to each `j != i` with probability `p_j^2`, staying with
/// the remaining mass. Each opinion draws from its own generator stream,
/// keyed by one word taken from `rng`.
pub fn step_aggregate<R: RngCore + ?Sized>(
    config: &mut Configuration,
    variant: ProtocolVariant,
    rng: &mut R,
) -> Result<()> {
    if !variant.has_aggregate_path() {
        return Err(Error::UnsupportedVariant(variant.to_string()));
    }
    let n = config.n() as f64;
    let counts = config.counts().to_vec();
    let q: Vec<f64> = counts.iter().map(|&c| (c as f64 / n).powi(2)).collect();
    let key = rng.next_u64();
    let mut next = counts.clone();
    for (i, &c_i) in counts.iter().enumerate() {
        if c_i == 0 {
            continue;
        }
        let mut stream = trial_stream(key, i as u64);
        let mut remaining = c_i;
        let mut mass = 1.0;
        for (j, &q_j) in q.iter().enumerate() {
            if j == i || q_j == 0.0 {
                continue;
            }
            if remaining == 0 {
                break;
            }
            let prob = (q_j / mass).clamp(0.0, 1.0);
            let moved = Binomial::new(remaining, prob)
                .expect("probability in [0, 1]")
                .sample(&mut stream);
            next[i] -= moved;
            next[j] += moved;
            remaining -= moved;
            mass -= q_j;
        }
    }
    config.set_counts(next);
    config.advance_round();
    Ok(())
}
