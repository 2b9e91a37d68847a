//! Clear / light / extra-light decomposition of an opinion's support over
//! one phase.
//!
//! Per tracked opinion the ledger keeps
//!
//! * a *clear* mass that follows the expected-value recurrence
//!   `q <- q (1 + q - sigma2)` and never looks at the realized moves;
//! * a set of *extra-light* nodes: recruits whose decisive samples included
//!   a light-labeled or extra-light node, and their own recruits in turn.
//!   Membership is permanent for the phase;
//! * a signed *light* charge, the residual that makes
//!   `clear + light + extra = count` hold exactly in node units.
//!
//! Positive light charge is carried by concrete labeled nodes (see
//! [`ColoringLedger::assign_light_labels`]); negative charge stays a scalar.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::classify::classify;
use super::mass::NodeMass;
use super::OpinionClass;
use crate::dynamics::{Configuration, NodeId, OpinionId, Population, RoundMoves, SwitchCause};
use crate::error::{Error, Result};

/// Which `sigma2` drives the clear recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sigma2Source {
    /// `sum p_j^2` of the start-of-round configuration.
    #[default]
    FullConfiguration,
    /// As above, but each tracked opinion contributes its clear fraction
    /// instead of its actual one.
    ClearMasses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedColoring {
    pub opinion: OpinionId,
    clear: NodeMass,
    light: NodeMass,
    /// Permanent members, flagged with whether they currently hold the
    /// opinion.
    extra_light: BTreeMap<NodeId, bool>,
    extra_active: u64,
    light_labels: BTreeSet<NodeId>,
    recent_in: Vec<NodeId>,
    history: Vec<NodeMass>,
    count: u64,
}

impl TrackedColoring {
    fn begin(opinion: OpinionId, count: u64) -> Self {
        TrackedColoring {
            opinion,
            clear: NodeMass::from_nodes(count),
            light: NodeMass::ZERO,
            extra_light: BTreeMap::new(),
            extra_active: 0,
            light_labels: BTreeSet::new(),
            recent_in: Vec::new(),
            history: Vec::new(),
            count,
        }
    }

    pub fn clear(&self) -> NodeMass {
        self.clear
    }

    pub fn light(&self) -> NodeMass {
        self.light
    }

    /// Extra-light members currently holding the opinion.
    pub fn extra_light_count(&self) -> u64 {
        self.extra_active
    }

    pub fn extra_light_members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.extra_light.keys().copied()
    }

    pub fn is_extra_light(&self, node: NodeId) -> bool {
        self.extra_light.contains_key(&node)
    }

    pub fn light_labels(&self) -> &BTreeSet<NodeId> {
        &self.light_labels
    }

    /// Light charge after each observed round of the phase.
    pub fn light_history(&self) -> &[NodeMass] {
        &self.history
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Checks `clear + light + extra = count` in raw fixed-point units.
    pub fn check_identity(&self) -> Result<()> {
        let lhs = self.clear.raw() as i128
            + self.light.raw() as i128
            + NodeMass::from_nodes(self.extra_active).raw() as i128;
        let rhs = NodeMass::from_nodes(self.count).raw() as i128;
        if lhs == rhs {
            Ok(())
        } else {
            Err(Error::AccountingViolation {
                opinion: self.opinion.get(),
                detail: format!(
                    "clear {} + light {} + extra {} != {}",
                    self.clear, self.light, self.extra_active, self.count
                ),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringLedger {
    n: u64,
    sigma2_source: Sigma2Source,
    tracked: Vec<TrackedColoring>,
    rounds_observed: u64,
}

impl ColoringLedger {
    /// Starts a phase: clear mass equals the current support, no light
    /// charge, no extra-light nodes. Every tracked opinion must be valid and
    /// strong.
    pub fn begin_phase(
        config: &Configuration,
        tracked: &[OpinionId],
        sigma2_source: Sigma2Source,
    ) -> Result<Self> {
        let classes = classify(config);
        let mut seen = BTreeSet::new();
        for &id in tracked {
            let strong = id.is_valid(config.k()) && classes[id.index()] == OpinionClass::Strong;
            if !strong {
                return Err(Error::NotStrong { opinion: id.get() });
            }
            if !seen.insert(id) {
                return Err(Error::Precondition(format!("opinion {id} tracked twice")));
            }
        }
        Ok(ColoringLedger {
            n: config.n(),
            sigma2_source,
            tracked: tracked
                .iter()
                .map(|&id| TrackedColoring::begin(id, config.count(id)))
                .collect(),
            rounds_observed: 0,
        })
    }

    /// Resets every tracked opinion for a new phase, strong or not.
    pub fn restart(&mut self, config: &Configuration) {
        for t in &mut self.tracked {
            *t = TrackedColoring::begin(t.opinion, config.count(t.opinion));
        }
        self.rounds_observed = 0;
    }

    pub fn tracked(&self) -> &[TrackedColoring] {
        &self.tracked
    }

    pub fn get(&self, opinion: OpinionId) -> Option<&TrackedColoring> {
        self.tracked.iter().find(|t| t.opinion == opinion)
    }

    pub fn rounds_observed(&self) -> u64 {
        self.rounds_observed
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn sigma2_for(&self, start: &Configuration) -> f64 {
        match self.sigma2_source {
            Sigma2Source::FullConfiguration => start.sigma2(),
            Sigma2Source::ClearMasses => {
                let n = self.n as f64;
                start
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        let id = OpinionId::from_index(i);
                        let mass = self.get(id).map_or(c as f64, |t| t.clear.nodes());
                        (mass / n).powi(2)
                    })
                    .sum()
            }
        }
    }

    /// Folds one round into the ledger.
    ///
    /// `start` and `end` are the configurations before the protocol step and
    /// after the adversary; `moves` must come from an agent-mode step (plus
    /// any adversarial rewrites) of that same round.
    pub fn observe_round(
        &mut self,
        start: &Configuration,
        moves: &RoundMoves,
        end: &Configuration,
    ) -> Result<()> {
        if moves
            .switches
            .iter()
            .any(|s| s.cause != SwitchCause::Adversary && s.samples.is_empty())
        {
            return Err(Error::MissingSampleDetail);
        }
        let sigma2 = self.sigma2_for(start);
        let n = self.n as f64;
        for t in &mut self.tracked {
            let i = t.opinion;
            // recruits are judged against start-of-round colors
            let mut joined_extra = Vec::new();
            let mut recent = Vec::new();
            for s in moves.switches.iter().filter(|s| s.to == i) {
                let tainted = s.cause == SwitchCause::Majority
                    && s.samples.as_slice().iter().any(|u| {
                        t.light_labels.contains(u) || t.extra_light.get(u).copied().unwrap_or(false)
                    });
                if tainted || t.extra_light.contains_key(&s.node) {
                    joined_extra.push(s.node);
                } else {
                    recent.push(s.node);
                }
            }
            for s in moves.switches.iter().filter(|s| s.from == i) {
                t.light_labels.remove(&s.node);
                if let Some(active) = t.extra_light.get_mut(&s.node) {
                    if *active {
                        *active = false;
                        t.extra_active -= 1;
                    }
                }
            }
            for v in joined_extra {
                let active = t.extra_light.entry(v).or_insert(false);
                if !*active {
                    *active = true;
                    t.extra_active += 1;
                }
            }
            t.recent_in = recent;

            let q = t.clear.nodes();
            t.clear = NodeMass::from_f64(q * (1.0 + q / n - sigma2)).max(NodeMass::ZERO);
            t.count = end.count(i);
            t.light =
                NodeMass::from_nodes(t.count) - t.clear - NodeMass::from_nodes(t.extra_active);
            t.history.push(t.light);
            t.check_identity()?;
        }
        self.rounds_observed += 1;
        Ok(())
    }

    /// Places the positive light charge of every tracked opinion on
    /// `floor(light)` concrete holders: the latest non-extra-light recruits
    /// first, then uniformly random holders. Negative charge gets no labels.
    /// Returns the full node-to-opinion label map.
    pub fn assign_light_labels<R: Rng + ?Sized>(
        &mut self,
        population: &Population,
        rng: &mut R,
    ) -> BTreeMap<NodeId, OpinionId> {
        let mut labels = BTreeMap::new();
        for t in &mut self.tracked {
            t.light_labels.clear();
            let target = t.light.floor_nodes().max(0) as usize;
            if target == 0 {
                continue;
            }
            let eligible = |v: NodeId| {
                population.opinion_of(v) == t.opinion
                    && !t.extra_light.get(&v).copied().unwrap_or(false)
            };
            let recent: Vec<NodeId> = t
                .recent_in
                .iter()
                .copied()
                .filter(|&v| eligible(v))
                .collect();
            if recent.len() >= target {
                for i in index::sample(rng, recent.len(), target) {
                    t.light_labels.insert(recent[i]);
                }
            } else {
                t.light_labels.extend(recent.iter().copied());
                let rest: Vec<NodeId> = population
                    .nodes_holding(t.opinion)
                    .filter(|&v| eligible(v) && !t.light_labels.contains(&v))
                    .collect();
                let need = (target - recent.len()).min(rest.len());
                for i in index::sample(rng, rest.len(), need) {
                    t.light_labels.insert(rest[i]);
                }
            }
            labels.extend(t.light_labels.iter().map(|&v| (v, t.opinion)));
        }
        labels
    }

    /// `max_r |light_r|` in nodes over the rounds observed so far.
    pub fn max_light_excursion(&self, opinion: OpinionId) -> Option<f64> {
        self.get(opinion).map(|t| max_excursion(&t.history))
    }
}

/// Largest absolute value of a light-charge history, in nodes.
pub fn max_excursion(history: &[NodeMass]) -> f64 {
    history
        .iter()
        .map(|m| m.abs())
        .max()
        .unwrap_or(NodeMass::ZERO)
        .nodes()
}
