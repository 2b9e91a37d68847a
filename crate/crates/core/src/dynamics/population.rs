use rand::seq::index;
use rand::Rng;

use super::config::{Configuration, OpinionId};
use crate::error::{Error, Result};

pub type NodeId = u32;

/// Agent-level state: one opinion per node, with the aggregate
/// [`Configuration`] kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    opinions: Vec<u32>,
    config: Configuration,
}

impl Population {
    /// Materializes a configuration with nodes laid out by ascending
    /// opinion: node ids `0..c_1` hold opinion 1, and so on.
    pub fn from_configuration(config: &Configuration) -> Result<Self> {
        if config.n() > u64::from(u32::MAX) {
            return Err(Error::InvalidConfiguration(format!(
                "agent mode supports at most 2^32 - 1 nodes, got {}",
                config.n()
            )));
        }
        let mut opinions = Vec::with_capacity(config.n() as usize);
        for (i, &c) in config.counts().iter().enumerate() {
            opinions.extend(std::iter::repeat_n(i as u32, c as usize));
        }
        Ok(Population {
            opinions,
            config: config.clone(),
        })
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn opinion_of(&self, node: NodeId) -> OpinionId {
        OpinionId::from_index(self.opinions[node as usize] as usize)
    }

    pub(crate) fn raw_opinions(&self) -> &[u32] {
        &self.opinions
    }

    pub fn nodes_holding(&self, opinion: OpinionId) -> impl Iterator<Item = NodeId> + '_ {
        let target = opinion.index() as u32;
        self.opinions
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == target)
            .map(|(v, _)| v as NodeId)
    }

    pub(crate) fn set_opinion(&mut self, node: NodeId, opinion: OpinionId) {
        let old = self.opinions[node as usize] as usize;
        let new = opinion.index();
        if old != new {
            self.opinions[node as usize] = new as u32;
            self.config.increment(old, new);
        }
    }

    /// Moves `count` uniformly chosen holders of `from` to `to` (fewer if
    /// `from` has fewer holders) and returns the moved node ids.
    pub fn relabel_random<R: Rng + ?Sized>(
        &mut self,
        from: OpinionId,
        to: OpinionId,
        count: u64,
        rng: &mut R,
    ) -> Vec<NodeId> {
        if count == 0 || from == to {
            return Vec::new();
        }
        let holders: Vec<NodeId> = self.nodes_holding(from).collect();
        let take = (count as usize).min(holders.len());
        let mut chosen: Vec<NodeId> = index::sample(rng, holders.len(), take)
            .into_iter()
            .map(|i| holders[i])
            .collect();
        chosen.sort_unstable();
        for &v in &chosen {
            self.set_opinion(v, to);
        }
        chosen
    }

    pub fn advance_round(&mut self) {
        self.config.advance_round();
    }
}
