//! F-bounded adversary: rewrites the opinions of at most `F` nodes per
//! round, acting after the protocol step.
//!
//! Strategies are adaptive in state only. They read the current
//! configuration, never the engine's future random choices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Configuration, OpinionId, Population, RoundMoves};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    None,
    /// Plurality holders are moved to the grouped non-valid opinion.
    InvalidInjector,
    /// Largest valid opinion donates to the second largest, never past a tie.
    Equalizer,
    /// Plurality holders are moved to the smallest opinion that is not
    /// super-weak.
    AntiPlurality,
    /// Uniformly chosen nodes get uniformly chosen valid opinions.
    RandomScramble,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::None,
        Strategy::InvalidInjector,
        Strategy::Equalizer,
        Strategy::AntiPlurality,
        Strategy::RandomScramble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::InvalidInjector => "invalid",
            Strategy::Equalizer => "equalizer",
            Strategy::AntiPlurality => "anti-plurality",
            Strategy::RandomScramble => "scramble",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown adversary strategy '{s}'")))
    }
}

/// `floor(epsilon * sqrt(n) / k^1.5)`.
pub fn budget(n: u64, k: usize, epsilon: f64) -> u64 {
    let f = epsilon * (n as f64).sqrt() / (k as f64).powf(1.5);
    if f.is_finite() && f > 0.0 {
        f.floor() as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryPolicy {
    pub epsilon: f64,
    pub budget_override: Option<u64>,
    pub strategy: Strategy,
    f_cached: u64,
}

impl AdversaryPolicy {
    pub fn new(
        strategy: Strategy,
        epsilon: f64,
        budget_override: Option<u64>,
        n: u64,
        k: usize,
    ) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let f_cached = budget_override.unwrap_or_else(|| budget(n, k, epsilon));
        Ok(AdversaryPolicy {
            epsilon,
            budget_override,
            strategy,
            f_cached,
        })
    }

    /// The inert adversary.
    pub fn none() -> Self {
        AdversaryPolicy {
            epsilon: 0.1,
            budget_override: None,
            strategy: Strategy::None,
            f_cached: 0,
        }
    }

    /// Nodes the adversary may rewrite per round.
    pub fn budget(&self) -> u64 {
        self.f_cached
    }

    pub fn is_active(&self) -> bool {
        self.strategy != Strategy::None && self.f_cached > 0
    }
}

impl Default for AdversaryPolicy {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionMove {
    pub from: OpinionId,
    pub to: OpinionId,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionRecord {
    pub round: u64,
    pub moved: Vec<CorruptionMove>,
}

impl CorruptionRecord {
    pub fn total(&self) -> u64 {
        self.moved.iter().map(|m| m.count).sum()
    }
}

fn ranked_valid(config: &Configuration) -> Vec<(OpinionId, u64)> {
    let mut ranked: Vec<(OpinionId, u64)> = config
        .valid_counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| (OpinionId::from_index(i), c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Count-level corruption plan for the deterministic strategies.
fn plan_targeted(config: &Configuration, policy: &AdversaryPolicy) -> Option<CorruptionMove> {
    let b = policy.budget();
    let k = config.k();
    let plurality = config.plurality();
    let c_plur = config.count(plurality);
    let mv = match policy.strategy {
        Strategy::InvalidInjector => CorruptionMove {
            from: plurality,
            to: OpinionId::invalid(k),
            count: b.min(c_plur),
        },
        Strategy::Equalizer => {
            let ranked = ranked_valid(config);
            let (&(top, c_top), &(second, c_second)) = (ranked.first()?, ranked.get(1)?);
            CorruptionMove {
                from: top,
                to: second,
                count: b.min((c_top - c_second) / 2),
            }
        }
        Strategy::AntiPlurality => {
            let n = config.n();
            let (target, _) = config
                .valid_counts()
                .iter()
                .enumerate()
                .map(|(i, &c)| (OpinionId::from_index(i), c))
                .filter(|&(id, c)| id != plurality && 10 * k as u64 * c > n)
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))?;
            CorruptionMove {
                from: plurality,
                to: target,
                count: b.min(c_plur),
            }
        }
        Strategy::None | Strategy::RandomScramble => return None,
    };
    (mv.count > 0).then_some(mv)
}

fn merge(pairs: impl IntoIterator<Item = (OpinionId, OpinionId)>) -> Vec<CorruptionMove> {
    let mut agg: BTreeMap<(OpinionId, OpinionId), u64> = BTreeMap::new();
    for (from, to) in pairs {
        if from != to {
            *agg.entry((from, to)).or_default() += 1;
        }
    }
    agg.into_iter()
        .map(|((from, to), count)| CorruptionMove { from, to, count })
        .collect()
}

/// Applies one round of corruption to a count configuration.
pub fn apply<R: Rng + ?Sized>(
    config: &mut Configuration,
    policy: &AdversaryPolicy,
    rng: &mut R,
) -> CorruptionRecord {
    let round = config.round();
    if !policy.is_active() {
        return CorruptionRecord {
            round,
            moved: Vec::new(),
        };
    }
    let moved = if policy.strategy == Strategy::RandomScramble {
        // sample distinct nodes without replacement through the count vector
        let mut remaining = config.counts().to_vec();
        let mut left = config.n();
        let picks = policy.budget().min(left);
        let mut pairs = Vec::with_capacity(picks as usize);
        for _ in 0..picks {
            let mut r = rng.random_range(0..left);
            let mut src = 0;
            while r >= remaining[src] {
                r -= remaining[src];
                src += 1;
            }
            remaining[src] -= 1;
            left -= 1;
            let to = OpinionId::from_index(rng.random_range(0..config.k()));
            pairs.push((OpinionId::from_index(src), to));
        }
        merge(pairs)
    } else {
        plan_targeted(config, policy).into_iter().collect()
    };
    for m in &moved {
        config.transfer(m.from, m.to, m.count);
    }
    CorruptionRecord { round, moved }
}

/// Applies one round of corruption to an agent population, choosing the
/// rewritten nodes uniformly among eligible holders and appending them to
/// `moves` as adversarial switches.
pub fn apply_to_population<R: Rng + ?Sized>(
    population: &mut Population,
    policy: &AdversaryPolicy,
    rng: &mut R,
    moves: &mut RoundMoves,
) -> CorruptionRecord {
    let round = population.configuration().round();
    if !policy.is_active() {
        return CorruptionRecord {
            round,
            moved: Vec::new(),
        };
    }
    let k = population.configuration().k();
    if policy.strategy == Strategy::RandomScramble {
        let n = population.len();
        let picks = (policy.budget() as usize).min(n);
        let mut nodes: Vec<usize> = index::sample(rng, n, picks).into_vec();
        nodes.sort_unstable();
        let mut pairs = Vec::with_capacity(picks);
        for v in nodes {
            let from = population.opinion_of(v as u32);
            let to = OpinionId::from_index(rng.random_range(0..k));
            if from != to {
                population.set_opinion(v as u32, to);
                moves.push_adversarial(v as u32, from, to);
            }
            pairs.push((from, to));
        }
        return CorruptionRecord {
            round,
            moved: merge(pairs),
        };
    }
    let planned: Vec<CorruptionMove> = plan_targeted(population.configuration(), policy)
        .into_iter()
        .collect();
    let mut moved = Vec::with_capacity(planned.len());
    for m in planned {
        let nodes = population.relabel_random(m.from, m.to, m.count, rng);
        for &v in &nodes {
            moves.push_adversarial(v, m.from, m.to);
        }
        moved.push(CorruptionMove {
            count: nodes.len() as u64,
            ..m
        });
    }
    CorruptionRecord { round, moved }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, prop_assume, proptest};

    fn policy(strategy: Strategy, b: u64, n: u64, k: usize) -> AdversaryPolicy {
        AdversaryPolicy::new(strategy, 0.1, Some(b), n, k).unwrap()
    }

    #[test]
    fn budget_examples() {
        assert_eq!(budget(10_000, 4, 0.1), 1);
        assert_eq!(budget(10_000, 4, 1e-9), 0);
        assert_eq!(budget(1_000_000, 1, 1.0), 1000);
        assert_eq!(budget(100_000, 5, 0.1), 2);
    }

    #[test]
    fn policy_caches_budget() {
        let p = AdversaryPolicy::new(Strategy::Equalizer, 0.1, None, 10_000, 4).unwrap();
        assert_eq!(p.budget(), 1);
        let p = AdversaryPolicy::new(Strategy::Equalizer, 0.1, Some(7), 10_000, 4).unwrap();
        assert_eq!(p.budget(), 7);
        assert!(AdversaryPolicy::new(Strategy::Equalizer, 0.0, None, 10, 1).is_err());
        assert!(AdversaryPolicy::new(Strategy::Equalizer, f64::NAN, None, 10, 1).is_err());
    }

    #[test]
    fn none_and_zero_budget_are_inert() {
        let c = Configuration::new(vec![600, 400]).unwrap();
        for pol in [
            AdversaryPolicy::none(),
            policy(Strategy::Equalizer, 0, 1000, 2),
        ] {
            let mut d = c.clone();
            let rec = apply(&mut d, &pol, &mut seeded(0));
            assert_eq!(d, c);
            assert!(rec.moved.is_empty());
        }
    }

    #[test]
    fn equalizer_example() {
        let mut c = Configuration::new(vec![600, 400]).unwrap();
        let rec = apply(
            &mut c,
            &policy(Strategy::Equalizer, 10, 1000, 2),
            &mut seeded(0),
        );
        assert_eq!(c.valid_counts(), &[590, 410]);
        assert_eq!(rec.total(), 10);
    }

    #[test]
    fn equalizer_stops_at_tie() {
        let mut c = Configuration::new(vec![505, 495]).unwrap();
        apply(
            &mut c,
            &policy(Strategy::Equalizer, 10, 1000, 2),
            &mut seeded(0),
        );
        assert_eq!(c.valid_counts(), &[500, 500]);
        apply(
            &mut c,
            &policy(Strategy::Equalizer, 10, 1000, 2),
            &mut seeded(0),
        );
        assert_eq!(c.valid_counts(), &[500, 500]);
    }

    #[test]
    fn injector_targets_grouped_invalid() {
        let mut c = Configuration::new(vec![100, 300, 600]).unwrap();
        apply(
            &mut c,
            &policy(Strategy::InvalidInjector, 5, 1000, 3),
            &mut seeded(0),
        );
        assert_eq!(c.counts(), &[100, 300, 595, 5]);
    }

    #[test]
    fn anti_plurality_picks_smallest_not_super_weak() {
        // k = 4, super-weak threshold n / 40 = 25
        let mut c = Configuration::new(vec![500, 20, 200, 280]).unwrap();
        apply(
            &mut c,
            &policy(Strategy::AntiPlurality, 7, 1000, 4),
            &mut seeded(0),
        );
        assert_eq!(c.valid_counts(), &[493, 20, 207, 280]);
    }

    #[test]
    fn strategies_degrade_when_source_is_small() {
        let mut c = Configuration::new(vec![3, 0, 0]).unwrap();
        let rec = apply(
            &mut c,
            &policy(Strategy::InvalidInjector, 10, 3, 3),
            &mut seeded(0),
        );
        assert_eq!(rec.total(), 3);
        assert_eq!(c.invalid_count(), 3);
    }

    #[test]
    fn parse_names() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("bogus".parse::<Strategy>().is_err());
    }

    proptest! {
        #[test]
        fn budget_law_and_conservation(
            counts in prop::collection::vec(0u64..400, 1..6),
            b in 0u64..50,
            strat in 0usize..5,
            seed in any::<u64>(),
        ) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let c = Configuration::new(counts).unwrap();
            let pol = policy(Strategy::ALL[strat], b, c.n(), c.k());
            let mut d = c.clone();
            let rec = apply(&mut d, &pol, &mut seeded(seed));
            prop_assert!(rec.total() <= b);
            prop_assert_eq!(d.counts().iter().sum::<u64>(), c.n());
            if pol.strategy != Strategy::InvalidInjector {
                prop_assert_eq!(d.invalid_count(), 0);
            }

            let mut pop = Population::from_configuration(&c).unwrap();
            let mut moves = RoundMoves::default();
            let rec = apply_to_population(&mut pop, &pol, &mut seeded(seed), &mut moves);
            prop_assert!(rec.total() <= b);
            prop_assert!(moves.switches.len() as u64 <= b);
            prop_assert_eq!(pop.configuration().counts().iter().sum::<u64>(), c.n());
            for s in &moves.switches {
                prop_assert_eq!(pop.opinion_of(s.node), s.to);
            }
        }
    }
}
