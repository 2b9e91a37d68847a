use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Engine, ExperimentSpec};
use super::stats;
use crate::adversary::{self, AdversaryPolicy, CorruptionRecord};
use crate::dynamics::{
    step_agent, step_aggregate, Configuration, OpinionId, Population, ProtocolVariant, RoundMoves,
};
use crate::error::Result;
use crate::instrumentation::{ClockEvents, EpochPhaseState, EpochSpan};
use crate::rng::{trial_stream, SeededRandomSource};

enum State {
    Counts(Configuration),
    Agents(Population),
}

/// What one call to [`Simulation::step`] did.
#[derive(Debug, Clone, Default)]
pub struct RoundOutcome {
    /// Switch record, agent engine only.
    pub moves: Option<RoundMoves>,
    pub corruption: CorruptionRecord,
    pub clock: ClockEvents,
}

/// One trajectory: protocol step, then corruption, then the epoch clock.
pub struct Simulation {
    state: State,
    variant: ProtocolVariant,
    adversary: AdversaryPolicy,
    rng: SeededRandomSource,
    clock: EpochPhaseState,
}

impl Simulation {
    /// The trajectory of `spec`'s trial `trial_index`.
    pub fn new(spec: &ExperimentSpec, trial_index: u64) -> Result<Self> {
        spec.validate()?;
        Self::from_configuration(
            spec.initial_configuration()?,
            spec.variant,
            spec.adversary,
            spec.engine,
            spec.delta,
            trial_stream(spec.seed, trial_index),
        )
    }

    pub fn from_configuration(
        config: Configuration,
        variant: ProtocolVariant,
        adversary: AdversaryPolicy,
        engine: Engine,
        delta: f64,
        rng: SeededRandomSource,
    ) -> Result<Self> {
        let clock = EpochPhaseState::start(config.k(), delta, &config)?;
        let state = match engine.resolve(variant)? {
            Engine::Agent => State::Agents(Population::from_configuration(&config)?),
            _ => State::Counts(config),
        };
        Ok(Simulation {
            state,
            variant,
            adversary,
            rng,
            clock,
        })
    }

    pub fn configuration(&self) -> &Configuration {
        match &self.state {
            State::Counts(c) => c,
            State::Agents(p) => p.configuration(),
        }
    }

    pub fn population(&self) -> Option<&Population> {
        match &self.state {
            State::Agents(p) => Some(p),
            State::Counts(_) => None,
        }
    }

    pub fn clock(&self) -> &EpochPhaseState {
        &self.clock
    }

    pub fn rng_mut(&mut self) -> &mut SeededRandomSource {
        &mut self.rng
    }

    pub fn round(&self) -> u64 {
        self.configuration().round()
    }

    pub fn step(&mut self) -> Result<RoundOutcome> {
        let (moves, corruption) = match &mut self.state {
            State::Counts(c) => {
                step_aggregate(c, self.variant, &mut self.rng)?;
                (None, adversary::apply(c, &self.adversary, &mut self.rng))
            }
            State::Agents(p) => {
                let mut moves = step_agent(p, self.variant, &mut self.rng);
                let rec =
                    adversary::apply_to_population(p, &self.adversary, &mut self.rng, &mut moves);
                (Some(moves), rec)
            }
        };
        let clock = match &self.state {
            State::Counts(c) => self.clock.advance(c),
            State::Agents(p) => self.clock.advance(p.configuration()),
        };
        Ok(RoundOutcome {
            moves,
            corruption,
            clock,
        })
    }
}

/// The opinion held by at least `n - slack` nodes, if any.
pub fn near_unanimous(config: &Configuration, slack: u64) -> Option<OpinionId> {
    let need = config.n().saturating_sub(slack).max(1);
    let (idx, &c) = config
        .counts()
        .iter()
        .enumerate()
        .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))?;
    (c >= need).then(|| OpinionId::from_index(idx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundsToConsensus {
    Converged(u64),
    DidNotConverge,
}

impl RoundsToConsensus {
    pub fn rounds(self) -> Option<u64> {
        match self {
            RoundsToConsensus::Converged(r) => Some(r),
            RoundsToConsensus::DidNotConverge => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub rounds_to_consensus: RoundsToConsensus,
    /// The near-unanimous opinion; may be the invalid one.
    pub winner: Option<OpinionId>,
    pub winner_valid: bool,
    pub epoch_transcript: Vec<EpochSpan>,
    pub peak_invalid_fraction: f64,
}

impl TrialResult {
    pub fn converged(&self) -> bool {
        self.rounds_to_consensus.rounds().is_some()
    }
}

/// Runs trial `trial_index` of `spec` to near-unanimity or `max_rounds`.
pub fn run_trial(spec: &ExperimentSpec, trial_index: u64) -> Result<TrialResult> {
    let mut sim = Simulation::new(spec, trial_index)?;
    let slack = spec.stop.slack.unwrap_or_else(|| spec.adversary.budget());
    let n = spec.n as f64;
    let mut peak = sim.configuration().invalid_count() as f64 / n;
    let winner = loop {
        if let Some(w) = near_unanimous(sim.configuration(), slack) {
            break Some(w);
        }
        if sim.round() >= spec.max_rounds {
            break None;
        }
        sim.step()?;
        peak = peak.max(sim.configuration().invalid_count() as f64 / n);
    };
    Ok(TrialResult {
        trial_index,
        rounds_to_consensus: match winner {
            Some(_) => RoundsToConsensus::Converged(sim.round()),
            None => RoundsToConsensus::DidNotConverge,
        },
        winner,
        winner_valid: winner.is_some_and(|w| w.is_valid(spec.k)),
        epoch_transcript: sim.clock().transcript(),
        peak_invalid_fraction: peak,
    })
}

/// All trials of `spec` on the current rayon pool, in trial order.
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<TrialResult>> {
    spec.validate()?;
    (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundsSummary {
    pub trials: usize,
    pub converged: usize,
    pub median: f64,
    pub mean: f64,
    pub stddev: f64,
}

/// Round statistics with non-converged trials censored at `max_rounds`.
pub fn summarize(results: &[TrialResult], max_rounds: u64) -> RoundsSummary {
    let rounds: Vec<f64> = results
        .iter()
        .map(|r| r.rounds_to_consensus.rounds().unwrap_or(max_rounds) as f64)
        .collect();
    RoundsSummary {
        trials: results.len(),
        converged: results.iter().filter(|r| r.converged()).count(),
        median: stats::median(&rounds),
        mean: stats::mean(&rounds),
        stddev: stats::stddev(&rounds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Strategy;
    use crate::lab::InitialCondition;

    #[test]
    fn trivial_consensus() {
        let r = run_trial(&ExperimentSpec::new(1000, 1), 0).unwrap();
        assert_eq!(r.rounds_to_consensus, RoundsToConsensus::Converged(0));
        assert_eq!(r.winner, Some(OpinionId::new(1)));
        assert!(r.winner_valid);

        let spec = ExperimentSpec::new(500, 5)
            .with_initial(InitialCondition::Custom(vec![0, 500, 0, 0, 0]));
        let r = run_trial(&spec, 0).unwrap();
        assert_eq!(r.rounds_to_consensus, RoundsToConsensus::Converged(0));
        assert_eq!(r.winner, Some(OpinionId::new(2)));
    }

    #[test]
    fn regression_pin() {
        let spec = ExperimentSpec::new(10_000, 2).with_seed(2024);
        let r = run_trial(&spec, 0).unwrap();
        assert_eq!(
            r.rounds_to_consensus,
            RoundsToConsensus::Converged(PINNED_ROUNDS)
        );
    }
    // captured once from this implementation
    const PINNED_ROUNDS: u64 = 17;

    #[test]
    fn reproducible_and_order_independent() {
        let spec = ExperimentSpec::new(2_000, 3).with_seed(9).with_trials(8);
        let a = run_trials(&spec).unwrap();
        let b: Vec<TrialResult> = (0..8)
            .rev()
            .map(|i| run_trial(&spec, i).unwrap())
            .rev()
            .collect();
        assert_eq!(a, b);
        assert!(a
            .windows(2)
            .any(|w| w[0].rounds_to_consensus != w[1].rounds_to_consensus));
    }

    #[test]
    fn agent_engine_converges() {
        for variant in [
            ProtocolVariant::three_sample_random(),
            ProtocolVariant::two_sample_plus_own().excluding_self(),
        ] {
            let spec = ExperimentSpec::new(500, 3)
                .with_variant(variant)
                .with_seed(3);
            let r = run_trial(&spec, 0).unwrap();
            assert!(r.converged() && r.winner_valid, "{variant}");
        }
    }

    #[test]
    fn nonconvergence_is_a_value() {
        let spec = ExperimentSpec::new(10_000, 10).with_max_rounds(2);
        let r = run_trial(&spec, 0).unwrap();
        assert_eq!(r.rounds_to_consensus, RoundsToConsensus::DidNotConverge);
        assert_eq!(r.winner, None);
        assert!(!r.winner_valid);
        let s = summarize(&[r], 2);
        assert_eq!((s.median, s.converged), (2.0, 0));
    }

    #[test]
    fn injector_stops_within_budget() {
        let spec = ExperimentSpec::new(20_000, 2)
            .with_adversary(Strategy::InvalidInjector, 1.0, None)
            .unwrap()
            .with_seed(5);
        let r = run_trial(&spec, 0).unwrap();
        assert!(r.converged() && r.winner_valid);
        assert!(r.peak_invalid_fraction > 0.0);
        assert!(r.peak_invalid_fraction <= 0.05);
    }

    #[test]
    fn near_unanimity() {
        let c = Configuration::with_invalid(vec![98, 0], 2).unwrap();
        assert_eq!(near_unanimous(&c, 2), Some(OpinionId::new(1)));
        assert_eq!(near_unanimous(&c, 1), None);
        let inv = Configuration::with_invalid(vec![1, 0], 99).unwrap();
        assert_eq!(near_unanimous(&inv, 1), Some(OpinionId::invalid(2)));
    }

    #[test]
    fn epochs_are_recorded() {
        let r = run_trial(&ExperimentSpec::new(20_000, 8).with_seed(1), 0).unwrap();
        let t = &r.epoch_transcript;
        assert!(t.len() > 1);
        assert!(t
            .windows(2)
            .all(|w| w[0].kappa > w[1].kappa && w[0].epoch_index < w[1].epoch_index));
    }
}
