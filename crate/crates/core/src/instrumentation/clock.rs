use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::classify::not_super_weak_count;
use crate::dynamics::Configuration;
use crate::error::{Error, Result};

/// `floor(k * (5/6)^(epoch - 1))`, exact.
pub fn kappa(k: usize, epoch: u32) -> u64 {
    assert!(epoch >= 1, "epochs are numbered from 1");
    let e = epoch - 1;
    let num = BigUint::from(k) * BigUint::from(5u32).pow(e);
    let den = BigUint::from(6u32).pow(e);
    u64::try_from(num / den).expect("kappa bounded by k")
}

/// Rounds per phase: `max(1, ceil(delta * kappa))`.
pub fn phase_length(delta: f64, kappa: u64) -> u64 {
    ((delta * kappa as f64 - 1e-9).ceil() as u64).max(1)
}

/// `p_max >= 1.5 / kappa`, in integers.
pub fn is_end_of_time(config: &Configuration, kappa: u64) -> bool {
    2 * u128::from(kappa) * u128::from(config.max_count()) >= 3 * u128::from(config.n())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochSpan {
    pub epoch_index: u32,
    pub kappa: u64,
    pub rounds: u64,
    /// Round within the epoch at which the end of time arrived, if it did.
    pub end_of_time_after: Option<u64>,
}

/// What changed on one clock tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClockEvents {
    pub phase_rolled: bool,
    pub epoch_advanced: bool,
    pub end_of_time_arrived: bool,
}

/// Epoch/phase clock driven by observed configurations.
///
/// An epoch ends as soon as the number of not-super-weak opinions drops to
/// the next epoch's kappa; epochs whose kappa equals the current one are
/// skipped, so kappa strictly decreases across transitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochPhaseState {
    pub k: usize,
    pub epoch_index: u32,
    pub kappa: u64,
    pub phase_index: u64,
    pub round_in_phase: u64,
    pub delta: f64,
    pub end_of_time: bool,
    rounds_in_epoch: u64,
    end_of_time_after: Option<u64>,
    completed: Vec<EpochSpan>,
}

impl EpochPhaseState {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(EpochPhaseState {
            k,
            epoch_index: 1,
            kappa: k as u64,
            phase_index: 0,
            round_in_phase: 0,
            delta,
            end_of_time: false,
            rounds_in_epoch: 0,
            end_of_time_after: None,
            completed: Vec::new(),
        })
    }

    /// Clock synchronized with the starting configuration.
    pub fn start(k: usize, delta: f64, config: &Configuration) -> Result<Self> {
        let mut s = Self::new(k, delta)?;
        s.sync(config);
        Ok(s)
    }

    pub fn phase_length(&self) -> u64 {
        phase_length(self.delta, self.kappa)
    }

    /// Updates epoch and end-of-time status without counting a round.
    pub fn sync(&mut self, config: &Configuration) -> ClockEvents {
        let mut events = ClockEvents::default();
        let nsw = not_super_weak_count(config) as u64;
        loop {
            let next = kappa(self.k, self.epoch_index + 1);
            if next == 0 || nsw > next {
                break;
            }
            if next < self.kappa {
                self.completed.push(self.span());
                self.rounds_in_epoch = 0;
                self.end_of_time_after = None;
                self.kappa = next;
                events.epoch_advanced = true;
            }
            self.epoch_index += 1;
        }
        if events.epoch_advanced {
            self.phase_index = 0;
            self.round_in_phase = 0;
            self.end_of_time = false;
        }
        if !self.end_of_time && is_end_of_time(config, self.kappa) {
            self.end_of_time = true;
            self.end_of_time_after = Some(self.rounds_in_epoch);
            events.end_of_time_arrived = true;
        }
        events
    }

    /// Counts one completed round, then syncs with its resulting
    /// configuration.
    pub fn advance(&mut self, config: &Configuration) -> ClockEvents {
        self.rounds_in_epoch += 1;
        self.round_in_phase += 1;
        let mut phase_rolled = false;
        if self.round_in_phase >= self.phase_length() {
            self.round_in_phase = 0;
            self.phase_index += 1;
            phase_rolled = true;
        }
        let mut events = self.sync(config);
        events.phase_rolled = phase_rolled || events.epoch_advanced;
        events
    }

    fn span(&self) -> EpochSpan {
        EpochSpan {
            epoch_index: self.epoch_index,
            kappa: self.kappa,
            rounds: self.rounds_in_epoch,
            end_of_time_after: self.end_of_time_after,
        }
    }

    pub fn rounds_in_epoch(&self) -> u64 {
        self.rounds_in_epoch
    }

    /// Completed epochs followed by the current one.
    pub fn transcript(&self) -> Vec<EpochSpan> {
        let mut t = self.completed.clone();
        t.push(self.span());
        t
    }
}

/// Convenience for `state.advance(config)` returning the new state.
pub fn advance_clock(mut state: EpochPhaseState, config: &Configuration) -> EpochPhaseState {
    state.advance(config);
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_schedule() {
        assert_eq!(kappa(100, 1), 100);
        assert_eq!(kappa(100, 2), 83);
        assert_eq!(kappa(100, 3), 69);
        assert_eq!(kappa(3, 2), 2);
        assert_eq!(kappa(3, 3), 2);
        assert_eq!(kappa(3, 4), 1);
        assert_eq!(kappa(1, 2), 0);
    }

    #[test]
    fn phase_lengths() {
        assert_eq!(phase_length(0.1, 10), 1);
        assert_eq!(phase_length(0.1, 30), 3);
        assert_eq!(phase_length(0.1, 31), 4);
        assert_eq!(phase_length(0.1, 2), 1);
    }

    #[test]
    fn end_of_time_threshold() {
        // kappa = 10: threshold 0.15
        let at = Configuration::new(vec![160, 840]).unwrap();
        let below = Configuration::new(vec![140, 140, 140, 140, 140, 140, 140, 20]).unwrap();
        assert!(is_end_of_time(&at, 10));
        assert!(!is_end_of_time(&below, 10));
        // p_max = 0.16 with ten opinions
        let c = Configuration::new(vec![160, 100, 100, 100, 100, 100, 100, 100, 100, 40]).unwrap();
        let mut s = EpochPhaseState::new(10, 0.1).unwrap();
        assert!(s.sync(&c).end_of_time_arrived);
        let c = Configuration::new(vec![140, 100, 100, 100, 100, 100, 100, 100, 100, 60]).unwrap();
        let mut s = EpochPhaseState::new(10, 0.1).unwrap();
        assert!(!s.sync(&c).end_of_time_arrived);
        assert!(!s.end_of_time);
    }

    #[test]
    fn epochs_advance_and_kappa_decreases() {
        let k = 6;
        let mut s =
            EpochPhaseState::start(k, 0.1, &Configuration::uniform(600, k).unwrap()).unwrap();
        assert_eq!((s.epoch_index, s.kappa), (1, 6));
        // five opinions left above 1/(10k) = 10 nodes
        let c = Configuration::new(vec![120, 120, 120, 120, 120, 0]).unwrap();
        let ev = s.advance(&c);
        assert!(ev.epoch_advanced && ev.phase_rolled);
        assert_eq!((s.epoch_index, s.kappa), (2, 5));
        // consensus skips straight to kappa = 1
        let c = Configuration::consensus(600, k, crate::dynamics::OpinionId::new(1)).unwrap();
        s.advance(&c);
        assert_eq!(s.kappa, 1);
        let t = s.transcript();
        assert!(t
            .windows(2)
            .all(|w| w[1].kappa < w[0].kappa && w[1].epoch_index > w[0].epoch_index));
        assert_eq!(t[0].rounds, 1);
    }

    #[test]
    fn phases_roll() {
        let k = 30;
        let c = Configuration::uniform(30_000, k).unwrap();
        let mut s = EpochPhaseState::start(k, 0.1, &c).unwrap();
        assert_eq!(s.phase_length(), 3);
        let rolled: Vec<bool> = (0..6).map(|_| s.advance(&c).phase_rolled).collect();
        assert_eq!(rolled, vec![false, false, true, false, false, true]);
        assert_eq!(s.phase_index, 2);
    }

    #[test]
    fn all_invalid_does_not_spin() {
        let c = Configuration::with_invalid(vec![0, 0], 10).unwrap();
        let s = EpochPhaseState::start(2, 0.1, &c).unwrap();
        assert_eq!(s.kappa, 1);
    }
}
