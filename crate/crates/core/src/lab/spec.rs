use serde::{Deserialize, Serialize};

use crate::adversary::{AdversaryPolicy, Strategy};
use crate::dynamics::{Configuration, ProtocolVariant, MAX_NODES};
use crate::error::{Error, Result};

/// Starting configuration of every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `n / k` each, remainder to the lowest ids.
    Uniform,
    /// Explicit valid counts, summing to `n`.
    Custom(Vec<u64>),
    /// Opinion 1 leads every other opinion by the relative gap `g`; the
    /// rest are tied.
    OnePlurality { gap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Counts-only stepping when the variant allows it.
    #[default]
    Auto,
    Agent,
    Aggregate,
}

impl Engine {
    /// The concrete engine used for `variant`.
    pub fn resolve(self, variant: ProtocolVariant) -> Result<Engine> {
        match self {
            Engine::Auto if variant.has_aggregate_path() => Ok(Engine::Aggregate),
            Engine::Auto => Ok(Engine::Agent),
            Engine::Aggregate if !variant.has_aggregate_path() => {
                Err(Error::UnsupportedVariant(variant.to_string()))
            }
            e => Ok(e),
        }
    }
}

/// A trial stops once some opinion is held by at least `n - slack` nodes.
/// Without an explicit slack, the adversary's per-round budget is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StopRule {
    pub slack: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n: u64,
    pub k: usize,
    pub variant: ProtocolVariant,
    pub adversary: AdversaryPolicy,
    pub initial: InitialCondition,
    pub seed: u64,
    pub max_rounds: u64,
    pub trials: u64,
    pub stop: StopRule,
    pub engine: Engine,
    /// Phase-length constant of the epoch clock.
    pub delta: f64,
}

pub const DEFAULT_DELTA: f64 = 0.1;

/// `1000 k ceil(ln n)`, at least 1.
pub fn default_max_rounds(n: u64, k: usize) -> u64 {
    let ln = (n.max(1) as f64).ln().ceil().max(1.0) as u64;
    (1000 * k as u64 * ln).max(1)
}

impl ExperimentSpec {
    /// Uniform start, no adversary, seed 0, one trial.
    pub fn new(n: u64, k: usize) -> Self {
        ExperimentSpec {
            n,
            k,
            variant: ProtocolVariant::default(),
            adversary: AdversaryPolicy::none(),
            initial: InitialCondition::Uniform,
            seed: 0,
            max_rounds: default_max_rounds(n, k),
            trials: 1,
            stop: StopRule::default(),
            engine: Engine::Auto,
            delta: DEFAULT_DELTA,
        }
    }

    pub fn with_adversary(
        mut self,
        strategy: Strategy,
        epsilon: f64,
        budget_override: Option<u64>,
    ) -> Result<Self> {
        self.adversary = AdversaryPolicy::new(strategy, epsilon, budget_override, self.n, self.k)?;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_variant(mut self, variant: ProtocolVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n < self.k as u64 {
            return Err(Error::InvalidSpec(format!(
                "need n >= k >= 1, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if self.n > MAX_NODES {
            return Err(Error::InvalidSpec(format!(
                "n = {} exceeds {MAX_NODES}",
                self.n
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidSpec("max_rounds must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        self.engine.resolve(self.variant)?;
        self.initial_configuration().map(|_| ())
    }

    pub fn initial_configuration(&self) -> Result<Configuration> {
        match &self.initial {
            InitialCondition::Uniform => Configuration::uniform(self.n, self.k),
            InitialCondition::Custom(counts) => {
                if counts.len() != self.k {
                    return Err(Error::InvalidSpec(format!(
                        "{} counts given for k = {}",
                        counts.len(),
                        self.k
                    )));
                }
                if counts.iter().sum::<u64>() != self.n {
                    return Err(Error::InvalidSpec(format!(
                        "counts sum to {}, not n = {}",
                        counts.iter().sum::<u64>(),
                        self.n
                    )));
                }
                Configuration::new(counts.clone())
            }
            &InitialCondition::OnePlurality { gap } => {
                if !(gap >= 0.0 && gap.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "gap must be non-negative, got {gap}"
                    )));
                }
                let other = (self.n as f64 / (self.k as f64 + gap)).floor() as u64;
                let mut counts = vec![other; self.k];
                counts[0] = self.n - other * (self.k as u64 - 1);
                Configuration::new(counts)
            }
        }
    }
}
