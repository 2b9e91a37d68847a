//! Protocol engine: configurations, agent populations, the two majority
//! rules, and the mean-field map.

mod config;
mod mean_field;
mod population;
mod step;
mod variant;

pub use config::{Configuration, OpinionId, MAX_NODES};
pub use mean_field::{gap, mean_field_step, sigma2, MeanFieldVector};
pub use population::{NodeId, Population};
pub use step::{
    step_agent, step_agent_from, step_aggregate, RoundMoves, SampleSet, Switch, SwitchCause,
};
pub use variant::{MajorityRule, ProtocolVariant};
