//! Experiment harness: trial runner, exact and branching-process oracles,
//! the property suite, scaling fits and traces.

mod experiments;
mod galton_watson;
mod oracle;
mod properties;
mod spec;
pub mod stats;
mod trace;
mod trial;

pub use experiments::{
    all_configurations, drift_law_sweep, extra_light_minority, light_charge_variance,
    mode_equivalence, DriftLawReport, ExtraLightReport, LightVarianceReport, ModeComparison,
    Moments,
};
pub use galton_watson::{
    decay_profile, galton_watson_tail, poisson_tree_tail, DecayProfile, OffspringLaw, TailEstimate,
    SIZE_LIMIT,
};
pub use oracle::{exact_round_expectation, per_node_expectation, ENUMERATION_CAP};
pub use properties::{
    property_suite, PropertyCheck, PropertyId, PropertyReport, Relation, SuiteParams,
};
pub use spec::{
    default_max_rounds, Engine, ExperimentSpec, InitialCondition, StopRule, DEFAULT_DELTA,
};
pub use stats::{fit_scaling, FitResult, ScalingPoint, K_LN_N};
pub use trace::{check_row, trace, TraceOptions, TraceRow, TraceSummary, TrackedRow};
pub use trial::{
    near_unanimous, run_trial, run_trials, summarize, RoundOutcome, RoundsSummary,
    RoundsToConsensus, Simulation, TrialResult,
};
