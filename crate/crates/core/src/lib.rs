//! Simulation and analysis toolkit for 3-majority consensus under a
//! bounded adversary.
//!
//! * [`dynamics`]: configurations, the two majority rules and the
//!   mean-field map;
//! * [`adversary`]: per-round corruption strategies;
//! * [`instrumentation`]: support classes, the epoch clock, gaps and the
//!   coloring ledger;
//! * [`lab`]: trials, oracles, the property suite and scaling fits.
//!
//! The numeric code is generic over [`scalar::Scalar`]; the aliases below
//! fix the common choices.

pub mod adversary;
pub mod dynamics;
pub mod error;
pub mod instrumentation;
pub mod lab;
pub mod rng;
pub mod scalar;

pub use adversary::{AdversaryPolicy, Strategy};
pub use dynamics::{Configuration, OpinionId, Population, ProtocolVariant};
pub use error::{Error, Result};
pub use lab::ExperimentSpec;
pub use rng::SeededRandomSource;

/// Exact rational arithmetic for oracle comparisons.
pub type Rational = num_rational::BigRational;
pub type MeanField = dynamics::MeanFieldVector<f64>;
pub type MeanField32 = dynamics::MeanFieldVector<f32>;
pub type ExactMeanField = dynamics::MeanFieldVector<Rational>;
