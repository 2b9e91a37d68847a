//! Executable form of the analysis scaffold: support classes, the
//! epoch/phase clock, pairwise gaps, and the coloring ledger.

mod classify;
mod clock;
mod coloring;
mod gap;
mod mass;

pub use classify::{
    classify, classify_fraction, is_at_most_fifth_of_max, is_super_weak, not_super_weak_count,
    strong_band_violations, strong_opinions, OpinionClass,
};
pub use clock::{
    advance_clock, is_end_of_time, kappa, phase_length, ClockEvents, EpochPhaseState, EpochSpan,
};
pub use coloring::{max_excursion, ColoringLedger, Sigma2Source, TrackedColoring};
pub use gap::{symmetric_gap, GapSnapshot};
pub use mass::NodeMass;
