//! Round-by-round observation of one agent-mode trajectory.

use serde::{Deserialize, Serialize};

use super::spec::{Engine, ExperimentSpec};
use super::trial::{near_unanimous, Simulation};
use crate::adversary::CorruptionRecord;
use crate::dynamics::{Configuration, OpinionId};
use crate::error::{Error, Result};
use crate::instrumentation::{
    classify, ColoringLedger, OpinionClass, Sigma2Source, TrackedColoring,
};
use crate::rng::trial_stream;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub track: Vec<OpinionId>,
    pub sigma2_source: Sigma2Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedRow {
    pub opinion: OpinionId,
    pub clear: f64,
    pub light_charge: f64,
    pub extra_light_count: u64,
    pub clear_nodes: f64,
    pub light_nodes: f64,
}

impl TrackedRow {
    fn of(t: &TrackedColoring, n: u64) -> Self {
        let n = n as f64;
        TrackedRow {
            opinion: t.opinion,
            clear: t.clear().nodes() / n,
            light_charge: t.light().nodes() / n,
            extra_light_count: t.extra_light_count(),
            clear_nodes: t.clear().nodes(),
            light_nodes: t.light().nodes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: u64,
    pub counts: Vec<u64>,
    pub sigma2: f64,
    pub p_max: f64,
    pub classes: Vec<OpinionClass>,
    pub kappa: u64,
    pub epoch: u32,
    pub phase: u64,
    pub round_in_phase: u64,
    pub end_of_time: bool,
    pub tracked: Vec<TrackedRow>,
    pub corruption: CorruptionRecord,
}

/// Checks that every tracked opinion's node units add up to its count.
pub fn check_row(row: &TraceRow) -> Result<()> {
    for t in &row.tracked {
        let actual = row.counts[t.opinion.index()] as f64;
        let sum = t.clear_nodes + t.light_nodes + t.extra_light_count as f64;
        if sum != actual {
            return Err(Error::AccountingViolation {
                opinion: t.opinion.get(),
                detail: format!("round {}: {sum} != {actual}", row.round),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub rows: u64,
    pub converged: bool,
}

/// Traces trial 0 of `spec` in agent mode, handing each row to `emit`.
/// Row 0 is the starting configuration; every later row shows the ledger
/// at the end of its round. The ledger restarts after each phase's last
/// round.
pub fn trace(
    spec: &ExperimentSpec,
    options: &TraceOptions,
    mut emit: impl FnMut(&TraceRow),
) -> Result<TraceSummary> {
    let spec = spec.clone().with_engine(Engine::Agent);
    let mut sim = Simulation::new(&spec, 0)?;
    let mut ledger =
        ColoringLedger::begin_phase(sim.configuration(), &options.track, options.sigma2_source)?;
    // label placement has its own stream so the trajectory matches `run`
    let mut label_rng = trial_stream(spec.seed, u64::MAX);
    let slack = spec.stop.slack.unwrap_or_else(|| spec.adversary.budget());
    let mut corruption = CorruptionRecord {
        round: 0,
        moved: Vec::new(),
    };
    let mut rows = 0;
    let mut phase_rolled = false;
    loop {
        let row = make_row(&sim, &ledger, corruption);
        check_row(&row)?;
        emit(&row);
        rows += 1;
        if phase_rolled {
            ledger.restart(sim.configuration());
        } else if let Some(p) = sim.population() {
            ledger.assign_light_labels(p, &mut label_rng);
        }
        if near_unanimous(sim.configuration(), slack).is_some() {
            return Ok(TraceSummary {
                rows,
                converged: true,
            });
        }
        if sim.round() >= spec.max_rounds {
            return Ok(TraceSummary {
                rows,
                converged: false,
            });
        }
        let start = sim.configuration().clone();
        let out = sim.step()?;
        let moves = out.moves.as_ref().ok_or(Error::MissingSampleDetail)?;
        ledger.observe_round(&start, moves, sim.configuration())?;
        corruption = out.corruption;
        phase_rolled = out.clock.phase_rolled;
    }
}

fn make_row(sim: &Simulation, ledger: &ColoringLedger, corruption: CorruptionRecord) -> TraceRow {
    let c: &Configuration = sim.configuration();
    let clock = sim.clock();
    TraceRow {
        round: c.round(),
        counts: c.counts().to_vec(),
        sigma2: c.sigma2(),
        p_max: c.p_max(),
        classes: classify(c),
        kappa: clock.kappa,
        epoch: clock.epoch_index,
        phase: clock.phase_index,
        round_in_phase: clock.round_in_phase,
        end_of_time: clock.end_of_time,
        tracked: ledger
            .tracked()
            .iter()
            .map(|t| TrackedRow::of(t, c.n()))
            .collect(),
        corruption,
    }
}
