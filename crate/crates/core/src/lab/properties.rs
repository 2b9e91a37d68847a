//! Finite-n frequency checks of the seven phase/epoch properties.
//!
//! Every threshold below is fixed before any run. Reports carry the raw
//! frequencies so that a threshold can be revisited without rerunning.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, InitialCondition};
use super::stats::{self, FitResult};
use super::trial::Simulation;
use crate::dynamics::{Configuration, OpinionId, ProtocolVariant};
use crate::error::{Error, Result};
use crate::instrumentation::{
    is_end_of_time, kappa, not_super_weak_count, phase_length, symmetric_gap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
}

impl PropertyId {
    pub const ALL: [PropertyId; 7] = [
        PropertyId::P1,
        PropertyId::P2,
        PropertyId::P3,
        PropertyId::P4,
        PropertyId::P5,
        PropertyId::P6,
        PropertyId::P7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::P1 => "p1",
            PropertyId::P2 => "p2",
            PropertyId::P3 => "p3",
            PropertyId::P4 => "p4",
            PropertyId::P5 => "p5",
            PropertyId::P6 => "p6",
            PropertyId::P7 => "p7",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown property {s:?}")))
    }
}

/// Size overrides for the suite. Unset fields take per-property defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub quick: bool,
    pub seed: u64,
    pub n: Option<u64>,
    pub k: Option<usize>,
    pub trials: Option<u64>,
    pub delta: Option<f64>,
    /// Starting gap for P5.
    pub gap: Option<f64>,
    pub variant: ProtocolVariant,
}

impl SuiteParams {
    fn trials(&self, full: u64) -> u64 {
        self.trials
            .unwrap_or(if self.quick { (full / 4).max(10) } else { full })
    }

    fn n(&self) -> u64 {
        self.n.unwrap_or(100_000)
    }

    fn k(&self) -> usize {
        self.k.unwrap_or(10)
    }

    fn delta(&self) -> f64 {
        self.delta.unwrap_or(super::spec::DEFAULT_DELTA)
    }

    fn base(&self, n: u64, k: usize) -> ExperimentSpec {
        ExperimentSpec::new(n, k)
            .with_variant(self.variant)
            .with_seed(self.seed)
            .with_delta(self.delta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn new(name: &str, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
        };
        PropertyCheck {
            name: name.into(),
            value,
            relation,
            threshold,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub passed: bool,
    pub quick: bool,
    pub seed: u64,
    pub parameters: BTreeMap<String, f64>,
    pub checks: Vec<PropertyCheck>,
    /// Raw, ungated numbers.
    pub measurements: BTreeMap<String, f64>,
    pub fits: Vec<FitResult>,
}

struct Builder {
    report: PropertyReport,
}

impl Builder {
    fn new(property: PropertyId, params: &SuiteParams) -> Self {
        Builder {
            report: PropertyReport {
                property,
                passed: true,
                quick: params.quick,
                seed: params.seed,
                parameters: BTreeMap::new(),
                checks: Vec::new(),
                measurements: BTreeMap::new(),
                fits: Vec::new(),
            },
        }
    }

    fn param(&mut self, key: &str, v: impl Into<f64>) -> &mut Self {
        self.report.parameters.insert(key.into(), v.into());
        self
    }

    fn measure(&mut self, key: &str, v: f64) -> &mut Self {
        self.report.measurements.insert(key.into(), v);
        self
    }

    fn check(&mut self, name: &str, value: f64, relation: Relation, threshold: f64) -> &mut Self {
        self.report
            .checks
            .push(PropertyCheck::new(name, value, relation, threshold));
        self
    }

    fn finish(mut self) -> PropertyReport {
        self.report.passed = self.report.checks.iter().all(|c| c.passed);
        self.report
    }
}

const ONE: OpinionId = OpinionId::new(1);
const TWO: OpinionId = OpinionId::new(2);

/// Trial streams of different experiments inside one property.
fn stream(block: u64, trial: u64) -> u64 {
    (block << 32) | trial
}

pub fn property_suite(id: PropertyId, params: &SuiteParams) -> Result<PropertyReport> {
    match id {
        PropertyId::P1 => p1(params),
        PropertyId::P2 => p2(params),
        PropertyId::P3 => p3(params),
        PropertyId::P4 => p4(params),
        PropertyId::P5 => p5(params),
        PropertyId::P6 => p6(params),
        PropertyId::P7 => p7(params),
    }
}

/// `n - seeded` spread over opinions `2..=k`, seeded count on opinion 1.
fn seeded_counts(n: u64, k: usize, seeded: u64) -> Vec<u64> {
    let rest = n - seeded;
    let others = (k - 1) as u64;
    let mut counts = vec![seeded];
    counts.extend((0..others).map(|i| rest / others + u64::from(i < rest % others)));
    counts
}

fn sqrt_n_over_kappa(n: u64, k: usize) -> f64 {
    (n as f64 / k as f64).sqrt()
}

fn p1(params: &SuiteParams) -> Result<PropertyReport> {
    let (n, k) = (params.n(), params.k());
    if k < 2 {
        return Err(Error::Precondition("P1 needs k >= 2".into()));
    }
    let trials = params.trials(200);
    let horizon = (50.0 * k as f64 * (n as f64).ln()).ceil() as u64;
    let super_weak = (0.5 * n as f64 / (10.0 * k as f64)).floor() as u64;
    let weak = (1.1 * n as f64 / (10.0 * k as f64)).ceil() as u64;
    let sw_spec = params
        .base(n, k)
        .with_initial(InitialCondition::Custom(seeded_counts(n, k, super_weak)));
    let w_spec = params
        .base(n, k)
        .with_initial(InitialCondition::Custom(seeded_counts(n, k, weak)));
    sw_spec.validate()?;
    w_spec.validate()?;
    {
        let c = w_spec.initial_configuration()?;
        if 10 * k as u64 * c.count(ONE) <= n || 5 * c.count(ONE) > c.max_count() {
            return Err(Error::Precondition(
                "weak seed is not weak at these sizes".into(),
            ));
        }
    }

    // violation: super-weak seed above 1/(10k); weak seed above p_max/5
    let run = |spec: &ExperimentSpec,
               block: u64,
               violated: fn(u64, u64, u64, usize) -> bool|
     -> Result<Vec<bool>> {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut sim = Simulation::new(spec, stream(block, i))?;
                while sim.round() < horizon {
                    sim.step()?;
                    let c = sim.configuration();
                    if violated(c.count(ONE), c.max_count(), n, k) {
                        return Ok(true);
                    }
                    if c.count(ONE) == 0 {
                        break;
                    }
                }
                Ok(false)
            })
            .collect()
    };
    let sw = run(&sw_spec, 0, |c, _, n, k| 10 * k as u64 * c > n)?;
    let w = run(&w_spec, 1, |c, max, _, _| 5 * c > max)?;
    let (f_sw, f_w) = (stats::frequency(sw), stats::frequency(w));

    let mut b = Builder::new(PropertyId::P1, params);
    b.param("n", n as f64)
        .param("k", k as f64)
        .param("trials", trials as f64)
        .param("horizon_rounds", horizon as f64)
        .param("super_weak_seed_fraction", super_weak as f64 / n as f64)
        .param("weak_seed_fraction", weak as f64 / n as f64)
        .measure("super_weak_violation_frequency", f_sw)
        .measure("weak_violation_frequency", f_w)
        .check(
            "super_weak_violation_frequency",
            f_sw,
            Relation::AtMost,
            0.05,
        )
        .check("weak_violation_frequency", f_w, Relation::AtMost, 0.05);
    Ok(b.finish())
}

/// Runs one phase from `spec`'s start for each trial and returns the
/// starting and final symmetric gaps between opinions 1 and 2.
fn one_phase_gaps(spec: &ExperimentSpec, block: u64, trials: u64) -> Result<Vec<(f64, f64)>> {
    let len = phase_length(spec.delta, spec.k as u64);
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut sim = Simulation::new(spec, stream(block, i))?;
            let start = sim.configuration();
            let g0 = gap_1_over_2(start.count(ONE), start.count(TWO));
            for _ in 0..len {
                sim.step()?;
            }
            let end = sim.configuration();
            Ok((g0, gap_1_over_2(end.count(ONE), end.count(TWO))))
        })
        .collect()
}

fn gap_1_over_2(c1: u64, c2: u64) -> f64 {
    if c2 == 0 {
        f64::INFINITY
    } else {
        (c1 as f64 - c2 as f64) / c2 as f64
    }
}

fn p2(params: &SuiteParams) -> Result<PropertyReport> {
    let (n, k) = (params.n(), params.k());
    if k < 2 {
        return Err(Error::Precondition("P2 needs two opinions".into()));
    }
    let trials = params.trials(400);
    let c1 = 0.5;
    let scale = sqrt_n_over_kappa(n, k);
    let mut counts = Configuration::uniform(n, k)?.valid_counts().to_vec();
    if counts[0] != counts[1] {
        counts[0] -= 1;
        counts[k - 1] += 1;
    }
    if counts[0] != counts[1] {
        return Err(Error::Precondition(format!(
            "opinions 1 and 2 cannot tie with n = {n}, k = {k}"
        )));
    }
    let spec = params
        .base(n, k)
        .with_initial(InitialCondition::Custom(counts));
    spec.validate()?;
    let gaps = one_phase_gaps(&spec, 0, trials)?;
    let scaled: Vec<f64> = gaps
        .iter()
        .map(|&(_, g)| g.abs().min(1e12) * scale)
        .collect();
    let success = stats::frequency(scaled.iter().map(|&x| x >= c1));

    let mut b = Builder::new(PropertyId::P2, params);
    b.param("n", n as f64)
        .param("k", k as f64)
        .param("trials", trials as f64)
        .param("delta", spec.delta)
        .param("phase_rounds", phase_length(spec.delta, k as u64) as f64)
        .param("c1", c1)
        .measure("success_frequency", success)
        .measure(
            "success_frequency_se",
            stats::frequency_se(success, trials as usize),
        )
        .measure(
            "success_frequency_at_c1_1",
            stats::frequency(scaled.iter().map(|&x| x >= 1.0)),
        )
        .measure("median_scaled_gap", stats::median(&scaled))
        .check("success_frequency", success, Relation::AtLeast, 0.10);
    Ok(b.finish())
}

fn growth_frequency(gaps: &[(f64, f64)], delta: f64) -> f64 {
    stats::frequency(gaps.iter().map(|&(g0, g)| g >= g0 * (1.0 + delta / 100.0)))
}

fn p3(params: &SuiteParams) -> Result<PropertyReport> {
    let (n, k) = (params.n(), params.k());
    if k < 2 {
        return Err(Error::Precondition("P3 needs two opinions".into()));
    }
    let trials = params.trials(400);
    let scale = sqrt_n_over_kappa(n, k);
    let mut b = Builder::new(PropertyId::P3, params);
    b.param("n", n as f64)
        .param("k", k as f64)
        .param("trials", trials as f64)
        .param("delta", params.delta());
    for (block, x) in [10.0, 20.0, 40.0].into_iter().enumerate() {
        let spec = params
            .base(n, k)
            .with_initial(InitialCondition::OnePlurality { gap: x / scale });
        spec.validate()?;
        let gaps = one_phase_gaps(&spec, block as u64, trials)?;
        let f = growth_frequency(&gaps, spec.delta);
        b.measure(&format!("growth_frequency_x{x}"), f);
        if x >= 20.0 {
            b.check(
                &format!("growth_frequency_x{x}"),
                f,
                Relation::AtLeast,
                0.95,
            );
        }
    }
    Ok(b.finish())
}

fn p4(params: &SuiteParams) -> Result<PropertyReport> {
    let (n, k) = (params.n(), params.k());
    if k < 2 {
        return Err(Error::Precondition("P4 needs two opinions".into()));
    }
    let trials = params.trials(100);
    let c5 = 2.0;
    let b_const = 10.0;
    let ln_n = (n as f64).ln();
    let target = c5 * ln_n.sqrt() / sqrt_n_over_kappa(n, k);
    let len = phase_length(params.delta(), k as u64);
    let horizon_phases = (b_const * ln_n).ceil() as u64;
    let spec = params.base(n, k);
    spec.validate()?;
    let phases: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut sim = Simulation::new(&spec, stream(0, i))?;
            for phase in 0..=horizon_phases {
                if symmetric_gap(sim.configuration(), ONE, TWO) >= target {
                    return Ok(Some(phase));
                }
                for _ in 0..len {
                    sim.step()?;
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let reached = stats::frequency(phases.iter().map(Option::is_some));
    let counted: Vec<f64> = phases
        .iter()
        .map(|p| p.unwrap_or(horizon_phases + 1) as f64)
        .collect();

    let mut b = Builder::new(PropertyId::P4, params);
    b.param("n", n as f64)
        .param("k", k as f64)
        .param("trials", trials as f64)
        .param("c5", c5)
        .param("b", b_const)
        .param("target_gap", target)
        .param("phase_rounds", len as f64)
        .param("horizon_phases", horizon_phases as f64)
        .measure("reached_frequency", reached)
        .measure("median_phases", stats::median(&counted))
        .measure(
            "p95_phases_over_ln_n",
            stats::quantile(&counted, 0.95) / ln_n,
        )
        .check("reached_frequency", reached, Relation::AtLeast, 0.95);
    Ok(b.finish())
}

fn p5(params: &SuiteParams) -> Result<PropertyReport> {
    let (n, k) = (params.n(), params.k());
    if k < 2 {
        return Err(Error::Precondition("P5 needs two opinions".into()));
    }
    let trials = params.trials(400);
    let c5 = 10.0;
    let threshold = c5 * (n as f64).ln().sqrt() / sqrt_n_over_kappa(n, k);
    let gap = params.gap.unwrap_or(threshold);
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::Precondition(format!(
            "P5 needs a positive starting gap, got {gap}"
        )));
    }
    if gap < threshold {
        return Err(Error::Precondition(format!(
            "P5 needs a starting gap of at least {threshold:.6}, got {gap}"
        )));
    }
    let spec = params
        .base(n, k)
        .with_initial(InitialCondition::OnePlurality { gap });
    spec.validate()?;
    let gaps = one_phase_gaps(&spec, 0, trials)?;
    let f = growth_frequency(&gaps, spec.delta);

    let mut b = Builder::new(PropertyId::P5, params);
    b.param("n", n as f64)
        .param("k", k as f64)
        .param("trials", trials as f64)
        .param("delta", spec.delta)
        .param("c5", c5)
        .param("starting_gap", gap)
        .measure("growth_frequency", f)
        .check("growth_frequency", f, Relation::AtLeast, 0.99);
    Ok(b.finish())
}

struct EpochExit {
    n: u64,
    k: usize,
    end_of_time: Option<u64>,
    exit_after: Option<u64>,
}

/// Uniform-start runs over the grid, recording the round at which
/// `p_max >= 1.5/k` first holds and the rounds from then until at most
/// `floor(5k/6)` opinions are not super-weak.
fn epoch_exits(params: &SuiteParams, trials: u64) -> Result<Vec<EpochExit>> {
    let ns = params.n.map_or(vec![10_000, 100_000], |n| vec![n]);
    let ks = params.k.map_or(vec![4, 8, 16], |k| vec![k]);
    let mut grid = Vec::new();
    for &n in &ns {
        for &k in &ks {
            grid.push((n, k));
        }
    }
    let runs: Vec<(u64, usize, u64)> = grid
        .iter()
        .enumerate()
        .flat_map(|(g, &(n, k))| (0..trials).map(move |i| (n, k, stream(g as u64, i))))
        .collect();
    runs.into_par_iter()
        .map(|(n, k, idx)| {
            let spec = params.base(n, k);
            let mut sim = Simulation::new(&spec, idx)?;
            let next_kappa = kappa(k, 2) as usize;
            let mut eot = None;
            while sim.round() < spec.max_rounds {
                let c = sim.configuration();
                if eot.is_none() && is_end_of_time(c, k as u64) {
                    eot = Some(sim.round());
                }
                if let Some(t) = eot {
                    if not_super_weak_count(c) <= next_kappa {
                        return Ok(EpochExit {
                            n,
                            k,
                            end_of_time: Some(t),
                            exit_after: Some(sim.round() - t),
                        });
                    }
                }
                sim.step()?;
            }
            Ok(EpochExit {
                n,
                k,
                end_of_time: eot,
                exit_after: None,
            })
        })
        .collect()
}

fn grid_keys(exits: &[EpochExit]) -> Vec<(u64, usize)> {
    let mut keys: Vec<(u64, usize)> = exits.iter().map(|e| (e.n, e.k)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

fn grid_medians(
    exits: &[EpochExit],
    value: impl Fn(&EpochExit) -> Option<u64>,
) -> Vec<(u64, usize, f64)> {
    grid_keys(exits)
        .into_iter()
        .map(|(n, k)| {
            let v: Vec<f64> = exits
                .iter()
                .filter(|e| (e.n, e.k) == (n, k))
                .filter_map(|e| value(e).map(|x| x as f64))
                .collect();
            (n, k, stats::median(&v))
        })
        .collect()
}

fn p6(params: &SuiteParams) -> Result<PropertyReport> {
    let trials = params.trials(50);
    let exits = epoch_exits(params, trials)?;
    let reached = stats::frequency(exits.iter().map(|e| e.end_of_time.is_some()));
    let ratios: Vec<f64> = exits
        .iter()
        .map(|e| {
            let scale = e.k as f64 * (e.n as f64).ln();
            e.end_of_time.map_or(f64::INFINITY, |t| t as f64 / scale)
        })
        .collect();
    let p95 = stats::quantile(&ratios, 0.95);

    let mut b = Builder::new(PropertyId::P6, params);
    b.param("trials_per_point", trials as f64)
        .param("grid_points", grid_keys(&exits).len() as f64)
        .measure("end_of_time_reached_frequency", reached)
        .measure("median_rounds_over_kappa_ln_n", stats::median(&ratios))
        .measure("p95_rounds_over_kappa_ln_n", p95)
        .check("p95_rounds_over_kappa_ln_n", p95, Relation::AtMost, 10.0);
    let med = grid_medians(&exits, |e| e.end_of_time);
    if grid_keys(&exits).len() >= 2 {
        let x: Vec<f64> = med
            .iter()
            .map(|&(n, k, _)| k as f64 * (n as f64).ln())
            .collect();
        let y: Vec<f64> = med.iter().map(|m| m.2).collect();
        if let Ok(f) = stats::fit_named(&x, &y, "kappa*ln(n)") {
            b.report.fits.push(f);
        }
    }
    Ok(b.finish())
}

fn p7(params: &SuiteParams) -> Result<PropertyReport> {
    let trials = params.trials(50);
    let exits = epoch_exits(params, trials)?;
    let completed = stats::frequency(exits.iter().map(|e| e.exit_after.is_some()));
    let ratios: Vec<f64> = exits
        .iter()
        .map(|e| {
            let scale = e.k as f64 * (e.k as f64).ln().max(1.0);
            e.exit_after.map_or(f64::INFINITY, |t| t as f64 / scale)
        })
        .collect();
    let p95 = stats::quantile(&ratios, 0.95);

    let mut b = Builder::new(PropertyId::P7, params);
    b.param("trials_per_point", trials as f64)
        .param("grid_points", grid_keys(&exits).len() as f64)
        .measure("exit_completed_frequency", completed)
        .measure("median_rounds_over_kappa_ln_k", stats::median(&ratios))
        .measure("p95_rounds_over_kappa_ln_k", p95)
        .check("p95_rounds_over_kappa_ln_k", p95, Relation::AtMost, 20.0);
    let med = grid_medians(&exits, |e| e.exit_after);
    if grid_keys(&exits).len() >= 2 {
        let y: Vec<f64> = med.iter().map(|m| m.2).collect();
        let by_k: Vec<f64> = med
            .iter()
            .map(|&(_, k, _)| k as f64 * (k as f64).ln())
            .collect();
        let by_n: Vec<f64> = med
            .iter()
            .map(|&(n, k, _)| k as f64 * (n as f64).ln())
            .collect();
        for (x, name) in [(by_k, "kappa*ln(k)"), (by_n, "kappa*ln(n)")] {
            if let Ok(f) = stats::fit_named(&x, &y, name) {
                b.report.fits.push(f);
            }
        }
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteParams {
        SuiteParams {
            n: Some(20_000),
            trials: Some(40),
            ..SuiteParams::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for p in PropertyId::ALL {
            assert_eq!(p.name().parse::<PropertyId>().unwrap(), p);
        }
        assert!("p8".parse::<PropertyId>().is_err());
        assert_eq!("P3".parse::<PropertyId>().unwrap(), PropertyId::P3);
    }

    #[test]
    fn p5_rejects_zero_gap() {
        let params = SuiteParams {
            gap: Some(0.0),
            ..small()
        };
        assert!(matches!(
            property_suite(PropertyId::P5, &params),
            Err(Error::Precondition(_))
        ));
        let params = SuiteParams {
            gap: Some(1e-4),
            ..small()
        };
        assert!(property_suite(PropertyId::P5, &params).is_err());
    }

    #[test]
    fn seeded_layout() {
        assert_eq!(seeded_counts(100, 4, 10), vec![10, 30, 30, 30]);
        assert_eq!(seeded_counts(101, 3, 1), vec![1, 50, 50]);
    }

    #[test]
    fn small_suite_runs_and_reports() {
        for p in [
            PropertyId::P1,
            PropertyId::P2,
            PropertyId::P3,
            PropertyId::P5,
        ] {
            let r = property_suite(p, &small()).unwrap();
            assert_eq!(r.property, p);
            assert!(!r.checks.is_empty());
            assert_eq!(r.passed, r.checks.iter().all(|c| c.passed));
            assert_eq!(r.parameters["n"], 20_000.0);
        }
    }

    #[test]
    fn epoch_properties_fit_both_predictors() {
        let params = SuiteParams {
            trials: Some(10),
            k: None,
            n: Some(10_000),
            ..SuiteParams::default()
        };
        let r = property_suite(PropertyId::P7, &params).unwrap();
        let names: Vec<&str> = r.fits.iter().map(|f| f.predictor.as_str()).collect();
        assert_eq!(names, vec!["kappa*ln(k)", "kappa*ln(n)"]);
        let r6 = property_suite(PropertyId::P6, &params).unwrap();
        assert_eq!(r6.measurements["end_of_time_reached_frequency"], 1.0);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = property_suite(PropertyId::P2, &small()).unwrap();
        let b = property_suite(PropertyId::P2, &small()).unwrap();
        assert_eq!(a, b);
    }
}
