//! Fixed-size experiments behind the oracle, mode and coloring checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::exact_round_expectation;
use super::stats;
use crate::dynamics::{
    mean_field_step, step_agent, step_aggregate, Configuration, MeanFieldVector, OpinionId,
    Population, ProtocolVariant,
};
use crate::error::Result;
use crate::instrumentation::{phase_length, ColoringLedger, Sigma2Source};
use crate::rng::trial_stream;
use crate::Rational;

/// Every configuration of `n` nodes over `k` valid opinions plus the
/// invalid slot.
pub fn all_configurations(n: u64, k: usize) -> Vec<Configuration> {
    fn compositions(n: u64, parts: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=n {
            prefix.push(first);
            compositions(n - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    compositions(n, k + 1, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|mut c| {
            let invalid = c.pop().unwrap_or(0);
            Configuration::with_invalid(c, invalid).expect("composition is a configuration")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftLawReport {
    pub configurations: usize,
    /// Largest `|E[c_i] - n p_i (1 + p_i - sigma2)|` with both sides in `f64`.
    pub max_abs_error: f64,
    /// Configurations whose exact rational expectation differs from the
    /// exact closed form.
    pub exact_mismatches: usize,
}

/// Enumeration oracle against the closed-form drift for every
/// configuration with `1 <= n <= max_n` and `1 <= k <= max_k`.
pub fn drift_law_sweep(
    max_n: u64,
    max_k: usize,
    variant: ProtocolVariant,
) -> Result<DriftLawReport> {
    let configs: Vec<Configuration> = (1..=max_n)
        .flat_map(|n| (1..=max_k).flat_map(move |k| all_configurations(n, k)))
        .collect();
    let per_config: Vec<(f64, bool)> = configs
        .par_iter()
        .map(|c| {
            let exact: Vec<Rational> = exact_round_expectation(c, variant)?;
            let n = c.n();
            let closed = mean_field_step(&MeanFieldVector::new(c.fractions::<Rational>())?);
            let closed_f = mean_field_step(&MeanFieldVector::new(c.fractions::<f64>())?);
            let nr = Rational::from_integer(n.into());
            let mismatch = exact
                .iter()
                .zip(closed.p())
                .any(|(e, p)| *e != p.clone() * nr.clone());
            let err = exact
                .iter()
                .zip(closed_f.p())
                .map(|(e, p)| {
                    (num_traits::ToPrimitive::to_f64(e).unwrap_or(f64::NAN) - p * n as f64).abs()
                })
                .fold(0.0, f64::max);
            Ok((err, mismatch))
        })
        .collect::<Result<_>>()?;
    Ok(DriftLawReport {
        configurations: configs.len(),
        max_abs_error: per_config.iter().map(|r| r.0).fold(0.0, f64::max),
        exact_mismatches: per_config.iter().filter(|r| r.1).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub mean_se: f64,
}

impl Moments {
    fn of(xs: &[f64]) -> Self {
        Moments {
            mean: stats::mean(xs),
            variance: stats::variance(xs),
            mean_se: stats::std_error(xs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub trials: u64,
    pub agent: Vec<Moments>,
    pub aggregate: Vec<Moments>,
    pub expected: Vec<f64>,
    /// Largest `|mean_agent - mean_aggregate|` in combined standard errors.
    pub max_mean_z: f64,
    /// Largest `|var_agent - var_aggregate| / var_aggregate`.
    pub max_variance_rel_diff: f64,
}

/// One round from `config`, `trials` times per engine, for the default
/// variant.
pub fn mode_equivalence(config: &Configuration, trials: u64, seed: u64) -> Result<ModeComparison> {
    let variant = ProtocolVariant::default();
    let population = Population::from_configuration(config)?;
    let m = config.counts().len();
    let agent: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut p = population.clone();
            step_agent(&mut p, variant, &mut trial_stream(seed, 2 * i));
            p.configuration().counts().to_vec()
        })
        .collect();
    let aggregate: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            step_aggregate(&mut c, variant, &mut trial_stream(seed, 2 * i + 1))?;
            Ok(c.counts().to_vec())
        })
        .collect::<Result<_>>()?;
    let column =
        |rows: &[Vec<u64>], j: usize| -> Vec<f64> { rows.iter().map(|r| r[j] as f64).collect() };
    let agent: Vec<Moments> = (0..m).map(|j| Moments::of(&column(&agent, j))).collect();
    let aggregate: Vec<Moments> = (0..m)
        .map(|j| Moments::of(&column(&aggregate, j)))
        .collect();
    let n = config.n() as f64;
    let expected = mean_field_step(&MeanFieldVector::new(config.fractions::<f64>())?)
        .p()
        .iter()
        .map(|p| p * n)
        .collect();
    let mut max_mean_z: f64 = 0.0;
    let mut max_variance_rel_diff: f64 = 0.0;
    for (a, g) in agent.iter().zip(&aggregate) {
        let se = (a.mean_se.powi(2) + g.mean_se.powi(2)).sqrt();
        if se > 0.0 {
            max_mean_z = max_mean_z.max((a.mean - g.mean).abs() / se);
        } else if a.mean != g.mean {
            max_mean_z = f64::INFINITY;
        }
        if g.variance > 0.0 {
            max_variance_rel_diff =
                max_variance_rel_diff.max((a.variance - g.variance).abs() / g.variance);
        } else if a.variance != 0.0 {
            max_variance_rel_diff = f64::INFINITY;
        }
    }
    Ok(ModeComparison {
        trials,
        agent,
        aggregate,
        expected,
        max_mean_z,
        max_variance_rel_diff,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightVarianceReport {
    pub n: u64,
    pub kappa: usize,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
    /// `n (1.5 / kappa)^2`.
    pub bound: f64,
}

impl LightVarianceReport {
    pub fn within_bound(&self, standard_errors: f64) -> bool {
        self.variance <= self.bound + standard_errors * self.variance_se
    }
}

/// Light charge of opinion 1, in nodes, after the first round of a phase
/// that starts from `kappa` tied opinions.
pub fn light_charge_variance(
    n: u64,
    kappa: usize,
    trials: u64,
    seed: u64,
) -> Result<LightVarianceReport> {
    let config = Configuration::uniform(n, kappa)?;
    let population = Population::from_configuration(&config)?;
    let one = OpinionId::new(1);
    ColoringLedger::begin_phase(&config, &[one], Sigma2Source::default())?;
    let lights: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut p = population.clone();
            let mut ledger = ColoringLedger::begin_phase(&config, &[one], Sigma2Source::default())?;
            let moves = step_agent(
                &mut p,
                ProtocolVariant::default(),
                &mut trial_stream(seed, i),
            );
            ledger.observe_round(&config, &moves, p.configuration())?;
            Ok(ledger.tracked()[0].light().nodes())
        })
        .collect::<Result<_>>()?;
    let variance = stats::variance(&lights);
    Ok(LightVarianceReport {
        n,
        kappa,
        trials,
        mean: stats::mean(&lights),
        variance,
        variance_se: variance * (2.0 / (trials as f64 - 1.0)).sqrt(),
        bound: n as f64 * (1.5 / kappa as f64).powi(2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraLightReport {
    pub n: u64,
    pub kappa: usize,
    pub delta: f64,
    pub phase_rounds: u64,
    pub phases: u64,
    /// Fraction of phases ending with fewer extra-light nodes than the
    /// absolute light charge.
    pub minority_frequency: f64,
    pub mean_extra_light: f64,
    pub mean_abs_light: f64,
}

/// First phase from `kappa` tied opinions, tracking opinion 1, repeated
/// `phases` times.
pub fn extra_light_minority(
    n: u64,
    kappa: usize,
    delta: f64,
    phases: u64,
    seed: u64,
) -> Result<ExtraLightReport> {
    let config = Configuration::uniform(n, kappa)?;
    let population = Population::from_configuration(&config)?;
    let one = OpinionId::new(1);
    let len = phase_length(delta, kappa as u64);
    let ends: Vec<(u64, f64)> = (0..phases)
        .into_par_iter()
        .map(|i| {
            let mut p = population.clone();
            let mut rng = trial_stream(seed, i);
            let mut ledger = ColoringLedger::begin_phase(&config, &[one], Sigma2Source::default())?;
            for r in 0..len {
                let start = p.configuration().clone();
                let moves = step_agent(&mut p, ProtocolVariant::default(), &mut rng);
                ledger.observe_round(&start, &moves, p.configuration())?;
                if r + 1 < len {
                    ledger.assign_light_labels(&p, &mut rng);
                }
            }
            let t = &ledger.tracked()[0];
            Ok((t.extra_light_count(), t.light().abs().nodes()))
        })
        .collect::<Result<_>>()?;
    let extra: Vec<f64> = ends.iter().map(|e| e.0 as f64).collect();
    let light: Vec<f64> = ends.iter().map(|e| e.1).collect();
    Ok(ExtraLightReport {
        n,
        kappa,
        delta,
        phase_rounds: len,
        phases,
        minority_frequency: stats::frequency(ends.iter().map(|&(x, l)| (x as f64) < l)),
        mean_extra_light: stats::mean(&extra),
        mean_abs_light: stats::mean(&light),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_enumeration() {
        assert_eq!(all_configurations(2, 1).len(), 3);
        // compositions of 5 into 4 parts
        assert_eq!(all_configurations(5, 3).len(), 56);
        assert!(all_configurations(3, 2)
            .iter()
            .all(|c| c.n() == 3 && c.k() == 2));
    }

    #[test]
    fn drift_law_small() {
        let r = drift_law_sweep(3, 2, ProtocolVariant::default()).unwrap();
        assert_eq!(r.exact_mismatches, 0);
        assert!(r.max_abs_error <= 1e-12);
        let r = drift_law_sweep(3, 2, ProtocolVariant::three_sample_random()).unwrap();
        assert_eq!(r.exact_mismatches, 0);
    }

    #[test]
    fn modes_agree_at_small_scale() {
        let c = Configuration::new(vec![600, 400]).unwrap();
        let m = mode_equivalence(&c, 4000, 1).unwrap();
        assert!(m.max_mean_z < 4.0, "{m:?}");
        assert!(m.max_variance_rel_diff < 0.15, "{m:?}");
        assert!((m.expected[0] - 648.0).abs() < 1e-9);
    }

    #[test]
    fn light_variance_small() {
        let r = light_charge_variance(10_000, 10, 400, 3).unwrap();
        assert!(r.mean.abs() < 4.0 * (r.variance / 400.0).sqrt());
        assert!(r.within_bound(3.0), "{r:?}");
    }

    #[test]
    fn extra_light_grows_with_longer_phases() {
        let r = extra_light_minority(20_000, 40, 0.1, 20, 4).unwrap();
        assert_eq!(r.phase_rounds, 4);
        assert!(r.mean_extra_light > 0.0);
        assert!(r.mean_extra_light < r.mean_abs_light);
    }
}
