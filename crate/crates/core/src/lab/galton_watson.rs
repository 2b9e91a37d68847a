//! Subcritical branching processes, simulated and in closed form.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::stats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffspringLaw {
    Poisson,
    /// `Binomial(trials, mean / trials)`.
    Binomial {
        trials: u64,
    },
}

/// Trees are cut off at this size; subcritical trees essentially never
/// reach it.
pub const SIZE_LIMIT: u64 = 1 << 32;

enum Sampler {
    Zero,
    Poisson(Poisson<f64>),
    Binomial(Binomial),
}

impl Sampler {
    fn new(law: OffspringLaw, mean: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&mean) {
            return Err(Error::Supercritical(mean));
        }
        if mean == 0.0 {
            return Ok(Sampler::Zero);
        }
        Ok(match law {
            OffspringLaw::Poisson => Sampler::Poisson(
                Poisson::new(mean).map_err(|e| Error::Precondition(e.to_string()))?,
            ),
            OffspringLaw::Binomial { trials } => {
                if (trials as f64) < mean || trials == 0 {
                    return Err(Error::Precondition(format!(
                        "{trials} binomial trials cannot have mean {mean}"
                    )));
                }
                Sampler::Binomial(
                    Binomial::new(trials, mean / trials as f64)
                        .map_err(|e| Error::Precondition(e.to_string()))?,
                )
            }
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Sampler::Zero => 0,
            Sampler::Poisson(p) => p.sample(rng) as u64,
            Sampler::Binomial(b) => b.sample(rng),
        }
    }
}

fn tree_size<R: Rng + ?Sized>(sampler: &Sampler, rng: &mut R) -> u64 {
    let (mut size, mut pending) = (1u64, 1u64);
    while pending > 0 && size < SIZE_LIMIT {
        pending -= 1;
        let c = sampler.sample(rng);
        size += c;
        pending += c;
    }
    size
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub offspring_mean: f64,
    pub size_threshold: u64,
    pub trials: u64,
    /// Monte-Carlo `P(size >= threshold)`.
    pub tail: f64,
    pub tail_se: f64,
    pub mean_size: f64,
    pub mean_size_se: f64,
    /// `1 / (1 - mean)`.
    pub expected_size: f64,
}

impl TailEstimate {
    /// Distance of the simulated mean size from `1 / (1 - mean)` in
    /// standard errors.
    pub fn mean_size_z(&self) -> f64 {
        if self.mean_size_se == 0.0 {
            if self.mean_size == self.expected_size {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean_size - self.expected_size) / self.mean_size_se
        }
    }
}

/// Simulates `trials` total-progeny trees.
pub fn galton_watson_tail<R: Rng + ?Sized>(
    offspring_mean: f64,
    size_threshold: u64,
    trials: u64,
    law: OffspringLaw,
    rng: &mut R,
) -> Result<TailEstimate> {
    let sampler = Sampler::new(law, offspring_mean)?;
    if trials == 0 {
        return Err(Error::Precondition("at least one tree is needed".into()));
    }
    let sizes: Vec<f64> = (0..trials)
        .map(|_| tree_size(&sampler, rng) as f64)
        .collect();
    let tail = stats::frequency(sizes.iter().map(|&s| s >= size_threshold as f64));
    Ok(TailEstimate {
        offspring_mean,
        size_threshold,
        trials,
        tail,
        tail_se: stats::frequency_se(tail, sizes.len()),
        mean_size: stats::mean(&sizes),
        mean_size_se: stats::std_error(&sizes),
        expected_size: 1.0 / (1.0 - offspring_mean),
    })
}

/// Exact `P(size >= t)` for Poisson offspring, from the Borel law
/// `P(size = s) = e^{-mu s} (mu s)^{s-1} / s!`.
pub fn poisson_tree_tail(mean: f64, threshold: u64) -> Result<f64> {
    if !(0.0..1.0).contains(&mean) {
        return Err(Error::Supercritical(mean));
    }
    if threshold <= 1 {
        return Ok(1.0);
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    let mut below = 0.0;
    let mut ln_fact = 0.0;
    for s in 1..threshold {
        let sf = s as f64;
        ln_fact += sf.ln();
        below += (-mean * sf + (sf - 1.0) * (mean * sf).ln() - ln_fact).exp();
    }
    Ok((1.0 - below).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub thresholds: Vec<u64>,
    pub estimates: Vec<TailEstimate>,
    /// Closed-form tails, Poisson offspring only.
    pub exact: Option<Vec<f64>>,
    /// Fit of `ln tail` against the threshold over positive estimates.
    pub log_slope: f64,
    pub log_r_squared: f64,
    /// `estimate(2t) / estimate(t)^2` for each `t` with both present.
    pub squared_ratios: Vec<(u64, f64)>,
}

/// Tail estimates at each threshold, from one batch of trees per
/// threshold, with the exponential-decay diagnostics.
pub fn decay_profile<R: Rng + ?Sized>(
    offspring_mean: f64,
    thresholds: &[u64],
    trials: u64,
    law: OffspringLaw,
    rng: &mut R,
) -> Result<DecayProfile> {
    let estimates: Vec<TailEstimate> = thresholds
        .iter()
        .map(|&t| galton_watson_tail(offspring_mean, t, trials, law, rng))
        .collect::<Result<_>>()?;
    let exact = match law {
        OffspringLaw::Poisson => Some(
            thresholds
                .iter()
                .map(|&t| poisson_tree_tail(offspring_mean, t))
                .collect::<Result<Vec<_>>>()?,
        ),
        OffspringLaw::Binomial { .. } => None,
    };
    let (x, y): (Vec<f64>, Vec<f64>) = estimates
        .iter()
        .filter(|e| e.tail > 0.0)
        .map(|e| (e.size_threshold as f64, e.tail.ln()))
        .unzip();
    let (log_slope, log_r_squared) = match stats::least_squares(&x, &y) {
        Ok(f) => (f.slope, f.r_squared),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let tail_at = |t: u64| {
        estimates
            .iter()
            .find(|e| e.size_threshold == t)
            .map(|e| e.tail)
    };
    let squared_ratios = thresholds
        .iter()
        .filter_map(|&t| {
            let (a, b) = (tail_at(t)?, tail_at(2 * t)?);
            (a > 0.0).then(|| (t, b / (a * a)))
        })
        .collect();
    Ok(DecayProfile {
        thresholds: thresholds.to_vec(),
        estimates,
        exact,
        log_slope,
        log_r_squared,
        squared_ratios,
    })
}
