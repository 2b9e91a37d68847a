//! Small descriptive statistics and least squares.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with the `n - 1` denominator.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn stddev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    stddev(xs) / (xs.len() as f64).sqrt()
}

/// Linear-interpolation quantile, `q` in `[0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Fraction of `flags` that are set.
pub fn frequency(flags: impl IntoIterator<Item = bool>) -> f64 {
    let (mut hits, mut total) = (0u64, 0u64);
    for f in flags {
        hits += u64::from(f);
        total += 1;
    }
    if total == 0 {
        f64::NAN
    } else {
        hits as f64 / total as f64
    }
}

/// Binomial standard error of a frequency.
pub fn frequency_se(freq: f64, trials: usize) -> f64 {
    (freq * (1.0 - freq) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<F> {
    pub slope: F,
    pub intercept: F,
    pub r_squared: F,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn least_squares<F: Float>(x: &[F], y: &[F]) -> Result<LineFit<F>> {
    if x.len() != y.len() {
        return Err(Error::DegenerateDesign(format!(
            "{} predictor values for {} responses",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateDesign("need at least two points".into()));
    }
    let len = F::from(x.len()).unwrap();
    let mx = x.iter().fold(F::zero(), |a, &b| a + b) / len;
    let my = y.iter().fold(F::zero(), |a, &b| a + b) / len;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - mx) * (xi - mx);
        sxy = sxy + (xi - mx) * (yi - my);
        syy = syy + (yi - my) * (yi - my);
    }
    if sxx <= F::epsilon() * mx.abs().max(F::one()) {
        return Err(Error::DegenerateDesign(
            "all predictor values are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .fold(F::zero(), |a, b| a + b);
    let r_squared = if syy > F::zero() {
        (F::one() - ss_res / syy).max(F::zero()).min(F::one())
    } else {
        F::one()
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predictor: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: u64,
    pub k: usize,
    pub median_rounds: f64,
}

pub const K_LN_N: &str = "k*ln(n)";

/// Fits median rounds against `k ln n`. Needs four distinct `(n, k)`
/// points and a non-constant predictor.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<FitResult> {
    let mut distinct: Vec<(u64, usize)> = points.iter().map(|p| (p.n, p.k)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::DegenerateDesign(format!(
            "{} distinct (n, k) points, need 4",
            distinct.len()
        )));
    }
    let x: Vec<f64> = points
        .iter()
        .map(|p| p.k as f64 * (p.n as f64).ln())
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.median_rounds).collect();
    fit_named(&x, &y, K_LN_N)
}

/// [`least_squares`] over `f64`, labeled with its predictor.
pub fn fit_named(x: &[f64], y: &[f64], predictor: &str) -> Result<FitResult> {
    let f = least_squares(x, y)?;
    Ok(FitResult {
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        predictor: predictor.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::{Distribution, StandardNormal};

    fn grid() -> Vec<(u64, usize)> {
        let mut g = Vec::new();
        for n in [1_000u64, 10_000, 100_000] {
            for k in [2usize, 4, 8] {
                g.push((n, k));
            }
        }
        g
    }

    #[test]
    fn exact_line_is_recovered() {
        let pts: Vec<ScalingPoint> = grid()
            .into_iter()
            .map(|(n, k)| ScalingPoint {
                n,
                k,
                median_rounds: 7.0 * k as f64 * (n as f64).ln(),
            })
            .collect();
        let f = fit_scaling(&pts).unwrap();
        assert!((f.slope - 7.0).abs() < 1e-9);
        assert!(f.intercept.abs() < 1e-7);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.predictor, K_LN_N);
    }

    #[test]
    fn noisy_line_is_recovered() {
        let mut rng = seeded(11);
        let pts: Vec<ScalingPoint> = grid()
            .into_iter()
            .map(|(n, k)| {
                let z: f64 = StandardNormal.sample(&mut rng);
                ScalingPoint {
                    n,
                    k,
                    median_rounds: 7.0 * k as f64 * (n as f64).ln() + z,
                }
            })
            .collect();
        let f = fit_scaling(&pts).unwrap();
        assert!((f.slope - 7.0).abs() < 0.05, "{f:?}");
        assert!(f.r_squared > 0.99);
    }

    #[test]
    fn degenerate_designs_are_rejected() {
        let same: Vec<ScalingPoint> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&m| ScalingPoint {
                n: 1000,
                k: 2,
                median_rounds: m,
            })
            .collect();
        assert!(matches!(
            fit_scaling(&same),
            Err(Error::DegenerateDesign(_))
        ));
        // distinct points, equal predictor
        assert!(least_squares(&[3.0f64, 3.0, 3.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
        let three: Vec<ScalingPoint> = [10u64, 100, 1000]
            .iter()
            .map(|&n| ScalingPoint {
                n,
                k: 2,
                median_rounds: 1.0,
            })
            .collect();
        assert!(fit_scaling(&three).is_err());
    }

    #[test]
    fn single_precision_fit() {
        let f = least_squares(&[1.0f32, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-5 && (f.intercept - 1.0).abs() < 1e-5);
    }

    #[test]
    fn descriptive_statistics() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median(&xs), 2.5);
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(frequency([true, false, true, true]), 0.75);
        assert!(median(&[]).is_nan());
    }
}
