//! First-order (expected-value) dynamics.
//!
//! One round of either majority rule moves the fraction of opinion `i` from
//! `p_i` to `p_i (1 + p_i - sigma2)` in expectation, where `sigma2` is the
//! sum of squared fractions. Everything here is generic over [`Scalar`] so
//! the identities can be checked exactly over rationals.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A probability vector over opinions with its cached `sum p_j^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldVector<S> {
    p: Vec<S>,
    sigma2: S,
}

impl<S: Scalar> MeanFieldVector<S> {
    pub fn new(p: Vec<S>) -> Result<Self> {
        let zero = S::zero();
        let one = S::one();
        if p.iter().any(|x| *x < zero || *x > one) {
            return Err(Error::InvalidConfiguration(
                "fraction outside [0, 1]".into(),
            ));
        }
        let sigma2 = sigma2(&p)?;
        Ok(MeanFieldVector { p, sigma2 })
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn sigma2(&self) -> &S {
        &self.sigma2
    }

    pub fn into_inner(self) -> Vec<S> {
        self.p
    }

    /// Expected fractions after one round.
    pub fn step(&self) -> Self {
        mean_field_step(self)
    }
}

fn check_normalized<S: Scalar>(p: &[S]) -> Result<()> {
    let sum = p.iter().fold(S::zero(), |acc, x| acc + x.clone());
    if (sum.clone() - S::one()).abs() > S::sum_tolerance() {
        return Err(Error::NotNormalized {
            sum: sum.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// `sum_j p_j^2`. Rejects vectors that do not sum to one.
pub fn sigma2<S: Scalar>(p: &[S]) -> Result<S> {
    check_normalized(p)?;
    Ok(p.iter()
        .fold(S::zero(), |acc, x| acc + x.clone() * x.clone()))
}

/// `p'_i = p_i (1 + p_i - sigma2)`.
pub fn mean_field_step<S: Scalar>(v: &MeanFieldVector<S>) -> MeanFieldVector<S> {
    let base = S::one() - v.sigma2.clone();
    let p: Vec<S> =
        v.p.iter()
            .map(|x| x.clone() * (base.clone() + x.clone()))
            .collect();
    let sigma2 = p
        .iter()
        .fold(S::zero(), |acc, x| acc + x.clone() * x.clone());
    MeanFieldVector { p, sigma2 }
}

/// Relative lead `(p_i - p_j) / p_j` of opinion `i` over `j`.
pub fn gap<S: Scalar>(p_i: S, p_j: S) -> Result<S> {
    if p_j.is_zero() {
        return Err(Error::ZeroSupport);
    }
    Ok((p_i - p_j.clone()) / p_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn sigma2_examples() {
        assert_eq!(sigma2(&[0.5, 0.5]).unwrap(), 0.5);
        assert!((sigma2(&[0.6f64, 0.4]).unwrap() - 0.52).abs() < 1e-15);
        assert!((sigma2(&[0.1f64; 10]).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(sigma2(&[q(3, 5), q(2, 5)]).unwrap(), q(13, 25));
    }

    #[test]
    fn sigma2_rejects_unnormalized() {
        assert!(matches!(
            sigma2(&[0.5, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(sigma2(&[q(1, 2), q(1, 3)]).is_err());
    }

    #[test]
    fn step_examples() {
        let v = MeanFieldVector::new(vec![q(3, 5), q(2, 5)]).unwrap().step();
        assert_eq!(v.p(), &[q(81, 125), q(44, 125)]);
        let f = MeanFieldVector::new(vec![0.6f64, 0.4]).unwrap().step();
        assert!((f.p()[0] - 0.648).abs() < 1e-12 && (f.p()[1] - 0.352).abs() < 1e-12);
        let tie = MeanFieldVector::new(vec![0.5, 0.5]).unwrap().step();
        assert_eq!(tie.p(), &[0.5, 0.5]);
        let consensus = MeanFieldVector::new(vec![1.0]).unwrap().step();
        assert_eq!(consensus.p(), &[1.0]);
    }

    #[test]
    fn gap_examples() {
        assert!((gap(0.6f64, 0.4).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(gap(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(gap(q(2, 5), q(3, 5)).unwrap(), -q(1, 3));
        assert_eq!(gap(0.1, 0.0), Err(Error::ZeroSupport));
    }

    #[test]
    fn works_in_single_precision() {
        let v = MeanFieldVector::new(vec![0.6f32, 0.4]).unwrap().step();
        assert!((v.p()[0] - 0.648).abs() < 1e-6);
    }

    fn simplex() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..50, 1..8).prop_filter("nonempty", |w| w.iter().sum::<u64>() > 0)
    }

    proptest! {
        #[test]
        fn step_preserves_mass_exactly(w in simplex()) {
            let total: u64 = w.iter().sum();
            let p: Vec<BigRational> = w.iter().map(|&x| q(x, total)).collect();
            let next = MeanFieldVector::new(p.clone()).unwrap().step();
            let sum = next.p().iter().fold(q(0, 1), |a, x| a + x.clone());
            prop_assert_eq!(sum, q(1, 1));
            for (a, b) in p.iter().zip(next.p()) {
                if *a == q(0, 1) { prop_assert_eq!(b.clone(), q(0, 1)); }
            }
        }

        #[test]
        fn step_preserves_mass_in_floats(w in simplex()) {
            let total: u64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|&x| x as f64 / total as f64).collect();
            // renormalize away representation error before validating
            let s: f64 = p.iter().sum();
            let p: Vec<f64> = p.iter().map(|x| x / s).collect();
            let next = MeanFieldVector::new(p).unwrap().step();
            prop_assert!((next.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sigma2_bounds(w in simplex()) {
            let total: u64 = w.iter().sum();
            let p: Vec<BigRational> = w.iter().map(|&x| q(x, total)).collect();
            let m = w.iter().filter(|&&x| x > 0).count() as u64;
            let s2 = sigma2(&p).unwrap();
            let pmax = p.iter().cloned().fold(q(0, 1), |a, b| if b > a { b } else { a });
            prop_assert!(s2 >= q(1, m));
            prop_assert!(s2 <= pmax);
        }

        #[test]
        fn gap_reciprocity(a in 1u64..1000, b in 1u64..1000) {
            let (pi, pj) = (q(a, 2000), q(b, 2000));
            let gij = gap(pi.clone(), pj.clone()).unwrap();
            let gji = gap(pj, pi).unwrap();
            prop_assert_eq!((q(1, 1) + gij) * (q(1, 1) + gji), q(1, 1));
        }
    }
}
