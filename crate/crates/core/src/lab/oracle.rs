//! Brute-force expectation of one synchronous round.
//!
//! Nothing here calls into the simulator: the majority rule is restated
//! locally so that a bug in either copy shows up as a disagreement.

use crate::dynamics::{Configuration, MajorityRule, ProtocolVariant};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest joint outcome space [`exact_round_expectation`] will walk.
pub const ENUMERATION_CAP: u128 = 6u128.pow(12);

/// Opinion adopted by a node holding `own` after seeing `samples`, as
/// weights over opinions scaled by 3 (a three-way tie splits 1/1/1).
fn adopt(rule: MajorityRule, own: usize, samples: &[usize], out: &mut [u64]) {
    match rule {
        MajorityRule::TwoSamplePlusOwn => {
            let to = if samples[0] == samples[1] {
                samples[0]
            } else {
                own
            };
            out[to] += 3;
        }
        MajorityRule::ThreeSampleRandom => {
            let (a, b, c) = (samples[0], samples[1], samples[2]);
            if a == b || a == c {
                out[a] += 3;
            } else if b == c {
                out[b] += 3;
            } else {
                out[a] += 1;
                out[b] += 1;
                out[c] += 1;
            }
        }
    }
}

/// Expected next-round counts, summed over every joint sample outcome of
/// all `n` nodes. Outcomes are equally likely, so the expectation is an
/// integer sum divided by the outcome count.
pub fn exact_round_expectation<S: Scalar>(
    config: &Configuration,
    variant: ProtocolVariant,
) -> Result<Vec<S>> {
    let n = config.n() as usize;
    let m = config.counts().len();
    // node v holds layout[v]
    let layout: Vec<usize> = config
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
        .collect();
    let s = variant.samples_per_node();
    let pool = if variant.self_sampling {
        n
    } else {
        n.saturating_sub(1)
    };
    if pool == 0 {
        return Ok(config.counts().iter().map(|&c| S::from_count(c)).collect());
    }
    let per_node = (pool as u128).pow(s as u32);
    let outcomes = (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(per_node))
        .unwrap_or(u128::MAX);
    if outcomes > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            outcomes,
            cap: ENUMERATION_CAP,
        });
    }
    // peer index j of node v maps to node j, skipping v itself when needed
    let peer = |v: usize, j: usize| {
        if !variant.self_sampling && j >= v {
            j + 1
        } else {
            j
        }
    };
    let contribution = |v: usize, digits: &[usize], out: &mut [u64]| {
        let mut samples = [0usize; 3];
        for (x, &j) in samples.iter_mut().zip(digits) {
            *x = layout[peer(v, j)];
        }
        adopt(variant.rule, layout[v], &samples[..digits.len()], out);
    };

    // Node 0's draws are independent of everyone else's, so for each joint
    // outcome of nodes 1..n its pool^s outcomes are summed in one step:
    // their summed contribution is `first`, and the others' vector
    // `current` counts once per node-0 outcome.
    let mut first = vec![0u64; m];
    let mut d0 = vec![0usize; s];
    'node0: loop {
        contribution(0, &d0, &mut first);
        for d in d0.iter_mut() {
            *d += 1;
            if *d < pool {
                continue 'node0;
            }
            *d = 0;
        }
        break;
    }
    // odometer over the (n - 1) * s digits of nodes 1..n; `current` is kept
    // up to date incrementally
    let mut digits = vec![0usize; (n - 1) * s];
    let mut current = vec![0u64; m];
    for v in 1..n {
        contribution(v, &digits[(v - 1) * s..v * s], &mut current);
    }
    let mut total = vec![0u128; m];
    let mut scratch = vec![0u64; m];
    loop {
        for ((t, &c), &f) in total.iter_mut().zip(&current).zip(&first) {
            *t += c as u128 * per_node + f as u128;
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let den = 3 * outcomes;
                return Ok(total.iter().map(|&t| ratio_u128::<S>(t, den)).collect());
            }
            let v = pos / s + 1;
            let node = (v - 1) * s..v * s;
            scratch.iter_mut().for_each(|x| *x = 0);
            contribution(v, &digits[node.clone()], &mut scratch);
            for (c, &x) in current.iter_mut().zip(&scratch) {
                *c -= x;
            }
            digits[pos] += 1;
            let wrapped = digits[pos] == pool;
            if wrapped {
                digits[pos] = 0;
            }
            scratch.iter_mut().for_each(|x| *x = 0);
            contribution(v, &digits[node], &mut scratch);
            for (c, &x) in current.iter_mut().zip(&scratch) {
                *c += x;
            }
            if !wrapped {
                break;
            }
            pos += 1;
        }
    }
}

fn ratio_u128<S: Scalar>(num: u128, den: u128) -> S {
    S::from_u128(num).expect("representable") / S::from_u128(den).expect("representable")
}

/// Expected next-round counts from each node's own transition law, summed
/// over nodes. Works for any `n`; exact when `S` is.
pub fn per_node_expectation<S: Scalar>(config: &Configuration, variant: ProtocolVariant) -> Vec<S> {
    let m = config.counts().len();
    let s = variant.samples_per_node();
    let mut expected: Vec<S> = vec![S::zero(); m];
    for (own, &holders) in config.counts().iter().enumerate() {
        if holders == 0 {
            continue;
        }
        let mut peers = config.counts().to_vec();
        if !variant.self_sampling {
            peers[own] -= 1;
        }
        let pool: u64 = peers.iter().sum();
        if pool == 0 {
            expected[own] = expected[own].clone() + S::from_count(holders);
            continue;
        }
        // enumerate opinion tuples, weight = product of peer counts
        let mut law = vec![0u128; m];
        let mut tuple = vec![0usize; s];
        let mut scratch = vec![0u64; m];
        'tuples: loop {
            let weight: u128 = tuple.iter().map(|&o| peers[o] as u128).product();
            if weight > 0 {
                scratch.iter_mut().for_each(|x| *x = 0);
                adopt(variant.rule, own, &tuple, &mut scratch);
                for (l, &x) in law.iter_mut().zip(&scratch) {
                    *l += weight * x as u128;
                }
            }
            for d in tuple.iter_mut() {
                *d += 1;
                if *d < m {
                    continue 'tuples;
                }
                *d = 0;
            }
            break;
        }
        let den = 3 * (pool as u128).pow(s as u32);
        for (e, &l) in expected.iter_mut().zip(&law) {
            *e = e.clone() + S::from_count(holders) * ratio_u128::<S>(l, den);
        }
    }
    expected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{mean_field_step, MeanFieldVector};
    use crate::Rational;

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(num.into(), den.into())
    }

    #[test]
    fn three_nodes_two_one() {
        let c = Configuration::new(vec![2, 1]).unwrap();
        let e: Vec<Rational> = exact_round_expectation(&c, ProtocolVariant::default()).unwrap();
        assert_eq!(e[0], r(20, 9));
        assert_eq!(e[1], r(7, 9));
        assert_eq!(
            per_node_expectation::<Rational>(&c, ProtocolVariant::default())[0],
            r(20, 9)
        );
    }

    #[test]
    fn trivial_cases() {
        let c = Configuration::new(vec![0, 4, 0]).unwrap();
        for v in [
            ProtocolVariant::default(),
            ProtocolVariant::three_sample_random().excluding_self(),
        ] {
            let e: Vec<Rational> = exact_round_expectation(&c, v).unwrap();
            assert_eq!(e[1], r(4, 1));
        }
        let tied = Configuration::new(vec![1, 1]).unwrap();
        let e: Vec<Rational> = exact_round_expectation(&tied, ProtocolVariant::default()).unwrap();
        assert_eq!(e[0], r(1, 1));
        let single = Configuration::new(vec![1]).unwrap();
        let e: Vec<f64> =
            exact_round_expectation(&single, ProtocolVariant::default().excluding_self()).unwrap();
        assert_eq!(e[0], 1.0);
    }

    #[test]
    fn cap_is_enforced() {
        let c = Configuration::new(vec![4, 3]).unwrap();
        assert!(matches!(
            exact_round_expectation::<f64>(&c, ProtocolVariant::default()),
            Err(Error::EnumerationTooLarge { .. })
        ));
        let c = Configuration::new(vec![3, 2]).unwrap();
        assert!(
            exact_round_expectation::<f64>(&c, ProtocolVariant::three_sample_random()).is_err()
        );
    }

    #[test]
    fn both_paths_agree_for_every_variant() {
        let variants = [
            ProtocolVariant::two_sample_plus_own(),
            ProtocolVariant::three_sample_random(),
            ProtocolVariant::two_sample_plus_own().excluding_self(),
            ProtocolVariant::three_sample_random().excluding_self(),
        ];
        for counts in [vec![2u64, 1, 1], vec![1, 1, 1], vec![3, 1], vec![0, 2, 2]] {
            let c = Configuration::new(counts).unwrap();
            for v in variants {
                let a: Vec<Rational> = exact_round_expectation(&c, v).unwrap();
                let b: Vec<Rational> = per_node_expectation(&c, v);
                assert_eq!(a, b, "{v} {:?}", c.counts());
            }
        }
    }

    #[test]
    fn per_node_law_matches_closed_form_at_scale() {
        let c = Configuration::with_invalid(vec![370, 260, 250], 120).unwrap();
        let n = c.n();
        let e: Vec<Rational> = per_node_expectation(&c, ProtocolVariant::default());
        let mf = mean_field_step(&MeanFieldVector::new(c.fractions::<Rational>()).unwrap());
        for (x, p) in e.iter().zip(mf.p()) {
            assert_eq!(x.clone() / Rational::from_count(n), *p);
        }
        let e3: Vec<Rational> = per_node_expectation(&c, ProtocolVariant::three_sample_random());
        assert_eq!(e3, e);
    }
}
