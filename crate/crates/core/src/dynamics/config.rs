use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported population.
pub const MAX_NODES: u64 = 1 << 40;

/// Opinion label. Valid opinions are `1..=k`; `k + 1` stands for every
/// adversary-introduced (non-valid) opinion grouped together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpinionId(u32);

impl OpinionId {
    pub const fn new(id: u32) -> Self {
        assert!(id >= 1, "opinion ids start at 1");
        OpinionId(id)
    }

    pub fn from_index(index: usize) -> Self {
        OpinionId(index as u32 + 1)
    }

    /// The grouped non-valid opinion for `k` valid opinions.
    pub fn invalid(k: usize) -> Self {
        OpinionId(k as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn is_valid(self, k: usize) -> bool {
        (self.0 as usize) <= k
    }
}

impl fmt::Display for OpinionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Opinion counts of an `n`-node system with `k` valid opinions.
///
/// `counts` always has `k + 1` entries, the last one being the grouped
/// non-valid opinion. The counts sum to `n` at all times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    n: u64,
    k: usize,
    counts: Vec<u64>,
    round: u64,
}

impl Configuration {
    /// Configuration with the given valid-opinion counts and no non-valid
    /// nodes.
    pub fn new(valid_counts: Vec<u64>) -> Result<Self> {
        Self::with_invalid(valid_counts, 0)
    }

    pub fn with_invalid(mut valid_counts: Vec<u64>, invalid: u64) -> Result<Self> {
        let k = valid_counts.len();
        if k == 0 {
            return Err(Error::InvalidConfiguration("k must be at least 1".into()));
        }
        valid_counts.push(invalid);
        let n = valid_counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidConfiguration("count overflow".into()))?;
        if n == 0 {
            return Err(Error::InvalidConfiguration("n must be at least 1".into()));
        }
        if n > MAX_NODES {
            return Err(Error::InvalidConfiguration(format!("n = {n} exceeds 2^40")));
        }
        Ok(Configuration {
            n,
            k,
            counts: valid_counts,
            round: 0,
        })
    }

    /// `n` nodes split as evenly as possible over `k` opinions, remainder to
    /// the lowest ids.
    pub fn uniform(n: u64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfiguration("k must be at least 1".into()));
        }
        let base = n / k as u64;
        let extra = (n % k as u64) as usize;
        Self::new((0..k).map(|i| base + u64::from(i < extra)).collect())
    }

    pub fn consensus(n: u64, k: usize, opinion: OpinionId) -> Result<Self> {
        if !opinion.is_valid(k) {
            return Err(Error::InvalidConfiguration(format!(
                "opinion {opinion} outside 1..={k}"
            )));
        }
        let mut counts = vec![0; k];
        counts[opinion.index()] = n;
        Self::new(counts)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// All `k + 1` counts; index `i` holds opinion `i + 1`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn valid_counts(&self) -> &[u64] {
        &self.counts[..self.k]
    }

    pub fn count(&self, opinion: OpinionId) -> u64 {
        self.counts[opinion.index()]
    }

    pub fn invalid_count(&self) -> u64 {
        self.counts[self.k]
    }

    pub fn fraction(&self, opinion: OpinionId) -> f64 {
        self.count(opinion) as f64 / self.n as f64
    }

    /// Fractions of all `k + 1` opinions in the requested scalar type.
    pub fn fractions<S: Scalar>(&self) -> Vec<S> {
        self.counts.iter().map(|&c| S::ratio(c, self.n)).collect()
    }

    pub fn sigma2(&self) -> f64 {
        let n = self.n as f64;
        self.counts.iter().map(|&c| (c as f64 / n).powi(2)).sum()
    }

    /// Largest count over all opinions, non-valid included.
    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn p_max(&self) -> f64 {
        self.max_count() as f64 / self.n as f64
    }

    /// Valid opinion with the largest support, ties to the lowest id.
    pub fn plurality(&self) -> OpinionId {
        let (idx, _) = self
            .valid_counts()
            .iter()
            .enumerate()
            .fold(
                (0, 0),
                |best, (i, &c)| {
                    if c > best.1 {
                        (i, c)
                    } else {
                        best
                    }
                },
            );
        OpinionId::from_index(idx)
    }

    /// Number of opinions (non-valid included) with nonzero support.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_consensus(&self) -> bool {
        self.support_size() == 1
    }

    /// Moves up to `count` nodes from `from` to `to`; returns how many moved.
    pub fn transfer(&mut self, from: OpinionId, to: OpinionId, count: u64) -> u64 {
        let moved = count.min(self.counts[from.index()]);
        self.counts[from.index()] -= moved;
        self.counts[to.index()] += moved;
        moved
    }

    pub(crate) fn set_counts(&mut self, counts: Vec<u64>) {
        debug_assert_eq!(counts.len(), self.k + 1);
        debug_assert_eq!(counts.iter().sum::<u64>(), self.n);
        self.counts = counts;
    }

    pub(crate) fn increment(&mut self, from: usize, to: usize) {
        self.counts[from] -= 1;
        self.counts[to] += 1;
    }

    pub fn advance_round(&mut self) {
        self.round += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_distributes_remainder_low() {
        let c = Configuration::uniform(10, 3).unwrap();
        assert_eq!(c.counts(), &[4, 3, 3, 0]);
        assert_eq!(c.n(), 10);
    }

    #[test]
    fn rejects_empty_and_oversized() {
        assert!(Configuration::new(vec![]).is_err());
        assert!(Configuration::new(vec![0, 0]).is_err());
        assert!(Configuration::new(vec![MAX_NODES, 1]).is_err());
        assert!(Configuration::new(vec![MAX_NODES]).is_ok());
    }

    #[test]
    fn plurality_ties_to_lowest() {
        let c = Configuration::new(vec![3, 5, 5]).unwrap();
        assert_eq!(c.plurality(), OpinionId::new(2));
    }

    #[test]
    fn plurality_ignores_invalid_opinion() {
        let c = Configuration::with_invalid(vec![3, 2], 9).unwrap();
        assert_eq!(c.plurality(), OpinionId::new(1));
        assert_eq!(c.max_count(), 9);
    }

    #[test]
    fn transfer_is_capped_by_source() {
        let mut c = Configuration::new(vec![3, 2]).unwrap();
        assert_eq!(c.transfer(OpinionId::new(2), OpinionId::new(1), 10), 2);
        assert_eq!(c.counts(), &[5, 0, 0]);
        assert!(c.is_consensus());
    }

    #[test]
    fn sigma2_of_split() {
        let c = Configuration::new(vec![6, 4]).unwrap();
        assert!((c.sigma2() - 0.52).abs() < 1e-15);
    }
}
