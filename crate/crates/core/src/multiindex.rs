//! Multi-indices `alpha = (alpha_1, ..., alpha_N)` recording how often each
//! coordinate derivative is applied.
//!
//! Components may go negative: recurrences shift indices freely and a
//! multi-index with a negative component stands for an annihilated term.
//! Coordinates are 0-based throughout the crate API.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i32>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("multi-index {0} has a negative component")]
pub struct InvalidIndex(pub MultiIndex);

impl MultiIndex {
    pub fn new(components: Vec<i32>) -> Self {
        MultiIndex(components)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit vector `e_k`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = vec![0; dim];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    /// `|alpha|`, the sum of all components.
    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&c| c as i64).sum()
    }

    /// All components non-negative.
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Component `k`; panics when out of range.
    pub fn get(&self, k: usize) -> i32 {
        self.0[k]
    }

    /// Adds `delta` to each listed coordinate. The result may be invalid.
    pub fn shift(&self, deltas: &[(usize, i32)]) -> MultiIndex {
        let mut v = self.0.clone();
        for &(k, d) in deltas {
            v[k] += d;
        }
        MultiIndex(v)
    }

    pub fn plus_unit(&self, k: usize) -> MultiIndex {
        self.shift(&[(k, 1)])
    }

    pub fn minus_unit(&self, k: usize) -> MultiIndex {
        self.shift(&[(k, -1)])
    }

    /// `prod_k alpha_k!`
    pub fn factorial_product(&self) -> Result<Rational, InvalidIndex> {
        if !self.is_valid() {
            return Err(InvalidIndex(self.clone()));
        }
        let mut acc = factorial(0);
        for &c in &self.0 {
            acc *= factorial(c as u64);
        }
        Ok(acc)
    }

    /// Coordinates listed with multiplicity, e.g. `(2,0,1)` gives `[0,0,2]`.
    pub fn expand(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat_n(k, c.max(0) as usize))
            .collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All valid `dim`-component multi-indices of weight `n`, lexicographically
/// ascending.
pub fn enumerate_weight(dim: usize, n: usize) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut current = vec![0i32; dim];
    fill(&mut current, 0, n as i32, &mut out);
    out
}

fn fill(current: &mut Vec<i32>, pos: usize, remaining: i32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for c in 0..=remaining {
        current[pos] = c;
        fill(current, pos + 1, remaining - c, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_int;
    use proptest::prelude::*;

    fn mi(v: &[i32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(enumerate_weight(2, 2), vec![mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
        assert_eq!(enumerate_weight(1, 5), vec![mi(&[5])]);
        assert_eq!(enumerate_weight(3, 2).len(), 6);
        assert_eq!(enumerate_weight(3, 0), vec![mi(&[0, 0, 0])]);
    }

    #[test]
    fn enumerate_counts_match_binomial() {
        for dim in 1..=5u64 {
            for n in 0..=8u64 {
                let all = enumerate_weight(dim as usize, n as usize);
                assert_eq!(all.len() as u64, binomial(n + dim - 1, dim - 1));
                assert!(all.windows(2).all(|w| w[0] < w[1]));
                assert!(all.iter().all(|a| a.is_valid() && a.weight() == n as i64));
            }
        }
    }

    #[test]
    fn shifts() {
        assert_eq!(mi(&[1, 1]).shift(&[(0, 1), (1, -1)]), mi(&[2, 0]));
        let s = mi(&[0, 2]).minus_unit(0);
        assert_eq!(s, mi(&[-1, 2]));
        assert!(!s.is_valid());
        let t = mi(&[2, 1, 0]).minus_unit(2);
        assert_eq!(t, mi(&[2, 1, -1]));
        assert!(!t.is_valid());
    }

    #[test]
    fn factorial_products() {
        assert_eq!(mi(&[2, 1]).factorial_product().unwrap(), rat_int(2));
        assert_eq!(mi(&[0, 0, 0]).factorial_product().unwrap(), rat_int(1));
        assert_eq!(mi(&[3, 2]).factorial_product().unwrap(), rat_int(12));
        assert!(mi(&[1, -1]).factorial_product().is_err());
    }

    #[test]
    fn json_is_integer_array() {
        assert_eq!(serde_json::to_string(&mi(&[2, 0, 1])).unwrap(), "[2,0,1]");
    }

    proptest! {
        #[test]
        fn shift_order_independent(
            base in proptest::collection::vec(-3i32..4, 3),
            deltas in proptest::collection::vec((0usize..3, prop_oneof![Just(-1i32), Just(1i32)]), 0..6),
        ) {
            let a = MultiIndex::new(base);
            let forward = a.shift(&deltas);
            let mut rev = deltas.clone();
            rev.reverse();
            prop_assert_eq!(&forward, &a.shift(&rev));
            let (first, second) = deltas.split_at(deltas.len() / 2);
            prop_assert_eq!(&forward, &a.shift(first).shift(second));
        }
    }
}
