use std::collections::BTreeMap;

use crate::dist::ExactDist;
use crate::error::{LabError, Result};

pub const DEFAULT_BUDGET_BITS: u32 = 20;

pub fn check_budget(entries: u128) -> Result<()> {
    let budget = 1u128 << DEFAULT_BUDGET_BITS;
    if entries > budget {
        return Err(LabError::BudgetExceeded { needed: entries, budget });
    }
    Ok(())
}

/// A total map from the tape space `[0, size)` to values, stored as runs of equal
/// values. Tapes are integers rather than bit strings so that any rational
/// probability can be realized exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeTable<T> {
    size: u64,
    starts: Vec<u64>,
    values: Vec<T>,
}

impl<T: Clone + PartialEq> TapeTable<T> {
    pub fn constant(size: u64, v: T) -> Result<Self> {
        Self::from_blocks(vec![(v, size)])
    }

    /// Consecutive blocks of `(value, length)`; zero-length blocks are skipped.
    pub fn from_blocks(blocks: Vec<(T, u64)>) -> Result<Self> {
        let mut starts = Vec::new();
        let mut values: Vec<T> = Vec::new();
        let mut at = 0u64;
        for (v, len) in blocks {
            if len == 0 {
                continue;
            }
            if values.last() != Some(&v) {
                starts.push(at);
                values.push(v);
            }
            at += len;
        }
        if at == 0 {
            return Err(LabError::InvalidSpec("empty tape space".into()));
        }
        check_budget(u128::from(at))?;
        Ok(TapeTable { size: at, starts, values })
    }

    pub fn from_fn(size: u64, mut f: impl FnMut(u64) -> T) -> Result<Self> {
        if size == 0 {
            return Err(LabError::InvalidSpec("empty tape space".into()));
        }
        check_budget(u128::from(size))?;
        let mut starts = Vec::new();
        let mut values: Vec<T> = Vec::new();
        for t in 0..size {
            let v = f(t);
            if values.last() != Some(&v) {
                starts.push(t);
                values.push(v);
            }
        }
        Ok(TapeTable { size, starts, values })
    }

    /// Rebuilds from explicit run starts, as stored in documents.
    pub fn from_runs(size: u64, runs: Vec<(u64, T)>) -> Result<Self> {
        if runs.first().map(|r| r.0) != Some(0) {
            return Err(LabError::InvalidSpec("first run must start at tape 0".into()));
        }
        if runs.windows(2).any(|w| w[0].0 >= w[1].0) || runs.last().is_some_and(|r| r.0 >= size) {
            return Err(LabError::InvalidSpec("run starts must increase within the tape space".into()));
        }
        check_budget(u128::from(size))?;
        let (starts, values) = runs.into_iter().unzip();
        Ok(TapeTable { size, starts, values })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn get(&self, tape: u64) -> &T {
        debug_assert!(tape < self.size);
        let i = self.starts.partition_point(|s| *s <= tape) - 1;
        &self.values[i]
    }

    /// `(start, length, value)` for each run.
    pub fn runs(&self) -> impl Iterator<Item = (u64, u64, &T)> {
        (0..self.values.len()).map(move |i| {
            let end = self.starts.get(i + 1).copied().unwrap_or(self.size);
            (self.starts[i], end - self.starts[i], &self.values[i])
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map<U: Clone + PartialEq>(&self, f: impl Fn(&T) -> U) -> TapeTable<U> {
        let blocks = self.runs().map(|(_, len, v)| (f(v), len)).collect();
        TapeTable::from_blocks(blocks).expect("same tape space")
    }
}

impl<T: Clone + Ord> TapeTable<T> {
    /// Law of the value under a uniform tape.
    pub fn law(&self) -> ExactDist<T> {
        ExactDist::from_counts(self.runs().map(|(_, len, v)| (v.clone(), len)))
            .expect("non-empty tape space")
    }

    pub fn counts(&self) -> BTreeMap<T, u64> {
        let mut out = BTreeMap::new();
        for (_, len, v) in self.runs() {
            *out.entry(v.clone()).or_default() += len;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::rat;

    #[test]
    fn lookup_matches_blocks() {
        let t = TapeTable::from_blocks(vec![('a', 3), ('b', 0), ('b', 2), ('a', 1)]).unwrap();
        let got: String = (0..t.size()).map(|i| *t.get(i)).collect();
        assert_eq!(got, "aaabba");
        assert_eq!(t.runs().count(), 3);
        assert_eq!(t.law().prob(&'a'), rat(2, 3));
    }

    #[test]
    fn from_fn_merges_runs() {
        let t = TapeTable::from_fn(10, |i| i / 4).unwrap();
        assert_eq!(t.runs().map(|r| r.1).collect::<Vec<_>>(), vec![4, 4, 2]);
        assert_eq!(*t.get(9), 2);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            TapeTable::constant((1 << 20) + 1, 0u8),
            Err(LabError::BudgetExceeded { .. })
        ));
        assert!(TapeTable::from_runs(4, vec![(1, 0u8)]).is_err());
    }
}
