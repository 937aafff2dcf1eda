//! Enumeration of the tau-functions of exact period `p`.
//!
//! A period-`p` tau is represented by its minimal prefix `tau(1..=n0)` where
//! `n0` is the first index with `tau(n0) = n0 - p`; from there on the tail is
//! forced. The search grows prefixes one value at a time and classifies each
//! new prefix of length `>= p` as periodic, discarded or continued. Per-length
//! tallies of those three outcomes are returned as [`EnumStats`].

mod families;
mod search;

use rayon::prelude::*;
use serde::Serialize;

pub use families::exception_families;
pub use search::{Enumerator, WorkItem, MAX_PERIOD};

use crate::error::{Error, Result};
use crate::invariants::{self, TauInvariants};
use crate::tau::{self, TauPrefix};

/// A tau-function of exact period `p`, stored as its minimal defining prefix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PeriodicTau {
    prefix: TauPrefix,
    period: usize,
}

impl PeriodicTau {
    /// Validates that `prefix` is the minimal prefix of a period-`period` tau.
    pub fn new(prefix: TauPrefix, period: usize) -> Result<Self> {
        let fail = |reason| {
            Err(Error::NotPeriodic {
                values: prefix.values(),
                period,
                reason,
            })
        };
        if period == 0 {
            return fail("period must be positive");
        }
        let n0 = prefix.len();
        if prefix.last() + period != n0 {
            return fail("last value is not n0 - p");
        }
        if (1..n0).any(|n| prefix.tau(n) + period <= n) {
            return fail("an earlier index already satisfies tau(n) <= n - p");
        }
        if n0 < period || n0 > (2 * period).saturating_sub(2).max(period) {
            return fail("minimal prefix length outside p..=2p-2");
        }
        let bytes = prefix.as_bytes();
        let marked = tau::marked_levels(bytes, &tau::marker_set(bytes));
        if let Some(level) = marked.max().filter(|&l| l >= period) {
            return Err(Error::MarkedLevelTooHigh {
                values: prefix.values(),
                period,
                level,
            });
        }
        Ok(PeriodicTau { prefix, period })
    }

    pub fn from_values(values: &[usize], period: usize) -> Result<Self> {
        PeriodicTau::new(TauPrefix::new(values)?, period)
    }

    pub(crate) fn new_unchecked(prefix: TauPrefix, period: usize) -> Self {
        PeriodicTau { prefix, period }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn prefix(&self) -> &TauPrefix {
        &self.prefix
    }

    /// `n0`, the length of the minimal prefix.
    pub fn minimal_len(&self) -> usize {
        self.prefix.len()
    }

    /// `tau(n)` for every `n >= 1`.
    pub fn tau(&self, n: usize) -> usize {
        if n <= self.prefix.len() {
            self.prefix.tau(n)
        } else {
            n - self.period
        }
    }

    /// The first `len` values as a finite prefix (`len >= 1`).
    pub fn extended_to(&self, len: usize) -> Result<TauPrefix> {
        if len <= self.prefix.len() {
            return Ok(self.prefix.truncated(len.max(1)));
        }
        let mut out = self.prefix.clone();
        for n in self.prefix.len() + 1..=len {
            out.push(n - self.period)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LengthCounts {
    pub length: usize,
    pub periodic: u64,
    pub discard: u64,
    #[serde(rename = "continue")]
    pub continued: u64,
}

/// Per-length Periodic/Discard/Continue tallies for lengths `p..=2p-2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub period: usize,
    pub rows: Vec<LengthCounts>,
}

#[derive(Clone, Copy)]
pub(crate) enum Outcome {
    Periodic,
    Discard,
    Continue,
}

impl EnumStats {
    pub fn new(period: usize) -> Self {
        let last = (2 * period).saturating_sub(2).max(period);
        EnumStats {
            period,
            rows: (period..=last)
                .map(|length| LengthCounts {
                    length,
                    ..Default::default()
                })
                .collect(),
        }
    }

    pub fn row(&self, length: usize) -> Option<&LengthCounts> {
        length
            .checked_sub(self.period)
            .and_then(|i| self.rows.get(i))
    }

    pub(crate) fn record(&mut self, length: usize, outcome: Outcome) -> Result<()> {
        let row = &mut self.rows[length - self.period];
        let slot = match outcome {
            Outcome::Periodic => &mut row.periodic,
            Outcome::Discard => &mut row.discard,
            Outcome::Continue => &mut row.continued,
        };
        *slot = slot
            .checked_add(1)
            .ok_or(Error::Overflow("enumeration counter"))?;
        Ok(())
    }

    /// Adds another tally for the same period.
    pub fn merge(&mut self, other: &EnumStats) -> Result<()> {
        assert_eq!(self.period, other.period);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            let add = |x: u64, y: u64| {
                x.checked_add(y)
                    .ok_or(Error::Overflow("enumeration counter"))
            };
            a.periodic = add(a.periodic, b.periodic)?;
            a.discard = add(a.discard, b.discard)?;
            a.continued = add(a.continued, b.continued)?;
        }
        Ok(())
    }

    pub fn total_periodic(&self) -> u64 {
        self.rows.iter().map(|r| r.periodic).sum()
    }
}

/// Feeds every period-`p` tau, with its invariants, to `sink` in depth-first
/// order and returns the per-length tallies.
pub fn enumerate_periodic<F>(p: usize, mut sink: F) -> Result<EnumStats>
where
    F: FnMut(&PeriodicTau, &TauInvariants) -> Result<()>,
{
    let search = Enumerator::new(p)?;
    let mut stats = EnumStats::new(p);
    let mut emit = |t: &PeriodicTau, spines: u64| {
        let inv = invariants::invariants_with_spines(t, spines)?;
        sink(t, &inv)
    };
    for item in search.start(&mut stats, &mut emit)? {
        search.explore(item, &mut stats, &mut emit)?;
    }
    Ok(stats)
}

/// Every period-`p` tau in depth-first order.
pub fn periodic_taus(p: usize) -> Result<Vec<PeriodicTau>> {
    let mut out = Vec::new();
    enumerate_periodic(p, |t, _| {
        out.push(t.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Frontier size handed to the worker pool.
pub const SPLIT_TARGET: usize = 4096;

/// Parallel enumeration on `workers` threads.
///
/// Each subtree of the split frontier is folded into its own accumulator made
/// by `init`; the returned vector holds the accumulator of the splitting phase
/// followed by one per subtree in frontier order, so the result does not
/// depend on scheduling.
pub fn enumerate_periodic_parallel<A, I, V>(
    p: usize,
    workers: usize,
    init: I,
    visit: V,
) -> Result<(EnumStats, Vec<A>)>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &PeriodicTau, &TauInvariants) -> Result<()> + Sync,
{
    let search = Enumerator::new(p)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let mut stats = EnumStats::new(p);
    let mut head = init();
    let frontier = {
        let mut emit = |t: &PeriodicTau, spines: u64| {
            let inv = invariants::invariants_with_spines(t, spines)?;
            visit(&mut head, t, &inv)
        };
        let start = search.start(&mut stats, &mut emit)?;
        search.split(start, SPLIT_TARGET, &mut stats, &mut emit)?
    };

    let parts: Vec<Result<(EnumStats, A)>> = pool.install(|| {
        frontier
            .into_par_iter()
            .map(|item| {
                let mut local = EnumStats::new(p);
                let mut acc = init();
                let mut emit = |t: &PeriodicTau, spines: u64| {
                    let inv = invariants::invariants_with_spines(t, spines)?;
                    visit(&mut acc, t, &inv)
                };
                search.explore(item, &mut local, &mut emit)?;
                Ok((local, acc))
            })
            .collect()
    });

    let mut accs = Vec::with_capacity(parts.len() + 1);
    accs.push(head);
    for part in parts {
        let (local, acc) = part?;
        stats.merge(&local)?;
        accs.push(acc);
    }
    Ok((stats, accs))
}

/// True iff some marker `m` of the prefix has `tau(m) > n - p`, where `n` is
/// the prefix length. A prefix failing this has no periodic extension beyond
/// the ones reachable in a single step.
pub fn continuation_bound_check(tau: &TauPrefix, p: usize) -> bool {
    let n = tau.len();
    (1..n)
        .filter(|&m| tau.is_marker(m))
        .any(|m| tau.tau(m) + p > n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(taus: &[PeriodicTau]) -> Vec<Vec<usize>> {
        let mut v: Vec<_> = taus.iter().map(|t| t.prefix().values()).collect();
        v.sort();
        v
    }

    #[test]
    fn period_three_taus() {
        let taus = periodic_taus(3).unwrap();
        assert_eq!(
            values(&taus),
            vec![vec![0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0]]
        );
    }

    #[test]
    fn period_one_is_the_identity_shift() {
        let taus = periodic_taus(1).unwrap();
        assert_eq!(values(&taus), vec![vec![0]]);
        let stats = enumerate_periodic(1, |_, _| Ok(())).unwrap();
        assert_eq!(stats.rows.len(), 1);
        assert_eq!(stats.total_periodic(), 1);
    }

    #[test]
    fn period_ten_stats() {
        let stats = enumerate_periodic(10, |_, _| Ok(())).unwrap();
        let table: Vec<(u64, u64, u64)> = stats
            .rows
            .iter()
            .map(|r| (r.periodic, r.discard, r.continued))
            .collect();
        assert_eq!(
            table,
            vec![
                (205, 1, 435),
                (201, 242, 506),
                (139, 567, 479),
                (57, 780, 279),
                (26, 497, 134),
                (12, 251, 61),
                (6, 122, 21),
                (2, 43, 6),
                (1, 13, 0),
            ]
        );
        assert_eq!(stats.total_periodic(), 649);
    }

    #[test]
    fn sink_errors_propagate() {
        let err = enumerate_periodic(4, |_, _| Err(Error::Sink("full".into()))).unwrap_err();
        assert!(matches!(err, Error::Sink(_)));
    }

    #[test]
    fn periodic_tau_validation() {
        assert!(PeriodicTau::from_values(&[0, 1, 0], 3).is_ok());
        // tau(3) = 0 is already n - 3, so (0,1,0,1) is not minimal
        assert!(PeriodicTau::from_values(&[0, 1, 0, 1], 3).is_err());
        assert!(PeriodicTau::from_values(&[0, 1, 2], 3).is_err());
        assert!(PeriodicTau::from_values(&[0], 0).is_err());
        let t = PeriodicTau::from_values(&[0, 0, 1, 1], 3).unwrap();
        assert_eq!(t.tau(10), 7);
        assert_eq!(t.extended_to(6).unwrap().values(), vec![0, 0, 1, 1, 2, 3]);
    }

    #[test]
    fn continuation_bound_examples() {
        let ramp = TauPrefix::new(&(0..10).collect::<Vec<_>>()).unwrap();
        assert!(!continuation_bound_check(&ramp, 10));

        let low = TauPrefix::new(&[0, 0, 1, 2, 3]).unwrap();
        assert!(!continuation_bound_check(&low, 5));

        // marker 4 with tau(4) = 3
        let high = TauPrefix::new(&[0, 1, 2, 3, 0, 1, 2]).unwrap();
        assert!(continuation_bound_check(&high, 5));
        assert!(continuation_bound_check(&high.truncated(6), 5));
        assert!(!continuation_bound_check(&high.extended(3).unwrap(), 5));
    }
}
