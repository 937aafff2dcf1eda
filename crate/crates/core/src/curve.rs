//! Escape-region counts, degree and Euler characteristic of the period-`p`
//! curve, assembled from the invariants of every tau whose period divides `p`.
//!
//! Only the ratio column is floating point, and only for display; it is
//! rounded from exact integers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::TauInvariants;
use crate::periodic::{self, EnumStats, PeriodicTau};

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|q| n.is_multiple_of(*q)).collect()
}

/// Solves `total(n) = sum over q | n of a(q)` for `a(1..=max)`; index 0 is unused.
fn divisor_inversion(
    max: usize,
    total: impl Fn(usize) -> Option<u64>,
    what: &'static str,
) -> Result<Vec<u64>> {
    let mut a = vec![0u64; max + 1];
    for n in 1..=max {
        let mut rest = total(n).ok_or(Error::Overflow(what))?;
        for q in divisors(n).into_iter().filter(|&q| q < n) {
            rest = rest.checked_sub(a[q]).ok_or(Error::Overflow(what))?;
        }
        a[n] = rest;
    }
    for n in 1..=max {
        let sum: u64 = divisors(n).iter().map(|&q| a[q]).sum();
        assert_eq!(Some(sum), total(n), "{what}: divisor sum mismatch at {n}");
    }
    Ok(a)
}

/// `nu_2(1..=max)`: centers of exact period `n` of the Mandelbrot set.
pub fn quadratic_center_table(max: usize) -> Result<Vec<u64>> {
    divisor_inversion(max, |n| 1u64.checked_shl(n as u32 - 1), "quadratic centers")
}

pub fn quadratic_centers(n: usize) -> Result<u64> {
    assert!(n >= 1);
    Ok(quadratic_center_table(n)?[n])
}

/// `d_1..=d_max`, from `3^(p-1) = sum over q | p of d_q`.
pub fn curve_degree_table(max: usize) -> Result<Vec<u64>> {
    divisor_inversion(max, |p| 3u64.checked_pow(p as u32 - 1), "curve degree")
}

pub fn curve_degree(p: usize) -> Result<u64> {
    assert!(p >= 1);
    Ok(curve_degree_table(p)?[p])
}

/// Topological classes of basins counted per escape-region pair:
/// `Spines * TF`, doubled when `T > 1`.
fn basin_weight(inv: &TauInvariants) -> Result<u64> {
    let doubled = if inv.twist_period > 1 { 2 } else { 1 };
    inv.spines
        .checked_mul(inv.twist_factor)
        .and_then(|w| w.checked_mul(doubled))
        .ok_or(Error::Overflow("escape-region weight"))
}

/// Escape regions of the period-`p` curve carrying `ptau`.
pub fn ends(ptau: &PeriodicTau, inv: &TauInvariants, p: usize) -> Result<u64> {
    let k = ptau.period();
    if !p.is_multiple_of(k) {
        return Err(Error::NotDivisor { k, p });
    }
    quadratic_centers(p / k)?
        .checked_mul(basin_weight(inv)?)
        .ok_or(Error::Overflow("ends"))
}

/// Streaming aggregate of the taus of one period: everything a report needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PeriodTally {
    pub tau_count: u64,
    /// Sum of `Ends(tau, k)` over the taus of period `k` itself.
    pub ends_weight: u64,
    /// Sum of `m(tau) * Ends(tau, k)`.
    pub degree_weight: u64,
}

impl PeriodTally {
    pub fn add(&mut self, inv: &TauInvariants) -> Result<()> {
        let w = basin_weight(inv)?;
        let mw = w
            .checked_mul(inv.multiplicity)
            .ok_or(Error::Overflow("degree weight"))?;
        self.tau_count = self
            .tau_count
            .checked_add(1)
            .ok_or(Error::Overflow("tau count"))?;
        self.ends_weight = self
            .ends_weight
            .checked_add(w)
            .ok_or(Error::Overflow("ends"))?;
        self.degree_weight = self
            .degree_weight
            .checked_add(mw)
            .ok_or(Error::Overflow("degree weight"))?;
        Ok(())
    }

    pub fn merge(&mut self, other: &PeriodTally) -> Result<()> {
        let add = |a: u64, b: u64| a.checked_add(b).ok_or(Error::Overflow("tally"));
        self.tau_count = add(self.tau_count, other.tau_count)?;
        self.ends_weight = add(self.ends_weight, other.ends_weight)?;
        self.degree_weight = add(self.degree_weight, other.degree_weight)?;
        Ok(())
    }
}

/// Every tau, with invariants, for each divisor period that was enumerated.
#[derive(Clone, Debug, Default)]
pub struct TauInventory {
    lists: BTreeMap<usize, Vec<(PeriodicTau, TauInvariants)>>,
}

impl TauInventory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Enumerates every divisor period of `p`.
    pub fn for_period(p: usize) -> Result<Self> {
        let mut inventory = TauInventory::new();
        for k in divisors(p) {
            inventory.enumerate(k)?;
        }
        Ok(inventory)
    }

    /// Adds the taus of period `k` (no-op if already present).
    pub fn enumerate(&mut self, k: usize) -> Result<&[(PeriodicTau, TauInvariants)]> {
        if let std::collections::btree_map::Entry::Vacant(e) = self.lists.entry(k) {
            let mut list = Vec::new();
            periodic::enumerate_periodic(k, |t, inv| {
                list.push((t.clone(), *inv));
                Ok(())
            })?;
            list.sort_by(|a, b| a.0.cmp(&b.0));
            e.insert(list);
        }
        Ok(&self.lists[&k])
    }

    pub fn insert(&mut self, k: usize, mut list: Vec<(PeriodicTau, TauInvariants)>) {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        self.lists.insert(k, list);
    }

    pub fn get(&self, k: usize) -> Option<&[(PeriodicTau, TauInvariants)]> {
        self.lists.get(&k).map(Vec::as_slice)
    }

    pub fn tally(&self, k: usize) -> Result<PeriodTally> {
        let list = self.get(k).ok_or(Error::MissingDivisor(k))?;
        let mut tally = PeriodTally::default();
        for (_, inv) in list {
            tally.add(inv)?;
        }
        Ok(tally)
    }

    fn tallies(&self, p: usize) -> Result<BTreeMap<usize, PeriodTally>> {
        divisors(p)
            .into_iter()
            .map(|k| Ok((k, self.tally(k)?)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodReport {
    pub period: usize,
    pub tau_count: u64,
    pub central_ends: u64,
    /// `N_p`.
    pub num_ends: u64,
    /// `d_p`.
    pub degree: u64,
    pub euler_char: i64,
    /// `-chi / 3^(p-1)` rounded to three decimals.
    pub neg_ratio: f64,
    /// Sum of `m(tau) * Ends(tau, p)` over all divisor periods.
    pub degree_sum: u64,
    pub degree_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<EnumStats>,
}

impl PeriodReport {
    pub fn neg_ratio_text(&self) -> String {
        format_neg_ratio(self.euler_char, self.period)
    }
}

/// `-chi / 3^(p-1)` to three decimals, rounding half away from zero.
pub fn format_neg_ratio(chi: i64, p: usize) -> String {
    let milli = neg_ratio_milli(chi, p);
    let sign = if milli < 0 { "-" } else { "" };
    let m = milli.unsigned_abs();
    format!("{sign}{}.{:03}", m / 1000, m % 1000)
}

fn neg_ratio_milli(chi: i64, p: usize) -> i128 {
    let num = -(chi as i128) * 1000;
    let den = 3i128.pow(p as u32 - 1);
    let q = (2 * num.abs() + den) / (2 * den);
    q * num.signum()
}

/// Assembles a report from per-divisor tallies.
///
/// With `verify`, a failed degree identity is an error.
pub fn report_from_tallies(
    p: usize,
    tallies: &BTreeMap<usize, PeriodTally>,
    verify: bool,
) -> Result<PeriodReport> {
    let nu = quadratic_center_table(p)?;
    let degree = curve_degree(p)?;
    let overflow = || Error::Overflow("end count");
    let mut num_ends: u64 = 0;
    let mut degree_sum: u64 = 0;
    for k in divisors(p) {
        let tally = tallies.get(&k).ok_or(Error::MissingDivisor(k))?;
        let centers = nu[p / k];
        num_ends = centers
            .checked_mul(tally.ends_weight)
            .and_then(|e| e.checked_add(num_ends))
            .ok_or_else(overflow)?;
        degree_sum = centers
            .checked_mul(tally.degree_weight)
            .and_then(|e| e.checked_add(degree_sum))
            .ok_or_else(overflow)?;
    }
    let own = tallies[&p];
    let chi = (degree as i128) * (2 - p as i128) + num_ends as i128;
    let euler_char = i64::try_from(chi).map_err(|_| Error::Overflow("Euler characteristic"))?;
    let degree_verified = degree_sum == degree;
    if verify && !degree_verified {
        return Err(Error::DegreeMismatch {
            period: p,
            sum: degree_sum,
            degree,
        });
    }
    Ok(PeriodReport {
        period: p,
        tau_count: own.tau_count,
        central_ends: own.ends_weight,
        num_ends,
        degree,
        euler_char,
        neg_ratio: neg_ratio_milli(euler_char, p) as f64 / 1000.0,
        degree_sum,
        degree_verified,
        stats: None,
    })
}

/// Report for period `p`; fails if the degree identity does not hold.
pub fn period_report(p: usize, inventory: &TauInventory) -> Result<PeriodReport> {
    report_from_tallies(p, &inventory.tallies(p)?, true)
}

/// Whether the escape regions, counted with multiplicity, add up to `d_p`.
pub fn degree_check(p: usize, inventory: &TauInventory) -> Result<bool> {
    Ok(report_from_tallies(p, &inventory.tallies(p)?, false)?.degree_verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::invariants_of;

    #[test]
    fn quadratic_center_examples() {
        assert_eq!(quadratic_centers(1).unwrap(), 1);
        assert_eq!(quadratic_centers(2).unwrap(), 1);
        assert_eq!(quadratic_centers(3).unwrap(), 3);
        assert_eq!(quadratic_centers(4).unwrap(), 6);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(curve_degree(1).unwrap(), 1);
        assert_eq!(curve_degree(4).unwrap(), 24);
        assert_eq!(curve_degree(5).unwrap(), 80);
    }

    #[test]
    fn ends_examples() {
        let one = PeriodicTau::from_values(&[0], 1).unwrap();
        assert_eq!(ends(&one, &invariants_of(&one).unwrap(), 3).unwrap(), 3);
        let t = PeriodicTau::from_values(&[0, 1, 0], 3).unwrap();
        assert_eq!(ends(&t, &invariants_of(&t).unwrap(), 3).unwrap(), 2);
        let t = PeriodicTau::from_values(&[0, 0, 0], 3).unwrap();
        let inv = invariants_of(&t).unwrap();
        assert_eq!(ends(&t, &inv, 3).unwrap(), 1);
        assert!(matches!(
            ends(&t, &inv, 4),
            Err(Error::NotDivisor { k: 3, p: 4 })
        ));
    }

    #[test]
    fn small_period_reports() {
        let row = |p| {
            let r = period_report(p, &TauInventory::for_period(p).unwrap()).unwrap();
            (
                r.tau_count,
                r.central_ends,
                r.num_ends,
                r.degree,
                r.euler_char,
            )
        };
        assert_eq!(row(1), (1, 1, 1, 1, 2));
        assert_eq!(row(2), (1, 1, 2, 2, 2));
        assert_eq!(row(3), (3, 5, 8, 8, 0));
        assert_eq!(row(4), (6, 13, 20, 24, -28));
    }

    #[test]
    fn degree_identity_small() {
        for p in [1, 3, 5] {
            assert!(degree_check(p, &TauInventory::for_period(p).unwrap()).unwrap());
        }
        let r = period_report(5, &TauInventory::for_period(5).unwrap()).unwrap();
        assert_eq!(r.degree_sum, 80);
    }

    #[test]
    fn missing_divisor_is_an_error() {
        let mut inv = TauInventory::new();
        inv.enumerate(4).unwrap();
        assert!(matches!(
            period_report(4, &inv),
            Err(Error::MissingDivisor(1))
        ));
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(format_neg_ratio(2, 1), "-2.000");
        assert_eq!(format_neg_ratio(2, 2), "-0.667");
        assert_eq!(format_neg_ratio(0, 3), "0.000");
        assert_eq!(format_neg_ratio(-28, 4), "1.037");
        assert_eq!(format_neg_ratio(-505876, 11), "8.567");
        assert_eq!(format_neg_ratio(-1694848, 12), "9.567");
        // exact half: 1/2 * 1000 / 1 -> 0.5 thousandths rounds away from zero
        assert_eq!(neg_ratio_milli(-1, 1), 1000);
    }
}
