//! Closed forms for the period-`p` taus whose minimal prefix is long:
//! `n0 = 2p-2`, `2p-3` or `2p-4`. Every other period-`p` tau already has
//! `tau(n) = n - p` from `n = 2p-5` on.

use crate::error::{Error, Result};

use super::PeriodicTau;

/// `a, a+1, ..., b`; empty when `b < a`.
fn ramp(a: usize, b: usize) -> impl Iterator<Item = usize> {
    a..b + 1
}

macro_rules! seq {
    ($($part:expr),* $(,)?) => {{
        let mut v: Vec<usize> = Vec::new();
        $( v.extend($part); )*
        v
    }};
}

/// The unique tau with `n0 = 2p-2` (`p >= 3`).
fn longest(p: usize) -> Vec<Vec<usize>> {
    vec![seq![ramp(0, p - 3), ramp(0, p - 2), [p - 2]]]
}

/// Taus with `n0 = 2p-3` (`p >= 4`).
fn second(p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![
        seq![ramp(0, p - 4), [0], ramp(0, p - 3), [p - 3]],
        seq![ramp(0, p - 4), ramp(0, p - 3), [p - 3, p - 3]],
    ];
    if p % 2 == 1 {
        out.push(seq![[0], ramp(0, p - 4), ramp(1, p - 2), [p - 3]]);
    }
    out
}

/// Taus with `n0 = 2p-4` (`p >= 5`).
fn third(p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![
        seq![ramp(0, p - 5), ramp(0, p - 4), [p - 4, p - 4, p - 4]],
        seq![ramp(0, p - 5), [0], ramp(0, p - 4), [p - 4, p - 4]],
        seq![ramp(0, p - 5), [0, 0], ramp(0, p - 4), [p - 4]],
    ];
    // at p = 5 this would put 0 right after (0,0,1), which is not admissible
    if p >= 6 {
        out.push(seq![ramp(0, p - 5), [0, 1], ramp(0, p - 4), [p - 4]]);
    }
    if p % 2 == 1 {
        out.push(seq![[0], ramp(0, p - 5), ramp(0, p - 3), [p - 4]]);
    } else {
        out.push(seq![[0], ramp(0, p - 5), [1], ramp(1, p - 3), [p - 4]]);
    }
    if (p - 1).is_multiple_of(3) {
        out.push(seq![[0, 1], ramp(0, p - 5), ramp(2, p - 2), [p - 4]]);
    }
    if (p - 2).is_multiple_of(3) {
        out.push(seq![[0, 0, 1], ramp(1, p - 5), ramp(2, p - 2), [p - 4]]);
    }
    out
}

/// Every period-`p` tau with `tau(n) != n - p` for some `n >= 2p-5`, sorted.
pub fn exception_families(p: usize) -> Result<Vec<PeriodicTau>> {
    if p < 5 {
        return Err(Error::UnsupportedPeriod(p));
    }
    let mut out = longest(p)
        .into_iter()
        .chain(second(p))
        .chain(third(p))
        .map(|v| PeriodicTau::from_values(&v, p))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(p: usize) -> Vec<Vec<usize>> {
        exception_families(p)
            .unwrap()
            .iter()
            .map(|t| t.prefix().values())
            .collect()
    }

    #[test]
    fn period_five() {
        let v = values(5);
        assert!(v.contains(&vec![0, 1, 2, 0, 1, 2, 3, 3]));
        assert!(v.contains(&vec![0, 1, 0, 1, 2, 2, 2]));
        assert_eq!(v.len(), 9);
    }

    #[test]
    fn counts_follow_residues() {
        // 1 + (2 or 3) + (5 + [3 | p-1] + [3 | p-2])
        assert_eq!(values(6).len(), 1 + 2 + 5);
        assert_eq!(values(7).len(), 1 + 3 + 6);
        assert_eq!(values(8).len(), 1 + 2 + 6);
        assert_eq!(values(10).len(), 1 + 2 + 6);
    }

    #[test]
    fn small_periods_rejected() {
        assert!(matches!(
            exception_families(4),
            Err(Error::UnsupportedPeriod(4))
        ));
    }
}
