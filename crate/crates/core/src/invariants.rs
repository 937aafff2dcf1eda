//! Per-tau counts: pictographs (`Spines`), twist period, twist factor and
//! escape-region multiplicity.
//!
//! Everything here is exact. Spine factors are products and differences of
//! powers of two in checked `u64`; relative moduli are dyadic rationals.

use arrayvec::ArrayVec;
use serde::Serialize;

use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::periodic::PeriodicTau;
use crate::tau::{self, LevelSet, RawLadder, TauPrefix, MAX_LEN};

/// Ladder of a prefix together with its special orders, symmetry and the
/// successor values needed for the `delta` corrections.
pub struct SpineContext {
    ladder: RawLadder,
    /// `n_0, ..., n_k`.
    special_orders: ArrayVec<u8, MAX_LEN>,
    symmetry: usize,
    /// `tau(l_i' + 1)` for `1 <= i <= k`; slot 0 is unused.
    successors: ArrayVec<u8, MAX_LEN>,
}

impl SpineContext {
    pub fn new(prefix: &TauPrefix) -> Self {
        let values = prefix.as_bytes();
        let marked = tau::marked_levels(values, &tau::marker_set(values));
        SpineContext::from_parts(values, &marked)
    }

    /// `marked` must be the marked levels of `values`.
    pub(crate) fn from_parts(values: &[u8], marked: &LevelSet) -> Self {
        let ladder = RawLadder::of(values);
        let k = ladder.k();

        let mut special_orders = ArrayVec::new();
        for i in 0..k {
            special_orders.push(ladder.positions[i + 1] - ladder.positions[i]);
        }
        special_orders.push((ladder.orbit_len - ladder.positions[k] as usize - 1) as u8);

        let mut symmetry = 0;
        let mut x = ladder.levels[0] as usize;
        while !marked.contains(x) {
            x = tau::at(values, x);
            symmetry += 1;
        }

        let mut successors = ArrayVec::new();
        successors.push(0);
        for i in 1..=k {
            successors.push(values[ladder.primes[i] as usize]);
        }

        SpineContext {
            ladder,
            special_orders,
            symmetry,
            successors,
        }
    }

    pub fn k(&self) -> usize {
        self.ladder.k()
    }

    /// `l_0 > ... > l_k`.
    pub fn levels(&self) -> Vec<usize> {
        self.ladder.levels.iter().map(|&l| l as usize).collect()
    }

    /// `n_0, ..., n_k`.
    pub fn special_orders(&self) -> Vec<usize> {
        self.special_orders.iter().map(|&n| n as usize).collect()
    }

    /// `s`, the least `n` with `tau^n(l_0)` a marked level.
    pub fn symmetry(&self) -> usize {
        self.symmetry
    }

    /// `delta(i, j)` for `0 < i < j <= k + 1`, with `l_{k+1} = -1`.
    pub fn delta(&self, i: usize, j: usize) -> bool {
        assert!(0 < i && i < j && j <= self.k() + 1);
        let target = if j == self.k() + 1 {
            0
        } else {
            self.ladder.levels[j] as usize + 1
        };
        self.successors[i] as usize == target
    }

    pub(crate) fn ladder(&self) -> &RawLadder {
        &self.ladder
    }

    /// Spine factor of extension choice `i` (`tau(N+1) = l_i + 1`, or 0 for
    /// `i = k + 1`).
    pub fn factor(&self, i: usize) -> Result<u64> {
        if i == 0 {
            return Ok(1);
        }
        let overflow = || Error::Overflow("spine factor");
        let mut inner: u64 = 1;
        for j in (1..i).rev() {
            inner = pow2(self.special_orders[j] as u32)
                .and_then(|b| b.checked_mul(inner))
                .and_then(|b| b.checked_sub(u64::from(self.delta(j, i))))
                .ok_or_else(overflow)?;
        }
        let n0 = self.special_orders[0] as usize;
        debug_assert!(self.symmetry <= n0);
        pow2((n0 - self.symmetry) as u32)
            .and_then(|b| b.checked_mul(inner))
            .ok_or_else(overflow)
    }
}

#[inline]
fn pow2(e: u32) -> Option<u64> {
    1u64.checked_shl(e)
}

/// Spine factor for appending `next_value` to `prefix`.
pub fn spine_factor(prefix: &TauPrefix, next_value: usize) -> Result<u64> {
    let ctx = SpineContext::new(prefix);
    let choice = ctx
        .ladder
        .choice_of(next_value)
        .ok_or(Error::InadmissibleExtension {
            len: prefix.len(),
            value: next_value,
        })?;
    ctx.factor(choice)
}

fn spines_of_bytes(values: &[u8]) -> Result<u64> {
    let mut product: u64 = 1;
    for j in 2..=values.len() {
        let head = &values[..j - 1];
        let marked = tau::marked_levels(head, &tau::marker_set(head));
        let ctx = SpineContext::from_parts(head, &marked);
        let choice =
            ctx.ladder
                .choice_of(values[j - 1] as usize)
                .ok_or(Error::InadmissibleExtension {
                    len: j - 1,
                    value: values[j - 1] as usize,
                })?;
        product = product
            .checked_mul(ctx.factor(choice)?)
            .ok_or(Error::Overflow("spines"))?;
    }
    Ok(product)
}

/// Number of pictographs: the product of spine factors up to the minimal prefix.
pub fn spines(ptau: &PeriodicTau) -> Result<u64> {
    spines_of_bytes(ptau.prefix().as_bytes())
}

/// Same product, taken over the first `len >= n_0` values of the periodic tau.
pub fn spines_through(ptau: &PeriodicTau, len: usize) -> Result<u64> {
    spines_of_bytes(ptau.extended_to(len)?.as_bytes())
}

/// `mod(l)`: the sum of `2^-ord(i)` for `i = 1..=l`.
pub fn level_modulus(ptau: &PeriodicTau, l: usize) -> Result<DyadicRational> {
    let data = tau::marker_data(ptau.prefix());
    if l == 0 || !data.marked_levels.contains(l) {
        return Err(Error::NotMarkedLevel { level: l });
    }
    modulus(&data.order, l)
}

fn modulus(order: &[usize], l: usize) -> Result<DyadicRational> {
    (1..=l).try_fold(DyadicRational::ZERO, |acc, i| {
        acc.checked_add(DyadicRational::unit_fraction(order[i] as u32))
            .ok_or(Error::Overflow("level modulus"))
    })
}

struct Twist {
    marked_count: u32,
    period: u64,
}

fn twist(ptau: &PeriodicTau) -> Result<Twist> {
    let data = tau::marker_data(ptau.prefix());
    let mut exponent = 0;
    for l in data.marked_levels.iter().filter(|&l| l > 0) {
        exponent = exponent.max(modulus(&data.order, l)?.exponent());
    }
    Ok(Twist {
        marked_count: data.marked_levels.len() as u32 - 1,
        period: pow2(exponent).ok_or(Error::Overflow("twist period"))?,
    })
}

/// `T`: the largest reduced denominator of `mod(l)` over non-zero marked
/// levels, or 1 when there are none.
pub fn twist_period(ptau: &PeriodicTau) -> Result<u64> {
    Ok(twist(ptau)?.period)
}

fn factor_of(ptau: &PeriodicTau, twist: &Twist) -> Result<u64> {
    let full = pow2(twist.marked_count).ok_or(Error::Overflow("twist factor"))?;
    if full % twist.period != 0 {
        return Err(Error::NonIntegralTwistFactor {
            values: ptau.prefix().values(),
            marked: twist.marked_count,
            twist_period: twist.period,
        });
    }
    Ok(full / twist.period)
}

/// `TF = 2^L / T`, with `L` the number of non-zero marked levels.
pub fn twist_factor(ptau: &PeriodicTau) -> Result<u64> {
    factor_of(ptau, &twist(ptau)?)
}

fn multiplicity_of(twist_period: u64) -> u64 {
    if twist_period == 1 {
        1
    } else {
        assert!(
            twist_period.is_multiple_of(2),
            "odd twist period {twist_period}"
        );
        twist_period / 2
    }
}

/// Multiplicity of the escape regions carrying this tau.
pub fn multiplicity(ptau: &PeriodicTau) -> Result<u64> {
    Ok(multiplicity_of(twist_period(ptau)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TauInvariants {
    pub spines: u64,
    pub marked_count: u32,
    pub twist_period: u64,
    pub twist_factor: u64,
    pub multiplicity: u64,
}

pub fn invariants_of(ptau: &PeriodicTau) -> Result<TauInvariants> {
    invariants_with_spines(ptau, spines(ptau)?)
}

/// Bundles the twist data with an already-known spine count.
pub(crate) fn invariants_with_spines(ptau: &PeriodicTau, spines: u64) -> Result<TauInvariants> {
    let twist = twist(ptau)?;
    Ok(TauInvariants {
        spines,
        marked_count: twist.marked_count,
        twist_period: twist.period,
        twist_factor: factor_of(ptau, &twist)?,
        multiplicity: multiplicity_of(twist.period),
    })
}
