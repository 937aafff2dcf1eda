//! Admissible tau-functions of finite length.
//!
//! A tau-function is stored 1-indexed in the mathematical sense: `tau(1)` is
//! the first value. Level 0 is never a domain point, it only appears as a
//! value and as a marked level.
//!
//! Admissibility is maintained incrementally: a prefix is admissible exactly
//! when each value was one of the legal extensions of the prefix before it.
//! The legal extensions are read off the "ladder" of markers met along the
//! orbit `N -> tau(N) -> ... -> 0`.

use std::fmt;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};

/// Longest prefix representable by [`TauPrefix`]; values are stored as bytes.
pub const MAX_LEN: usize = 255;

/// Fixed-capacity bit set over `0..256`, used for markers and marked levels.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LevelSet([u64; 4]);

impl LevelSet {
    pub const fn new() -> Self {
        LevelSet([0; 4])
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        self.0[x >> 6] |= 1 << (x & 63);
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < 256 && self.0[x >> 6] & (1 << (x & 63)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn max(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..256).filter(move |&x| self.contains(x))
    }
}

impl fmt::Debug for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for LevelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = LevelSet::new();
        for x in iter {
            set.insert(x);
        }
        set
    }
}

/// A finite admissible tau-function `tau(1..=N)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauPrefix {
    values: Vec<u8>,
}

impl TauPrefix {
    /// The length-1 prefix `(0)`.
    pub fn root() -> Self {
        TauPrefix { values: vec![0] }
    }

    /// Validates `values` as an admissible prefix.
    pub fn new(values: &[usize]) -> Result<Self> {
        if values.len() > MAX_LEN {
            return Err(Error::TooLong(values.len()));
        }
        if values.first() != Some(&0) {
            return Err(Error::Inadmissible {
                values: values.to_vec(),
            });
        }
        let mut prefix = TauPrefix::root();
        for &v in &values[1..] {
            prefix.push(v).map_err(|_| Error::Inadmissible {
                values: values.to_vec(),
            })?;
        }
        Ok(prefix)
    }

    pub(crate) fn from_bytes_unchecked(values: &[u8]) -> Self {
        debug_assert!(is_admissible_bytes(values));
        TauPrefix {
            values: values.to_vec(),
        }
    }

    /// Appends `value` if it is a legal extension.
    pub fn push(&mut self, value: usize) -> Result<()> {
        if self.values.len() >= MAX_LEN {
            return Err(Error::TooLong(self.values.len() + 1));
        }
        if !RawLadder::of(&self.values).admits(value) {
            return Err(Error::InadmissibleExtension {
                len: self.len(),
                value,
            });
        }
        self.values.push(value as u8);
        Ok(())
    }

    pub fn extended(&self, value: usize) -> Result<Self> {
        let mut next = self.clone();
        next.push(value)?;
        Ok(next)
    }

    /// Length `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `tau(n)` for `1 <= n <= N`.
    ///
    /// Panics when `n` is out of range; see [`TauPrefix::get`].
    #[inline]
    pub fn tau(&self, n: usize) -> usize {
        self.values[n - 1] as usize
    }

    pub fn get(&self, n: usize) -> Option<usize> {
        n.checked_sub(1)
            .and_then(|i| self.values.get(i))
            .map(|&v| v as usize)
    }

    /// `tau(N)`.
    pub fn last(&self) -> usize {
        *self.values.last().expect("prefixes are nonempty") as usize
    }

    pub fn values(&self) -> Vec<usize> {
        self.values.iter().map(|&v| v as usize).collect()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.values
    }

    pub fn truncated(&self, len: usize) -> Self {
        assert!((1..=self.len()).contains(&len));
        TauPrefix {
            values: self.values[..len].to_vec(),
        }
    }

    /// `m` is a marker when `tau(m+1) < tau(m) + 1`, for `1 <= m < N`.
    pub fn is_marker(&self, m: usize) -> bool {
        is_marker(&self.values, m)
    }
}

impl fmt::Display for TauPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TauPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TauPrefix({self})")
    }
}

#[inline]
pub(crate) fn at(values: &[u8], n: usize) -> usize {
    values[n - 1] as usize
}

#[inline]
pub(crate) fn is_marker(values: &[u8], m: usize) -> bool {
    m >= 1 && m < values.len() && at(values, m + 1) <= at(values, m)
}

pub(crate) fn marker_set(values: &[u8]) -> LevelSet {
    (1..values.len())
        .filter(|&m| is_marker(values, m))
        .collect()
}

/// Level 0 together with every `tau^j(m)`, `j > 0`, over the markers `m`.
pub(crate) fn marked_levels(values: &[u8], markers: &LevelSet) -> LevelSet {
    let mut levels = LevelSet::new();
    levels.insert(0);
    for m in markers.iter() {
        let mut x = m;
        while x > 0 {
            x = at(values, x);
            levels.insert(x);
        }
    }
    levels
}

/// Orbit walk of the last index, with the markers met along the way.
///
/// Index 0 of each list describes `l_0' = N` itself.
pub(crate) struct RawLadder {
    /// `l_i = tau(l_i')`, strictly decreasing.
    pub levels: ArrayVec<u8, MAX_LEN>,
    /// `l_i'`, with `l_0' = N`.
    pub primes: ArrayVec<u8, MAX_LEN>,
    /// Position of `l_i'` in the orbit (`orbit[pos] = l_i'`, `orbit[0] = N`).
    pub positions: ArrayVec<u8, MAX_LEN>,
    /// `ord(N)`: the orbit reaches 0 at this position.
    pub orbit_len: usize,
}

impl RawLadder {
    pub fn of(values: &[u8]) -> Self {
        let n = values.len();
        let mut ladder = RawLadder {
            levels: ArrayVec::new(),
            primes: ArrayVec::new(),
            positions: ArrayVec::new(),
            orbit_len: 0,
        };
        ladder.levels.push(at(values, n) as u8);
        ladder.primes.push(n as u8);
        ladder.positions.push(0);
        let mut x = at(values, n);
        let mut pos = 1;
        while x > 0 {
            if is_marker(values, x) {
                ladder.levels.push(at(values, x) as u8);
                ladder.primes.push(x as u8);
                ladder.positions.push(pos as u8);
            }
            x = at(values, x);
            pos += 1;
        }
        ladder.orbit_len = pos;
        ladder
    }

    /// Number of markers on the orbit.
    #[inline]
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    #[inline]
    pub fn zero_allowed(&self) -> bool {
        self.k() == 0 || self.levels[self.k()] > 0
    }

    /// Count of legal extensions; choice `i <= k` is `l_i + 1`, choice `k+1` is 0.
    #[inline]
    pub fn choices(&self) -> usize {
        self.levels.len() + usize::from(self.zero_allowed())
    }

    #[inline]
    pub fn choice_value(&self, i: usize) -> usize {
        if i <= self.k() {
            self.levels[i] as usize + 1
        } else {
            0
        }
    }

    pub fn choice_of(&self, value: usize) -> Option<usize> {
        if value == 0 {
            return self.zero_allowed().then(|| self.k() + 1);
        }
        self.levels.iter().position(|&l| l as usize + 1 == value)
    }

    pub fn admits(&self, value: usize) -> bool {
        self.choice_of(value).is_some()
    }
}

pub(crate) fn is_admissible_bytes(values: &[u8]) -> bool {
    if values.first() != Some(&0) {
        return false;
    }
    (1..values.len()).all(|n| RawLadder::of(&values[..n]).admits(values[n] as usize))
}

/// Legal one-step extensions of a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionLadder {
    /// `l_0 > l_1 > ... > l_k`.
    pub ladder: Vec<usize>,
    /// `l_1' > ... > l_k'`, the markers on the orbit of `N`.
    pub marker_levels: Vec<usize>,
    pub zero_allowed: bool,
}

impl ExtensionLadder {
    pub fn k(&self) -> usize {
        self.marker_levels.len()
    }

    /// Values `l_i + 1`, then 0 when allowed.
    pub fn extensions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.ladder.iter().map(|l| l + 1).collect();
        if self.zero_allowed {
            out.push(0);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkerData {
    pub markers: LevelSet,
    pub marked_levels: LevelSet,
    /// `order[n] = ord(n)` for `0 <= n <= N`; `order[0] = 0`.
    pub order: Vec<usize>,
}

/// True iff `seq` is an admissible tau-function.
///
/// Sequences longer than [`MAX_LEN`] are reported as not admissible.
pub fn is_admissible(seq: &[usize]) -> bool {
    if seq.is_empty() || seq.len() > MAX_LEN || seq[0] != 0 {
        return false;
    }
    let mut bytes = Vec::with_capacity(seq.len());
    bytes.push(0u8);
    for &v in &seq[1..] {
        if !RawLadder::of(&bytes).admits(v) {
            return false;
        }
        bytes.push(v as u8);
    }
    true
}

/// `ord(n)`: the number of iterations taking `n` to 0.
pub fn order(tau: &TauPrefix, n: usize) -> Result<usize> {
    if n == 0 || n > tau.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: tau.len(),
        });
    }
    let mut x = n;
    let mut steps = 0;
    while x > 0 {
        x = tau.tau(x);
        steps += 1;
    }
    Ok(steps)
}

pub fn marker_data(tau: &TauPrefix) -> MarkerData {
    let values = tau.as_bytes();
    let markers = marker_set(values);
    let marked_levels = marked_levels(values, &markers);
    let mut order = vec![0; tau.len() + 1];
    for n in 1..=tau.len() {
        order[n] = order[tau.tau(n)] + 1;
    }
    MarkerData {
        markers,
        marked_levels,
        order,
    }
}

pub fn extension_ladder(tau: &TauPrefix) -> ExtensionLadder {
    let raw = RawLadder::of(tau.as_bytes());
    ExtensionLadder {
        ladder: raw.levels.iter().map(|&l| l as usize).collect(),
        marker_levels: raw.primes[1..].iter().map(|&m| m as usize).collect(),
        zero_allowed: raw.zero_allowed(),
    }
}

/// Every `v` such that appending `v` keeps the prefix admissible, largest first.
pub fn admissible_extensions(tau: &TauPrefix) -> Vec<usize> {
    extension_ladder(tau).extensions()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(values: &[usize]) -> TauPrefix {
        TauPrefix::new(values).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&[0]));
        assert!(is_admissible(&[0, 1, 2, 3]));
        assert!(!is_admissible(&[0, 2]));
        // rule (D) at n = 2 already rules out tau(3) = 1
        assert!(!is_admissible(&[0, 1, 1]));
        assert!(!is_admissible(&[0, 1, 1, 1]));
        assert!(is_admissible(&[0, 1, 0, 1]));
        assert!(!is_admissible(&[]));
        assert!(!is_admissible(&[1]));
    }

    #[test]
    fn order_examples() {
        assert_eq!(order(&t(&[0, 1, 2]), 3).unwrap(), 3);
        assert_eq!(order(&t(&[0, 0, 1]), 3).unwrap(), 2);
        assert_eq!(order(&t(&[0]), 1).unwrap(), 1);
        assert!(matches!(
            order(&t(&[0]), 2),
            Err(Error::IndexOutOfRange { index: 2, len: 1 })
        ));
        assert!(order(&t(&[0]), 0).is_err());
    }

    #[test]
    fn marker_data_examples() {
        let d = marker_data(&t(&[0, 1, 2, 3]));
        assert!(d.markers.is_empty());
        assert_eq!(d.marked_levels.iter().collect::<Vec<_>>(), vec![0]);

        let d = marker_data(&t(&[0, 1, 0]));
        assert_eq!(d.markers.iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(d.marked_levels.iter().collect::<Vec<_>>(), vec![0, 1]);

        let d = marker_data(&t(&[0, 0, 1, 1]));
        assert_eq!(d.markers.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(d.marked_levels.iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(d.order, vec![0, 1, 1, 2, 2]);
    }

    #[test]
    fn ladder_examples() {
        let l = extension_ladder(&t(&[0, 1]));
        assert_eq!(l.ladder, vec![1]);
        assert_eq!(l.k(), 0);
        assert!(l.zero_allowed);
        assert_eq!(l.extensions(), vec![2, 0]);

        let l = extension_ladder(&t(&[0, 0, 1]));
        assert_eq!(l.ladder, vec![1, 0]);
        assert_eq!(l.marker_levels, vec![1]);
        assert!(!l.zero_allowed);
        assert_eq!(l.extensions(), vec![2, 1]);

        let l = extension_ladder(&t(&[0]));
        assert_eq!(l.ladder, vec![0]);
        assert!(l.zero_allowed);
        assert_eq!(l.extensions(), vec![1, 0]);
    }

    #[test]
    fn extension_examples() {
        assert_eq!(admissible_extensions(&t(&[0, 1, 2])), vec![3, 0]);
        assert_eq!(admissible_extensions(&t(&[0, 0])), vec![1, 0]);
        assert_eq!(admissible_extensions(&t(&[0, 0, 1])), vec![2, 1]);
    }

    #[test]
    fn push_rejects_illegal_values() {
        let mut p = t(&[0, 1]);
        assert!(matches!(
            p.push(1),
            Err(Error::InadmissibleExtension { len: 2, value: 1 })
        ));
        p.push(0).unwrap();
        assert_eq!(p.to_string(), "0,1,0");
    }

    #[test]
    fn level_set_basics() {
        let s: LevelSet = [0, 5, 64, 200].into_iter().collect();
        assert_eq!(s.len(), 4);
        assert_eq!(s.max(), Some(200));
        assert!(s.contains(64) && !s.contains(63) && !s.contains(300));
        assert_eq!(LevelSet::new().max(), None);
    }
}
