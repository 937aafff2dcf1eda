//! Reference checkers that deliberately avoid the ladder machinery.
//!
//! [`satisfies_rules`] tests the five admissibility rules one index at a
//! time, exactly as written, and [`all_admissible`] enumerates every
//! admissible sequence of a given length by filtering candidates through it.
//! Both are slow and exist to cross-validate [`crate::tau`] and
//! [`crate::periodic`].

/// `tau^j(n)` on a 1-indexed slice, with `tau^j(0)` undefined.
fn iterate(seq: &[usize], n: usize, j: usize) -> usize {
    let mut x = n;
    for _ in 0..j {
        x = seq[x - 1];
    }
    x
}

/// `ord(n)`, assuming `seq[..n]` already satisfies `tau(m) < m`.
fn ord(seq: &[usize], n: usize) -> usize {
    let mut x = n;
    let mut steps = 0;
    while x != 0 {
        x = seq[x - 1];
        steps += 1;
    }
    steps
}

/// Rules (B)-(E) constraining `tau(n+1)` given `tau(1..=n)`.
pub fn rules_hold_at(seq: &[usize], n: usize) -> bool {
    let next = seq[n];
    let at = |m: usize| seq[m - 1];
    // (B)
    if next > at(n) + 1 {
        return false;
    }
    let order = ord(seq, n);
    for k in 1..order {
        let tk = iterate(seq, n, k);
        let tk1 = at(tk);
        if next < tk + 1 {
            // (C)
            if next > tk1 + 1 {
                return false;
            }
            // (D)
            if at(tk + 1) == tk1 + 1 && next > tk1 {
                return false;
            }
        }
    }
    // (E)
    if order > 1 {
        let last = iterate(seq, n, order - 1);
        if ord(seq, last + 1) == 1 && next == 0 {
            return false;
        }
    }
    true
}

/// Literal check of rules (A)-(E) at every index.
pub fn satisfies_rules(seq: &[usize]) -> bool {
    if seq.first() != Some(&0) {
        return false;
    }
    (1..seq.len()).all(|n| rules_hold_at(seq, n))
}

/// Every admissible sequence of length `len`, in lexicographic order.
pub fn all_admissible(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut seq = vec![0];
    grow(&mut seq, len, &mut out);
    out
}

fn grow(seq: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
    if seq.len() == len {
        out.push(seq.clone());
        return;
    }
    let n = seq.len();
    for v in 0..=seq[n - 1] + 1 {
        seq.push(v);
        if rules_hold_at(seq, n) {
            grow(seq, len, out);
        }
        seq.pop();
    }
}

/// Period-`p` tau-functions found by brute force: all admissible sequences of
/// length `2p-2` ending in `p-2`, each cut back to its minimal prefix.
pub fn periodic_by_brute_force(p: usize) -> Vec<Vec<usize>> {
    assert!(p >= 2);
    let len = 2 * p - 2;
    let mut found: Vec<Vec<usize>> = all_admissible(len)
        .into_iter()
        .filter(|seq| seq[len - 1] == p - 2)
        .map(|seq| {
            let n0 = (1..=len).find(|&n| seq[n - 1] + p == n).unwrap();
            seq[..n0].to_vec()
        })
        .collect();
    found.sort();
    found.dedup();
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_rules_on_small_cases() {
        assert!(satisfies_rules(&[0]));
        assert!(satisfies_rules(&[0, 1, 2, 3]));
        assert!(!satisfies_rules(&[0, 2]));
        assert!(!satisfies_rules(&[0, 1, 1, 1]));
        assert!(!satisfies_rules(&[0, 0, 1, 0]));
        assert!(satisfies_rules(&[0, 0, 1, 1]));
        assert!(!satisfies_rules(&[1]));
    }

    #[test]
    fn brute_force_period_three() {
        assert_eq!(
            periodic_by_brute_force(3),
            vec![vec![0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0]]
        );
    }

    #[test]
    fn brute_force_length_counts() {
        assert_eq!(all_admissible(8).len(), 144);
    }
}
