use std::collections::BTreeSet;

use cubic_euler::oracle;
use cubic_euler::periodic::periodic_taus;
use cubic_euler::tau::{self, TauPrefix};

/// All sequences with tau(1) = 0 and tau(n+1) <= tau(n) + 1 of length `len`.
fn rule_b_sequences(len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                let top = *s.last().unwrap() + 1;
                (0..=top).map(move |v| {
                    let mut t = s.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

#[test]
fn ladder_agrees_with_literal_rules_up_to_length_12() {
    for len in 1..=12 {
        let mut admissible = 0;
        for seq in rule_b_sequences(len) {
            let lit = oracle::satisfies_rules(&seq);
            assert_eq!(tau::is_admissible(&seq), lit, "{seq:?}");
            admissible += lit as usize;
        }
        assert_eq!(admissible, oracle::all_admissible(len).len());
    }
}

#[test]
fn extensions_agree_with_literal_rules() {
    for len in 1..=9 {
        for seq in oracle::all_admissible(len) {
            let prefix = TauPrefix::new(&seq).unwrap();
            let mut got = tau::admissible_extensions(&prefix);
            got.sort();
            let want: Vec<usize> = (0..=seq[len - 1] + 1)
                .filter(|&v| {
                    let mut s = seq.clone();
                    s.push(v);
                    oracle::rules_hold_at(&s, len)
                })
                .collect();
            assert_eq!(got, want, "{seq:?}");
        }
    }
}

#[test]
fn pruned_search_matches_brute_force() {
    for p in 2..=8 {
        let brute: BTreeSet<Vec<usize>> = oracle::periodic_by_brute_force(p).into_iter().collect();
        let pruned: BTreeSet<Vec<usize>> = periodic_taus(p)
            .unwrap()
            .iter()
            .map(|t| t.prefix().values())
            .collect();
        assert_eq!(pruned, brute, "period {p}");
    }
}

#[test]
fn length_eight_count() {
    assert_eq!(oracle::all_admissible(8).len(), 144);
}
