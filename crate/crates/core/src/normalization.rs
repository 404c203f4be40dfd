//! Canonical relabeling of depth sub-paths and the counting identities that
//! bound the normalized search.
//!
//! In an alternating instance with equal arrival times, a sub-path is
//! determined up to duality by the pattern of "same gate type as the previous
//! input" flags. The representative packs the inputs to the left, advancing
//! one position after a change of gate type and two positions otherwise, so
//! equivalent and dual sub-paths share a single memo entry.

use std::collections::BTreeSet;

use crate::aop::{AopSpec, GateKind};
use crate::error::{Error, Result};
use crate::subset::InputSubset;

/// Canonical representative of a sub-path together with the orientation
/// relating the two: `dual` means every gate type is exchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpSignature {
    pub subset: InputSubset,
    pub dual: bool,
}

/// `true` if the representative mapping applies to `spec`.
pub fn normalizable(spec: &AopSpec) -> bool {
    spec.is_alternating() && spec.has_uniform_arrival()
}

pub fn sp_representative(spec: &AopSpec, subset: InputSubset) -> Result<SpSignature> {
    if !normalizable(spec) {
        return Err(Error::InvalidState(
            "representatives need an alternating instance with equal arrival times".into(),
        ));
    }
    if subset.is_empty() || !subset.is_subset_of(spec.full()) {
        return Err(crate::error::invalid(format!("{subset:?} is not a sub-path of the instance")));
    }
    Ok(representative(subset))
}

/// Representative of `subset` in an alternating instance. Gate types of the
/// instance alternate, so two positions carry the same type iff their
/// distance is even.
#[inline]
pub(crate) fn representative(subset: InputSubset) -> SpSignature {
    let mut bits = subset.mask();
    let first = bits.trailing_zeros();
    let last = 63 - bits.leading_zeros();
    let mut out = 1u64;
    let mut pos = 0u32;
    let mut prev = first;
    bits &= bits - 1;
    while bits != 0 {
        let e = bits.trailing_zeros();
        bits &= bits - 1;
        pos += if e == last || (e - prev) & 1 == 1 { 1 } else { 2 };
        out |= 1u64 << pos;
        prev = e;
    }
    SpSignature { subset: InputSubset::from_mask(out), dual: first & 1 == 1 }
}

/// Checks the three structural properties every representative satisfies.
pub fn is_valid_signature(x: InputSubset) -> bool {
    let mask = x.mask();
    if mask & 1 == 0 {
        return false;
    }
    let top = 63 - mask.leading_zeros();
    if top > 0 && (mask >> (top - 1)) & 1 == 0 {
        return false;
    }
    // No two consecutive zeros below the top bit.
    let below_top = !mask & ((1u64 << top) - 1);
    below_top & (below_top >> 1) == 0
}

/// Distinct representatives over all non-empty subsets of the `m`-input
/// depth instance.
pub fn count_representatives(m: usize) -> Result<u64> {
    if m == 0 || m > 24 {
        return Err(Error::UnsupportedSize { m, max: 24 });
    }
    let mut seen = BTreeSet::new();
    for mask in 1u64..(1u64 << m) {
        seen.insert(representative(InputSubset::from_mask(mask)).subset);
    }
    Ok(seen.len() as u64)
}

/// Partitions `S°_1 ⊎ S°_2` of the same-gate set whose first part meets
/// every segment in a prefix, in the solver's enumeration order.
pub fn sp_conform_partitions(
    spec: &AopSpec,
    subset: InputSubset,
    kind: GateKind,
) -> Result<Vec<(InputSubset, InputSubset)>> {
    if !normalizable(spec) {
        return Err(Error::InvalidState("depth normalization needs equal arrival times".into()));
    }
    crate::solver::partitions(spec, subset, kind, true)
}

/// Fibonacci numbers with `F_1 = F_2 = 1`.
pub fn fib(n: u32) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Pairs that may appear in a `Q` string.
pub const Q1: [(u8, u8); 5] = [(0, 1), (1, 0), (1, 1), (2, 0), (2, 1)];

/// Whether pair `prev` may directly precede pair `cur`.
pub fn q_extends(prev: (u8, u8), cur: (u8, u8)) -> bool {
    match cur {
        (0, 1) => prev != (1, 0) && prev != (2, 0),
        (2, 0) | (2, 1) => prev != (1, 0),
        _ => true,
    }
}

/// Membership of a 0-1-2 string of length `2n` in `Q_n`.
pub fn is_in_q(s: &[u8]) -> bool {
    if s.is_empty() || s.len() % 2 == 1 {
        return false;
    }
    let pairs: Vec<(u8, u8)> = s.chunks(2).map(|c| (c[0], c[1])).collect();
    pairs.iter().all(|p| Q1.contains(p)) && pairs.windows(2).all(|w| q_extends(w[0], w[1]))
}

/// Membership in `R_n`: a `Q_i` string padded with `2(n - i)` zeros.
pub fn is_in_r(s: &[u8]) -> bool {
    let mut end = s.len();
    while end >= 2 && s[end - 2] == 0 && s[end - 1] == 0 {
        end -= 2;
    }
    is_in_q(&s[..end])
}

/// `|Q_n|` by enumerating every sequence of `n` admissible pairs.
pub fn count_q(n: u32) -> u64 {
    fn walk(left: u32, prev: Option<(u8, u8)>) -> u64 {
        if left == 0 {
            return 1;
        }
        Q1.iter()
            .filter(|&&cur| prev.is_none_or(|p| q_extends(p, cur)))
            .map(|&cur| walk(left - 1, Some(cur)))
            .sum()
    }
    if n == 0 {
        0
    } else {
        walk(n, None)
    }
}

/// `|R_n| = Σ_{i ≤ n} |Q_i|`.
pub fn count_r(n: u32) -> u64 {
    (1..=n).map(count_q).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> InputSubset {
        InputSubset::from_indices(ix.iter().copied())
    }

    #[test]
    fn representative_of_worked_example() {
        let spec = AopSpec::depth_instance(11).unwrap();
        let r = sp_representative(&spec, set(&[2, 5, 6, 8, 9, 10])).unwrap();
        assert_eq!(r.subset, set(&[0, 1, 2, 4, 5, 6]));
        assert!(!r.dual);
        let again = sp_representative(&spec, r.subset).unwrap();
        assert_eq!(again.subset, r.subset);
        assert!(sp_representative(&spec, set(&[1, 2])).unwrap().dual);
    }

    #[test]
    fn representative_rejects_non_depth_instances() {
        let spec = AopSpec::alternating(3, GateKind::And, vec![0, 1, 0]).unwrap();
        assert!(matches!(sp_representative(&spec, spec.full()), Err(Error::InvalidState(_))));
    }

    #[test]
    fn fibonacci_values() {
        assert_eq!(fib(2), 1);
        assert_eq!(fib(3), 2);
        assert_eq!(fib(6), 8);
        for n in 3..60 {
            assert_eq!(fib(n), fib(n - 1) + fib(n - 2));
        }
    }

    #[test]
    fn representative_counts_are_fibonacci() {
        assert_eq!(count_representatives(5).unwrap(), 8);
        assert_eq!(count_representatives(10).unwrap(), 89);
        for m in 1..=16 {
            assert_eq!(u128::from(count_representatives(m).unwrap()), fib(m as u32 + 1));
        }
    }

    #[test]
    fn representatives_are_exactly_the_valid_signatures() {
        for m in 1..=16usize {
            let mut reps = BTreeSet::new();
            for mask in 1u64..(1 << m) {
                let r = representative(InputSubset::from_mask(mask)).subset;
                assert!(is_valid_signature(r), "{r:?}");
                reps.insert(r);
            }
            let valid: BTreeSet<InputSubset> = (1u64..(1 << m))
                .map(InputSubset::from_mask)
                .filter(|&x| is_valid_signature(x))
                .collect();
            assert_eq!(reps, valid, "m = {m}");
        }
    }

    #[test]
    fn representative_preserves_gate_pattern() {
        let spec = AopSpec::depth_instance(14).unwrap();
        for mask in (1u64..(1 << 14)).step_by(7) {
            let s = InputSubset::from_mask(mask);
            let r = representative(s);
            let (orig, rep) = (spec.restrict(s).unwrap(), spec.restrict(r.subset).unwrap());
            let flipped: Vec<GateKind> = if r.dual {
                rep.gates().iter().map(|g| g.dual()).collect()
            } else {
                rep.gates().to_vec()
            };
            assert_eq!(orig.gates(), &flipped[..]);
        }
    }

    #[test]
    fn q_counts() {
        assert_eq!(count_q(1), 5);
        assert_eq!(count_q(2), 21);
        for n in 4..=8 {
            let (a, b, c) = (count_q(n - 1) as i64, count_q(n - 2) as i64, count_q(n - 3) as i64);
            assert_eq!(count_q(n) as i64, 5 * a - 4 * b + c);
        }
        assert_eq!(count_r(1), 5);
        assert_eq!(count_r(2), 26);
    }

    fn all_strings(len: usize) -> impl Iterator<Item = Vec<u8>> {
        (0..3u64.pow(len as u32)).map(move |mut x| {
            (0..len)
                .map(|_| {
                    let d = (x % 3) as u8;
                    x /= 3;
                    d
                })
                .collect()
        })
    }

    #[test]
    fn brute_force_membership_matches_counts() {
        for n in 1..=6u32 {
            let len = 2 * n as usize;
            let (mut q, mut r) = (0u64, 0u64);
            for s in all_strings(len) {
                q += u64::from(is_in_q(&s));
                r += u64::from(is_in_r(&s));
            }
            assert_eq!(q, count_q(n), "Q_{n}");
            assert_eq!(r, count_r(n), "R_{n}");
        }
    }
}
