//! Scalar types used for arrival times and delays.
//!
//! The exact solver works on natural-number arrival times, but circuit
//! metrics and the fractional extension are evaluated over any [`Time`]
//! scalar: plain integers, exact rationals, or floats for quick inspection.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::Num;

/// A scalar usable as an arrival time or delay. Every gate adds one unit.
pub trait Time: Num + Copy + PartialOrd + Debug {
    fn from_u32(v: u32) -> Self;

    /// Larger of two values; `PartialOrd` only, so NaN inputs keep `self`.
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Time for u32 {
    fn from_u32(v: u32) -> Self {
        v
    }
}

impl Time for u64 {
    fn from_u32(v: u32) -> Self {
        u64::from(v)
    }
}

impl Time for i64 {
    fn from_u32(v: u32) -> Self {
        i64::from(v)
    }
}

impl Time for f32 {
    fn from_u32(v: u32) -> Self {
        v as f32
    }
}

impl Time for f64 {
    fn from_u32(v: u32) -> Self {
        f64::from(v)
    }
}

impl Time for Ratio<i64> {
    fn from_u32(v: u32) -> Self {
        Ratio::from_integer(i64::from(v))
    }
}

/// `⌈log2 Σ 2^e⌉` over the given exponents, computed exactly.
///
/// Returns `None` for an empty sequence.
pub fn ceil_log2_sum_pow2(exponents: impl IntoIterator<Item = u32>) -> Option<u32> {
    let exps: Vec<u32> = exponents.into_iter().collect();
    let lo = *exps.iter().min()?;
    let hi = *exps.iter().max()?;
    // At most 64 terms of 2^57 still fit into a u64 after shifting by `lo`.
    if hi - lo <= 57 && exps.len() <= 64 {
        let w: u64 = exps.iter().map(|&e| 1u64 << (e - lo)).sum();
        return Some(lo + ceil_log2_u64(w));
    }
    // Sparse binary counter with carries for wide exponent ranges.
    let mut counts: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    for e in exps {
        *counts.entry(e).or_default() += 1;
    }
    let (mut ones, mut top) = (0usize, 0u32);
    let (mut e, mut carry) = (lo, 0u64);
    loop {
        let c = carry + counts.get(&e).copied().unwrap_or(0);
        if c & 1 == 1 {
            ones += 1;
            top = e;
        }
        carry = c >> 1;
        if carry > 0 {
            e += 1;
        } else {
            match counts.range(e + 1..).next() {
                Some((&k, _)) => e = k,
                None => break,
            }
        }
    }
    Some(if ones > 1 { top + 1 } else { top })
}

/// `⌈log2 w⌉` for `w ≥ 1`.
pub fn ceil_log2_u64(w: u64) -> u32 {
    debug_assert!(w > 0);
    if w <= 1 {
        0
    } else {
        64 - (w - 1).leading_zeros()
    }
}
