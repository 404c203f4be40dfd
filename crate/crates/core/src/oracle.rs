//! Independent reference engines for testing the solver.
//!
//! None of these share code with the solver's search: the truth-table search
//! ranges over all monotone circuits, and the subset tables enumerate every
//! partition without any pruning.

use rustc_hash::FxHashMap;

use crate::aop::{AopSpec, GateKind};
use crate::circuit::standard_circuit;
use crate::error::{Error, Result};
use crate::solver::SolveStats;
use crate::Delay;

/// Largest width handled by the truth-table search.
pub const TRUTH_TABLE_LIMIT: usize = 5;
/// Largest width handled by the unpruned subset tables.
pub const SUBSET_TABLE_LIMIT: usize = 14;

/// Optimum delays of monotone functions of up to five variables under fixed
/// arrival times, computed level by level over truth tables.
pub struct MonotoneOracle {
    m: usize,
    mask: u32,
    delay: FxHashMap<u32, Delay>,
    /// Functions by delay.
    levels: Vec<Vec<u32>>,
    arrival: Vec<u32>,
}

impl MonotoneOracle {
    pub fn new(arrival: &[u32]) -> Result<Self> {
        let m = arrival.len();
        if m == 0 || m > TRUTH_TABLE_LIMIT {
            return Err(Error::UnsupportedSize { m, max: TRUTH_TABLE_LIMIT });
        }
        let mask = if m == 5 { u32::MAX } else { (1u32 << (1u32 << m)) - 1 };
        Ok(MonotoneOracle {
            m,
            mask,
            delay: FxHashMap::default(),
            levels: Vec::new(),
            arrival: arrival.to_vec(),
        })
    }

    /// Truth table of `t_i`; bit `x` is the value at assignment `x`.
    pub fn variable(&self, i: usize) -> u32 {
        (0..(1u32 << self.m)).filter(|x| (x >> i) & 1 == 1).fold(0, |acc, x| acc | (1 << x))
    }

    /// Optimum delay of the function with truth table `target`, or `None`
    /// if it is not reachable within `limit`.
    pub fn delay_of(&mut self, target: u32, limit: Delay) -> Option<Delay> {
        let target = target & self.mask;
        loop {
            if let Some(&d) = self.delay.get(&target) {
                return Some(d);
            }
            if self.levels.len() as Delay > limit {
                return None;
            }
            self.expand();
        }
    }

    /// Adds every function of delay exactly `levels.len()`.
    fn expand(&mut self) {
        let level = self.levels.len() as Delay;
        let mut fresh = Vec::new();
        for i in 0..self.m {
            let v = self.variable(i);
            if self.arrival[i] == level && !self.delay.contains_key(&v) {
                self.delay.insert(v, level);
                fresh.push(v);
            }
        }
        if level > 0 {
            let prev = &self.levels[level as usize - 1];
            let all: Vec<u32> = self.levels.iter().flatten().copied().collect();
            for &f in prev {
                for &g in &all {
                    for h in [f & g, f | g] {
                        if let std::collections::hash_map::Entry::Vacant(e) = self.delay.entry(h) {
                            e.insert(level);
                            fresh.push(h);
                        }
                    }
                }
            }
        }
        self.levels.push(fresh);
    }
}

/// Optimum delay of `spec` over all circuits in the {AND2, OR2} basis.
pub fn monotone_optimum_delay(spec: &AopSpec) -> Result<Delay> {
    let mut oracle = MonotoneOracle::new(spec.arrival())?;
    let target = standard_circuit(spec).truth_table()?[0] as u32;
    let limit = standard_circuit(spec).delay(spec.arrival())?;
    Ok(oracle.delay_of(target, limit).expect("the standard circuit bounds the search"))
}

/// Optimum delay and minimum strongly-optimum formula size of every
/// sub-path, from the recurrence over all partitions.
pub struct SubsetTable {
    m: usize,
    delay: Vec<Delay>,
    size: Vec<u32>,
    partitions: u64,
}

impl SubsetTable {
    pub fn new(spec: &AopSpec) -> Result<Self> {
        let m = spec.m();
        if m > SUBSET_TABLE_LIMIT {
            return Err(Error::UnsupportedSize { m, max: SUBSET_TABLE_LIMIT });
        }
        let n = 1usize << m;
        let mut delay = vec![Delay::MAX; n];
        let mut size = vec![u32::MAX; n];
        let mut partitions = 0u64;
        let gates = spec.gates();
        for set in 1..n {
            if set.count_ones() == 1 {
                delay[set] = spec.arrival()[set.trailing_zeros() as usize];
                size[set] = 0;
                continue;
            }
            let last = usize::BITS - 1 - set.leading_zeros();
            let last_bit = 1usize << last;
            for kind in [GateKind::And, GateKind::Or] {
                let mut same = last_bit;
                for (i, &g) in gates.iter().enumerate().take(last as usize) {
                    if set >> i & 1 == 1 && g == kind {
                        same |= 1 << i;
                    }
                }
                let diff = set & !same;
                let free = same & !last_bit;
                // Every non-empty first part drawn from `free`.
                let mut s1 = free;
                while s1 != 0 {
                    partitions += 1;
                    let top = usize::BITS - 1 - s1.leading_zeros();
                    let i1 = s1 | (diff & ((1usize << top) - 1));
                    let i2 = (same & !s1) | diff;
                    let d = 1 + delay[i1].max(delay[i2]);
                    let s = size[i1] + size[i2] + 1;
                    if (d, s) < (delay[set], size[set]) {
                        delay[set] = d;
                        size[set] = s;
                    }
                    s1 = (s1 - 1) & free;
                }
            }
        }
        Ok(SubsetTable { m, delay, size, partitions })
    }

    pub fn delay(&self) -> Delay {
        self.delay[(1 << self.m) - 1]
    }

    pub fn size(&self) -> u32 {
        self.size[(1 << self.m) - 1]
    }

    pub fn delay_of(&self, mask: u64) -> Delay {
        self.delay[mask as usize]
    }
}

/// Minimum formula size among strongly delay-optimum circuits for `spec`.
pub fn strongly_optimum_size(spec: &AopSpec) -> Result<u32> {
    Ok(SubsetTable::new(spec)?.size())
}

/// Search effort of the unpruned recurrence: every sub-path is an entry, and
/// every partition of every same-gate set is considered once.
pub fn recount_scenario1(spec: &AopSpec) -> Result<SolveStats> {
    let t = SubsetTable::new(spec)?;
    let m = spec.m() as u64;
    Ok(SolveStats {
        entries: (1u64 << m) - 1 - m,
        partitions: t.partitions,
        memo_entries: (1u64 << m) - 1,
        elapsed: std::time::Duration::ZERO,
    })
}
