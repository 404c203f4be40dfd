//! Exact delay optimization by dynamic programming over sub-paths.
//!
//! A sub-path with at least two inputs is realized optimally by a top gate of
//! some kind `∘` whose operands realize two special sub-paths obtained from a
//! partition `S°_1 ⊎ S°_2` of its same-gate inputs (the last input always in
//! `S°_2`). The solver memoizes one [`MemoEntry`] per sub-path and searches
//! partitions under a delay bound with the pruning techniques selected in
//! [`SolveOptions`].

use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::aop::{AopSpec, GateKind};
use crate::bounds::{condense_subset, drop_one_subset, BoundTables};
use crate::circuit::{find_counterexample_within, standard_circuit, Circuit, CircuitBuilder, NodeRef};
use crate::error::{invalid, Error, Result};
use crate::normalization::{normalizable, representative};
use crate::subset::{InputSubset, MAX_INPUTS};
use crate::Delay;

/// Bound meaning "no cap".
const UNBOUNDED: Delay = Delay::MAX / 4;

/// Search configuration. The presets of [`SolveOptions::scenario`] enable the
/// speedups cumulatively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Minimize formula size among strongly delay-optimum circuits.
    pub size_opt: bool,
    /// Merge equivalent sub-paths of depth instances and restrict the search
    /// to prefix-conform partitions.
    pub normalization: bool,
    /// Solve children under the parent's bound minus one; prune with the
    /// basic lower bound.
    pub upper_bounds: bool,
    /// Cross-partition lower bound and subset-enumeration pruning.
    pub partition_pruning: bool,
    /// Recursive lower bounds, lower-bound propagation and delay probing.
    pub strong_bounds: bool,
    /// Largest delay of interest; defaults to the standard circuit's delay.
    pub delay_cap: Option<Delay>,
    /// Instances up to this width are verified on their full truth table.
    pub exhaustive_verify_limit: usize,
    pub verify: bool,
    pub build_circuit: bool,
    pub time_budget: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions::scenario(5).expect("scenario 5 exists")
    }
}

impl SolveOptions {
    pub fn scenario(n: u8) -> Result<Self> {
        if !(1..=5).contains(&n) {
            return Err(invalid(format!("scenario {n} is not in 1..=5")));
        }
        Ok(SolveOptions {
            size_opt: false,
            normalization: n >= 2,
            upper_bounds: n >= 3,
            partition_pruning: n >= 4,
            strong_bounds: n >= 5,
            delay_cap: None,
            exhaustive_verify_limit: crate::circuit::EXHAUSTIVE_LIMIT,
            verify: true,
            build_circuit: true,
            time_budget: None,
        })
    }

    pub fn with_size_opt(mut self, on: bool) -> Self {
        self.size_opt = on;
        self
    }

    pub fn with_cap(mut self, cap: Option<Delay>) -> Self {
        self.delay_cap = cap;
        self
    }

    pub fn with_budget(mut self, budget: Option<Duration>) -> Self {
        self.time_budget = budget;
        self
    }

    fn pruning(&self) -> bool {
        self.upper_bounds && self.partition_pruning
    }

    fn strong(&self) -> bool {
        self.upper_bounds && self.strong_bounds
    }
}

/// Search effort counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Entries for which partition enumeration started.
    pub entries: u64,
    /// Partitions considered.
    pub partitions: u64,
    /// Entries stored in the memo.
    pub memo_entries: u64,
    pub elapsed: Duration,
}

impl Serialize for SolveStats {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("E", &self.entries)?;
        m.serialize_entry("P", &self.partitions)?;
        m.serialize_entry("ms", &(self.elapsed.as_secs_f64() * 1000.0))?;
        m.end()
    }
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub delay: Delay,
    /// Minimum formula size in size mode, otherwise the formula size of the
    /// emitted circuit.
    pub size: Option<u64>,
    pub circuit: Option<Circuit>,
    pub stats: SolveStats,
}

/// Per-sub-path search state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoEntry {
    /// Proven lower bound on the optimum delay.
    pub lower: Delay,
    pub best_delay: Option<Delay>,
    pub best_size: Option<u32>,
    /// Top gate and first part of the best partition, in key coordinates.
    pub choice: Option<(GateKind, InputSubset)>,
    /// No circuit with delay at most this value exists.
    pub exhausted_up_to: Option<Delay>,
    exact: bool,
    partitioned: bool,
    strong_done: bool,
}

impl MemoEntry {
    fn new(lower: Delay) -> Self {
        MemoEntry {
            lower,
            best_delay: None,
            best_size: None,
            choice: None,
            exhausted_up_to: None,
            exact: false,
            partitioned: false,
            strong_done: false,
        }
    }

    /// `true` once the optimum of the sub-path is known.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Whether the entry proves that no circuit with delay `≤ cap` exists.
    fn infeasible_at(&self, cap: Delay) -> bool {
        if self.exact {
            self.best_delay.unwrap() > cap
        } else {
            self.lower > cap
        }
    }
}

enum Eval {
    Found { delay: Delay, size: u32 },
    /// `second` is set when the `S°_2` child was the one that failed.
    Fail { second: bool },
}

/// State of the partition walk below one pivot.
struct Walk {
    kind: GateKind,
    same: InputSubset,
    diff: InputSubset,
    /// Diff-gate inputs below the pivot; they belong to both children.
    dup: InputSubset,
    rest: [u8; MAX_INPUTS],
    /// `suffix[j]` = mask of `rest[j..]`.
    suffix: [u64; MAX_INPUTS + 1],
    n: usize,
}

struct Search {
    bound: Delay,
    lower: Delay,
    best: Option<(Delay, u32, GateKind, InputSubset)>,
    stop: bool,
}

/// A solver session over one instance. Sub-paths solved in one session share
/// the memo, so solving several sub-paths of a large instance reuses work.
pub struct Solver {
    spec: AopSpec,
    opts: SolveOptions,
    tables: BoundTables,
    normalize: bool,
    memo: FxHashMap<InputSubset, MemoEntry>,
    entries: u64,
    partitions: u64,
    deadline: Option<Instant>,
    ticks: u32,
}

impl Solver {
    pub fn new(spec: AopSpec, opts: SolveOptions) -> Self {
        let normalize = opts.normalization && normalizable(&spec);
        let deadline = opts.time_budget.map(|b| Instant::now() + b);
        Solver {
            tables: BoundTables::new(&spec),
            spec,
            opts,
            normalize,
            memo: FxHashMap::default(),
            entries: 0,
            partitions: 0,
            deadline,
            ticks: 0,
        }
    }

    pub fn spec(&self) -> &AopSpec {
        &self.spec
    }

    pub fn options(&self) -> &SolveOptions {
        &self.opts
    }

    /// Whether sub-paths are merged by representative.
    pub fn normalizes(&self) -> bool {
        self.normalize
    }

    pub fn stats(&self) -> SolveStats {
        SolveStats {
            entries: self.entries,
            partitions: self.partitions,
            memo_entries: self.memo.len() as u64,
            elapsed: Duration::ZERO,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Memo entry of the sub-path on `subset`, looked up by its key.
    pub fn memo_entry(&self, subset: InputSubset) -> Option<&MemoEntry> {
        self.memo.get(&self.key(subset).0)
    }

    pub fn memo_iter(&self) -> impl Iterator<Item = (InputSubset, &MemoEntry)> {
        self.memo.iter().map(|(k, v)| (*k, v))
    }

    /// Resets the deadline to `budget` from now.
    pub fn set_budget(&mut self, budget: Option<Duration>) {
        self.deadline = budget.map(|b| Instant::now() + b);
    }

    /// Optimum delay of the sub-path on `subset` if it is at most `cap`.
    pub fn solve_subset(&mut self, subset: InputSubset, cap: Delay) -> Result<Option<Delay>> {
        if subset.is_empty() || !subset.is_subset_of(self.spec.full()) {
            return Err(invalid(format!("{subset:?} is not a sub-path of the instance")));
        }
        let key = self.key(subset).0;
        self.opt(key, cap.min(UNBOUNDED))
    }

    /// Minimum formula size recorded for a solved sub-path (size mode).
    pub fn size_of(&self, subset: InputSubset) -> Option<u32> {
        self.memo_entry(subset).filter(|e| e.exact).and_then(|e| e.best_size)
    }

    /// Solves the whole instance and assembles the result.
    pub fn solve(&mut self) -> Result<OptResult> {
        let started = Instant::now();
        let full = self.spec.full();
        let cap = match self.opts.delay_cap {
            Some(c) => c,
            None => standard_circuit(&self.spec).delay(self.spec.arrival())?,
        };
        let delay = self.solve_subset(full, cap)?.ok_or(Error::NoSolution { cap })?;
        let circuit = if self.opts.build_circuit || self.opts.verify {
            Some(self.circuit(full)?)
        } else {
            None
        };
        if let (true, Some(c)) = (self.opts.verify, &circuit) {
            if let Some(x) =
                find_counterexample_within(c, &self.spec, self.opts.exhaustive_verify_limit)?
            {
                return Err(Error::VerificationFailure(format!(
                    "reconstructed circuit differs at {x:?}"
                )));
            }
            let d = c.delay(self.spec.arrival())?;
            if d != delay {
                return Err(Error::VerificationFailure(format!(
                    "reconstructed circuit has delay {d}, expected {delay}"
                )));
            }
        }
        let size = if self.opts.size_opt {
            self.size_of(full).map(u64::from)
        } else {
            circuit.as_ref().map(|c| c.formula_size())
        };
        let mut stats = self.stats();
        stats.elapsed = started.elapsed();
        Ok(OptResult {
            delay,
            size,
            circuit: if self.opts.build_circuit { circuit } else { None },
            stats,
        })
    }

    /// Memo key of a sub-path and whether the key is its dual.
    #[inline]
    fn key(&self, subset: InputSubset) -> (InputSubset, bool) {
        if self.normalize {
            let r = representative(subset);
            (r.subset, r.dual)
        } else {
            (subset, false)
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 0x3ff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Error::BudgetExceeded);
                }
            }
        }
        Ok(())
    }

    fn initial_lower(&self, key: InputSubset) -> Delay {
        if key.len() == 1 || self.opts.upper_bounds {
            self.tables.basic(&self.spec, key)
        } else {
            0
        }
    }

    /// Best delay of `key` if at most `cap`.
    fn opt(&mut self, key: InputSubset, cap: Delay) -> Result<Option<Delay>> {
        let lower = self.initial_lower(key);
        let e = *self.memo.entry(key).or_insert_with(|| MemoEntry::new(lower));
        if e.exact {
            return Ok(e.best_delay.filter(|&d| d <= cap));
        }
        if key.len() == 1 {
            let a = self.tables.arrival(key.min_index().unwrap());
            let slot = self.memo.get_mut(&key).unwrap();
            slot.exact = true;
            slot.best_delay = Some(a);
            slot.best_size = Some(0);
            slot.lower = a;
            return Ok((a <= cap).then_some(a));
        }
        if !self.opts.upper_bounds {
            let d = self.search(key, UNBOUNDED)?.expect("unbounded search succeeds");
            return Ok((d <= cap).then_some(d));
        }
        if e.lower > cap {
            return Ok(None);
        }
        if self.opts.strong() && !e.strong_done {
            self.strong_bounds(key, cap)?;
            if self.memo[&key].lower > cap {
                return Ok(None);
            }
        }
        if self.opts.strong() {
            let mut d = self.memo[&key].lower;
            while d <= cap {
                if let Some(found) = self.search(key, d)? {
                    return Ok(Some(found));
                }
                d = self.memo[&key].lower.max(d + 1);
            }
            Ok(None)
        } else {
            self.search(key, cap)
        }
    }

    fn strong_bounds(&mut self, key: InputSubset, cap: Delay) -> Result<()> {
        let mut done = true;
        let mut lb = 0;
        let dropped = drop_one_subset(&self.spec, key)?;
        let k = self.key(dropped).0;
        match self.opt(k, cap)? {
            Some(d) => lb = lb.max(d),
            None => {
                lb = cap + 1;
                done = false;
            }
        }
        if lb <= cap && self.tables_uniform() {
            if let Some(c) = condense_subset(&self.spec, key)? {
                let k = self.key(c).0;
                match self.opt(k, cap)? {
                    Some(d) => lb = lb.max(d),
                    None => {
                        lb = cap + 1;
                        done = false;
                    }
                }
            }
        }
        let slot = self.memo.get_mut(&key).unwrap();
        slot.strong_done = done;
        if lb > slot.lower {
            slot.lower = lb;
            self.propagate(key, lb);
        }
        Ok(())
    }

    fn tables_uniform(&self) -> bool {
        self.spec.has_uniform_arrival()
    }

    /// Raises the lower bounds of stored one-input supersets, transitively.
    fn propagate(&mut self, key: InputSubset, lower: Delay) {
        if !self.opts.strong() {
            return;
        }
        let full = self.spec.full();
        let mut stack = vec![key];
        while let Some(k) = stack.pop() {
            for i in full.difference(k) {
                let sup = self.key(k.with(i)).0;
                if let Some(e) = self.memo.get_mut(&sup) {
                    if !e.exact && e.lower < lower {
                        e.lower = lower;
                        stack.push(sup);
                    }
                }
            }
        }
    }

    /// Searches all partitions of `key` for a circuit with delay `≤ bound`.
    fn search(&mut self, key: InputSubset, bound: Delay) -> Result<Option<Delay>> {
        let slot = self.memo.get_mut(&key).unwrap();
        if !slot.partitioned {
            slot.partitioned = true;
            self.entries += 1;
        }
        let mut st = Search { bound, lower: slot.lower, best: None, stop: false };
        if bound >= 1 {
            let first = key.min_index().unwrap();
            let k0 = self.spec.gates()[first];
            for kind in [k0, k0.dual()] {
                self.search_kind(key, kind, &mut st)?;
                if st.stop {
                    break;
                }
            }
        }
        let slot = self.memo.get_mut(&key).unwrap();
        match st.best {
            Some((d, size, kind, s1)) => {
                slot.exact = true;
                slot.best_delay = Some(d);
                slot.best_size = Some(size);
                slot.choice = Some((kind, s1));
                slot.lower = d;
                Ok(Some(d))
            }
            None => {
                slot.exhausted_up_to = Some(slot.exhausted_up_to.map_or(bound, |x| x.max(bound)));
                if slot.lower <= bound {
                    slot.lower = bound + 1;
                    self.propagate(key, bound + 1);
                }
                Ok(None)
            }
        }
    }

    fn search_kind(&mut self, key: InputSubset, kind: GateKind, st: &mut Search) -> Result<()> {
        let same = self.spec.same_gate_mask(key, kind);
        if same.len() < 2 {
            return Ok(());
        }
        let last = key.max_index().unwrap();
        let diff = key.difference(same);
        let order = rest_order(&self.tables, same.without(last));
        for pivot in same.without(last) {
            let dup = diff.below(pivot);
            if self.opts.pruning() && self.tables.weight_bound(key, dup) > st.bound {
                break;
            }
            let mut w = Walk {
                kind,
                same,
                diff,
                dup,
                rest: [0; MAX_INPUTS],
                suffix: [0; MAX_INPUTS + 1],
                n: 0,
            };
            for &x in &order {
                if (x as usize) < pivot {
                    w.rest[w.n] = x;
                    w.n += 1;
                }
            }
            for j in (0..w.n).rev() {
                w.suffix[j] = w.suffix[j + 1] | (1u64 << w.rest[j]);
            }
            let top = InputSubset::singleton(pivot);
            let above = same.above(pivot);
            let s1 = top.union(InputSubset::from_mask(w.suffix[0]));
            let second_failed = self.try_partition(&w, st, s1, above)?;
            if st.stop {
                return Ok(());
            }
            if second_failed && self.opts.pruning() {
                continue;
            }
            self.walk(key, &w, st, 0, top, above)?;
            if st.stop {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Enumerates partitions in which `rest[..k]` is decided, `fixed` is in
    /// the first part and `second` in the second part. Every undecided input
    /// defaults to the first part; moving `rest[j]` to the second part opens
    /// the subtree of later decisions.
    fn walk(
        &mut self,
        key: InputSubset,
        w: &Walk,
        st: &mut Search,
        k: usize,
        fixed: InputSubset,
        second: InputSubset,
    ) -> Result<()> {
        let mut fixed = fixed;
        for j in k..w.n {
            if j > k {
                fixed.insert(w.rest[j - 1] as usize);
                if self.opts.pruning() && self.first_part_infeasible(fixed.union(w.dup), st.bound) {
                    break;
                }
            }
            let x = w.rest[j] as usize;
            if self.normalize && !segment_tail(&self.spec, key, w, x).is_subset_of(second) {
                continue;
            }
            let s2 = second.with(x);
            let s1 = fixed.union(InputSubset::from_mask(w.suffix[j + 1]));
            let second_failed = self.try_partition(w, st, s1, s2)?;
            if st.stop {
                return Ok(());
            }
            if second_failed && self.opts.pruning() {
                continue;
            }
            self.walk(key, w, st, j + 1, fixed, s2)?;
            if st.stop {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Memo-only check that the special sub-path `sub` admits no circuit
    /// fitting under a parent bound of `bound`.
    fn first_part_infeasible(&self, sub: InputSubset, bound: Delay) -> bool {
        let cap = match bound.checked_sub(1) {
            Some(c) => c,
            None => return true,
        };
        self.memo.get(&self.key(sub).0).is_some_and(|e| e.infeasible_at(cap))
    }

    /// Evaluates one partition; returns whether its second child failed.
    fn try_partition(
        &mut self,
        w: &Walk,
        st: &mut Search,
        s1: InputSubset,
        s2: InputSubset,
    ) -> Result<bool> {
        let i1 = s1.union(w.dup);
        let i2 = s2.union(w.diff);
        match self.evaluate(i1, i2, st.bound)? {
            Eval::Fail { second } => Ok(second),
            Eval::Found { delay, size } => {
                let better = match st.best {
                    None => true,
                    Some((d, s, _, _)) => delay < d || (self.opts.size_opt && delay == d && size < s),
                };
                if better {
                    st.best = Some((delay, size, w.kind, s1));
                    if self.opts.upper_bounds {
                        st.bound = if self.opts.size_opt { delay } else { delay - 1 };
                        if st.bound < st.lower {
                            st.stop = true;
                        }
                    }
                }
                Ok(false)
            }
        }
    }

    fn evaluate(&mut self, i1: InputSubset, i2: InputSubset, bound: Delay) -> Result<Eval> {
        self.partitions += 1;
        self.tick()?;
        let (k1, k2) = (self.key(i1).0, self.key(i2).0);
        if !self.opts.upper_bounds {
            let d1 = self.opt(k1, UNBOUNDED)?.expect("unbounded");
            let d2 = self.opt(k2, UNBOUNDED)?.expect("unbounded");
            let size = self.child_size(k1) + self.child_size(k2) + 1;
            return Ok(Eval::Found { delay: 1 + d1.max(d2), size });
        }
        let cap = bound - 1;
        if self.quick_fail(k2, cap) {
            return Ok(Eval::Fail { second: true });
        }
        if self.quick_fail(k1, cap) {
            return Ok(Eval::Fail { second: false });
        }
        let order = if k1.len() <= k2.len() { [(k1, false), (k2, true)] } else { [(k2, true), (k1, false)] };
        let mut delay = 0;
        for (k, second) in order {
            match self.opt(k, cap)? {
                Some(d) => delay = delay.max(d),
                None => return Ok(Eval::Fail { second }),
            }
        }
        let size = if self.opts.size_opt {
            self.child_size(k1) + self.child_size(k2) + 1
        } else {
            0
        };
        Ok(Eval::Found { delay: delay + 1, size })
    }

    fn child_size(&self, key: InputSubset) -> u32 {
        if !self.opts.size_opt {
            return 0;
        }
        self.memo[&key].best_size.expect("solved child")
    }

    /// Decides infeasibility at `cap` from the memo or the basic bound,
    /// without creating an entry.
    fn quick_fail(&self, key: InputSubset, cap: Delay) -> bool {
        match self.memo.get(&key) {
            Some(e) => e.infeasible_at(cap),
            None => self.tables.basic(&self.spec, key) > cap,
        }
    }

    /// Reconstructs an optimum formula for a solved sub-path, over the
    /// instance's input positions.
    pub fn circuit(&self, subset: InputSubset) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(self.spec.m());
        let out = self.build(&mut b, subset)?;
        Ok(b.finish(out))
    }

    fn build(&self, b: &mut CircuitBuilder, subset: InputSubset) -> Result<NodeRef> {
        if subset.len() == 1 {
            return Ok(b.input(subset.min_index().unwrap()));
        }
        let (key, dual) = self.key(subset);
        let e = self
            .memo
            .get(&key)
            .filter(|e| e.exact)
            .ok_or_else(|| Error::InvalidState(format!("{subset:?} has not been solved")))?;
        let (kind, s1_key) = e.choice.expect("solved entries record their choice");
        let kind = if dual { kind.dual() } else { kind };
        let mut s1 = InputSubset::EMPTY;
        for (kpos, spos) in key.iter().zip(subset.iter()) {
            if s1_key.contains(kpos) {
                s1.insert(spos);
            }
        }
        let same = self.spec.same_gate_mask(subset, kind);
        let diff = subset.difference(same);
        let pivot = s1.max_index().unwrap();
        let i1 = s1.union(diff.below(pivot));
        let i2 = same.difference(s1).union(diff);
        let l = self.build(b, i1)?;
        let r = self.build(b, i2)?;
        Ok(b.gate(kind, l, r))
    }
}

/// Same-gate inputs by decreasing arrival time, larger index first on ties.
fn rest_order(tables: &BoundTables, s: InputSubset) -> Vec<u8> {
    let mut v: Vec<u8> = s.iter().rev().map(|i| i as u8).collect();
    v.sort_by(|&x, &y| {
        let (ax, ay) = (tables.arrival(x as usize), tables.arrival(y as usize));
        ay.cmp(&ax).then(y.cmp(&x))
    });
    v
}

/// Same-gate inputs of `x`'s segment above `x`; under prefix-conformity they
/// must all be in the second part before `x` may join it.
#[inline]
fn segment_tail(spec: &AopSpec, key: InputSubset, w: &Walk, x: usize) -> InputSubset {
    let last = key.max_index().unwrap();
    let other = key.without(last).above(x).difference(spec.kind_mask(w.kind));
    let up = w.same.above(x);
    match other.min_index() {
        Some(f) => up.below(f),
        None => up,
    }
}

/// Every partition of the same-gate set of `subset` for `kind` as
/// `(S°_1, S°_2)`, in enumeration order and without pruning.
pub fn partitions(
    spec: &AopSpec,
    subset: InputSubset,
    kind: GateKind,
    prefix_conform: bool,
) -> Result<Vec<(InputSubset, InputSubset)>> {
    if subset.is_empty() || !subset.is_subset_of(spec.full()) {
        return Err(invalid(format!("{subset:?} is not a sub-path of the instance")));
    }
    let same = spec.same_gate_mask(subset, kind);
    let last = subset.max_index().unwrap();
    let diff = subset.difference(same);
    let order = rest_order(&BoundTables::new(spec), same.without(last));
    let mut out = Vec::new();
    if same.len() < 2 {
        return Ok(out);
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        spec: &AopSpec,
        subset: InputSubset,
        w: &Walk,
        check: bool,
        k: usize,
        fixed: InputSubset,
        second: InputSubset,
        out: &mut Vec<(InputSubset, InputSubset)>,
    ) {
        let mut fixed = fixed;
        for j in k..w.n {
            if j > k {
                fixed.insert(w.rest[j - 1] as usize);
            }
            let x = w.rest[j] as usize;
            if check && !segment_tail(spec, subset, w, x).is_subset_of(second) {
                continue;
            }
            let s2 = second.with(x);
            out.push((fixed.union(InputSubset::from_mask(w.suffix[j + 1])), s2));
            rec(spec, subset, w, check, j + 1, fixed, s2, out);
        }
    }
    for pivot in same.without(last) {
        let mut w = Walk {
            kind,
            same,
            diff,
            dup: diff.below(pivot),
            rest: [0; MAX_INPUTS],
            suffix: [0; MAX_INPUTS + 1],
            n: 0,
        };
        for &x in &order {
            if (x as usize) < pivot {
                w.rest[w.n] = x;
                w.n += 1;
            }
        }
        for j in (0..w.n).rev() {
            w.suffix[j] = w.suffix[j + 1] | (1u64 << w.rest[j]);
        }
        let top = InputSubset::singleton(pivot);
        let above = same.above(pivot);
        out.push((top.union(InputSubset::from_mask(w.suffix[0])), above));
        rec(spec, subset, &w, prefix_conform, 0, top, above, &mut out);
    }
    Ok(out)
}

/// Solves `spec` in a fresh session.
pub fn solve(spec: &AopSpec, opts: &SolveOptions) -> Result<OptResult> {
    Solver::new(spec.clone(), opts.clone()).solve()
}

/// Optimum delay of `spec` under the default (fastest) configuration.
pub fn optimum_delay(spec: &AopSpec) -> Result<Delay> {
    let opts = SolveOptions { build_circuit: false, verify: false, ..SolveOptions::default() };
    Ok(solve(spec, &opts)?.delay)
}
