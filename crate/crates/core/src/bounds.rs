//! Delay lower bounds for sub-paths.
//!
//! The cheap bounds combine the weight bound `⌈log2 Σ 2^{a(t)}⌉`, which holds
//! for every fanin-2 circuit, with the observation that inputs outside the
//! first segment need at least two gates on their way to the output. The
//! strong bounds solve a smaller sub-path recursively: removing inputs never
//! increases the optimum delay, so its optimum bounds the original.

use crate::aop::{segment_partition, AopSpec, GateKind};
use crate::error::{invalid, Error, Result};
use crate::scalar::ceil_log2_sum_pow2;
use crate::solver::Solver;
use crate::subset::InputSubset;
use crate::Delay;

/// Arrival-derived data shared by all bound evaluations of one instance.
#[derive(Clone, Debug)]
pub(crate) struct BoundTables {
    arrival: Vec<u32>,
    /// `2^{a(t_i) - base}` when all such powers fit comfortably into `u128`.
    weights: Option<Vec<u128>>,
    base: u32,
    uniform: bool,
}

impl BoundTables {
    pub(crate) fn new(spec: &AopSpec) -> Self {
        let arrival = spec.arrival().to_vec();
        let base = *arrival.iter().min().expect("non-empty instance");
        let top = *arrival.iter().max().expect("non-empty instance");
        // 64 inputs, each counted at most twice: 2^{spread + 7} must fit.
        let weights = (top - base <= 120).then(|| {
            arrival.iter().map(|&a| 1u128 << (a - base)).collect()
        });
        BoundTables { uniform: base == top, arrival, weights, base }
    }

    #[inline]
    pub(crate) fn arrival(&self, i: usize) -> u32 {
        self.arrival[i]
    }

    pub(crate) fn max_arrival(&self, s: InputSubset) -> u32 {
        if self.uniform {
            return self.base;
        }
        s.iter().map(|i| self.arrival[i]).max().unwrap_or(0)
    }

    /// `⌈log2 (Σ_{t ∈ once} 2^{a(t)} + Σ_{t ∈ twice} 2^{a(t)})⌉`.
    #[inline]
    pub(crate) fn weight_bound(&self, once: InputSubset, twice: InputSubset) -> u32 {
        if self.uniform {
            let w = (once.len() + twice.len()) as u128;
            return self.base + ceil_log2_u128(w);
        }
        match &self.weights {
            Some(wt) => {
                let w: u128 = once.iter().chain(twice.iter()).map(|i| wt[i]).sum();
                self.base + ceil_log2_u128(w)
            }
            None => ceil_log2_sum_pow2(once.iter().chain(twice.iter()).map(|i| self.arrival[i]))
                .unwrap_or(0),
        }
    }

    /// Basic bound of a non-empty sub-path.
    pub(crate) fn basic(&self, spec: &AopSpec, s: InputSubset) -> u32 {
        if s.len() == 1 {
            return self.arrival[s.min_index().unwrap()];
        }
        let p0 = first_segment(spec, s);
        let rest = s.difference(p0);
        let mut lb = self.weight_bound(s, InputSubset::EMPTY).max(self.max_arrival(p0) + 1);
        if !rest.is_empty() {
            lb = lb.max(self.max_arrival(rest) + 2);
        }
        lb
    }
}

#[inline]
fn ceil_log2_u128(w: u128) -> u32 {
    if w <= 1 {
        0
    } else {
        128 - (w - 1).leading_zeros()
    }
}

/// Inputs of the first segment `P_0` of the sub-path on `s`.
#[inline]
pub(crate) fn first_segment(spec: &AopSpec, s: InputSubset) -> InputSubset {
    let first = s.min_index().expect("non-empty subset");
    let last = s.max_index().unwrap();
    if first == last {
        return s;
    }
    let kind = spec.gates()[first];
    let other = s.without(last).difference(spec.kind_mask(kind));
    match other.min_index() {
        None => s,
        Some(j) => s.below(j),
    }
}

fn check(spec: &AopSpec, subset: InputSubset) -> Result<()> {
    if subset.is_empty() {
        return Err(invalid("empty subset"));
    }
    if !subset.is_subset_of(spec.full()) {
        return Err(invalid(format!("{subset:?} exceeds the instance")));
    }
    Ok(())
}

/// `max(⌈log2 W⌉, max_{P_0} a + 1, max_{P_b, b > 0} a + 2)`; a single input
/// is bounded by its own arrival time.
pub fn basic_lower_bound(spec: &AopSpec, subset: InputSubset) -> Result<Delay> {
    check(spec, subset)?;
    Ok(BoundTables::new(spec).basic(spec, subset))
}

/// Weight bound once the diff-gate inputs below `pivot` are duplicated into
/// both children of a partition whose first part has maximum `pivot`.
pub fn cross_partition_lower_bound(
    spec: &AopSpec,
    subset: InputSubset,
    kind: GateKind,
    pivot: usize,
) -> Result<Delay> {
    check(spec, subset)?;
    let same = spec.same_gate_mask(subset, kind);
    if !same.contains(pivot) || Some(pivot) == subset.max_index() {
        return Err(invalid(format!("t{pivot} cannot be the top of the first part")));
    }
    let dup = subset.difference(same).below(pivot);
    Ok(BoundTables::new(spec).weight_bound(subset, dup))
}

/// Sub-path for the drop-one bound: among the inputs with minimum arrival
/// time, the lowest-index one inside the largest segment holding such an
/// input (ties to the lowest segment) is removed.
pub fn drop_one_subset(spec: &AopSpec, subset: InputSubset) -> Result<InputSubset> {
    check(spec, subset)?;
    if subset.len() < 2 {
        return Err(invalid("dropping an input needs at least two inputs"));
    }
    let amin = subset.iter().map(|i| spec.arrival_of(i)).min().unwrap();
    let parts = segment_partition(spec, subset)?;
    let mut pick: Option<(usize, usize)> = None;
    for seg in &parts.segments {
        if let Some(i) = seg.inputs.iter().find(|&i| spec.arrival_of(i) == amin) {
            if pick.is_none_or(|(len, _)| seg.inputs.len() > len) {
                pick = Some((seg.inputs.len(), i));
            }
        }
    }
    Ok(subset.without(pick.expect("some input has minimum arrival").1))
}

/// Sub-path for the condense bound: the largest segment (lowest on ties)
/// stays whole, the final segment keeps its last two inputs, every other
/// segment keeps its first input. `None` when nothing would be removed.
pub fn condense_subset(spec: &AopSpec, subset: InputSubset) -> Result<Option<InputSubset>> {
    check(spec, subset)?;
    let parts = segment_partition(spec, subset)?;
    let sizes = parts.sizes();
    let keep = (0..sizes.len()).fold(0, |b, k| if sizes[k] > sizes[b] { k } else { b });
    let c = parts.len() - 1;
    let mut out = InputSubset::EMPTY;
    for (k, seg) in parts.segments.iter().enumerate() {
        if k == keep {
            out = out.union(seg.inputs);
        } else if k == c {
            out = out.union(InputSubset::from_indices(seg.inputs.iter().rev().take(2)));
        } else {
            out.insert(seg.inputs.min_index().unwrap());
        }
    }
    Ok((out != subset).then_some(out))
}

/// Optimum delay of the drop-one sub-path when at most `cap`, else `cap + 1`.
pub fn strong_lower_bound_drop_one(
    solver: &mut Solver,
    subset: InputSubset,
    cap: Delay,
) -> Result<Delay> {
    let sub = drop_one_subset(solver.spec(), subset)?;
    Ok(solver.solve_subset(sub, cap)?.unwrap_or(cap + 1))
}

/// Optimum depth of the condensed sub-path when at most `cap`, else
/// `cap + 1`. Only defined for equal arrival times.
pub fn strong_lower_bound_condense(
    solver: &mut Solver,
    subset: InputSubset,
    cap: Delay,
) -> Result<Delay> {
    if !solver.spec().has_uniform_arrival() {
        return Err(Error::InvalidState("the condense bound needs equal arrival times".into()));
    }
    let sub = condense_subset(solver.spec(), subset)?.unwrap_or(subset);
    Ok(solver.solve_subset(sub, cap)?.unwrap_or(cap + 1))
}
