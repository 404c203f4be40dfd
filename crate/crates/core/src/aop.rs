//! Generalized And-Or path instances.
//!
//! An instance on inputs `t_0, …, t_{m-1}` with gate types
//! `Γ = (∘_0, …, ∘_{m-2})` is the function
//! `t_0 ∘_0 (t_1 ∘_1 (… (t_{m-2} ∘_{m-2} t_{m-1})))`.
//! A sub-path keeps the inputs of an [`InputSubset`] in order together with
//! their original gate types; its largest input has no gate type. Sub-path
//! gate types are never materialized, they are read from `(Γ, subset)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::subset::{InputSubset, MAX_INPUTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    pub const BOTH: [GateKind; 2] = [GateKind::And, GateKind::Or];

    pub fn dual(self) -> GateKind {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a && b,
            GateKind::Or => a || b,
        }
    }

    pub fn apply_word(self, a: u64, b: u64) -> u64 {
        match self {
            GateKind::And => a & b,
            GateKind::Or => a | b,
        }
    }

    /// Letter used by the instance text format.
    pub fn letter(self) -> char {
        match self {
            GateKind::And => 'A',
            GateKind::Or => 'O',
        }
    }

    pub fn from_letter(c: char) -> Option<GateKind> {
        match c {
            'A' | 'a' => Some(GateKind::And),
            'O' | 'o' => Some(GateKind::Or),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
        })
    }
}

/// A generalized And-Or path with integral arrival times.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AopSpec {
    gates: Vec<GateKind>,
    arrival: Vec<u32>,
    /// Positions `i < m-1` whose gate type is And / Or.
    kind_masks: [InputSubset; 2],
}

impl AopSpec {
    pub fn new(gates: Vec<GateKind>, arrival: Vec<u32>) -> Result<Self> {
        let m = arrival.len();
        if m == 0 {
            return Err(invalid("an And-Or path needs at least one input"));
        }
        if m > MAX_INPUTS {
            return Err(Error::UnsupportedSize { m, max: MAX_INPUTS });
        }
        if gates.len() != m - 1 {
            return Err(invalid(format!(
                "{} inputs need {} gate types, got {}",
                m,
                m - 1,
                gates.len()
            )));
        }
        let mut kind_masks = [InputSubset::EMPTY; 2];
        for (i, g) in gates.iter().enumerate() {
            kind_masks[g.index()].insert(i);
        }
        Ok(AopSpec { gates, arrival, kind_masks })
    }

    /// Alternating And-Or path on `m` inputs whose first gate is `first`.
    pub fn alternating(m: usize, first: GateKind, arrival: Vec<u32>) -> Result<Self> {
        if arrival.len() != m {
            return Err(invalid("arrival tuple length differs from m"));
        }
        let gates = (0..m.saturating_sub(1))
            .map(|i| if i % 2 == 0 { first } else { first.dual() })
            .collect();
        Self::new(gates, arrival)
    }

    /// The depth instance: alternating, And first, all arrival times zero.
    pub fn depth_instance(m: usize) -> Result<Self> {
        Self::alternating(m, GateKind::And, vec![0; m])
    }

    /// Parses a gate string over `{A, O}` of length `m-1`.
    pub fn from_gate_string(gates: &str, arrival: Vec<u32>) -> Result<Self> {
        Self::new(parse_gates(gates)?, arrival)
    }

    pub fn m(&self) -> usize {
        self.arrival.len()
    }

    pub fn gates(&self) -> &[GateKind] {
        &self.gates
    }

    pub fn arrival(&self) -> &[u32] {
        &self.arrival
    }

    pub fn arrival_of(&self, i: usize) -> u32 {
        self.arrival[i]
    }

    pub fn gate_string(&self) -> String {
        self.gates.iter().map(|g| g.letter()).collect()
    }

    pub fn full(&self) -> InputSubset {
        InputSubset::full(self.m())
    }

    /// Positions (excluding the last input) whose gate type is `kind`.
    pub fn kind_mask(&self, kind: GateKind) -> InputSubset {
        self.kind_masks[kind.index()]
    }

    pub fn is_alternating(&self) -> bool {
        self.gates.windows(2).all(|w| w[0] != w[1])
    }

    pub fn has_uniform_arrival(&self) -> bool {
        self.arrival.iter().all(|&a| a == self.arrival[0])
    }

    /// Same gate structure with different arrival times.
    pub fn with_arrival(&self, arrival: Vec<u32>) -> Result<Self> {
        Self::new(self.gates.clone(), arrival)
    }

    /// Gate type of input `i` inside the sub-path on `subset`; `None` for the
    /// largest member, which has no gate type.
    pub fn gate_in(&self, subset: InputSubset, i: usize) -> Option<GateKind> {
        if Some(i) == subset.max_index() {
            None
        } else {
            Some(self.gates[i])
        }
    }

    /// Gate type of the first input of the sub-path, i.e. `∘_0` of the sub-path.
    pub fn first_kind(&self, subset: InputSubset) -> Option<GateKind> {
        let lo = subset.min_index()?;
        self.gate_in(subset, lo)
    }

    /// Same-gate set `S°` of the sub-path on `subset`: its `kind`-signals plus
    /// its last input. Unchecked, `subset` must be non-empty.
    #[inline]
    pub fn same_gate_mask(&self, subset: InputSubset, kind: GateKind) -> InputSubset {
        let last = subset.max_index().expect("non-empty subset");
        subset
            .intersection(self.kind_masks[kind.index()])
            .without(last)
            .with(last)
    }

    /// The sub-path obtained by dropping the inputs outside `subset`, as a
    /// standalone instance on `|subset|` inputs.
    pub fn restrict(&self, subset: InputSubset) -> Result<AopSpec> {
        if subset.is_empty() {
            return Err(invalid("empty subset"));
        }
        let idx: Vec<usize> = subset.iter().collect();
        let gates = idx[..idx.len() - 1].iter().map(|&i| self.gates[i]).collect();
        let arrival = idx.iter().map(|&i| self.arrival[i]).collect();
        AopSpec::new(gates, arrival)
    }
}

impl fmt::Debug for AopSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AopSpec({:?}, {:?})", self.gate_string(), self.arrival)
    }
}

pub fn parse_gates(gates: &str) -> Result<Vec<GateKind>> {
    gates
        .trim()
        .chars()
        .map(|c| {
            GateKind::from_letter(c)
                .ok_or_else(|| Error::Parse(format!("gate letter {c:?} is not one of A, O")))
        })
        .collect()
}

/// Canonical JSON form: `{"gates":"AOAO...","arrival":[0,0,...]}`.
#[derive(Serialize, Deserialize)]
struct AopSpecJson {
    gates: String,
    arrival: Vec<u32>,
}

impl Serialize for AopSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AopSpecJson { gates: self.gate_string(), arrival: self.arrival.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AopSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = AopSpecJson::deserialize(d)?;
        AopSpec::from_gate_string(&j.gates, j.arrival).map_err(serde::de::Error::custom)
    }
}

/// One maximal run of consecutive sub-path inputs sharing a gate type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: GateKind,
    pub inputs: InputSubset,
}

/// Segment partition `P_0 ++ … ++ P_c` of a sub-path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentPartition {
    pub segments: Vec<Segment>,
}

impl SegmentPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.inputs.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Index of the segment containing input `i`.
    pub fn segment_of(&self, i: usize) -> Option<usize> {
        self.segments.iter().position(|s| s.inputs.contains(i))
    }
}

fn require_non_empty(subset: InputSubset) -> Result<()> {
    if subset.is_empty() {
        Err(invalid("empty subset"))
    } else {
        Ok(())
    }
}

fn require_within(spec: &AopSpec, subset: InputSubset) -> Result<()> {
    if !subset.is_subset_of(spec.full()) {
        Err(invalid(format!("{subset:?} exceeds the {} inputs of the instance", spec.m())))
    } else {
        Ok(())
    }
}

/// `S°` of the sub-path on `subset`: all `kind`-signals plus the last input.
pub fn same_gate_set(spec: &AopSpec, subset: InputSubset, kind: GateKind) -> Result<InputSubset> {
    require_non_empty(subset)?;
    require_within(spec, subset)?;
    Ok(spec.same_gate_mask(subset, kind))
}

/// `D° = subset \ S°`.
pub fn diff_gate_set(spec: &AopSpec, subset: InputSubset, kind: GateKind) -> Result<InputSubset> {
    Ok(subset.difference(same_gate_set(spec, subset, kind)?))
}

pub fn segment_partition(spec: &AopSpec, subset: InputSubset) -> Result<SegmentPartition> {
    require_non_empty(subset)?;
    require_within(spec, subset)?;
    let idx: Vec<usize> = subset.iter().collect();
    let last = *idx.last().unwrap();
    let mut segments: Vec<Segment> = Vec::new();
    for &i in &idx[..idx.len() - 1] {
        let kind = spec.gates[i];
        match segments.last_mut() {
            Some(seg) if seg.kind == kind => seg.inputs.insert(i),
            _ => segments.push(Segment { kind, inputs: InputSubset::singleton(i) }),
        }
    }
    match segments.last_mut() {
        Some(seg) => seg.inputs.insert(last),
        None => {
            // A lone input; tag it with its own gate type when it has one.
            let kind = spec.gates.get(last).copied().unwrap_or(GateKind::And);
            segments.push(Segment { kind, inputs: InputSubset::singleton(last) });
        }
    }
    Ok(SegmentPartition { segments })
}

/// Inputs of the special sub-path for `part ⊆ S°`: `part` together with every
/// diff-gate input below the largest member of `part`.
pub fn special_sub_path(
    spec: &AopSpec,
    subset: InputSubset,
    kind: GateKind,
    part: InputSubset,
) -> Result<InputSubset> {
    let same = same_gate_set(spec, subset, kind)?;
    if part.is_empty() {
        return Err(invalid("special sub-path of an empty part"));
    }
    if !part.is_subset_of(same) {
        return Err(invalid(format!("{part:?} is not contained in S° = {same:?}")));
    }
    Ok(special_sub_path_unchecked(subset, same, part))
}

#[inline]
pub(crate) fn special_sub_path_unchecked(
    subset: InputSubset,
    same: InputSubset,
    part: InputSubset,
) -> InputSubset {
    let top = part.max_index().expect("non-empty part");
    part.union(subset.difference(same).below(top))
}

/// Exchanges every And and Or. Optimum delays are invariant under this map.
pub fn dualize(spec: &AopSpec) -> AopSpec {
    AopSpec::new(spec.gates.iter().map(|g| g.dual()).collect(), spec.arrival.clone())
        .expect("dual of a valid instance is valid")
}
