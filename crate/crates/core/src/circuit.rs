//! Fanin-2 circuits over {AND2, OR2}.
//!
//! Circuits are stored as topologically ordered node lists; a gate may only
//! reference earlier nodes. There are no constants and no negations, so every
//! circuit computes a monotone function of its inputs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::aop::{dualize as dualize_spec, AopSpec, GateKind};
use crate::error::{invalid, Error, Result};
use crate::scalar::Time;
use crate::subset::InputSubset;

/// Index into [`Circuit::nodes`].
pub type NodeRef = usize;

/// Largest input count for which truth tables are enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Input(usize),
    Gate { kind: GateKind, left: NodeRef, right: NodeRef },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    m: usize,
    nodes: Vec<Node>,
    out: NodeRef,
}

/// Delay, depth, size and maximum fanout of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics<T> {
    pub delay: T,
    pub depth: u32,
    pub size: usize,
    pub max_fanout: usize,
}

impl Circuit {
    pub fn new(m: usize, nodes: Vec<Node>, out: NodeRef) -> Result<Self> {
        if out >= nodes.len() {
            return Err(invalid(format!("output {out} refers past {} nodes", nodes.len())));
        }
        for (k, n) in nodes.iter().enumerate() {
            match *n {
                Node::Input(i) if i >= m => {
                    return Err(invalid(format!("node {k}: input t{i} outside 0..{m}")))
                }
                Node::Gate { left, right, .. } if left >= k || right >= k => {
                    return Err(invalid(format!("node {k}: gate references a later node")))
                }
                _ => {}
            }
        }
        Ok(Circuit { m, nodes, out })
    }

    pub fn num_inputs(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> NodeRef {
        self.out
    }

    /// Nodes reachable from the output.
    fn live(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        live[self.out] = true;
        for k in (0..self.nodes.len()).rev() {
            if let (true, Node::Gate { left, right, .. }) = (live[k], self.nodes[k]) {
                live[left] = true;
                live[right] = true;
            }
        }
        live
    }

    /// Number of gates reachable from the output.
    pub fn size(&self) -> usize {
        self.live()
            .iter()
            .zip(&self.nodes)
            .filter(|(l, n)| **l && matches!(n, Node::Gate { .. }))
            .count()
    }

    /// Gate count of the formula obtained by duplicating shared subcircuits.
    pub fn formula_size(&self) -> u64 {
        let mut fs = vec![0u64; self.nodes.len()];
        for (k, n) in self.nodes.iter().enumerate() {
            if let Node::Gate { left, right, .. } = *n {
                fs[k] = fs[left] + fs[right] + 1;
            }
        }
        fs[self.out]
    }

    /// `true` if no node reachable from the output is used twice.
    pub fn is_formula(&self) -> bool {
        self.fanouts().into_iter().all(|f| f <= 1)
    }

    fn fanouts(&self) -> Vec<usize> {
        let live = self.live();
        let mut fo = vec![0usize; self.nodes.len()];
        for (k, n) in self.nodes.iter().enumerate() {
            if let (true, Node::Gate { left, right, .. }) = (live[k], *n) {
                fo[left] += 1;
                fo[right] += 1;
            }
        }
        fo
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.m {
            return Err(invalid(format!(
                "assignment has width {}, circuit has {} inputs",
                assignment.len(),
                self.m
            )));
        }
        let mut val = vec![false; self.nodes.len()];
        for (k, n) in self.nodes.iter().enumerate() {
            val[k] = match *n {
                Node::Input(i) => assignment[i],
                Node::Gate { kind, left, right } => kind.apply(val[left], val[right]),
            };
        }
        Ok(val[self.out])
    }

    /// Evaluates 64 assignments at once; `inputs[i]` holds the bits of `t_i`.
    pub fn evaluate_words(&self, inputs: &[u64]) -> u64 {
        let mut val = vec![0u64; self.nodes.len()];
        self.evaluate_words_into(inputs, &mut val)
    }

    fn evaluate_words_into(&self, inputs: &[u64], val: &mut [u64]) -> u64 {
        for (k, n) in self.nodes.iter().enumerate() {
            val[k] = match *n {
                Node::Input(i) => inputs[i],
                Node::Gate { kind, left, right } => kind.apply_word(val[left], val[right]),
            };
        }
        val[self.out]
    }

    /// Full truth table, one bit per assignment; bit `x` of the table is the
    /// value at the assignment whose bit `i` is `t_i`.
    pub fn truth_table(&self) -> Result<Vec<u64>> {
        if self.m > EXHAUSTIVE_LIMIT {
            return Err(Error::UnsupportedSize { m: self.m, max: EXHAUSTIVE_LIMIT });
        }
        let words = truth_table_words(self.m);
        let mut val = vec![0u64; self.nodes.len()];
        let mut inputs = vec![0u64; self.m];
        let mut table = Vec::with_capacity(words);
        for w in 0..words {
            fill_word_inputs(self.m, w, &mut inputs);
            table.push(self.evaluate_words_into(&inputs, &mut val) & valid_bits(self.m));
        }
        Ok(table)
    }

    /// Delay with respect to `arrival`, depth, size and maximum fanout.
    pub fn metrics<T: Time>(&self, arrival: &[T]) -> Result<Metrics<T>> {
        if arrival.len() != self.m {
            return Err(invalid("arrival tuple width differs from circuit width"));
        }
        let mut at = vec![T::zero(); self.nodes.len()];
        let mut lvl = vec![0u32; self.nodes.len()];
        for (k, n) in self.nodes.iter().enumerate() {
            match *n {
                Node::Input(i) => at[k] = arrival[i],
                Node::Gate { left, right, .. } => {
                    at[k] = at[left].max_of(at[right]) + T::one();
                    lvl[k] = lvl[left].max(lvl[right]) + 1;
                }
            }
        }
        Ok(Metrics {
            delay: at[self.out],
            depth: lvl[self.out],
            size: self.size(),
            max_fanout: self.fanouts().into_iter().max().unwrap_or(0),
        })
    }

    pub fn delay(&self, arrival: &[u32]) -> Result<u32> {
        Ok(self.metrics(arrival)?.delay)
    }

    pub fn depth(&self) -> u32 {
        self.metrics(&vec![0u32; self.m]).map(|x| x.depth).unwrap_or(0)
    }

    /// Renames input `i` to `map[i]` inside a circuit on `m` inputs.
    pub fn relabel(&self, m: usize, map: &[usize]) -> Result<Circuit> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                Node::Input(i) => Node::Input(map[i]),
                g => g,
            })
            .collect();
        Circuit::new(m, nodes, self.out)
    }

    /// Exchanges every AND and OR gate.
    pub fn dualize(&self) -> Circuit {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                Node::Gate { kind, left, right } => Node::Gate { kind: kind.dual(), left, right },
                i => i,
            })
            .collect();
        Circuit { m: self.m, nodes, out: self.out }
    }

    /// Infix rendering such as `t0 ∧ (t1 ∨ t2)`.
    pub fn to_formula_string(&self) -> String {
        fn go(c: &Circuit, k: NodeRef, out: &mut String, top: bool) {
            match c.nodes[k] {
                Node::Input(i) => write!(out, "t{i}").unwrap(),
                Node::Gate { kind, left, right } => {
                    if !top {
                        out.push('(');
                    }
                    go(c, left, out, false);
                    out.push_str(if kind == GateKind::And { " ∧ " } else { " ∨ " });
                    go(c, right, out, false);
                    if !top {
                        out.push(')');
                    }
                }
            }
        }
        let mut s = String::new();
        go(self, self.out, &mut s, true);
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitJson::from(self)).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        let j: CircuitJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }

    /// Graphviz rendering: inputs as boxes, AND gates red, OR gates green,
    /// signals flowing top-down.
    pub fn to_dot(&self, name: &str) -> String {
        let live = self.live();
        let mut s = String::new();
        writeln!(s, "digraph \"{name}\" {{").unwrap();
        s.push_str("  rankdir=TB;\n");
        for (k, n) in self.nodes.iter().enumerate().filter(|(k, _)| live[*k]) {
            match *n {
                Node::Input(i) => {
                    writeln!(s, "  n{k} [shape=box, label=\"t{i}\"];").unwrap();
                }
                Node::Gate { kind, .. } => {
                    let color = if kind == GateKind::And { "red" } else { "green" };
                    writeln!(
                        s,
                        "  n{k} [shape=circle, style=filled, fillcolor={color}, label=\"{}\"];",
                        if kind == GateKind::And { "∧" } else { "∨" }
                    )
                    .unwrap();
                }
            }
        }
        s.push_str("  { rank=source; ");
        for (k, n) in self.nodes.iter().enumerate() {
            if live[k] && matches!(n, Node::Input(_)) {
                write!(s, "n{k}; ").unwrap();
            }
        }
        s.push_str("}\n");
        for (k, n) in self.nodes.iter().enumerate() {
            if let (true, Node::Gate { left, right, .. }) = (live[k], *n) {
                writeln!(s, "  n{left} -> n{k};").unwrap();
                writeln!(s, "  n{right} -> n{k};").unwrap();
            }
        }
        writeln!(s, "  out [shape=plaintext, label=\"out\"];\n  n{} -> out;", self.out).unwrap();
        s.push_str("}\n");
        s
    }
}

/// Incremental circuit construction with structural hashing of gates.
#[derive(Debug)]
pub struct CircuitBuilder {
    m: usize,
    nodes: Vec<Node>,
    inputs: Vec<Option<NodeRef>>,
    gates: FxHashMap<(GateKind, NodeRef, NodeRef), NodeRef>,
}

impl CircuitBuilder {
    pub fn new(m: usize) -> Self {
        CircuitBuilder { m, nodes: Vec::new(), inputs: vec![None; m], gates: FxHashMap::default() }
    }

    pub fn input(&mut self, i: usize) -> NodeRef {
        if let Some(r) = self.inputs[i] {
            return r;
        }
        self.nodes.push(Node::Input(i));
        let r = self.nodes.len() - 1;
        self.inputs[i] = Some(r);
        r
    }

    pub fn gate(&mut self, kind: GateKind, left: NodeRef, right: NodeRef) -> NodeRef {
        if let Some(&r) = self.gates.get(&(kind, left, right)) {
            return r;
        }
        self.nodes.push(Node::Gate { kind, left, right });
        let r = self.nodes.len() - 1;
        self.gates.insert((kind, left, right), r);
        r
    }

    pub fn finish(self, out: NodeRef) -> Circuit {
        Circuit::new(self.m, self.nodes, out).expect("builder keeps nodes topological")
    }
}

/// The right-leaning chain `t_0 ∘_0 (t_1 ∘_1 (… t_{m-1}))`.
pub fn standard_circuit(spec: &AopSpec) -> Circuit {
    let m = spec.m();
    let mut b = CircuitBuilder::new(m);
    let mut acc = b.input(m - 1);
    for i in (0..m - 1).rev() {
        let t = b.input(i);
        acc = b.gate(spec.gates()[i], t, acc);
    }
    b.finish(acc)
}

/// Prime implicants of the instance: one per OR-signal (and the last input),
/// consisting of that input and every earlier AND-signal.
pub fn prime_implicants(spec: &AopSpec) -> Vec<InputSubset> {
    let m = spec.m();
    let ands = spec.kind_mask(GateKind::And);
    let mut out = Vec::new();
    for i in 0..m {
        if i == m - 1 || spec.gates()[i] == GateKind::Or {
            out.push(ands.below(i).with(i));
        }
    }
    out
}

/// Searches for an assignment on which `c` differs from the instance.
///
/// Exact for every width: `c` is monotone, so it equals the instance iff it
/// is true on every prime implicant and false on the complement of every
/// prime implicant of the dual. For `m ≤ 20` the full truth table is also
/// compared against the standard circuit.
pub fn find_counterexample(c: &Circuit, spec: &AopSpec) -> Result<Option<Vec<bool>>> {
    find_counterexample_within(c, spec, EXHAUSTIVE_LIMIT)
}

/// [`find_counterexample`] with a custom width limit for the truth-table
/// comparison (capped at 20).
pub fn find_counterexample_within(
    c: &Circuit,
    spec: &AopSpec,
    exhaustive_limit: usize,
) -> Result<Option<Vec<bool>>> {
    let m = spec.m();
    if c.num_inputs() != m {
        return Err(invalid("circuit and instance widths differ"));
    }
    for pi in prime_implicants(spec) {
        let x = pi.indicator(m);
        if !c.evaluate(&x)? {
            return Ok(Some(x));
        }
    }
    for kappa in prime_implicants(&dualize_spec(spec)) {
        let x: Vec<bool> = kappa.indicator(m).into_iter().map(|b| !b).collect();
        if c.evaluate(&x)? {
            return Ok(Some(x));
        }
    }
    if m <= exhaustive_limit.min(EXHAUSTIVE_LIMIT) {
        return first_difference(c, &standard_circuit(spec));
    }
    Ok(None)
}

/// `true` iff `c` computes the instance's function.
pub fn realizes(c: &Circuit, spec: &AopSpec) -> Result<bool> {
    Ok(find_counterexample(c, spec)?.is_none())
}

/// Compares two circuits on the same inputs: exhaustively for `m ≤ 20`,
/// otherwise on `trials` random assignments drawn from `seed`.
pub fn equivalent(c1: &Circuit, c2: &Circuit, trials: usize, seed: u64) -> Result<bool> {
    if c1.num_inputs() != c2.num_inputs() {
        return Err(invalid("circuit widths differ"));
    }
    let m = c1.num_inputs();
    if m <= EXHAUSTIVE_LIMIT {
        return Ok(first_difference(c1, c2)?.is_none());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = vec![0u64; m];
    for _ in 0..trials.div_ceil(64) {
        inputs.iter_mut().for_each(|w| *w = rng.gen());
        if c1.evaluate_words(&inputs) != c2.evaluate_words(&inputs) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn first_difference(c1: &Circuit, c2: &Circuit) -> Result<Option<Vec<bool>>> {
    let m = c1.num_inputs();
    let (t1, t2) = (c1.truth_table()?, c2.truth_table()?);
    for (w, (a, b)) in t1.iter().zip(&t2).enumerate() {
        let d = a ^ b;
        if d != 0 {
            let x = (w as u64) * 64 + u64::from(d.trailing_zeros());
            return Ok(Some((0..m).map(|i| (x >> i) & 1 == 1).collect()));
        }
    }
    Ok(None)
}

fn truth_table_words(m: usize) -> usize {
    if m <= 6 {
        1
    } else {
        1 << (m - 6)
    }
}

fn valid_bits(m: usize) -> u64 {
    if m >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << m)) - 1
    }
}

/// Input words for word `w` of the truth table.
fn fill_word_inputs(m: usize, w: usize, inputs: &mut [u64]) {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    for (i, slot) in inputs.iter_mut().enumerate().take(m) {
        *slot = if i < 6 {
            LOW[i]
        } else if (w >> (i - 6)) & 1 == 1 {
            u64::MAX
        } else {
            0
        };
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum NodeJson {
    In { idx: usize },
    And { l: NodeRef, r: NodeRef },
    Or { l: NodeRef, r: NodeRef },
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    nodes: Vec<NodeJson>,
    out: NodeRef,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        let nodes = c
            .nodes
            .iter()
            .map(|n| match *n {
                Node::Input(idx) => NodeJson::In { idx },
                Node::Gate { kind: GateKind::And, left, right } => NodeJson::And { l: left, r: right },
                Node::Gate { kind: GateKind::Or, left, right } => NodeJson::Or { l: left, r: right },
            })
            .collect();
        CircuitJson { m: Some(c.m), nodes, out: c.out }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Circuit> {
        let nodes: Vec<Node> = j
            .nodes
            .into_iter()
            .map(|n| match n {
                NodeJson::In { idx } => Node::Input(idx),
                NodeJson::And { l, r } => Node::Gate { kind: GateKind::And, left: l, right: r },
                NodeJson::Or { l, r } => Node::Gate { kind: GateKind::Or, left: l, right: r },
            })
            .collect();
        let inferred = nodes
            .iter()
            .filter_map(|n| match n {
                Node::Input(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Circuit::new(j.m.unwrap_or(inferred), nodes, j.out)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}
