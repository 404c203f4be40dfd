//! Adder carry networks and the optimum-depth table.
//!
//! The carry into bit `i + 1` of a binary adder is the alternating path
//! `g_i ∨ (p_i ∧ (g_{i-1} ∨ (p_{i-1} ∧ … g_0)))` over generate and propagate
//! signals. Every carry is a suffix of the longest one, so one solver session
//! serves all carries of an adder.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aop::{AopSpec, GateKind};
use crate::circuit::Circuit;
use crate::error::{invalid, Error, Result};
use crate::solver::{SolveOptions, SolveStats, Solver};
use crate::subset::InputSubset;
use crate::Delay;

/// Largest input count realizable with depth `d`, for `d = 1..=17`, as
/// published reference data (upper-bound constructions).
pub const REFERENCE_MAX_M: [usize; 17] = [
    2, 3, 6, 10, 19, 33, 60, 109, 202, 375, 698, 1311, 2466, 4645, 8782, 16627, 31548,
];

/// Optimum adder depths for `n = 1, 2, 4, 8, 16, 32` bits.
pub const REFERENCE_ADDER_DEPTHS: [(usize, Delay); 6] =
    [(1, 0), (2, 2), (4, 4), (8, 5), (16, 6), (32, 8)];

/// Carry `c_{i+1}` over `(g_i, p_i, g_{i-1}, p_{i-1}, …, p_1, g_0)`.
pub fn carry_aop(i: usize) -> Result<AopSpec> {
    let m = 2 * i + 1;
    AopSpec::alternating(m, GateKind::Or, vec![0; m])
}

/// Local input `k` of carry circuit `i`: `(is_generate, bit)`.
pub fn carry_input(i: usize, k: usize) -> (bool, usize) {
    (k.is_multiple_of(2), i - k / 2)
}

/// Depth-optimum carry circuits of an `n`-bit adder.
#[derive(Clone, Debug)]
pub struct AdderPlan {
    pub n: usize,
    /// `carries[i]` computes `c_{i+1}` over the inputs of [`carry_aop`]`(i)`.
    pub carries: Vec<Circuit>,
    pub depths: Vec<Delay>,
    pub stats: SolveStats,
}

impl AdderPlan {
    /// Depth of the whole carry network.
    pub fn depth(&self) -> Delay {
        self.depths.iter().copied().max().unwrap_or(0)
    }
}

pub fn build_adder(n: usize, opts: &SolveOptions) -> Result<AdderPlan> {
    if n == 0 {
        return Err(invalid("an adder needs at least one bit"));
    }
    let started = std::time::Instant::now();
    let top = carry_aop(n - 1)?;
    let m = top.m();
    let mut solver = Solver::new(top, opts.clone());
    let mut carries = Vec::with_capacity(n);
    let mut depths = Vec::with_capacity(n);
    for i in 0..n {
        let start = 2 * (n - 1 - i);
        let suffix = InputSubset::range(start, m);
        let cap = opts.delay_cap.unwrap_or(2 * i as Delay);
        let d = solver
            .solve_subset(suffix, cap)?
            .ok_or(Error::NoSolution { cap })?;
        let map: Vec<usize> = (0..m).map(|p| p.saturating_sub(start)).collect();
        let c = solver.circuit(suffix)?.relabel(2 * i + 1, &map)?;
        debug_assert_eq!(c.depth(), d);
        carries.push(c);
        depths.push(d);
    }
    let mut stats = solver.stats();
    stats.elapsed = started.elapsed();
    Ok(AdderPlan { n, carries, depths, stats })
}

/// Checks the carry circuits against integer addition. Generate and
/// propagate signals and the sum bits `s_i = c_i ⊕ p_i` are computed here,
/// outside the circuits. Operand pairs are enumerated exhaustively for
/// `n ≤ 10`; otherwise `trials` random pairs from `seed` are used.
pub fn verify_adder(plan: &AdderPlan, trials: usize, seed: u64) -> Result<()> {
    let n = plan.n;
    if n > 63 {
        return Err(Error::UnsupportedSize { m: n, max: 63 });
    }
    if plan.carries.len() != n {
        return Err(invalid("plan does not hold one circuit per carry"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = n <= 10;
    let total: u64 = if exhaustive { 1u64 << (2 * n) } else { trials as u64 };
    let mut batch: Vec<(u64, u64)> = Vec::with_capacity(64);
    let mut next = 0u64;
    while next < total {
        batch.clear();
        while batch.len() < 64 && next < total {
            let pair = if exhaustive {
                (next & ((1 << n) - 1), next >> n)
            } else {
                (rng.gen::<u64>() & ((1 << n) - 1), rng.gen::<u64>() & ((1 << n) - 1))
            };
            batch.push(pair);
            next += 1;
        }
        check_batch(plan, &batch)?;
    }
    Ok(())
}

fn check_batch(plan: &AdderPlan, batch: &[(u64, u64)]) -> Result<()> {
    let n = plan.n;
    let mut g = vec![0u64; n];
    let mut p = vec![0u64; n];
    for (lane, &(a, b)) in batch.iter().enumerate() {
        for i in 0..n {
            let (ai, bi) = ((a >> i) & 1, (b >> i) & 1);
            g[i] |= (ai & bi) << lane;
            p[i] |= (ai ^ bi) << lane;
        }
    }
    // carry[i] = c_i; c_0 = 0.
    let mut carry = vec![0u64; n + 1];
    for i in 0..n {
        let inputs: Vec<u64> = (0..2 * i + 1)
            .map(|k| match carry_input(i, k) {
                (true, bit) => g[bit],
                (false, bit) => p[bit],
            })
            .collect();
        carry[i + 1] = plan.carries[i].evaluate_words(&inputs);
    }
    for (lane, &(a, b)) in batch.iter().enumerate() {
        let sum = a + b;
        for i in 0..=n {
            let c = (carry[i] >> lane) & 1;
            let expect = ((sum ^ a ^ b) >> i) & 1;
            if c != expect {
                return Err(Error::VerificationFailure(format!(
                    "carry c_{i} wrong for operands {a} + {b}"
                )));
            }
            if i < n && (c ^ ((p[i] >> lane) & 1)) != (sum >> i) & 1 {
                return Err(Error::VerificationFailure(format!(
                    "sum bit s_{i} wrong for operands {a} + {b}"
                )));
            }
        }
        if (carry[n] >> lane) & 1 != (sum >> n) & 1 {
            return Err(Error::VerificationFailure(format!("carry out wrong for {a} + {b}")));
        }
    }
    Ok(())
}

/// Closes certified facts "the `m`-input path has no depth-`d` circuit"
/// under the halving argument: such a fact for `m` inputs rules out depth
/// `d + 1` for `2m - 1` inputs. Returns, for every depth `D ≤ max_depth`
/// reached, the smallest input count certified to need depth at least `D`.
pub fn propagate_depth_lower_bounds(
    facts: &[(usize, Delay)],
    max_depth: Delay,
) -> BTreeMap<Delay, usize> {
    let mut out: BTreeMap<Delay, usize> = BTreeMap::new();
    for &(m0, d0) in facts {
        let (mut m, mut d) = (m0, d0);
        while d < max_depth {
            let e = out.entry(d + 1).or_insert(m);
            *e = (*e).min(m);
            m = 2 * m - 1;
            d += 1;
        }
    }
    // A count needing depth D also needs every smaller depth.
    let keys: Vec<Delay> = out.keys().rev().copied().collect();
    for w in keys.windows(2) {
        let hi = out[&w[0]];
        let lo = out.get_mut(&w[1]).unwrap();
        *lo = (*lo).min(hi);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Solved in this run.
    Exact,
    /// Derived from solved facts by halving.
    Bounded,
    /// Published reference data.
    Reference,
}

/// Input counts whose optimum depth is `depth`: from `start` to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthRow {
    pub depth: Delay,
    pub start: usize,
    pub start_source: Provenance,
    pub end: usize,
    pub end_source: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthRangeTable {
    pub max_solved_m: usize,
    /// Optimum depth of the `m`-input path for `m = 1..=max_solved_m`.
    pub exact: Vec<Delay>,
    pub rows: Vec<DepthRow>,
}

impl DepthRangeTable {
    pub fn depth_of(&self, m: usize) -> Option<Delay> {
        self.exact.get(m.checked_sub(1)?).copied()
    }

    /// Aligned text rendering.
    pub fn to_text(&self) -> String {
        let mut s = format!("{:>3}  {:>7} {:<9}  {:>7} {:<9}\n", "d", "from", "", "to", "");
        for r in &self.rows {
            s.push_str(&format!(
                "{:>3}  {:>7} {:<9}  {:>7} {:<9}\n",
                r.depth,
                r.start,
                format!("{:?}", r.start_source).to_lowercase(),
                r.end,
                format!("{:?}", r.end_source).to_lowercase()
            ));
        }
        s
    }
}

/// Optimum depths for `m = 1..=max_m` solved in one session, extended to
/// depth `max_depth` by halving bounds for row starts and reference data
/// for row ends.
pub fn depth_table(max_m: usize, max_depth: Delay, opts: &SolveOptions) -> Result<DepthRangeTable> {
    if max_m < 2 {
        return Err(invalid("the table needs max_m ≥ 2"));
    }
    let spec = AopSpec::depth_instance(max_m)?;
    let mut solver = Solver::new(spec, opts.clone());
    let mut exact = Vec::with_capacity(max_m);
    for m in 1..=max_m {
        let cap = opts.delay_cap.unwrap_or(m as Delay);
        let d = solver
            .solve_subset(InputSubset::full(m), cap)?
            .ok_or(Error::NoSolution { cap })?;
        exact.push(d);
    }
    // Solved facts: the first count of each depth has no circuit one level
    // lower.
    let mut facts = Vec::new();
    for m in 2..=max_m {
        if exact[m - 1] > exact[m - 2] {
            facts.push((m, exact[m - 1] - 1));
        }
    }
    let bounds = propagate_depth_lower_bounds(&facts, max_depth);
    let top_exact = exact[max_m - 1];
    let mut rows = Vec::new();
    for d in 1..=max_depth {
        let first = (1..=max_m).find(|&m| exact[m - 1] == d);
        let last = (1..=max_m).rev().find(|&m| exact[m - 1] == d);
        let (start, start_source) = match first {
            Some(m) => (m, Provenance::Exact),
            None => match bounds.get(&d) {
                Some(&m) => (m, Provenance::Bounded),
                None => continue,
            },
        };
        let (end, end_source) = match last {
            Some(m) if d < top_exact => (m, Provenance::Exact),
            _ => match REFERENCE_MAX_M.get(d as usize - 1) {
                Some(&m) => (m, Provenance::Reference),
                None => continue,
            },
        };
        // Beyond the certified bounds no count is known to have depth `d`.
        if start <= end {
            rows.push(DepthRow { depth: d, start, start_source, end, end_source });
        }
    }
    Ok(DepthRangeTable { max_solved_m: max_m, exact, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aop::GateKind::{And as A, Or as O};
    use crate::circuit::realizes;

    #[test]
    fn carry_specs() {
        let c0 = carry_aop(0).unwrap();
        assert_eq!(c0.m(), 1);
        let c1 = carry_aop(1).unwrap();
        assert_eq!(c1.gates(), &[O, A]);
        assert_eq!(carry_aop(3).unwrap().m(), 7);
        assert_eq!(carry_input(3, 0), (true, 3));
        assert_eq!(carry_input(3, 1), (false, 3));
        assert_eq!(carry_input(3, 6), (true, 0));
    }

    #[test]
    fn small_adders_verify() {
        for n in 1..=6 {
            let plan = build_adder(n, &SolveOptions::default()).unwrap();
            verify_adder(&plan, 0, 1).unwrap();
            for (i, c) in plan.carries.iter().enumerate() {
                assert!(realizes(c, &carry_aop(i).unwrap()).unwrap());
            }
        }
        let plan = build_adder(4, &SolveOptions::default()).unwrap();
        assert_eq!(plan.depths[3], 4);
    }

    #[test]
    fn broken_adder_is_caught() {
        let mut plan = build_adder(3, &SolveOptions::default()).unwrap();
        plan.carries[2] = plan.carries[2].dualize();
        assert!(matches!(verify_adder(&plan, 0, 1), Err(Error::VerificationFailure(_))));
    }

    #[test]
    fn propagation_examples() {
        assert!(propagate_depth_lower_bounds(&[], 10).is_empty());
        let b = propagate_depth_lower_bounds(&[(20, 5)], 8);
        assert_eq!(b[&6], 20);
        assert_eq!(b[&7], 39);
        assert_eq!(b[&8], 77);
        let b = propagate_depth_lower_bounds(&[(61, 7)], 9);
        assert_eq!(b[&9], 121);
    }

    #[test]
    fn small_depth_table() {
        let t = depth_table(12, 6, &SolveOptions::default()).unwrap();
        let starts: Vec<(Delay, usize)> = t.rows.iter().map(|r| (r.depth, r.start)).collect();
        assert_eq!(starts[..5], [(1, 2), (2, 3), (3, 4), (4, 7), (5, 11)]);
        assert_eq!(t.rows[3].end, 10);
        assert_eq!(t.rows[3].end_source, Provenance::Exact);
        assert_eq!(t.rows[4].end_source, Provenance::Reference);
        assert_eq!(t.rows[5].start, 21);
        assert_eq!(t.rows[5].start_source, Provenance::Bounded);
        assert!(t.to_text().contains("bounded"));
    }
}
