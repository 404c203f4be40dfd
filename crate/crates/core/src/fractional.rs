//! Fractional arrival times.
//!
//! For a threshold `α` among the fractional parts of the arrival times, the
//! rounded instance `a_α` rounds every arrival time up when its fractional
//! part exceeds `α` and down otherwise. Solving the integral instances and
//! re-evaluating the circuits against the exact arrival times yields an
//! optimum circuit, either by trying every `α` or by binary search over the
//! sorted thresholds.

use std::collections::BTreeMap;
use std::time::Instant;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::aop::{AopSpec, GateKind};
use crate::circuit::Circuit;
use crate::error::{invalid, Error, Result};
use crate::solver::{solve, SolveOptions, SolveStats};
use crate::{Delay, Rational};

/// Parses a non-negative decimal such as `"2"`, `"1.25"` or `".5"` exactly.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("{s:?} is not a non-negative decimal number"));
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 12
    {
        return Err(bad());
    }
    let ip: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10i64.pow(frac.len() as u32);
    let fp: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = ip.checked_mul(den).and_then(|x| x.checked_add(fp)).ok_or_else(bad)?;
    Ok(Rational::new(num, den))
}

/// Renders a rational with a terminating decimal expansion, e.g. `5.5`;
/// other values are written as `p/q`.
pub fn format_decimal(r: &Rational) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    let mut dd = d;
    let (mut twos, mut fives) = (0u32, 0u32);
    while dd % 2 == 0 {
        dd /= 2;
        twos += 1;
    }
    while dd % 5 == 0 {
        dd /= 5;
        fives += 1;
    }
    if dd != 1 {
        return format!("{n}/{d}");
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return n.to_string();
    }
    let scale = 10i64.pow(digits);
    let scaled = n * (scale / d);
    let (ip, fp) = scaled.div_rem(&scale);
    format!("{}{}.{:0width$}", if n < 0 && ip == 0 { "-" } else { "" }, ip, fp.abs(), width = digits as usize)
}

/// `b - ⌊b⌋`.
pub fn fractional_part(b: &Rational) -> Rational {
    b - b.floor()
}

/// The distinct fractional parts of `arrival`, ascending.
pub fn thresholds(arrival: &[Rational]) -> Vec<Rational> {
    let mut f: Vec<Rational> = arrival.iter().map(fractional_part).collect();
    f.sort();
    f.dedup();
    f
}

/// `a_α`: round up when the fractional part exceeds `alpha`, down otherwise.
pub fn rounded_instance(arrival: &[Rational], alpha: Rational) -> Result<Vec<u32>> {
    arrival
        .iter()
        .map(|a| {
            if *a < Rational::zero() {
                return Err(invalid("arrival times must be non-negative"));
            }
            let r = if fractional_part(a) > alpha { a.ceil() } else { a.floor() };
            r.to_integer().to_u32().ok_or_else(|| invalid("arrival time out of range"))
        })
        .collect()
}

/// An instance with exact rational arrival times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalSpec {
    pub gates: Vec<GateKind>,
    pub arrival: Vec<Rational>,
}

impl FractionalSpec {
    pub fn new(gates: Vec<GateKind>, arrival: Vec<Rational>) -> Result<Self> {
        // Validates the shape through the integral constructor.
        AopSpec::new(gates.clone(), vec![0; arrival.len()])?;
        if arrival.iter().any(|a| *a < Rational::zero()) {
            return Err(invalid("arrival times must be non-negative"));
        }
        Ok(FractionalSpec { gates, arrival })
    }

    pub fn is_integral(&self) -> bool {
        self.arrival.iter().all(|a| a.is_integer())
    }

    fn rounded(&self, alpha: Rational) -> Result<AopSpec> {
        AopSpec::new(self.gates.clone(), rounded_instance(&self.arrival, alpha)?)
    }
}

#[derive(Clone, Debug)]
pub struct FractionalResult {
    /// Delay of `circuit` under the exact arrival times.
    pub delay: Rational,
    /// Threshold whose rounded instance produced `circuit`.
    pub alpha: Rational,
    pub circuit: Circuit,
    pub size: Option<u64>,
    /// Number of integral instances solved.
    pub inner_solves: usize,
    pub stats: SolveStats,
}

fn inner_options(opts: &SolveOptions) -> SolveOptions {
    SolveOptions { normalization: false, build_circuit: true, ..opts.clone() }
}

struct Inner {
    opts: SolveOptions,
    solved: BTreeMap<Rational, (Delay, Circuit, Option<u64>)>,
    stats: SolveStats,
}

impl Inner {
    fn new(opts: &SolveOptions) -> Self {
        Inner { opts: inner_options(opts), solved: BTreeMap::new(), stats: SolveStats::default() }
    }

    /// Optimum integral delay of `a_α` together with its circuit.
    fn get(&mut self, spec: &FractionalSpec, alpha: Rational) -> Result<&(Delay, Circuit, Option<u64>)> {
        if !self.solved.contains_key(&alpha) {
            let r = solve(&spec.rounded(alpha)?, &self.opts)?;
            self.stats.entries += r.stats.entries;
            self.stats.partitions += r.stats.partitions;
            self.stats.memo_entries += r.stats.memo_entries;
            let c = r.circuit.expect("inner solves build circuits");
            self.solved.insert(alpha, (r.delay, c, r.size));
        }
        Ok(&self.solved[&alpha])
    }
}

fn finish(
    spec: &FractionalSpec,
    inner: Inner,
    alpha: Rational,
    started: Instant,
) -> Result<FractionalResult> {
    let inner_solves = inner.solved.len();
    let mut stats = inner.stats;
    stats.elapsed = started.elapsed();
    let (_, circuit, size) = inner.solved[&alpha].clone();
    let delay = circuit.metrics(&spec.arrival)?.delay;
    Ok(FractionalResult { delay, alpha, circuit, size, inner_solves, stats })
}

/// Solves every rounded instance and keeps the circuit that is fastest under
/// the exact arrival times; ties go to the smallest threshold.
pub fn solve_fractional_linear(spec: &FractionalSpec, opts: &SolveOptions) -> Result<FractionalResult> {
    let started = Instant::now();
    let mut inner = Inner::new(opts);
    let mut best: Option<(Rational, Rational)> = None;
    for alpha in thresholds(&spec.arrival) {
        let d = inner.get(spec, alpha)?.1.metrics(&spec.arrival)?.delay;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, alpha));
        }
    }
    finish(spec, inner, best.expect("at least one threshold").1, started)
}

/// Smallest threshold whose integral delay equals that of the largest one.
///
/// `alphas` must be ascending; `d_int` is evaluated lazily and at most once
/// per threshold. The integral delay must be non-increasing and two-valued
/// over the probed thresholds; a violation is reported as an error. Returns
/// `(α*, d_int(α*))`.
pub fn binary_search_threshold(
    alphas: &[Rational],
    mut d_int: impl FnMut(Rational) -> Result<Delay>,
) -> Result<(Rational, Delay)> {
    if alphas.is_empty() {
        return Err(invalid("no thresholds"));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("thresholds must be strictly ascending"));
    }
    let mut seen: BTreeMap<usize, Delay> = BTreeMap::new();
    let mut eval = |i: usize, seen: &mut BTreeMap<usize, Delay>| -> Result<Delay> {
        if let Some(&d) = seen.get(&i) {
            return Ok(d);
        }
        let d = d_int(alphas[i])?;
        seen.insert(i, d);
        Ok(d)
    };
    let n = alphas.len();
    let target = eval(n - 1, &mut seen)?;
    eval(0, &mut seen)?;
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if eval(mid, &mut seen)? == target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let values: Vec<Delay> = seen.values().copied().collect();
    if values.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidState(format!(
            "integral delays {values:?} increase along the sorted thresholds"
        )));
    }
    let mut distinct = values.clone();
    distinct.dedup();
    if distinct.len() > 2 {
        return Err(Error::InvalidState(format!(
            "integral delays {values:?} take more than two values"
        )));
    }
    Ok((alphas[lo], target))
}

/// Binary search over the sorted thresholds; `O(log |F|)` integral solves.
pub fn solve_fractional_binary(spec: &FractionalSpec, opts: &SolveOptions) -> Result<FractionalResult> {
    let started = Instant::now();
    let mut inner = Inner::new(opts);
    let alphas = thresholds(&spec.arrival);
    let (alpha, _) = binary_search_threshold(&alphas, |a| Ok(inner.get(spec, a)?.0))?;
    finish(spec, inner, alpha, started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aop::GateKind::{And as A, Or as O};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("1.3").unwrap(), r(13, 10));
        assert_eq!(parse_decimal("2").unwrap(), r(2, 1));
        assert_eq!(parse_decimal(".5").unwrap(), r(1, 2));
        assert_eq!(parse_decimal("0.25").unwrap(), r(1, 4));
        for bad in ["", ".", "-1", "1.2.3", "x", "1e3"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
        assert_eq!(format_decimal(&r(11, 2)), "5.5");
        assert_eq!(format_decimal(&r(6, 1)), "6");
        assert_eq!(format_decimal(&r(1, 20)), "0.05");
        assert_eq!(format_decimal(&r(1, 3)), "1/3");
    }

    #[test]
    fn rounding_examples() {
        let a = [r(13, 10), r(2, 1)];
        assert_eq!(rounded_instance(&a, r(0, 1)).unwrap(), vec![2, 2]);
        assert_eq!(rounded_instance(&a, r(3, 10)).unwrap(), vec![1, 2]);
        let ints = [r(3, 1), r(0, 1)];
        assert_eq!(rounded_instance(&ints, r(0, 1)).unwrap(), vec![3, 0]);
        assert_eq!(thresholds(&a), vec![r(0, 1), r(3, 10)]);
    }

    #[test]
    fn binary_search_on_tabulated_profile() {
        let alphas: Vec<Rational> =
            [0, 3, 4, 5, 7, 8].iter().map(|&t| r(t, 10)).collect();
        let table = [6, 6, 6, 5, 5, 5];
        let mut calls = 0;
        let (alpha, d) = binary_search_threshold(&alphas, |a| {
            calls += 1;
            Ok(table[alphas.iter().position(|x| *x == a).unwrap()])
        })
        .unwrap();
        assert_eq!(alpha, r(1, 2));
        assert_eq!(Rational::from_integer(i64::from(d)) + alpha, r(11, 2));
        assert!(calls <= 5);
    }

    #[test]
    fn binary_search_rejects_non_monotone_profiles() {
        let alphas: Vec<Rational> = (0..4).map(|t| r(t, 10)).collect();
        let up = [5, 6, 6, 6];
        assert!(binary_search_threshold(&alphas, |a| Ok(up[alphas.iter().position(|x| *x == a).unwrap()])).is_err());
        let three = [7, 6, 5, 5];
        assert!(binary_search_threshold(&alphas, |a| Ok(three[alphas.iter().position(|x| *x == a).unwrap()])).is_err());
        let single = [r(0, 1)];
        assert_eq!(binary_search_threshold(&single, |_| Ok(4)).unwrap(), (r(0, 1), 4));
    }

    #[test]
    fn integral_input_matches_plain_solve() {
        let gates = vec![A, O, A, O, A];
        let a: Vec<u32> = vec![0, 2, 1, 0, 3, 1];
        let spec = FractionalSpec::new(gates.clone(), a.iter().map(|&x| r(x.into(), 1)).collect()).unwrap();
        let opts = SolveOptions::default();
        let plain = solve(&AopSpec::new(gates, a).unwrap(), &opts).unwrap();
        for res in [solve_fractional_linear(&spec, &opts).unwrap(), solve_fractional_binary(&spec, &opts).unwrap()] {
            assert_eq!(res.delay, Rational::from_integer(plain.delay.into()));
            assert_eq!(res.inner_solves, 1);
        }
    }

    #[test]
    fn linear_solves_once_per_threshold() {
        let spec = FractionalSpec::new(vec![A, O, A], vec![r(1, 10), r(3, 10), r(1, 10), r(7, 10)]).unwrap();
        let res = solve_fractional_linear(&spec, &SolveOptions::default()).unwrap();
        assert_eq!(res.inner_solves, 3);
        assert_eq!(res.delay, res.circuit.metrics(&spec.arrival).unwrap().delay);
    }

    #[test]
    fn shift_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = SolveOptions::default();
        for _ in 0..20 {
            let m = rng.gen_range(2..8);
            let gates: Vec<GateKind> = (0..m - 1).map(|_| if rng.gen() { A } else { O }).collect();
            let a: Vec<Rational> = (0..m).map(|_| r(rng.gen_range(0..30), 10)).collect();
            let c = r(rng.gen_range(1..30), 10);
            let shifted: Vec<Rational> = a.iter().map(|x| x + c).collect();
            let d0 = solve_fractional_binary(&FractionalSpec::new(gates.clone(), a).unwrap(), &opts).unwrap();
            let d1 = solve_fractional_binary(&FractionalSpec::new(gates, shifted).unwrap(), &opts).unwrap();
            assert_eq!(d1.delay, d0.delay + c);
        }
    }
}
