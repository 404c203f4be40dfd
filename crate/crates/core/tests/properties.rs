use aop_synth::adders::{build_adder, carry_aop, depth_table, propagate_depth_lower_bounds};
use aop_synth::aop::{dualize, AopSpec, GateKind};
use aop_synth::bounds::basic_lower_bound;
use aop_synth::circuit::{find_counterexample, standard_circuit};
use aop_synth::fractional::{solve_fractional_binary, solve_fractional_linear, FractionalSpec};
use aop_synth::oracle::{monotone_optimum_delay, strongly_optimum_size};
use aop_synth::{solve, Rational, SolveOptions};
use proptest::prelude::*;

fn instance(max_m: usize, max_arrival: u32) -> impl Strategy<Value = AopSpec> {
    (1..=max_m).prop_flat_map(move |m| {
        (
            prop::collection::vec(any::<bool>(), m - 1),
            prop::collection::vec(0..=max_arrival, m),
        )
            .prop_map(|(g, a)| {
                let gates = g.into_iter().map(|x| if x { GateKind::And } else { GateKind::Or }).collect();
                AopSpec::new(gates, a).unwrap()
            })
    })
}

fn opts(n: u8) -> SolveOptions {
    SolveOptions::scenario(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenarios_agree(spec in instance(11, 3)) {
        let reference = solve(&spec, &opts(1).with_size_opt(true)).unwrap();
        for n in 2..=5 {
            let r = solve(&spec, &opts(n).with_size_opt(true)).unwrap();
            prop_assert_eq!(r.delay, reference.delay, "scenario {}", n);
            prop_assert_eq!(r.size, reference.size, "scenario {}", n);
            let plain = solve(&spec, &opts(n)).unwrap();
            prop_assert_eq!(plain.delay, reference.delay);
        }
    }

    #[test]
    fn matches_truth_table_oracle(spec in instance(5, 2)) {
        prop_assert_eq!(solve(&spec, &opts(5)).unwrap().delay, monotone_optimum_delay(&spec).unwrap());
    }

    #[test]
    fn emitted_circuits_are_valid(spec in instance(16, 4), n in 3u8..=5) {
        let r = solve(&spec, &opts(n)).unwrap();
        let c = r.circuit.unwrap();
        prop_assert_eq!(find_counterexample(&c, &spec).unwrap(), None);
        prop_assert_eq!(c.delay(spec.arrival()).unwrap(), r.delay);
        prop_assert!(r.delay >= basic_lower_bound(&spec, spec.full()).unwrap());
        prop_assert!(r.delay <= standard_circuit(&spec).delay(spec.arrival()).unwrap());
        prop_assert!(c.formula_size() >= c.size() as u64);
    }

    #[test]
    fn size_mode_circuit_matches_reported_size(spec in instance(12, 2)) {
        let r = solve(&spec, &opts(5).with_size_opt(true)).unwrap();
        let c = r.circuit.unwrap();
        prop_assert_eq!(Some(c.formula_size()), r.size);
        prop_assert_eq!(c.delay(spec.arrival()).unwrap(), r.delay);
    }

    #[test]
    fn duality_preserves_delay(spec in instance(14, 3)) {
        let a = solve(&spec, &opts(5)).unwrap();
        let b = solve(&dualize(&spec), &opts(5)).unwrap();
        prop_assert_eq!(a.delay, b.delay);
    }

    #[test]
    fn removing_an_input_never_slows_down(spec in instance(12, 3), drop in 0usize..12) {
        prop_assume!(spec.m() >= 2);
        let full = spec.full();
        let sub = full.without(drop % spec.m());
        let mut s = aop_synth::Solver::new(spec.clone(), opts(3));
        let whole = s.solve_subset(full, u32::MAX).unwrap().unwrap();
        let part = s.solve_subset(sub, u32::MAX).unwrap().unwrap();
        prop_assert!(part <= whole);
    }

    #[test]
    fn shifting_arrival_shifts_delay(spec in instance(10, 3), c in 1u32..5) {
        let shifted = spec.with_arrival(spec.arrival().iter().map(|a| a + c).collect()).unwrap();
        let a = solve(&spec, &opts(5)).unwrap().delay;
        let b = solve(&shifted, &opts(5)).unwrap().delay;
        prop_assert_eq!(b, a + c);
    }
}

fn tenths() -> impl Strategy<Value = FractionalSpec> {
    (1usize..=8).prop_flat_map(|m| {
        (
            prop::collection::vec(any::<bool>(), m - 1),
            prop::collection::vec(0i64..=30, m),
        )
            .prop_map(|(g, a)| {
                let gates = g.into_iter().map(|x| if x { GateKind::And } else { GateKind::Or }).collect();
                FractionalSpec::new(gates, a.into_iter().map(|t| Rational::new(t, 10)).collect()).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fractional_extensions_agree(spec in tenths()) {
        let lin = solve_fractional_linear(&spec, &opts(5)).unwrap();
        let bin = solve_fractional_binary(&spec, &opts(5)).unwrap();
        prop_assert_eq!(lin.delay, bin.delay);
        prop_assert_eq!(bin.circuit.metrics(&spec.arrival).unwrap().delay, bin.delay);
    }
}

#[test]
fn size_mode_matches_oracle_up_to_ten() {
    for m in 1..=10 {
        let spec = AopSpec::depth_instance(m).unwrap();
        let r = solve(&spec, &opts(5).with_size_opt(true)).unwrap();
        assert_eq!(r.size, Some(u64::from(strongly_optimum_size(&spec).unwrap())), "m = {m}");
    }
}

#[test]
fn adder_depth_matches_table() {
    let table = depth_table(15, 5, &opts(5)).unwrap();
    for n in 1..=8 {
        let plan = build_adder(n, &opts(5)).unwrap();
        assert_eq!(Some(plan.depth()), table.depth_of(2 * n - 1), "n = {n}");
    }
    for i in 0..10 {
        let spec = carry_aop(i).unwrap();
        assert!(spec.is_alternating());
        assert_eq!(spec.m(), 2 * i + 1);
        assert_eq!(spec.gates().first().copied(), (i > 0).then_some(GateKind::Or));
    }
}

#[test]
fn propagated_bounds_never_contradict_solved_depths() {
    let table = depth_table(26, 8, &opts(5)).unwrap();
    let mut facts = Vec::new();
    for m in 2..=26 {
        let d = table.depth_of(m).unwrap();
        if d > table.depth_of(m - 1).unwrap() {
            facts.push((m, d - 1));
        }
    }
    let bounds = propagate_depth_lower_bounds(&facts, 8);
    for (&d, &start) in &bounds {
        for m in start..=26 {
            assert!(table.depth_of(m).unwrap() >= d, "m = {m} certified to need {d}");
        }
    }
}
