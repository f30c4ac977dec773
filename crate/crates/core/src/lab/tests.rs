use super::*;
use crate::circuit::parse_netlist;
use crate::compiler::{compile, CompileOptions};

macro_rules! fixture {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $name))
    };
}

const CNOT_MASK: &str = "in secret s\nreg r\ngate RAND r\ngate CNOT r s\nout s\n";
const CONDITIONED: &str = "in secret s\nreg r\nreg t\ngate RAND r\ncgate @1 CNOT s t\nout t\n";
const AND_SHARES: &str = "in secret a\nin secret b\nreg r\nreg t\ngate RAND r\ngate CNOT r t\ngate TOF a b t\n";

fn model(p: f64) -> LeakageModel {
    LeakageModel::new(p).unwrap()
}

fn compiled(net: &str, ec: bool) -> CompiledCircuit {
    compile(
        &parse_netlist(net).unwrap(),
        CompileOptions {
            ec,
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn model_rejects_bad_probability() {
    assert!(LeakageModel::new(-0.1).is_err());
    assert!(LeakageModel::new(1.5).is_err());
    assert!(LeakageModel::new(f64::NAN).is_err());
}

#[test]
fn extreme_masks() {
    let c = parse_netlist(CNOT_MASK).unwrap();
    let t = Target::Raw(&c);
    let none = run_rounds(t, &[true], &[vec![]], 20, model(0.0), 1, &TapeSource::Seeded).unwrap();
    assert!(none.iter().all(|r| r.mask.is_empty() && r.values.is_empty()));
    let all = run_rounds(t, &[true], &[vec![]], 20, model(1.0), 1, &TapeSource::Seeded).unwrap();
    assert!(all.iter().all(|r| r.mask == c.leaky_events()));
    // The RAND event never appears.
    assert_eq!(c.leaky_events(), vec![0, 2, 3]);
}

#[test]
fn transcripts_are_reproducible_and_leak_free_ids_never_appear() {
    let c = compiled(fixture!("one_toffoli.net"), true);
    let t = Target::Compiled(&c);
    let inputs = vec![vec![false], vec![true]];
    let a = run_rounds(t, &[true, false], &inputs, 6, model(0.2), 9, &TapeSource::Seeded).unwrap();
    let b = run_rounds(t, &[true, false], &inputs, 6, model(0.2), 9, &TapeSource::Seeded).unwrap();
    assert_eq!(a, b);
    for r in &a {
        assert!(r.mask.iter().all(|&e| !c.circuit.is_leak_free(e)));
        assert_eq!(r.mask.len(), r.values.len());
        // z ⊕ x·y with x = 1, y = 0.
        assert_eq!(r.output, vec![u8::from(inputs[r.round % 2][0])]);
    }
    let other = run_rounds(t, &[true, false], &inputs, 6, model(0.2), 10, &TapeSource::Seeded).unwrap();
    assert_ne!(a, other);
}

#[test]
fn masks_do_not_depend_on_the_secret() {
    let c = compiled(fixture!("one_toffoli.net"), false);
    let t = Target::Compiled(&c);
    let a = run_rounds(
        t,
        &[true, false],
        &[vec![false]],
        8,
        model(0.05),
        3,
        &TapeSource::Seeded,
    )
    .unwrap();
    let b = run_rounds(
        t,
        &[false, true],
        &[vec![false]],
        8,
        model(0.05),
        3,
        &TapeSource::Seeded,
    )
    .unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.mask, y.mask);
    }
}

#[test]
fn fixed_tape_repeats_values() {
    let c = parse_netlist(CNOT_MASK).unwrap();
    let t = Target::Raw(&c);
    let rounds = run_rounds(
        t,
        &[false],
        &[vec![]],
        10,
        model(1.0),
        5,
        &TapeSource::Fixed(vec![true]),
    )
    .unwrap();
    for r in rounds {
        assert_eq!(r.values, vec![Some(0), Some(1), Some(1)]);
        assert_eq!(r.output, vec![1]);
    }
}

#[test]
fn skipped_ports_are_null() {
    let c = parse_netlist(CONDITIONED).unwrap();
    let rounds = run_rounds(
        Target::Raw(&c),
        &[true],
        &[vec![]],
        40,
        model(1.0),
        2,
        &TapeSource::Seeded,
    )
    .unwrap();
    assert!(rounds.iter().any(|r| r.values[1].is_none()));
    assert!(rounds.iter().any(|r| r.values[1].is_some()));
}

#[test]
fn secret_wire_exact_is_p() {
    let c = parse_netlist(fixture!("secret_wire.net")).unwrap();
    for p in [0.0, 0.001, 0.01, 0.1, 0.5, 1.0] {
        let r = exact_tv_tiny(Target::Raw(&c), &[false], &[true], &[], model(p)).unwrap();
        assert!((r.estimate - p).abs() < 1e-12, "p = {p}: {}", r.estimate);
    }
}

#[test]
fn cnot_masking_exact() {
    let c = parse_netlist(CNOT_MASK).unwrap();
    for p in [0.01, 0.1, 0.4] {
        let r = exact_tv_tiny(Target::Raw(&c), &[false], &[true], &[], model(p)).unwrap();
        let want = p + (1.0 - p) * p * p;
        assert!((r.estimate - want).abs() < 1e-12, "p = {p}: {} vs {want}", r.estimate);
    }
}

#[test]
fn equal_secrets_have_zero_tv() {
    let c = parse_netlist(AND_SHARES).unwrap();
    let r = exact_tv_tiny(Target::Raw(&c), &[true, false], &[true, false], &[], model(0.3)).unwrap();
    assert_eq!(r.estimate, 0.0);
    let m = mc_advantage(
        Target::Raw(&c),
        &[true, false],
        &[true, false],
        &[],
        model(0.3),
        McOptions::new(2000, 1),
    )
    .unwrap();
    assert_eq!(m.estimate, 0.0);
}

#[test]
fn exact_rejects_large_circuits() {
    let c = compiled(fixture!("one_toffoli.net"), true);
    let err = exact_tv_tiny(
        Target::Compiled(&c),
        &[true, false],
        &[false, true],
        &[false],
        model(0.1),
    );
    assert!(matches!(err, Err(Error::SizeLimit(_))));
}

#[test]
fn tv_is_monotone_in_p() {
    let c = parse_netlist(fixture!("secret_wire.net")).unwrap();
    let t = Target::Raw(&c);
    let mut last = (0.0, 0.0);
    for p in [0.001, 0.01, 0.1] {
        let e = exact_tv_tiny(t, &[false], &[true], &[], model(p)).unwrap().estimate;
        let m = mc_advantage(t, &[false], &[true], &[], model(p), McOptions::new(5000, 4))
            .unwrap()
            .estimate;
        assert!(e >= last.0 && m >= last.1, "p = {p}");
        last = (e, m);
    }
}

fn assert_agree(t: Target<'_>, y0: &[bool], y1: &[bool], x: &[bool], p: f64, inner: InnerTv) {
    let exact = exact_tv_tiny(t, y0, y1, x, model(p)).unwrap();
    let opts = McOptions {
        inner,
        ..McOptions::new(20_000, 17)
    };
    let mc = mc_advantage(t, y0, y1, x, model(p), opts).unwrap();
    assert!(
        mc.agrees_with(exact.estimate),
        "exact {} vs mc {} ± {} (bias {})",
        exact.estimate,
        mc.estimate,
        mc.std_error,
        mc.bias_bound
    );
}

#[test]
fn mc_agrees_with_exact_on_raw_fixtures() {
    let exact_inner = McOptions::new(1000, 0).inner;
    let sw = parse_netlist(fixture!("secret_wire.net")).unwrap();
    let cm = parse_netlist(CNOT_MASK).unwrap();
    let cd = parse_netlist(CONDITIONED).unwrap();
    let and = parse_netlist(AND_SHARES).unwrap();
    for inner in [exact_inner, InnerTv::Sampled { tapes: 256 }] {
        assert_agree(Target::Raw(&sw), &[false], &[true], &[], 0.1, inner);
        assert_agree(Target::Raw(&cm), &[false], &[true], &[], 0.3, inner);
        assert_agree(Target::Raw(&cd), &[false], &[true], &[], 0.3, inner);
        assert_agree(Target::Raw(&and), &[true, true], &[false, true], &[], 0.3, inner);
    }
}

#[test]
fn mc_agrees_with_exact_on_a_compiled_block() {
    let c = compiled("in secret s\ngate NOT s\n", false);
    let t = Target::Compiled(&c);
    assert!(t.tape_bits() <= EXACT_MAX_TAPE);
    let exact = exact_tv_tiny(t, &[false], &[true], &[], model(0.3)).unwrap();
    // Some three positions of a codeword reveal its logical value.
    assert!(exact.estimate > 0.0);
    assert_agree(t, &[false], &[true], &[], 0.3, McOptions::new(1000, 0).inner);
}

#[test]
fn mc_requires_enough_samples() {
    let c = parse_netlist(fixture!("secret_wire.net")).unwrap();
    assert!(mc_advantage(
        Target::Raw(&c),
        &[false],
        &[true],
        &[],
        model(0.1),
        McOptions::new(999, 0)
    )
    .is_err());
}

#[test]
fn mc_is_reproducible() {
    let c = compiled(fixture!("one_toffoli.net"), false);
    let t = Target::Compiled(&c);
    let run = || {
        mc_advantage(
            t,
            &[true, false],
            &[false, true],
            &[false],
            model(0.05),
            McOptions::new(2000, 8),
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn raw_secret_wire_marginal_is_one() {
    let c = parse_netlist(fixture!("secret_wire.net")).unwrap();
    let r = marginal_independence(Target::Raw(&c), &[false], &[true], &[], MarginalOptions::new(1, 500, 3)).unwrap();
    assert_eq!(r.estimate, 1.0);
    assert_eq!(r.method, Method::PerWireMarginal);
    let r = marginal_independence(Target::Raw(&c), &[false], &[true], &[], MarginalOptions::new(3, 500, 3));
    assert!(r.is_err());
}

#[test]
fn masked_wires_have_uniform_marginals() {
    let c = parse_netlist(CNOT_MASK).unwrap();
    // The input event alone reveals s.
    let r = marginal_independence(
        Target::Raw(&c),
        &[false],
        &[true],
        &[],
        MarginalOptions::new(2, 4000, 1),
    )
    .unwrap();
    assert_eq!(r.estimate, 1.0);
    assert_eq!(r.method, Method::PairwiseMarginal);
    let c = compiled(fixture!("one_toffoli.net"), true);
    for order in [1, 2] {
        let r = marginal_independence(
            Target::Compiled(&c),
            &[true, false],
            &[false, true],
            &[false],
            MarginalOptions::new(order, 4000, 6),
        )
        .unwrap();
        assert!(r.consistent_with_zero(), "order {order}: {r:?}");
    }
}

#[test]
fn symbolic_observations_match_evaluated_values() {
    let c = compiled(fixture!("mixed.net"), true);
    let t = Target::Compiled(&c);
    let s = t.symbolic(&[true, false], &[true]).unwrap();
    assert_eq!(s.observations.len(), c.circuit.event_count());
    assert!(s.vars >= 6);
}

proptest::proptest! {
    #![proptest_config(proptest::test_runner::Config::with_cases(48))]
    #[test]
    fn exact_tv_is_a_symmetric_probability(
        gates in proptest::collection::vec((0usize..4, 0usize..4, 0usize..4), 1..5),
        p in 0.0f64..=1.0,
    ) {
        let regs = ["a", "b", "r", "t"];
        let mut net = String::from("in secret a\nin secret b\nreg r\nreg t\ngate RAND r\n");
        for (k, i, j) in gates {
            if i == j {
                net.push_str(&format!("gate NOT {}\n", regs[i]));
            } else if k == 3 {
                let other = (0..4).find(|&m| m != i && m != j).unwrap();
                net.push_str(&format!("gate TOF {} {} {}\n", regs[i], regs[other], regs[j]));
            } else {
                net.push_str(&format!("gate CNOT {} {}\n", regs[i], regs[j]));
            }
        }
        let c = parse_netlist(&net).unwrap();
        let t = Target::Raw(&c);
        let (y0, y1) = ([true, false], [false, true]);
        let forward = exact_tv_tiny(t, &y0, &y1, &[], model(p)).unwrap().estimate;
        let backward = exact_tv_tiny(t, &y1, &y0, &[], model(p)).unwrap().estimate;
        proptest::prop_assert!((0.0..=1.0 + 1e-12).contains(&forward));
        proptest::prop_assert!((forward - backward).abs() < 1e-12);
        proptest::prop_assert_eq!(exact_tv_tiny(t, &y0, &y0, &[], model(p)).unwrap().estimate, 0.0);
    }
}
