//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lrc_core::audit::{audit_shor, ZMask};
use lrc_core::circuit::{evaluate, parse_netlist, Circuit, RandomTape};
use lrc_core::compiler::{compile, location_report, standalone, CompileOptions, CompiledCircuit, Standalone};
use lrc_core::lab::{
    exact_tv_tiny, marginal_independence, mc_advantage, LeakageModel, MarginalOptions, McOptions, Target,
};
use lrc_core::noise::{lemma_sweep, phase_error_identity_distance};
use lrc_core::rng::stream;
use lrc_core::steane::{logical_value, overlap_parity, parse_word, word_string, SteaneTables};
use statrs::distribution::{ChiSquared, ContinuousCDF};

macro_rules! fixture {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $name))
    };
}

const ONE_TOFFOLI: &str = fixture!("one_toffoli.net");
const TWO_TOFFOLI: &str = fixture!("two_toffoli.net");
const MIXED: &str = fixture!("mixed.net");
const SECRET_WIRE: &str = fixture!("secret_wire.net");

const LISTED_ZERO: [&str; 7] = [
    "0000000", "0001111", "0110011", "1010101", "0111100", "1011010", "1100110",
];
const LISTED_ONE: [&str; 7] = [
    "1111111", "1110000", "1001100", "0101010", "1000011", "0100101", "0011001",
];

/// Secret pair of the one-Toffoli with equal outputs: x·y = 0 for both.
const Y0: [bool; 2] = [true, false];
const Y1: [bool; 2] = [false, true];

struct Outcome {
    pass: bool,
    detail: String,
}

/// Check, name and time limit.
type Criterion = (fn() -> Outcome, &'static str, Duration);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bits(a: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| a >> i & 1 == 1).collect()
}

fn all_inputs(n: usize) -> Vec<Vec<bool>> {
    (0..1u64 << n).map(|a| bits(a, n)).collect()
}

fn compiled_one_toffoli() -> CompiledCircuit {
    compile(&parse_netlist(ONE_TOFFOLI).unwrap(), CompileOptions::default()).unwrap()
}

fn criterion_1() -> Outcome {
    let t = SteaneTables::get();
    let check = |listed: &[&str], computed: &[u8], missing: &str| {
        let listed: BTreeSet<u8> = listed.iter().map(|s| parse_word(s).unwrap()).collect();
        let computed: BTreeSet<u8> = computed.iter().copied().collect();
        let extra: Vec<u8> = computed.difference(&listed).copied().collect();
        listed.is_subset(&computed) && extra == [parse_word(missing).unwrap()]
    };
    let zero = check(&LISTED_ZERO, &t.c_perp, "1101001");
    let one = check(&LISTED_ONE, &t.c_minus_c_perp, "0010110");
    let parity = t.c_perp.iter().all(|&w| !logical_value(w)) && t.c_minus_c_perp.iter().all(|&w| logical_value(w));
    let pass = zero && one && parity && t.c_perp.len() == 8 && t.codewords.len() == 16;
    outcome(
        pass,
        format!(
            "|C_perp| = {}, |C| = {}; listed words contained, unlisted words {} and {}",
            t.c_perp.len(),
            t.codewords.len(),
            word_string(0b1101001),
            word_string(0b0010110)
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = SteaneTables::get();
    let mut checked = 0;
    let mut failures = 0;
    for &u in &t.codewords {
        for &v in &t.codewords {
            checked += 1;
            if overlap_parity(u, v).unwrap() != (logical_value(u) && logical_value(v)) {
                failures += 1;
            }
        }
    }
    outcome(
        checked == 256 && failures == 0,
        format!("{checked} pairs, {failures} failures"),
    )
}

fn criterion_3() -> Outcome {
    let audit = audit_shor().unwrap();
    let expected: [(&[usize], &[usize]); 4] = [
        (&[1, 2], &[1, 2, 6]),
        (&[1, 2, 3], &[1, 2, 3, 6, 7]),
        (&[5, 6, 7], &[2, 4, 6, 7]),
        (&[6, 7], &[6, 7]),
    ];
    let marked_ok = audit.marked.len() == 4
        && audit.marked.iter().zip(expected).all(|(m, (pattern, syndrome))| {
            m.pattern == ZMask::from_wires(pattern) && m.syndrome == ZMask::from_wires(syndrome)
        });
    let syndromes: BTreeSet<ZMask> = audit.marked.iter().map(|m| m.syndrome).collect();
    let singles: BTreeSet<ZMask> = audit.single_error_syndromes.iter().map(|&(_, s)| s).collect();
    let distinct = syndromes.len() == 4 && syndromes.is_disjoint(&singles);
    let classes: BTreeSet<ZMask> = audit.multi_error_classes.iter().copied().collect();
    let want: BTreeSet<ZMask> = expected.iter().map(|(p, _)| ZMask::from_wires(p)).collect();
    let pass = marked_ok && distinct && want.is_subset(&classes) && audit.pass;
    outcome(
        pass,
        format!(
            "{} fault sites, {} multi-error classes ({} beyond the marked four), {} single-error syndromes",
            audit.sites.len(),
            audit.multi_error_classes.len(),
            audit.extra_classes.len(),
            singles.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let g = standalone(Standalone::ShorPrep).unwrap();
    let mut counts = [0usize; 128];
    for w in 0..1u64 << g.tape_bits {
        let word = g.run(&[], &mut RandomTape::from_word(w, g.tape_bits)).unwrap()[0];
        counts[usize::from(word)] += 1;
    }
    let pass = g.tape_bits == 6 && (0..128).all(|w: usize| counts[w] == usize::from(w.count_ones().is_multiple_of(2)));
    outcome(
        pass,
        format!("{} tapes, each even-weight word once", 1u64 << g.tape_bits),
    )
}

fn criterion_5() -> Outcome {
    let r = lemma_sweep(3, 4, 20, 2024).unwrap();
    let identity = phase_error_identity_distance().unwrap();
    let pass = r.pass && r.max_distance <= 1e-10 && r.random_functions >= 20 && identity <= 1e-12;
    outcome(
        pass,
        format!(
            "{} exhaustive + {} random functions, max distance {:.2e}, single-wire identity {:.2e}",
            r.exhaustive_functions, r.random_functions, r.max_distance, identity
        ),
    )
}

fn criterion_6() -> Outcome {
    const TAPES: usize = 10_000;
    let mut runs = 0;
    let mut mismatches = 0;
    for (k, net) in [ONE_TOFFOLI, TWO_TOFFOLI, MIXED].into_iter().enumerate() {
        let logical = parse_netlist(net).unwrap();
        let c = compile(&logical, CompileOptions::default()).unwrap();
        let (ns, np) = (logical.secret_inputs().len(), logical.public_inputs().len());
        let mut rng = stream(60 + k as u64, 0);
        for a in 0..1u64 << (ns + np) {
            let (y, x) = (bits(a, ns), bits(a >> ns, np));
            let want = evaluate(&logical, &y, &x, &mut RandomTape::default()).unwrap().outputs;
            for _ in 0..TAPES {
                let mut enc_tape = RandomTape::random(&mut rng, c.encoding_bits());
                let enc = c.encode(&y, &mut enc_tape).unwrap();
                let mut tape = RandomTape::random(&mut rng, c.circuit.rand_gates());
                let got = evaluate(&c.circuit, &enc.bits, &x, &mut tape).unwrap().outputs;
                runs += 1;
                mismatches += usize::from(got != want);
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{runs} compiled runs over 3 fixtures, {mismatches} mismatches"),
    )
}

fn criterion_7() -> Outcome {
    const SAMPLES: usize = 100_000;
    let allowed = [[false; 3], [true, false, false], [false, true, false], [true; 3]];
    let g = standalone(Standalone::Theta).unwrap();
    let mut rng = stream(70, 0);
    let mut counts = [0usize; 4];
    let mut outside = 0;
    for _ in 0..SAMPLES {
        let mut tape = RandomTape::random(&mut rng, g.tape_bits);
        let l: Vec<bool> = g
            .run(&[], &mut tape)
            .unwrap()
            .iter()
            .map(|&w| logical_value(w))
            .collect();
        match allowed.iter().position(|a| a[..] == l[..]) {
            Some(k) => counts[k] += 1,
            None => outside += 1,
        }
    }
    let expected = SAMPLES as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
    outcome(
        outside == 0 && p_value > 1e-3,
        format!("counts {counts:?}, {outside} outside the support, chi2 {chi2:.3}, p-value {p_value:.4}"),
    )
}

fn criterion_8() -> Outcome {
    const SAMPLES: usize = 100_000;
    let c = compiled_one_toffoli();
    let mut pass = true;
    let mut parts = Vec::new();
    for order in [1u8, 2] {
        for x in all_inputs(1) {
            let r = marginal_independence(
                Target::Compiled(&c),
                &Y0,
                &Y1,
                &x,
                MarginalOptions::new(order, SAMPLES, 80 + u64::from(order)),
            )
            .unwrap();
            pass &= r.consistent_with_zero();
            parts.push(format!(
                "order {order} z={}: {:.4} (se {:.4}, bias {:.4})",
                u8::from(x[0]),
                r.estimate,
                r.std_error,
                r.bias_bound
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn max_mc(target: Target<'_>, seed: u64) -> lrc_core::lab::AdvantageReport {
    let model = LeakageModel::new(0.01).unwrap();
    all_inputs(target.public_len())
        .iter()
        .map(|x| mc_advantage(target, &Y0, &Y1, x, model, McOptions::new(100_000, seed)).unwrap())
        .max_by(|a, b| a.estimate.total_cmp(&b.estimate))
        .unwrap()
}

fn criterion_9() -> Outcome {
    let raw = parse_netlist(ONE_TOFFOLI).unwrap();
    let c = compiled_one_toffoli();
    let r = max_mc(Target::Raw(&raw), 90);
    let k = max_mc(Target::Compiled(&c), 91);
    outcome(
        r.estimate >= 0.005 && k.consistent_with_zero(),
        format!(
            "raw {:.4} (se {:.5}); compiled {:.4} (se {:.5}, bias {:.4}, zero-consistency bound {:.5})",
            r.estimate,
            r.std_error,
            k.estimate,
            k.std_error,
            k.bias_bound,
            3.0 * k.std_error + k.bias_bound
        ),
    )
}

fn criterion_10() -> Outcome {
    let r = location_report(&compiled_one_toffoli()).unwrap();
    let own: Vec<String> = r
        .preparations
        .iter()
        .map(|p| format!("{} {}", p.gadget.name(), p.total))
        .chain(r.gadgets.iter().map(|g| format!("{} {}", g.kind.name(), g.total)))
        .collect();
    let pass = r.reference_locations == 20 && r.reference_pairs == 190 && r.reference_threshold == 1.0 / 190.0;
    outcome(
        pass,
        format!(
            "C(20,2) = {}, 1/190 = {:.5}; own locations: {}",
            r.reference_pairs,
            r.reference_threshold,
            own.join(", ")
        ),
    )
}

/// Tiny raw circuits the exhaustive oracle handles.
const TINY: [(&str, &str); 6] = [
    ("secret wire", SECRET_WIRE),
    ("one toffoli", ONE_TOFFOLI),
    ("masked cnot", "in secret s\nreg r\ngate RAND r\ngate CNOT r s\nout s\n"),
    (
        "conditioned",
        "in secret s\nreg r\nreg t\ngate RAND r\ncgate @1 CNOT s t\nout t\n",
    ),
    (
        "and of shares",
        "in secret a\nin secret b\nreg r\nreg t\ngate RAND r\ngate CNOT r t\ngate TOF a b t\n",
    ),
    ("mixed", MIXED),
];

fn criterion_11() -> Outcome {
    let c = parse_netlist(SECRET_WIRE).unwrap();
    let mut worst = 0.0f64;
    for p in [0.001, 0.01, 0.1] {
        let r = exact_tv_tiny(Target::Raw(&c), &[false], &[true], &[], LeakageModel::new(p).unwrap()).unwrap();
        worst = worst.max((r.estimate - p).abs());
    }
    let mut pass = worst <= 1e-12;
    let mut compared = 0;
    let mut disagreements = Vec::new();
    let model = LeakageModel::new(0.1).unwrap();
    for (k, (name, net)) in TINY.iter().enumerate() {
        let circuit: Circuit = parse_netlist(net).unwrap();
        let t = Target::Raw(&circuit);
        let ns = t.secret_len();
        let (y0, y1) = (vec![false; ns], vec![true; ns]);
        for x in all_inputs(t.public_len()) {
            let exact = exact_tv_tiny(t, &y0, &y1, &x, model).unwrap();
            let mc = mc_advantage(t, &y0, &y1, &x, model, McOptions::new(20_000, 110 + k as u64)).unwrap();
            compared += 1;
            if !mc.agrees_with(exact.estimate) {
                pass = false;
                disagreements.push(format!("{name}: exact {:.5} mc {:.5}", exact.estimate, mc.estimate));
            }
        }
    }
    outcome(
        pass,
        format!(
            "exact vs p: max error {worst:.1e}; mc vs exact on {compared} fixture inputs, disagreements: {}",
            if disagreements.is_empty() {
                "none".to_string()
            } else {
                disagreements.join(", ")
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (criterion_1, "steane tables", Duration::from_secs(1)),
        (criterion_2, "overlap lemma", Duration::from_secs(1)),
        (criterion_3, "shor-state fault patterns", Duration::from_secs(1)),
        (criterion_4, "shor-state distribution", Duration::from_secs(1)),
        (criterion_5, "leakage/dephasing equivalence", Duration::from_secs(30)),
        (criterion_6, "compiler functional equivalence", Duration::from_secs(120)),
        (criterion_7, "toffoli ancilla distribution", Duration::from_secs(60)),
        (
            criterion_8,
            "single-wire and within-block secrecy",
            Duration::from_secs(300),
        ),
        (criterion_9, "raw vs compiled separation", Duration::from_secs(300)),
        (criterion_10, "threshold arithmetic", Duration::from_secs(1)),
        (criterion_11, "oracle agreement", Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (n, (run, name, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= limit;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {}  {name}: {} [{:.2} s, limit {} s]",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
