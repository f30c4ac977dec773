use std::fs;
use std::io::Write as _;

use anyhow::{bail, Context, Result};
use lrc_core::audit::{audit_shor, transversality_audit};
use lrc_core::circuit::{serialize_netlist, EventSource};
use lrc_core::compiler::{compile as compile_circuit, location_report, CompileOptions};
use lrc_core::lab::{
    exact_tv_tiny, marginal_independence, mc_advantage, run_rounds, AdvantageReport, InnerTv, LeakageModel,
    MarginalOptions, McOptions, TapeSource, Target,
};
use lrc_core::noise::lemma_sweep;
use lrc_core::steane::{logical_value, overlap_parity, pairwise_uniformity_check, word_string, SteaneTables};
use serde_json::json;

use crate::io::{bit_string, bits, load, load_compiled, meta_path, print_json, read_netlist};
use crate::{AnalyzeArgs, AuditArgs, AuditKind, CompileArgs, Mode, NoiseArgs, OnOff, ReportArgs, RunArgs, Status};

/// Public inputs are enumerated when no `--x` is given, up to this width.
const MAX_ENUMERATED_PUBLIC: usize = 8;

fn status(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn compile(a: CompileArgs) -> Result<Status> {
    let logical = read_netlist(&a.input)?;
    let options = CompileOptions {
        level: a.level,
        ec: a.ec == OnOff::On,
        ..Default::default()
    };
    let compiled = compile_circuit(&logical, options)?;
    fs::write(&a.out, serialize_netlist(&compiled.circuit)).with_context(|| format!("writing {}", a.out.display()))?;
    let meta = meta_path(&a.out);
    fs::write(&meta, serde_json::to_string(&compiled.meta)?).with_context(|| format!("writing {}", meta.display()))?;

    let report = location_report(&compiled)?;
    let mut out = json!({
        "circuit": a.out,
        "meta": meta,
        "level": a.level,
        "ec": options.ec,
        "encoding_bits": compiled.encoding_bits(),
        "rand_gates": compiled.circuit.rand_gates(),
        "size": report.size,
        "log": compiled.meta.log,
    });
    if a.dump_gadgets {
        out["gadgets"] = serde_json::to_value(&compiled.meta.gadgets)?;
    }
    if a.dump_events {
        let c = &compiled.circuit;
        let events: Vec<_> = c
            .events()
            .iter()
            .enumerate()
            .map(|(id, ev)| {
                let (gate, port) = match ev.source {
                    EventSource::Input => (None, None),
                    EventSource::Gate { gate, port } => (Some(gate), Some(port)),
                };
                json!({
                    "id": id,
                    "register": c.register(ev.reg).name,
                    "gate": gate,
                    "port": port,
                    "leak_free": c.is_leak_free(id),
                })
            })
            .collect();
        out["events"] = json!(events);
    }
    print_json(&out)?;
    Ok(Status::Pass)
}

pub fn run(a: RunArgs) -> Result<Status> {
    let loaded = load(&a.circuit)?;
    let target = loaded.target();
    let secret = bits(&a.secret, "--secret")?;
    let inputs = a
        .inputs
        .iter()
        .map(|s| bits(s, "--input"))
        .collect::<Result<Vec<_>>>()?;
    let tapes = match &a.tape {
        Some(t) => TapeSource::Fixed(bits(t, "--tape")?),
        None => TapeSource::Seeded,
    };
    let transcripts = run_rounds(
        target,
        &secret,
        &inputs,
        a.rounds,
        LeakageModel::new(a.leak_p)?,
        a.seed,
        &tapes,
    )?;
    let mut text = String::new();
    for t in &transcripts {
        text.push_str(&serde_json::to_string(t)?);
        text.push('\n');
    }
    match &a.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(Status::Pass)
}

fn public_candidates(target: Target<'_>, x: Option<&str>) -> Result<Vec<Vec<bool>>> {
    if let Some(x) = x {
        return Ok(vec![bits(x, "--x")?]);
    }
    let n = target.public_len();
    if n > MAX_ENUMERATED_PUBLIC {
        bail!("{n} public bits; pass --x");
    }
    Ok((0..1u64 << n)
        .map(|v| (0..n).map(|i| v >> i & 1 == 1).collect())
        .collect())
}

pub fn analyze(a: AnalyzeArgs) -> Result<Status> {
    let loaded = load(&a.circuit)?;
    let target = loaded.target();
    let y0 = bits(&a.y0, "--y0")?;
    let y1 = bits(&a.y1, "--y1")?;
    let mode = a.mode;
    let seed = || a.seed.with_context(|| format!("--mode {mode:?} needs --seed"));
    let samples = || a.samples.with_context(|| format!("--mode {mode:?} needs --samples"));
    let candidates = public_candidates(target, a.x.as_deref())?;

    let mut best: Option<(AdvantageReport, Vec<bool>)> = None;
    for x in &candidates {
        let r = match a.mode {
            Mode::Tv => {
                let p = a.leak_p.context("--mode tv needs --leak-p")?;
                let mut opts = McOptions::new(samples()?, seed()?);
                if let Some(tapes) = a.sampled_inner {
                    opts.inner = InnerTv::Sampled { tapes };
                }
                mc_advantage(target, &y0, &y1, x, LeakageModel::new(p)?, opts)?
            }
            Mode::Exact => {
                let p = a.leak_p.context("--mode exact needs --leak-p")?;
                exact_tv_tiny(target, &y0, &y1, x, LeakageModel::new(p)?)?
            }
            Mode::Marginal | Mode::Pairwise => {
                let order = if a.mode == Mode::Marginal { 1 } else { 2 };
                marginal_independence(target, &y0, &y1, x, MarginalOptions::new(order, samples()?, seed()?))?
            }
        };
        if best.as_ref().is_none_or(|(b, _)| r.estimate > b.estimate) {
            best = Some((r, x.clone()));
        }
    }
    let (mut report, x) = best.context("no public input to analyze")?;
    let x_value = x.iter().rev().fold(0.0, |acc, &b| 2.0 * acc + f64::from(u8::from(b)));
    report.detail.insert("x".into(), x_value);
    report.detail.insert("x_candidates".into(), candidates.len() as f64);
    print_json(&json!({
        "x": bit_string(&x),
        "consistent_with_zero": report.consistent_with_zero(),
        "report": report,
    }))?;
    Ok(Status::Pass)
}

pub fn audit(a: AuditArgs) -> Result<Status> {
    match a.which {
        AuditKind::Steane => {
            let t = SteaneTables::get();
            let mut overlap_failures = Vec::new();
            for &u in &t.codewords {
                for &v in &t.codewords {
                    if overlap_parity(u, v)? != (logical_value(u) && logical_value(v)) {
                        overlap_failures.push((word_string(u), word_string(v)));
                    }
                }
            }
            let pairwise = pairwise_uniformity_check();
            let pass =
                t.c_perp.len() == 8 && t.codewords.len() == 16 && overlap_failures.is_empty() && pairwise.uniform;
            let words = |ws: &[u8]| ws.iter().map(|&w| word_string(w)).collect::<Vec<_>>();
            print_json(&json!({
                "h": words(&t.h),
                "zero_codewords": words(&t.c_perp),
                "one_codewords": words(&t.c_minus_c_perp),
                "logical_x_support": t.logical_x_support,
                "logical_z_support": t.logical_z_support,
                "overlap_pairs": t.codewords.len() * t.codewords.len(),
                "overlap_failures": overlap_failures,
                "pairwise": pairwise,
                "pass": pass,
            }))?;
            Ok(status(pass))
        }
        AuditKind::Shor => {
            let r = audit_shor()?;
            print_json(&r)?;
            Ok(status(r.pass))
        }
        AuditKind::Transversality { circuit } => {
            let c = load_compiled(&circuit)?;
            let r = transversality_audit(&c);
            print_json(&r)?;
            Ok(status(r.pass))
        }
    }
}

pub fn noise_equiv(a: NoiseArgs) -> Result<Status> {
    let r = lemma_sweep(a.wires, a.alphabet, a.trials, a.seed)?;
    print_json(&r)?;
    Ok(status(r.pass))
}

pub fn report(a: ReportArgs) -> Result<Status> {
    let c = load_compiled(&a.circuit)?;
    print_json(&location_report(&c)?)?;
    Ok(Status::Pass)
}
