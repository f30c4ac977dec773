//! Exact leakage TV for tiny circuits by brute force.
//!
//! Every tape is evaluated for both secrets. Masks are enumerated as a binary
//! tree over the leakable events: each node keeps the classes of tapes that
//! agree on the events leaked so far. A class reached by only one of the
//! secrets keeps its contribution under any further refinement, so it is
//! settled at once, and a node without open classes closes its subtree.

use std::collections::BTreeMap;

use super::{AdvantageReport, LeakageModel, Method, Target};
use crate::circuit::{Evaluator, RandomTape};
use crate::error::{Error, Result};

pub const EXACT_MAX_TAPE: usize = 20;
pub const EXACT_MAX_EVENTS: usize = 24;

/// Symbol of one event under one tape: 0 skipped, 1 false, 2 true.
type Symbols = Vec<u8>;

struct Walk<'a> {
    s0: &'a [Symbols],
    s1: &'a [Symbols],
    p: f64,
    n0: f64,
    n1: f64,
    events: usize,
    nodes: usize,
}

impl Walk<'_> {
    /// Weighted TV over all masks of events `k..`, given the open classes
    /// and the settled contribution `closed` of the events before `k`.
    fn go(&mut self, k: usize, classes: &[(Vec<u32>, Vec<u32>)], closed: f64) -> f64 {
        self.nodes += 1;
        if k == self.events || classes.is_empty() {
            let open: f64 = classes
                .iter()
                .map(|(a, b)| (a.len() as f64 / self.n0 - b.len() as f64 / self.n1).abs())
                .sum();
            return (closed + open) / 2.0;
        }
        let skip = self.go(k + 1, classes, closed);
        let mut refined = Vec::new();
        let mut settled = closed;
        for (a, b) in classes {
            let mut parts: [(Vec<u32>, Vec<u32>); 3] = Default::default();
            for &t in a {
                parts[usize::from(self.s0[t as usize][k])].0.push(t);
            }
            for &t in b {
                parts[usize::from(self.s1[t as usize][k])].1.push(t);
            }
            for part in parts {
                match (part.0.is_empty(), part.1.is_empty()) {
                    (true, true) => {}
                    (false, false) => refined.push(part),
                    _ => settled += (part.0.len() as f64 / self.n0 - part.1.len() as f64 / self.n1).abs(),
                }
            }
        }
        let leak = self.go(k + 1, &refined, settled);
        (1.0 - self.p) * skip + self.p * leak
    }
}

/// Exact TV between the leakage transcripts of `y0` and `y1` at public
/// input `x`, averaging over every tape and every mask.
pub fn exact_tv_tiny(
    target: Target<'_>,
    y0: &[bool],
    y1: &[bool],
    x: &[bool],
    model: LeakageModel,
) -> Result<AdvantageReport> {
    target.check_inputs(y0, x)?;
    target.check_inputs(y1, x)?;
    let c = target.circuit();
    let tape_len = target.tape_bits();
    let leaky = c.leaky_events();
    if tape_len > EXACT_MAX_TAPE || leaky.len() > EXACT_MAX_EVENTS {
        return Err(Error::SizeLimit(format!(
            "exact TV needs at most {EXACT_MAX_TAPE} tape bits and {EXACT_MAX_EVENTS} leakable events, got {tape_len} and {}",
            leaky.len()
        )));
    }
    let mut ev = Evaluator::new(c);
    let mut symbols = |y: &[bool]| -> Result<Vec<Symbols>> {
        (0..1u64 << tape_len)
            .map(|w| {
                let mut tape = RandomTape::from_word(w, tape_len);
                target.run(&mut ev, y, x, &mut tape)?;
                Ok(leaky
                    .iter()
                    .map(|&e| match ev.values()[e] {
                        None => 0,
                        Some(false) => 1,
                        Some(true) => 2,
                    })
                    .collect())
            })
            .collect()
    };
    let s0 = symbols(y0)?;
    let s1 = symbols(y1)?;
    let n = s0.len();
    let all: Vec<u32> = (0..n as u32).collect();
    let mut walk = Walk {
        s0: &s0,
        s1: &s1,
        p: model.p(),
        n0: n as f64,
        n1: n as f64,
        events: leaky.len(),
        nodes: 0,
    };
    let tv = walk.go(0, &[(all.clone(), all)], 0.0);
    let mut detail = BTreeMap::new();
    detail.insert("tapes".into(), n as f64);
    detail.insert("leaky_events".into(), leaky.len() as f64);
    detail.insert("tree_nodes".into(), walk.nodes as f64);
    Ok(AdvantageReport {
        method: Method::ExactTiny,
        estimate: tv,
        std_error: 0.0,
        bias_bound: 0.0,
        samples: n,
        p: Some(model.p()),
        detail,
    })
}
