//! Per-wire and pairwise marginal leakage.
//!
//! Tapes are sampled independently under each secret and every event value
//! is stored as bitsets over samples. The TV between the two value marginals
//! is computed for every event (order 1) or every pair of events on two
//! different positions of one code block (order 2; every pair for raw
//! circuits), and the maximum is reported. Two events on one position are
//! left out: a block that changes logical value between them shows the
//! change as their XOR.
//!
//! With `M` cells counted over all units and both secrets, Hoeffding and a
//! union bound put every empirical cell frequency within
//! `ε = sqrt(ln(2M/δ)/(2n))` of its mean with probability `1 − δ`, so the
//! maximum exceeds the true maximum by at most `K·ε`, `K` the largest number
//! of cells of one unit.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AdvantageReport, Method, Target};
use crate::circuit::{Evaluator, EventId, EventSource, RandomTape};
use crate::error::{Error, Result};
use crate::rng::{family, stream};

pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalOptions {
    pub order: u8,
    pub samples: usize,
    pub seed: u64,
    /// Failure probability of the bias bound.
    pub delta: f64,
}

impl MarginalOptions {
    pub fn new(order: u8, samples: usize, seed: u64) -> Self {
        MarginalOptions {
            order,
            samples,
            seed,
            delta: DEFAULT_DELTA,
        }
    }
}

/// Event values over all samples: `ones[w]` and `none[w]` cover samples
/// `64w..64w+64`.
struct Columns {
    ones: Vec<Vec<u64>>,
    none: Vec<Vec<u64>>,
    has_none: Vec<bool>,
}

impl Columns {
    fn count(words: &[u64]) -> u64 {
        words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    fn count_and(a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).map(|(x, y)| u64::from((x & y).count_ones())).sum()
    }
}

fn sample_columns(
    target: Target<'_>,
    y: &[bool],
    x: &[bool],
    events: &[EventId],
    samples: usize,
    seed: u64,
    family_base: u64,
) -> Result<Columns> {
    let words = samples.div_ceil(64);
    let per_word: Vec<(Vec<u64>, Vec<u64>)> = (0..words)
        .into_par_iter()
        .map(|w| -> Result<(Vec<u64>, Vec<u64>)> {
            let mut rng = stream(seed, family_base + w as u64);
            let mut ev = Evaluator::new(target.circuit());
            let mut ones = vec![0u64; events.len()];
            let mut none = vec![0u64; events.len()];
            for bit in 0..64.min(samples - 64 * w) {
                let mut tape = RandomTape::random(&mut rng, target.tape_bits());
                target.run(&mut ev, y, x, &mut tape)?;
                for (i, &e) in events.iter().enumerate() {
                    match ev.values()[e] {
                        Some(true) => ones[i] |= 1 << bit,
                        Some(false) => {}
                        None => none[i] |= 1 << bit,
                    }
                }
            }
            Ok((ones, none))
        })
        .collect::<Result<_>>()?;
    let mut cols = Columns {
        ones: vec![Vec::with_capacity(words); events.len()],
        none: vec![Vec::with_capacity(words); events.len()],
        has_none: vec![false; events.len()],
    };
    for (ones, none) in per_word {
        for i in 0..events.len() {
            cols.ones[i].push(ones[i]);
            cols.none[i].push(none[i]);
            cols.has_none[i] |= none[i] != 0;
        }
    }
    Ok(cols)
}

/// Cell counts of one event: (skipped, false, true).
fn single_cells(c: &Columns, i: usize, n: u64) -> [u64; 3] {
    let ones = Columns::count(&c.ones[i]);
    let none = if c.has_none[i] { Columns::count(&c.none[i]) } else { 0 };
    [none, n - ones - none, ones]
}

/// Cell counts of a pair, indexed `3·s_i + s_j` with symbols as in
/// [`single_cells`].
fn pair_cells(c: &Columns, i: usize, j: usize, n: u64) -> [u64; 9] {
    let (mi, mj) = (single_cells(c, i, n), single_cells(c, j, n));
    let both = |a: &[u64], b: &[u64]| Columns::count_and(a, b);
    let nn = if c.has_none[i] && c.has_none[j] {
        both(&c.none[i], &c.none[j])
    } else {
        0
    };
    let n1 = if c.has_none[i] { both(&c.none[i], &c.ones[j]) } else { 0 };
    let one_n = if c.has_none[j] { both(&c.ones[i], &c.none[j]) } else { 0 };
    let t11 = both(&c.ones[i], &c.ones[j]);
    let n0 = mi[0] - nn - n1;
    let zero_n = mj[0] - nn - one_n;
    let t10 = mi[2] - one_n - t11;
    let t01 = mj[2] - n1 - t11;
    let t00 = n - nn - n1 - n0 - one_n - zero_n - t10 - t01 - t11;
    [nn, n0, n1, zero_n, t00, t01, one_n, t10, t11]
}

fn tv_cells(a: &[u64], b: &[u64], n: f64) -> (f64, f64) {
    let mut tv = 0.0;
    let mut se = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (p, q) = (x as f64 / n, y as f64 / n);
        tv += (p - q).abs();
        se += ((p * (1.0 - p) + q * (1.0 - q)) / n).sqrt();
    }
    (tv / 2.0, se / 2.0)
}

/// Maximum marginal TV over single events (order 1) or event pairs (order 2)
/// between secrets `y0` and `y1` at public input `x`.
pub fn marginal_independence(
    target: Target<'_>,
    y0: &[bool],
    y1: &[bool],
    x: &[bool],
    opts: MarginalOptions,
) -> Result<AdvantageReport> {
    if !matches!(opts.order, 1 | 2) {
        return Err(Error::InvalidArgument(format!(
            "order {} (expected 1 or 2)",
            opts.order
        )));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("no samples requested".into()));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta {} outside (0, 1)", opts.delta)));
    }
    target.check_inputs(y0, x)?;
    target.check_inputs(y1, x)?;
    let c = target.circuit();
    let events = c.leaky_events();
    let conditioned: Vec<bool> = events
        .iter()
        .map(|&e| match c.events()[e].source {
            EventSource::Gate { gate, .. } => c.gates()[gate].condition.is_some(),
            EventSource::Input => false,
        })
        .collect();
    let symbols = |i: usize| if conditioned[i] { 3 } else { 2 };

    let pairs: Vec<(usize, usize)> = if opts.order == 2 {
        match target {
            Target::Raw(_) => (0..events.len())
                .flat_map(|i| (i + 1..events.len()).map(move |j| (i, j)))
                .collect(),
            Target::Compiled(cc) => {
                let mut slot = vec![None; c.registers().len()];
                for (b, info) in cc.meta.blocks.iter().enumerate() {
                    for (k, &r) in info.block.regs().iter().enumerate() {
                        slot[r] = Some((b, k));
                    }
                }
                let mut by_block: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
                for (i, &e) in events.iter().enumerate() {
                    if let Some((b, k)) = slot[c.events()[e].reg] {
                        by_block.entry(b).or_default().push((i, k));
                    }
                }
                let mut pairs = Vec::new();
                for ids in by_block.values() {
                    for (a, &(i, ki)) in ids.iter().enumerate() {
                        pairs.extend(ids[a + 1..].iter().filter(|&&(_, kj)| kj != ki).map(|&(j, _)| (i, j)));
                    }
                }
                pairs
            }
        }
    } else {
        Vec::new()
    };

    let c0 = sample_columns(target, y0, x, &events, opts.samples, opts.seed, family::TAPE)?;
    let c1 = sample_columns(
        target,
        y1,
        x,
        &events,
        opts.samples,
        opts.seed,
        family::TAPE + family::SECOND,
    )?;
    let n = opts.samples as u64;
    let nf = opts.samples as f64;

    // (tv, se, first, second, cells)
    let (units, best, cells_total, k_max) = if opts.order == 1 {
        let best = (0..events.len())
            .into_par_iter()
            .map(|i| {
                let (tv, se) = tv_cells(&single_cells(&c0, i, n), &single_cells(&c1, i, n), nf);
                (tv, se, i, i)
            })
            .reduce(|| (0.0, 0.0, usize::MAX, usize::MAX), pick);
        let cells: usize = (0..events.len()).map(symbols).sum();
        let k = (0..events.len()).map(symbols).max().unwrap_or(0);
        (events.len(), best, cells, k)
    } else {
        let best = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (tv, se) = tv_cells(&pair_cells(&c0, i, j, n), &pair_cells(&c1, i, j, n), nf);
                (tv, se, i, j)
            })
            .reduce(|| (0.0, 0.0, usize::MAX, usize::MAX), pick);
        let cells: usize = pairs.iter().map(|&(i, j)| symbols(i) * symbols(j)).sum();
        let k = pairs.iter().map(|&(i, j)| symbols(i) * symbols(j)).max().unwrap_or(0);
        (pairs.len(), best, cells, k)
    };
    let (estimate, std_error, first, second) = best;
    let m = 2.0 * cells_total.max(1) as f64;
    let epsilon = ((2.0 * m / opts.delta).ln() / (2.0 * nf)).sqrt();

    let mut detail = BTreeMap::new();
    detail.insert("units".into(), units as f64);
    detail.insert("cells".into(), cells_total as f64);
    detail.insert("epsilon".into(), epsilon);
    detail.insert("delta".into(), opts.delta);
    if first != usize::MAX {
        detail.insert("argmax_event".into(), events[first] as f64);
        detail.insert("argmax_second_event".into(), events[second] as f64);
    }
    Ok(AdvantageReport {
        method: if opts.order == 1 {
            Method::PerWireMarginal
        } else {
            Method::PairwiseMarginal
        },
        estimate,
        std_error,
        bias_bound: (k_max as f64 * epsilon).min(1.0),
        samples: opts.samples,
        p: None,
        detail,
    })
}

/// Larger TV wins; ties go to the earlier unit so the result is
/// independent of scheduling.
fn pick(a: (f64, f64, usize, usize), b: (f64, f64, usize, usize)) -> (f64, f64, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && (b.2, b.3) < (a.2, a.3)) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn columns(ones: &[u64], none: &[u64]) -> Columns {
        Columns {
            ones: ones.iter().map(|&w| vec![w]).collect(),
            none: none.iter().map(|&w| vec![w]).collect(),
            has_none: none.iter().map(|&w| w != 0).collect(),
        }
    }

    #[test]
    fn pair_cells_partition_samples() {
        // Eight samples; event 1 is skipped on samples 0 and 1.
        let c = columns(&[0b1010_1100, 0b0110_0100], &[0, 0b0000_0011]);
        let cells = pair_cells(&c, 0, 1, 8);
        assert_eq!(cells.iter().sum::<u64>(), 8);
        let mut brute = [0u64; 9];
        for s in 0..8 {
            let sym = |i: usize| {
                if c.none[i][0] >> s & 1 == 1 {
                    0
                } else if c.ones[i][0] >> s & 1 == 1 {
                    2
                } else {
                    1
                }
            };
            brute[3 * sym(0) + sym(1)] += 1;
        }
        assert_eq!(cells, brute);
    }

    #[test]
    fn cell_tv() {
        assert_eq!(tv_cells(&[0, 4, 0], &[0, 0, 4], 4.0).0, 1.0);
        assert_eq!(tv_cells(&[0, 2, 2], &[0, 2, 2], 4.0).0, 0.0);
    }
}
