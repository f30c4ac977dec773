//! Mask-decomposed Monte-Carlo estimate of the leakage TV distance.
//!
//! Masks are independent of the secret, so the transcript TV equals
//! `E_w TV(V_w | y0, V_w | y1)`. Masks are sampled; the inner TV of each
//! sampled mask is either computed exactly from the wire polynomials or
//! estimated from paired tape samples.
//!
//! Exact inner TV: let `N` be the variables occurring in monomials of degree
//! two or more. With `N` fixed, the observed bits are `c(a) ⊕ A·r` for the
//! remaining variables `r`, i.e. uniform on a coset of `im A`. When both
//! secrets give the same `im A`, the left kernel `Λ` of `A` labels cosets,
//! so only the polynomials `Λ·c` over the variables of `N` need to be
//! enumerated, and identical `Λ·c` means zero distance without enumeration.

use std::collections::{BTreeMap, HashMap};

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anf::{Poly, Var};
use super::{sample_mask, AdvantageReport, LeakageModel, Method, Target};
use crate::circuit::{Evaluator, EventId, RandomTape};
use crate::error::{Error, Result};
use crate::rng::{family, stream, Rng};

/// Observation bits per mask handled exactly; larger masks count as TV 1.
pub const MAX_MASK_BITS: usize = 128;
const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InnerTv {
    /// Exact from polynomials, enumerating at most `max_vars` variables;
    /// beyond that, `fallback_samples` paired samples of those variables.
    Exact { max_vars: usize, fallback_samples: usize },
    /// Empirical TV of `tapes` paired circuit runs per mask.
    Sampled { tapes: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    pub inner: InnerTv,
    pub bootstrap: usize,
}

impl McOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        McOptions {
            samples,
            seed,
            inner: InnerTv::Exact {
                max_vars: 20,
                fallback_samples: 4096,
            },
            bootstrap: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct MaskResult {
    tv: f64,
    bias: f64,
    bits: usize,
    kind: Kind,
    vars: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Kind {
    #[default]
    Identical,
    Eliminated,
    Enumerated,
    Fallback,
    Capped,
}

pub fn mc_advantage(
    target: Target<'_>,
    y0: &[bool],
    y1: &[bool],
    x: &[bool],
    model: LeakageModel,
    opts: McOptions,
) -> Result<AdvantageReport> {
    if opts.samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "{} samples (at least 1000 required)",
            opts.samples
        )));
    }
    target.check_inputs(y0, x)?;
    target.check_inputs(y1, x)?;
    let leaky = target.circuit().leaky_events();
    let mut symbolic_failed = false;

    let rows = match opts.inner {
        InnerTv::Exact { .. } => match (target.symbolic(y0, x), target.symbolic(y1, x)) {
            (Ok(s0), Ok(s1)) => {
                let mut r0 = Vec::with_capacity(s0.observations.len());
                let mut r1 = Vec::with_capacity(s1.observations.len());
                for (o0, o1) in s0.observations.iter().zip(&s1.observations) {
                    r0.push(o0.rows()?);
                    r1.push(o1.rows()?);
                }
                Some((r0, r1))
            }
            (Err(Error::SizeLimit(_)), _) | (_, Err(Error::SizeLimit(_))) => {
                symbolic_failed = true;
                None
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        },
        InnerTv::Sampled { .. } => None,
    };
    let sampled_tapes = match opts.inner {
        InnerTv::Sampled { tapes } => tapes,
        InnerTv::Exact { fallback_samples, .. } => fallback_samples,
    };

    let chunks = opts.samples.div_ceil(CHUNK);
    let results: Vec<Vec<MaskResult>> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<MaskResult>> {
            let mut mask_rng = stream(opts.seed, family::MASK + c as u64);
            let n = CHUNK.min(opts.samples - c * CHUNK);
            let mut out = Vec::with_capacity(n);
            for k in 0..n {
                let mask = sample_mask(&leaky, model.p(), &mut mask_rng);
                let index = (c * CHUNK + k) as u64;
                let mut inner_rng = stream(opts.seed, family::INNER + index);
                let r = match (&rows, opts.inner) {
                    (
                        Some((r0, r1)),
                        InnerTv::Exact {
                            max_vars,
                            fallback_samples,
                        },
                    ) => {
                        let a: Vec<&Poly> = mask.iter().flat_map(|&e| &r0[e]).collect();
                        let b: Vec<&Poly> = mask.iter().flat_map(|&e| &r1[e]).collect();
                        inner_exact(&a, &b, max_vars, fallback_samples, &mut inner_rng)
                    }
                    _ => inner_sampled(target, y0, y1, x, &mask, sampled_tapes, &mut inner_rng)?,
                };
                out.push(r);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let results: Vec<MaskResult> = results.into_iter().flatten().collect();

    let n = results.len() as f64;
    let tvs: Vec<f64> = results.iter().map(|r| r.tv).collect();
    let mean = tvs.iter().sum::<f64>() / n;
    let var = tvs.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let bias = results.iter().map(|r| r.bias).sum::<f64>() / n;

    let mut boot_rng = stream(opts.seed, family::BOOTSTRAP);
    let boots: Vec<f64> = (0..opts.bootstrap)
        .map(|_| {
            (0..tvs.len())
                .map(|_| tvs[boot_rng.random_range(0..tvs.len())])
                .sum::<f64>()
                / n
        })
        .collect();
    let std_error = if boots.len() > 1 {
        let bm = boots.iter().sum::<f64>() / boots.len() as f64;
        (boots.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (boots.len() - 1) as f64).sqrt()
    } else {
        (var / n).sqrt()
    };

    let mut detail = BTreeMap::new();
    let count = |k: Kind| results.iter().filter(|r| r.kind == k).count() as f64;
    detail.insert("identical_masks".into(), count(Kind::Identical));
    detail.insert("eliminated_masks".into(), count(Kind::Eliminated));
    detail.insert("enumerated_masks".into(), count(Kind::Enumerated));
    detail.insert("fallback_masks".into(), count(Kind::Fallback));
    detail.insert("capped_masks".into(), count(Kind::Capped));
    detail.insert(
        "nonzero_masks".into(),
        results.iter().filter(|r| r.tv > 0.0).count() as f64,
    );
    detail.insert(
        "mean_mask_bits".into(),
        results.iter().map(|r| r.bits as f64).sum::<f64>() / n,
    );
    detail.insert(
        "max_enumerated_vars".into(),
        results.iter().map(|r| r.vars).max().unwrap_or(0) as f64,
    );
    detail.insert("analytic_std_error".into(), (var / n).sqrt());
    detail.insert("leaky_events".into(), leaky.len() as f64);
    detail.insert("symbolic_failed".into(), f64::from(u8::from(symbolic_failed)));

    Ok(AdvantageReport {
        method: Method::MaskDecomposedMc,
        estimate: mean,
        std_error,
        bias_bound: bias,
        samples: results.len(),
        p: Some(model.p()),
        detail,
    })
}

/// Row reduction over GF(2) that records which input rows were combined.
struct Eliminator {
    pivots: Vec<(usize, Vec<u64>, u128)>,
    kernel: Vec<u128>,
}

impl Eliminator {
    fn new(rows: &[Vec<u64>]) -> Self {
        let mut e = Eliminator {
            pivots: Vec::new(),
            kernel: Vec::new(),
        };
        for (i, r) in rows.iter().enumerate() {
            let mut row = r.clone();
            let mut tag = 1u128 << i;
            for (col, prow, ptag) in &e.pivots {
                if row[col / 64] >> (col % 64) & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(prow) {
                        *a ^= b;
                    }
                    tag ^= ptag;
                }
            }
            match row.iter().enumerate().find(|(_, w)| **w != 0) {
                Some((k, w)) => e.pivots.push((k * 64 + w.trailing_zeros() as usize, row, tag)),
                None => e.kernel.push(tag),
            }
        }
        e
    }
}

fn combine(polys: &[Poly], tag: u128) -> Poly {
    let mut acc = Poly::zero();
    for (i, p) in polys.iter().enumerate() {
        if tag >> i & 1 == 1 {
            acc = acc.xor(p);
        }
    }
    acc
}

/// Polynomials compiled against a dense variable index.
struct Compiled {
    rows: Vec<Vec<u64>>,
}

impl Compiled {
    fn new(polys: &[Poly], index: &HashMap<Var, usize>) -> Self {
        Compiled {
            rows: polys
                .iter()
                .map(|p| {
                    p.terms()
                        .iter()
                        .map(|m| m.iter().fold(0u64, |acc, v| acc | 1 << index[v]))
                        .collect()
                })
                .collect(),
        }
    }

    fn key(&self, a: u64) -> u128 {
        self.rows.iter().enumerate().fold(0u128, |key, (i, monos)| {
            let bit = monos.iter().fold(false, |acc, &m| acc ^ (a & m == m));
            key | (u128::from(bit) << i)
        })
    }
}

fn tv_of_counts(mut k0: Vec<u128>, mut k1: Vec<u128>) -> f64 {
    let (n0, n1) = (k0.len() as f64, k1.len() as f64);
    k0.sort_unstable();
    k1.sort_unstable();
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < k0.len() || j < k1.len() {
        let key = match (k0.get(i), k1.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        let mut c0 = 0;
        while i < k0.len() && k0[i] == key {
            c0 += 1;
            i += 1;
        }
        let mut c1 = 0;
        while j < k1.len() && k1[j] == key {
            c1 += 1;
            j += 1;
        }
        sum += (c0 as f64 / n0 - c1 as f64 / n1).abs();
    }
    sum / 2.0
}

/// Exact or fallback TV between the distributions of `q0` and `q1` as
/// functions of uniform variables.
fn distribution_tv(q0: &[Poly], q1: &[Poly], max_vars: usize, fallback: usize, rng: &mut Rng) -> MaskResult {
    let mut vars: Vec<Var> = q0
        .iter()
        .chain(q1)
        .flat_map(|p| p.terms().iter().flat_map(|m| m.iter().copied()))
        .collect();
    vars.sort_unstable();
    vars.dedup();
    let bits = q0.len();
    if vars.len() <= max_vars.min(63) {
        let index: HashMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let (c0, c1) = (Compiled::new(q0, &index), Compiled::new(q1, &index));
        let total = 1u64 << vars.len();
        let k0 = (0..total).map(|a| c0.key(a)).collect();
        let k1 = (0..total).map(|a| c1.key(a)).collect();
        return MaskResult {
            tv: tv_of_counts(k0, k1),
            bias: 0.0,
            bits,
            kind: Kind::Enumerated,
            vars: vars.len(),
        };
    }
    let sample = |q: &[Poly], rng: &mut Rng| -> Vec<u128> {
        (0..fallback)
            .map(|_| {
                let a: HashMap<Var, bool> = vars.iter().map(|&v| (v, rng.random())).collect();
                q.iter()
                    .enumerate()
                    .fold(0u128, |key, (i, p)| key | (u128::from(p.eval(|v| a[&v])) << i))
            })
            .collect()
    };
    let (k0, k1) = (sample(q0, rng), sample(q1, rng));
    // E TV(empirical, true) ≤ ½·sqrt(K/m) per side, K the support size.
    let support = 2f64.powi(bits.min(vars.len()) as i32);
    MaskResult {
        tv: tv_of_counts(k0, k1),
        bias: (support / fallback as f64).sqrt().min(1.0),
        bits,
        kind: Kind::Fallback,
        vars: vars.len(),
    }
}

fn inner_exact(a: &[&Poly], b: &[&Poly], max_vars: usize, fallback: usize, rng: &mut Rng) -> MaskResult {
    let bits = a.len();
    if a == b {
        return MaskResult {
            bits,
            ..Default::default()
        };
    }
    if bits > MAX_MASK_BITS {
        return MaskResult {
            tv: 1.0,
            bits,
            kind: Kind::Capped,
            ..Default::default()
        };
    }
    let mut nonlinear: Vec<Var> = a
        .iter()
        .chain(b)
        .flat_map(|p| p.terms().iter().filter(|m| m.len() > 1).flat_map(|m| m.iter().copied()))
        .collect();
    nonlinear.sort_unstable();
    nonlinear.dedup();
    let is_nonlinear = |v: &Var| nonlinear.binary_search(v).is_ok();

    // Split each row into its linear part on the other variables and the rest.
    let mut col: HashMap<Var, usize> = HashMap::new();
    for p in a.iter().chain(b) {
        for m in p.terms() {
            if m.len() == 1 && !is_nonlinear(&m[0]) {
                let n = col.len();
                col.entry(m[0]).or_insert(n);
            }
        }
    }
    let words = col.len().div_ceil(64).max(1);
    let split = |rows: &[&Poly]| -> (Vec<Vec<u64>>, Vec<Poly>) {
        let mut lin = Vec::with_capacity(rows.len());
        let mut rest = Vec::with_capacity(rows.len());
        for p in rows {
            let mut l = vec![0u64; words];
            for m in p.terms() {
                if let [v] = m.as_slice() {
                    if !is_nonlinear(v) {
                        l[col[v] / 64] |= 1 << (col[v] % 64);
                    }
                }
            }
            lin.push(l);
            rest.push(p.retain(|m| m.len() != 1 || is_nonlinear(&m[0])));
        }
        (lin, rest)
    };
    let (lin0, rest0) = split(a);
    let (lin1, rest1) = split(b);
    let e0 = Eliminator::new(&lin0);
    let e1 = Eliminator::new(&lin1);
    let same_image = e0.pivots.len() == e1.pivots.len()
        && e0.kernel.iter().all(|&t| {
            let mut acc = vec![0u64; words];
            for (i, r) in lin1.iter().enumerate() {
                if t >> i & 1 == 1 {
                    for (x, y) in acc.iter_mut().zip(r) {
                        *x ^= y;
                    }
                }
            }
            acc.iter().all(|&w| w == 0)
        });

    if same_image {
        let q0: Vec<Poly> = e0.kernel.iter().map(|&t| combine(&rest0, t)).collect();
        let q1: Vec<Poly> = e0.kernel.iter().map(|&t| combine(&rest1, t)).collect();
        if q0 == q1 {
            return MaskResult {
                bits,
                kind: Kind::Eliminated,
                ..Default::default()
            };
        }
        let mut r = distribution_tv(&q0, &q1, max_vars, fallback, rng);
        r.bits = bits;
        return r;
    }
    let full0: Vec<Poly> = a.iter().map(|&p| p.clone()).collect();
    let full1: Vec<Poly> = b.iter().map(|&p| p.clone()).collect();
    distribution_tv(&full0, &full1, max_vars, fallback, rng)
}

/// Packs masked observations, two bits per event, for counting.
fn observed_key(values: &[Option<bool>], mask: &[EventId]) -> u128 {
    mask.iter().enumerate().fold(0u128, |key, (i, &e)| {
        let sym = match values[e] {
            None => 0u128,
            Some(false) => 1,
            Some(true) => 2,
        };
        key | sym << (2 * i)
    })
}

fn inner_sampled(
    target: Target<'_>,
    y0: &[bool],
    y1: &[bool],
    x: &[bool],
    mask: &[EventId],
    tapes: usize,
    rng: &mut Rng,
) -> Result<MaskResult> {
    let bits = mask.len();
    if mask.is_empty() {
        return Ok(MaskResult::default());
    }
    if 2 * mask.len() > MAX_MASK_BITS {
        return Ok(MaskResult {
            tv: 1.0,
            bits,
            kind: Kind::Capped,
            ..Default::default()
        });
    }
    let mut ev = Evaluator::new(target.circuit());
    let mut keys = |y: &[bool], rng: &mut Rng| -> Result<Vec<u128>> {
        (0..tapes)
            .map(|_| {
                let mut tape = RandomTape::random(rng, target.tape_bits());
                target.run(&mut ev, y, x, &mut tape)?;
                Ok(observed_key(ev.values(), mask))
            })
            .collect()
    };
    let k0 = keys(y0, rng)?;
    let k1 = keys(y1, rng)?;
    let conditioned = mask
        .iter()
        .filter(|&&e| match target.circuit().events()[e].source {
            crate::circuit::EventSource::Gate { gate, .. } => target.circuit().gates()[gate].condition.is_some(),
            crate::circuit::EventSource::Input => false,
        })
        .count();
    // Support: two symbols per plain event, three per conditioned port.
    let support = 2f64.powi((mask.len() - conditioned) as i32) * 3f64.powi(conditioned as i32);
    Ok(MaskResult {
        tv: tv_of_counts(k0, k1),
        bias: (support / tapes as f64).sqrt().min(1.0),
        bits,
        kind: Kind::Fallback,
        vars: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elimination_finds_kernel() {
        // Rows r0 = v0, r1 = v1, r2 = v0 ⊕ v1.
        let e = Eliminator::new(&[vec![1], vec![2], vec![3]]);
        assert_eq!(e.pivots.len(), 2);
        assert_eq!(e.kernel, vec![0b111]);
    }

    #[test]
    fn counts_tv() {
        assert_eq!(tv_of_counts(vec![0, 1], vec![0, 1]), 0.0);
        assert_eq!(tv_of_counts(vec![0, 0], vec![1, 1]), 1.0);
        assert_eq!(tv_of_counts(vec![0, 1, 1, 1], vec![0, 0, 0, 1]), 0.5);
    }

    fn tv(a: &[Poly], b: &[Poly]) -> f64 {
        let ra: Vec<&Poly> = a.iter().collect();
        let rb: Vec<&Poly> = b.iter().collect();
        inner_exact(&ra, &rb, 20, 1000, &mut stream(0, 0)).tv
    }

    #[test]
    #[allow(clippy::cloned_ref_to_slice_refs)]
    fn inner_cases() {
        let (r, s) = (Poly::var(0), Poly::var(1));
        let one = Poly::constant(true);
        // Masked secret: y ⊕ r alone is uniform either way.
        assert_eq!(tv(&[r.clone()], &[r.not()]), 0.0);
        // Both shares leak.
        assert_eq!(tv(&[r.clone(), r.clone()], &[r.clone(), r.not()]), 1.0);
        // AND of two random bits versus a random bit: 1/4 vs 1/2.
        assert!((tv(&[r.mul(&s).unwrap()], &[r.clone()]) - 0.25).abs() < 1e-15);
        // Different images: constant 0 versus a uniform bit.
        assert_eq!(tv(&[Poly::zero()], &[r.clone()]), 0.5);
        assert_eq!(tv(&[one.clone()], &[Poly::zero()]), 1.0);
        // r·s ⊕ t with t linear is uniform.
        let t = Poly::var(2);
        assert_eq!(tv(&[r.mul(&s).unwrap().xor(&t)], &[t.clone()]), 0.0);
    }
}
