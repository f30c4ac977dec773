//! Independent-leakage laboratory.
//!
//! Every wire event outside the leak-free set leaks independently with
//! probability `p`; the adversary learns the set of leaked events and their
//! values. Skipped ports of conditioned gates are observed as `null`, which
//! reveals the condition bit as well. The lab samples transcripts and
//! estimates the total variation distance between the leakage distributions
//! produced by two secrets at a fixed public input. The decoded output is
//! not part of the compared distribution; pick secrets with equal outputs to
//! measure leakage beyond what the output reveals.

mod anf;
mod exact;
mod marginal;
mod mask;
mod mc;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Evaluator, EventId, RandomTape};
use crate::compiler::CompiledCircuit;
use crate::error::{Error, Result};
use crate::rng::{family, stream};

pub use anf::{encode_symbolic, symbolic_run, Mono, Observation, Poly, SymbolicRun, Var, VarPool};
pub use exact::{exact_tv_tiny, EXACT_MAX_EVENTS, EXACT_MAX_TAPE};
pub use marginal::{marginal_independence, MarginalOptions, DEFAULT_DELTA};
pub use mask::sample_mask;
pub use mc::{mc_advantage, InnerTv, McOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageModel {
    p: f64,
}

impl LeakageModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("leak probability {p} outside [0, 1]")));
        }
        Ok(LeakageModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A circuit under attack: either run as-is on the secret, or compiled with
/// the secret encoded afresh for every run.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Raw(&'a Circuit),
    Compiled(&'a CompiledCircuit),
}

impl<'a> Target<'a> {
    pub fn circuit(&self) -> &'a Circuit {
        match self {
            Target::Raw(c) => c,
            Target::Compiled(c) => &c.circuit,
        }
    }

    pub fn secret_len(&self) -> usize {
        match self {
            Target::Raw(c) => c.secret_inputs().len(),
            Target::Compiled(c) => c.meta.secrets.len(),
        }
    }

    pub fn public_len(&self) -> usize {
        self.circuit().public_inputs().len()
    }

    /// Tape bits consumed outside the circuit by the secret encoding.
    pub fn encoding_bits(&self) -> usize {
        match self {
            Target::Raw(_) => 0,
            Target::Compiled(c) => c.encoding_bits(),
        }
    }

    /// Encoding bits plus one bit per RAND gate.
    pub fn tape_bits(&self) -> usize {
        self.encoding_bits() + self.circuit().rand_gates()
    }

    pub fn check_inputs(&self, y: &[bool], x: &[bool]) -> Result<()> {
        if y.len() != self.secret_len() {
            return Err(Error::InputLength {
                kind: "secret",
                expected: self.secret_len(),
                got: y.len(),
            });
        }
        if x.len() != self.public_len() {
            return Err(Error::InputLength {
                kind: "public",
                expected: self.public_len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Physical secret bits; consumes encoding bits from `tape`.
    pub fn physical_secret(&self, y: &[bool], tape: &mut RandomTape) -> Result<Vec<bool>> {
        match self {
            Target::Raw(_) => Ok(y.to_vec()),
            Target::Compiled(c) => Ok(c.encode(y, tape)?.bits),
        }
    }

    /// Runs once with `tape` feeding the encoding first, then the circuit.
    pub fn run(&self, ev: &mut Evaluator<'a>, y: &[bool], x: &[bool], tape: &mut RandomTape) -> Result<()> {
        let secret = self.physical_secret(y, tape)?;
        ev.run(&secret, x, tape)
    }

    /// Symbolic run with the encoding seeds as the first variables.
    pub fn symbolic(&self, y: &[bool], x: &[bool]) -> Result<SymbolicRun> {
        self.check_inputs(y, x)?;
        let mut pool = VarPool::default();
        let secret = match self {
            Target::Raw(_) => y.iter().map(|&b| Poly::constant(b)).collect(),
            Target::Compiled(c) => {
                let mut out = Vec::new();
                for &b in y {
                    encode_symbolic(&Poly::constant(b), c.meta.level, &mut pool, &mut out);
                }
                out
            }
        };
        symbolic_run(self.circuit(), &secret, x, pool)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakTranscript {
    pub round: usize,
    pub mask: Vec<EventId>,
    /// One entry per masked event; `None` for a skipped conditioned port.
    pub values: Vec<Option<u8>>,
    pub output: Vec<u8>,
}

/// Where the randomness of each round comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TapeSource {
    /// Fresh tape per round from the master seed.
    Seeded,
    /// The same tape every round: encoding bits first, then circuit bits.
    Fixed(Vec<bool>),
}

/// Runs `rounds` rounds; round `r` uses public input `inputs[r % len]`. The
/// secret is re-encoded every round. Round `r` draws its tape from stream
/// `TAPE + r` and its mask from stream `MASK + r`, so masks do not depend on
/// the secret.
pub fn run_rounds(
    target: Target<'_>,
    y: &[bool],
    inputs: &[Vec<bool>],
    rounds: usize,
    model: LeakageModel,
    seed: u64,
    tapes: &TapeSource,
) -> Result<Vec<LeakTranscript>> {
    if inputs.is_empty() && rounds > 0 {
        return Err(Error::InvalidArgument("no public inputs given".into()));
    }
    for x in inputs {
        target.check_inputs(y, x)?;
    }
    let leaky = target.circuit().leaky_events();
    (0..rounds)
        .into_par_iter()
        .map(|r| {
            let x = &inputs[r % inputs.len()];
            let mut tape = match tapes {
                TapeSource::Seeded => {
                    RandomTape::random(&mut stream(seed, family::TAPE + r as u64), target.tape_bits())
                }
                TapeSource::Fixed(bits) => RandomTape::new(bits.clone()),
            };
            let mut ev = Evaluator::new(target.circuit());
            target.run(&mut ev, y, x, &mut tape)?;
            let mask = sample_mask(&leaky, model.p(), &mut stream(seed, family::MASK + r as u64));
            let values = mask.iter().map(|&e| ev.values()[e].map(u8::from)).collect();
            Ok(LeakTranscript {
                round: r,
                mask,
                values,
                output: ev.outputs().into_iter().map(u8::from).collect(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactTiny,
    MaskDecomposedMc,
    PerWireMarginal,
    PairwiseMarginal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub method: Method,
    pub estimate: f64,
    pub std_error: f64,
    /// Upper bound on the positive bias of `estimate`.
    pub bias_bound: f64,
    pub samples: usize,
    pub p: Option<f64>,
    /// Method-specific counters.
    pub detail: BTreeMap<String, f64>,
}

impl AdvantageReport {
    /// `estimate ≤ 3·std_error + bias_bound`.
    pub fn consistent_with_zero(&self) -> bool {
        self.estimate <= 3.0 * self.std_error + self.bias_bound
    }

    /// `|estimate − value| ≤ 3·std_error + bias_bound`, with a floating-point slack.
    pub fn agrees_with(&self, value: f64) -> bool {
        (self.estimate - value).abs() <= 3.0 * self.std_error + self.bias_bound + 1e-12
    }
}

#[cfg(test)]
mod tests;
