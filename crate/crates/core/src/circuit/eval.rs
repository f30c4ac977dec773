use std::collections::BTreeMap;

use rand::RngCore;

use super::{Circuit, GateKind};
use crate::error::{Error, Result};

/// Finite sequence of random bits consumed by RAND gates in program order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RandomTape {
    bits: Vec<bool>,
    cursor: usize,
}

impl RandomTape {
    pub fn new(bits: Vec<bool>) -> Self {
        RandomTape { bits, cursor: 0 }
    }

    pub fn zeros(len: usize) -> Self {
        RandomTape::new(vec![false; len])
    }

    /// Tape whose bit `i` is bit `i` of `word`.
    pub fn from_word(word: u64, len: usize) -> Self {
        RandomTape::new((0..len).map(|i| (word >> i) & 1 == 1).collect())
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut t = RandomTape::default();
        t.refill(rng, len);
        t
    }

    /// Replaces the contents with `len` fresh bits and rewinds.
    pub fn refill<R: RngCore + ?Sized>(&mut self, rng: &mut R, len: usize) {
        self.bits.clear();
        let mut word = 0u64;
        for i in 0..len {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            self.bits.push((word >> (i % 64)) & 1 == 1);
        }
        self.cursor = 0;
    }

    pub fn next_bit(&mut self) -> Result<bool> {
        let bit = *self
            .bits
            .get(self.cursor)
            .ok_or(Error::TapeExhausted { used: self.cursor })?;
        self.cursor += 1;
        Ok(bit)
    }

    pub fn rewind(&mut self) {
        self.cursor = 0;
    }

    pub fn used(&self) -> usize {
        self.cursor
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// Value per wire event; `None` marks a port of a skipped conditioned gate.
    pub values: Vec<Option<bool>>,
    pub outputs: Vec<bool>,
    pub tape_used: usize,
}

/// Reusable evaluation state for repeated runs of one circuit.
#[derive(Clone, Debug)]
pub struct Evaluator<'c> {
    circuit: &'c Circuit,
    regs: Vec<bool>,
    values: Vec<Option<bool>>,
}

impl<'c> Evaluator<'c> {
    pub fn new(circuit: &'c Circuit) -> Self {
        Evaluator {
            circuit,
            regs: vec![false; circuit.registers().len()],
            values: vec![None; circuit.event_count()],
        }
    }

    pub fn circuit(&self) -> &'c Circuit {
        self.circuit
    }

    pub fn run(&mut self, secret: &[bool], public: &[bool], tape: &mut RandomTape) -> Result<()> {
        self.run_observed(secret, public, tape, |_, _| {})
    }

    /// Runs the circuit, calling `observer(gate_index, registers)` after
    /// every gate.
    pub fn run_observed<F>(
        &mut self,
        secret: &[bool],
        public: &[bool],
        tape: &mut RandomTape,
        mut observer: F,
    ) -> Result<()>
    where
        F: FnMut(usize, &[bool]),
    {
        let c = self.circuit;
        check_len("secret", c.secret_inputs().len(), secret.len())?;
        check_len("public", c.public_inputs().len(), public.len())?;

        for r in c.registers() {
            self.regs[r.id] = r.init;
        }
        for (&reg, &v) in c.secret_inputs().iter().zip(secret) {
            self.regs[reg] = v;
        }
        for (&reg, &v) in c.public_inputs().iter().zip(public) {
            self.regs[reg] = v;
        }
        for (ev, e) in c.events().iter().enumerate() {
            if e.source != super::EventSource::Input {
                break;
            }
            self.values[ev] = Some(self.regs[e.reg]);
        }

        let regs = &mut self.regs;
        for (gi, gate) in c.gates().iter().enumerate() {
            let first = c.gate_first_event(gi);
            let run = gate.condition.is_none_or(|cond| self.values[cond] == Some(true));
            let ops = gate.kind.operands();
            if !run {
                for k in 0..ops.len() {
                    self.values[first + k] = None;
                }
                observer(gi, regs);
                continue;
            }
            match gate.kind {
                GateKind::Not(a) => regs[a] = !regs[a],
                GateKind::Cnot(s, t) => regs[t] ^= regs[s],
                GateKind::Toffoli(a, b, t) => regs[t] ^= regs[a] & regs[b],
                GateKind::Z(_) | GateKind::Cz(..) => {}
                GateKind::Rand(t) => regs[t] = tape.next_bit()?,
                GateKind::Copy(s, t) => regs[t] = regs[s],
            }
            for (k, &r) in ops.iter().enumerate() {
                self.values[first + k] = Some(regs[r]);
            }
            observer(gi, regs);
        }
        Ok(())
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn registers(&self) -> &[bool] {
        &self.regs
    }

    pub fn outputs(&self) -> Vec<bool> {
        self.circuit.outputs().iter().map(|&r| self.regs[r]).collect()
    }
}

fn check_len(kind: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::InputLength { kind, expected, got });
    }
    Ok(())
}

pub fn evaluate(circuit: &Circuit, secret: &[bool], public: &[bool], tape: &mut RandomTape) -> Result<Trace> {
    evaluate_observed(circuit, secret, public, tape, |_, _| {})
}

pub fn evaluate_observed<F>(
    circuit: &Circuit,
    secret: &[bool],
    public: &[bool],
    tape: &mut RandomTape,
    observer: F,
) -> Result<Trace>
where
    F: FnMut(usize, &[bool]),
{
    let start = tape.used();
    let mut ev = Evaluator::new(circuit);
    ev.run_observed(secret, public, tape, observer)?;
    Ok(Trace {
        outputs: ev.outputs(),
        values: ev.values,
        tape_used: tape.used() - start,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TapePolicy {
    /// Average over every tape of length `rand_gates()`.
    Exhaustive,
    /// Use this tape for every input.
    Fixed(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthRow {
    pub secret: Vec<bool>,
    pub public: Vec<bool>,
    pub outputs: BTreeMap<Vec<bool>, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthTable {
    pub rows: Vec<TruthRow>,
}

const MAX_TABLE_BITS: usize = 20;

/// Exact output distribution for every input assignment. Row `a` assigns
/// secret bit `i` from bit `i` of `a` and public bit `j` from bit `s + j`.
pub fn truth_table(circuit: &Circuit, policy: &TapePolicy) -> Result<TruthTable> {
    let s = circuit.secret_inputs().len();
    let n = s + circuit.public_inputs().len();
    if n > MAX_TABLE_BITS {
        return Err(Error::SizeLimit(format!("{n} input bits (max {MAX_TABLE_BITS})")));
    }
    let tapes: Vec<RandomTape> = match policy {
        TapePolicy::Exhaustive => {
            let len = circuit.rand_gates();
            if len > MAX_TABLE_BITS {
                return Err(Error::SizeLimit(format!("{len} tape bits (max {MAX_TABLE_BITS})")));
            }
            (0..1u64 << len).map(|w| RandomTape::from_word(w, len)).collect()
        }
        TapePolicy::Fixed(bits) => vec![RandomTape::new(bits.clone())],
    };
    let weight = 1.0 / tapes.len() as f64;
    let mut ev = Evaluator::new(circuit);
    let mut rows = Vec::with_capacity(1 << n);
    for a in 0..1u64 << n {
        let bits: Vec<bool> = (0..n).map(|i| (a >> i) & 1 == 1).collect();
        let (secret, public) = bits.split_at(s);
        let mut outputs = BTreeMap::new();
        for tape in &tapes {
            let mut tape = tape.clone();
            ev.run(secret, public, &mut tape)?;
            *outputs.entry(ev.outputs()).or_insert(0.0) += weight;
        }
        rows.push(TruthRow {
            secret: secret.to_vec(),
            public: public.to_vec(),
            outputs,
        });
    }
    Ok(TruthTable { rows })
}
