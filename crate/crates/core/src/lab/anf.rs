//! Wire values as GF(2) polynomials in the random bits.
//!
//! With the secret and public inputs fixed, every wire value is a Boolean
//! function of the encoding seeds and the RAND tape. The algebraic normal form
//! of that function is unique, so two wires carry identical distributions
//! whenever their polynomials coincide, and linear parts can be handled by
//! elimination instead of enumeration.

use smallvec::SmallVec;

use crate::circuit::{Circuit, EventSource, GateKind};
use crate::error::{Error, Result};
use crate::steane::{bit_at, H_ROWS, LOGICAL_SUPPORT};

pub type Var = u32;
/// Sorted variable list; the empty monomial is the constant 1.
pub type Mono = SmallVec<[Var; 3]>;

/// Largest product expansion accepted before giving up on a circuit.
pub const MAX_TERMS: usize = 1 << 16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<Mono>,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Mono::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(b: bool) -> Poly {
        Poly {
            terms: if b { vec![Mono::new()] } else { Vec::new() },
        }
    }

    pub fn var(v: Var) -> Poly {
        Poly {
            terms: vec![smallvec::smallvec![v]],
        }
    }

    pub fn terms(&self) -> &[Mono] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn xor(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    /// The monomials satisfying `keep`.
    pub fn retain(&self, keep: impl Fn(&Mono) -> bool) -> Poly {
        Poly {
            terms: self.terms.iter().filter(|m| keep(m)).cloned().collect(),
        }
    }

    pub fn not(&self) -> Poly {
        self.xor(&Poly::constant(true))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        if self.terms.len().saturating_mul(other.terms.len()) > MAX_TERMS {
            return Err(Error::SizeLimit(format!(
                "polynomial product of {} by {} terms",
                self.terms.len(),
                other.terms.len()
            )));
        }
        let mut prod: Vec<Mono> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                prod.push(mono_mul(a, b));
            }
        }
        prod.sort_unstable();
        let mut terms = Vec::with_capacity(prod.len());
        let mut k = 0;
        while k < prod.len() {
            let mut n = 1;
            while k + n < prod.len() && prod[k + n] == prod[k] {
                n += 1;
            }
            if n % 2 == 1 {
                terms.push(prod[k].clone());
            }
            k += n;
        }
        Ok(Poly { terms })
    }

    pub fn eval(&self, assignment: impl Fn(Var) -> bool) -> bool {
        self.terms
            .iter()
            .fold(false, |acc, m| acc ^ m.iter().all(|&v| assignment(v)))
    }
}

/// What an adversary sees on one wire event, as polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation {
    /// Ports of unconditioned gates and input events.
    Plain(Poly),
    /// Port of a conditioned gate: whether it ran, and its value if so.
    Conditioned { ran: Poly, value: Poly },
}

impl Observation {
    /// Observation bits: `[v]`, or `[ran, ran·v]` for conditioned ports.
    pub fn rows(&self) -> Result<Vec<Poly>> {
        match self {
            Observation::Plain(v) => Ok(vec![v.clone()]),
            Observation::Conditioned { ran, value } => Ok(vec![ran.clone(), ran.mul(value)?]),
        }
    }

    fn fires(&self) -> Result<Poly> {
        match self {
            Observation::Plain(v) => Ok(v.clone()),
            Observation::Conditioned { ran, value } => ran.mul(value),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymbolicRun {
    pub observations: Vec<Observation>,
    pub outputs: Vec<Poly>,
    pub vars: Var,
}

/// Allocates fresh variables in tape order.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    next: Var,
}

impl VarPool {
    pub fn fresh(&mut self) -> Var {
        self.next += 1;
        self.next - 1
    }

    pub fn used(&self) -> Var {
        self.next
    }
}

/// Symbolic counterpart of `encode_codeword_nested`: each codeword is
/// `bit·X̄ ⊕ Σ s_j·H_j` with fresh seeds `s_j`, outer seeds first.
pub fn encode_symbolic(bit: &Poly, level: u8, pool: &mut VarPool, out: &mut Vec<Poly>) {
    let seeds: Vec<Var> = (0..3).map(|_| pool.fresh()).collect();
    let word: Vec<Poly> = (1..=7)
        .map(|p| {
            let mut v = if bit_at(LOGICAL_SUPPORT, p) {
                bit.clone()
            } else {
                Poly::zero()
            };
            for (row, &s) in H_ROWS.iter().zip(&seeds) {
                if bit_at(*row, p) {
                    v = v.xor(&Poly::var(s));
                }
            }
            v
        })
        .collect();
    if level <= 1 {
        out.extend(word);
        return;
    }
    for w in &word {
        encode_symbolic(w, level - 1, pool, out);
    }
}

/// Runs `circuit` on polynomial secret inputs and constant public inputs.
/// RAND gates draw fresh variables from `pool`.
pub fn symbolic_run(circuit: &Circuit, secret: &[Poly], public: &[bool], mut pool: VarPool) -> Result<SymbolicRun> {
    if secret.len() != circuit.secret_inputs().len() {
        return Err(Error::InputLength {
            kind: "secret",
            expected: circuit.secret_inputs().len(),
            got: secret.len(),
        });
    }
    if public.len() != circuit.public_inputs().len() {
        return Err(Error::InputLength {
            kind: "public",
            expected: circuit.public_inputs().len(),
            got: public.len(),
        });
    }
    let mut regs: Vec<Poly> = circuit.registers().iter().map(|r| Poly::constant(r.init)).collect();
    for (&r, p) in circuit.secret_inputs().iter().zip(secret) {
        regs[r] = p.clone();
    }
    for (&r, &b) in circuit.public_inputs().iter().zip(public) {
        regs[r] = Poly::constant(b);
    }
    let mut obs = Vec::with_capacity(circuit.event_count());
    for e in circuit.events() {
        if e.source != EventSource::Input {
            break;
        }
        obs.push(Observation::Plain(regs[e.reg].clone()));
    }
    for gate in circuit.gates() {
        let written = gate.kind.written();
        let computed = match gate.kind {
            GateKind::Not(a) => Some(regs[a].not()),
            GateKind::Cnot(s, t) => Some(regs[t].xor(&regs[s])),
            GateKind::Toffoli(a, b, t) => Some(regs[t].xor(&regs[a].mul(&regs[b])?)),
            GateKind::Rand(_) => Some(Poly::var(pool.fresh())),
            GateKind::Copy(s, _) => Some(regs[s].clone()),
            GateKind::Z(_) | GateKind::Cz(..) => None,
        };
        match gate.condition {
            None => {
                if let (Some(w), Some(v)) = (written, computed) {
                    regs[w] = v;
                }
                for r in gate.kind.operands() {
                    obs.push(Observation::Plain(regs[r].clone()));
                }
            }
            Some(c) => {
                let ran = obs[c].fires()?;
                if let (Some(w), Some(v)) = (written, computed) {
                    let delta = v.xor(&regs[w]);
                    regs[w] = regs[w].xor(&ran.mul(&delta)?);
                }
                for r in gate.kind.operands() {
                    obs.push(Observation::Conditioned {
                        ran: ran.clone(),
                        value: regs[r].clone(),
                    });
                }
            }
        }
    }
    Ok(SymbolicRun {
        observations: obs,
        outputs: circuit.outputs().iter().map(|&r| regs[r].clone()).collect(),
        vars: pool.used(),
    })
}
