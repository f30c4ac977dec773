//! One level of gadget expansion.
//!
//! Every register of the source circuit becomes a code block. Level 1 takes a
//! logical circuit over {NOT, CNOT, TOF}; level 2 runs the same expansion on
//! the level-1 output, where RAND and COPY rebind their target to a freshly
//! prepared block and classical conditions are re-derived from parity
//! readouts of the condition register's block.

use std::collections::{BTreeMap, HashMap};

use super::emit::{BlockId, Emitter, GadgetKind};
use super::gadgets::{logical_not, parity_readout, prep_plus, prep_zero, steane_ec, toffoli_body, transversal_cnot};
use super::{NamedReg, NamedRegs};
use crate::circuit::{Circuit, EventId, EventSource, GateKind, RegId, Role};
use crate::error::{Error, Result};

pub(crate) struct Expansion {
    pub emitter: Emitter,
    pub secrets: Vec<NamedRegs>,
    pub publics: Vec<NamedReg>,
    pub outputs: Vec<NamedReg>,
    pub block_map: BTreeMap<String, BlockId>,
}

struct State<'s> {
    src: &'s Circuit,
    e: Emitter,
    bound: Vec<Option<BlockId>>,
    /// Source gate that last wrote each register.
    last_write: Vec<Option<usize>>,
    conditions: HashMap<EventId, EventId>,
}

impl State<'_> {
    /// Block of `reg`, preparing it on first use.
    fn block_of(&mut self, reg: RegId, source: Option<usize>) -> Result<BlockId> {
        if let Some(b) = self.bound[reg] {
            return Ok(b);
        }
        self.e.begin(GadgetKind::Init, source);
        let b = prep_zero(&mut self.e)?;
        if self.src.register(reg).init {
            logical_not(&mut self.e, b, None)?;
        }
        self.e.end(vec![b]);
        self.bound[reg] = Some(b);
        Ok(b)
    }

    fn condition(&mut self, gi: usize, event: EventId) -> Result<EventId> {
        let ev = self.src.events()[event];
        let made_by = match ev.source {
            EventSource::Input => None,
            EventSource::Gate { gate, .. } => Some(gate),
        };
        if self.last_write[ev.reg] != made_by {
            return Err(Error::UnsupportedGate(format!(
                "gate {gi}: condition register `{}` was modified after event {event}",
                self.src.register(ev.reg).name
            )));
        }
        if let Some(&c) = self.conditions.get(&event) {
            return Ok(c);
        }
        let block = self.block_of(ev.reg, Some(gi))?;
        self.e.begin(GadgetKind::ConditionReadout, Some(gi));
        let c = parity_readout(&mut self.e, block)?;
        self.e.end(vec![]);
        self.conditions.insert(event, c);
        Ok(c)
    }
}

fn unsupported(gi: usize, what: &str) -> Error {
    Error::UnsupportedGate(format!("gate {gi}: {what}"))
}

/// `logical` selects the strict first-level rules.
pub(crate) fn expand(src: &Circuit, ec: bool, logical: bool, max_gates: usize) -> Result<Expansion> {
    let mut st = State {
        src,
        e: Emitter::new(max_gates),
        bound: vec![None; src.registers().len()],
        last_write: vec![None; src.registers().len()],
        conditions: HashMap::new(),
    };
    let mut secrets = Vec::new();
    let mut publics = Vec::new();
    let mut public_regs = Vec::new();
    for r in src.registers() {
        match r.role {
            Role::SecretInput => {
                let b = st.e.secret_block(&r.name)?;
                st.bound[r.id] = Some(b);
                secrets.push(NamedRegs {
                    name: r.name.clone(),
                    regs: st.e.block(b).regs().to_vec(),
                });
            }
            Role::PublicInput => {
                let x = st.e.register(&r.name, Role::PublicInput)?;
                publics.push(NamedReg {
                    name: r.name.clone(),
                    reg: x,
                });
                public_regs.push((r.id, x));
            }
            _ => {}
        }
    }
    for (src_reg, x) in public_regs {
        st.e.begin(GadgetKind::EncodePublic, None);
        let b = prep_zero(&mut st.e)?;
        for p in 1..=3 {
            st.e.gate(GateKind::Cnot(x, st.e.at(b, p)))?;
        }
        st.e.end(vec![b]);
        st.bound[src_reg] = Some(b);
    }

    for (gi, gate) in src.gates().iter().enumerate() {
        let g = Some(gi);
        if gate.kind.is_phase() {
            st.e.log.push(format!(
                "gate {gi}: dropped {} on {} (identity on classical values)",
                gate.kind.mnemonic(),
                gate.kind
                    .operands()
                    .iter()
                    .map(|&r| src.register(r).name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            continue;
        }
        let kind = match gate.kind {
            GateKind::Not(_) => GadgetKind::TransversalNot,
            GateKind::Cnot(..) => GadgetKind::TransversalCnot,
            GateKind::Toffoli(..) => GadgetKind::Toffoli,
            GateKind::Rand(_) => GadgetKind::Rand,
            GateKind::Copy(..) => GadgetKind::Copy,
            GateKind::Z(_) | GateKind::Cz(..) => unreachable!(),
        };
        if logical && (gate.condition.is_some() || matches!(kind, GadgetKind::Rand | GadgetKind::Copy)) {
            return Err(unsupported(gi, "logical circuits may only use NOT, CNOT and TOF"));
        }
        if gate.condition.is_some() && matches!(kind, GadgetKind::Toffoli | GadgetKind::Rand | GadgetKind::Copy) {
            return Err(unsupported(gi, &format!("conditioned {}", gate.kind.mnemonic())));
        }

        st.e.begin(kind, g);
        let cond = match gate.condition {
            Some(ev) => Some(st.condition(gi, ev)?),
            None => None,
        };
        let touched: Vec<BlockId> = match gate.kind {
            GateKind::Not(a) => {
                let b = st.block_of(a, g)?;
                logical_not(&mut st.e, b, cond)?;
                vec![b]
            }
            GateKind::Cnot(c, t) => {
                let (bc, bt) = (st.block_of(c, g)?, st.block_of(t, g)?);
                transversal_cnot(&mut st.e, bc, bt, cond)?;
                vec![bc, bt]
            }
            GateKind::Toffoli(a, b, t) => {
                let blocks = [a, b, t];
                let d = [st.block_of(a, g)?, st.block_of(b, g)?, st.block_of(t, g)?];
                let out = toffoli_body(&mut st.e, d)?;
                for (&r, &b) in blocks.iter().zip(&out) {
                    st.bound[r] = Some(b);
                }
                out.to_vec()
            }
            GateKind::Rand(t) => {
                let b = prep_plus(&mut st.e)?;
                st.bound[t] = Some(b);
                vec![b]
            }
            GateKind::Copy(s, t) => {
                let bs = st.block_of(s, g)?;
                let bt = prep_zero(&mut st.e)?;
                transversal_cnot(&mut st.e, bs, bt, None)?;
                st.bound[t] = Some(bt);
                vec![bs, bt]
            }
            GateKind::Z(_) | GateKind::Cz(..) => unreachable!(),
        };
        st.e.end(touched.clone());
        if let Some(w) = gate.kind.written() {
            st.last_write[w] = Some(gi);
        }
        if ec {
            for b in touched {
                steane_ec(&mut st.e, b, g)?;
            }
        }
    }

    let mut outputs = Vec::new();
    for &r in src.outputs() {
        let name = &src.register(r).name;
        st.e.begin(GadgetKind::Readout, None);
        let b = st.block_of(r, None)?;
        let out = st.e.fresh_output(name)?;
        st.e.parity_into(b, out)?;
        st.e.end(vec![b]);
        outputs.push(NamedReg {
            name: name.clone(),
            reg: out,
        });
    }

    let block_map = src
        .registers()
        .iter()
        .filter_map(|r| st.bound[r.id].map(|b| (r.name.clone(), b)))
        .collect();
    Ok(Expansion {
        emitter: st.e,
        secrets,
        publics,
        outputs,
        block_map,
    })
}
