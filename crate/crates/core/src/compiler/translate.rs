//! Classical replacements for the quantum primitives, on bare wires.

use super::emit::Emitter;
use crate::circuit::{Circuit, GateKind, RegId, Role};
use crate::error::{Error, Result};

/// Quantum operation on wires `0..n` of a [`translate_sequence`] call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantumOp {
    X(usize),
    Z(usize),
    Cz(usize, usize),
    Cnot(usize, usize),
    Toffoli(usize, usize, usize),
    PrepZero(usize),
    PrepPlus(usize),
    MeasureZ(usize),
    MeasureX(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub circuit: Circuit,
    /// Register currently holding each wire.
    pub wires: Vec<RegId>,
    /// Readout register of each measurement, in order.
    pub readouts: Vec<RegId>,
}

/// Translates a single operation on `wires` public-input wires.
pub fn translate_primitive(op: QuantumOp, wires: usize) -> Result<Translation> {
    translate_sequence(&[op], wires)
}

/// Wires start as public inputs `w0..`. Preparations move a wire to a fresh
/// register; measurement readouts and final wire registers are outputs.
pub fn translate_sequence(ops: &[QuantumOp], wires: usize) -> Result<Translation> {
    let mut e = Emitter::new(usize::MAX);
    let mut regs: Vec<RegId> = (0..wires)
        .map(|k| e.register(&format!("w{k}"), Role::PublicInput))
        .collect::<Result<_>>()?;
    let mut readouts = Vec::new();
    let wire = |regs: &[RegId], k: usize| {
        regs.get(k)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("wire {k} of {wires}")))
    };
    for &op in ops {
        match op {
            QuantumOp::X(a) => {
                e.gate(GateKind::Not(wire(&regs, a)?))?;
            }
            QuantumOp::Z(a) => {
                e.gate(GateKind::Z(wire(&regs, a)?))?;
            }
            QuantumOp::Cz(a, b) => {
                e.gate(GateKind::Cz(wire(&regs, a)?, wire(&regs, b)?))?;
            }
            QuantumOp::Cnot(c, t) => {
                e.gate(GateKind::Cnot(wire(&regs, c)?, wire(&regs, t)?))?;
            }
            QuantumOp::Toffoli(a, b, t) => {
                e.gate(GateKind::Toffoli(wire(&regs, a)?, wire(&regs, b)?, wire(&regs, t)?))?;
            }
            QuantumOp::PrepZero(a) => {
                wire(&regs, a)?;
                regs[a] = e.fresh("p")?;
                e.prep_zero_wires(1);
            }
            QuantumOp::PrepPlus(a) => {
                wire(&regs, a)?;
                regs[a] = e.fresh("p")?;
                e.prep_plus_wire(regs[a])?;
            }
            QuantumOp::MeasureZ(a) => readouts.push(e.measure_z(wire(&regs, a)?)?),
            QuantumOp::MeasureX(a) => readouts.push(e.measure_x(wire(&regs, a)?)?),
        }
    }
    for &r in readouts.iter().chain(&regs) {
        e.mark_output(r);
    }
    let (circuit, ..) = e.finish()?;
    Ok(Translation {
        circuit,
        wires: regs,
        readouts,
    })
}
