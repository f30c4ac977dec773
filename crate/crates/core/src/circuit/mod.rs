//! Bit-level circuit IR.
//!
//! A [`Circuit`] is a list of registers and an ordered list of gates. Every
//! circuit input and every gate output port produces one *wire event*; wire
//! events are the unit the leakage model samples. Event ids are dense and
//! assigned in program order: first one event per input register (in
//! declaration order), then the output ports of each gate in turn.
//!
//! Inputs must be declared before the first gate, which keeps event ids
//! independent of where declarations appear in a netlist.

mod eval;
mod netlist;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use eval::{
    evaluate, evaluate_observed, truth_table, Evaluator, RandomTape, TapePolicy, Trace, TruthRow, TruthTable,
};
pub use netlist::{dump_events, parse_netlist, serialize_netlist};

pub type RegId = usize;
pub type EventId = usize;
pub type Operands = SmallVec<[RegId; 3]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    SecretInput,
    PublicInput,
    Internal,
    Output,
}

impl Role {
    pub fn is_input(self) -> bool {
        matches!(self, Role::SecretInput | Role::PublicInput)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub id: RegId,
    pub name: String,
    pub role: Role,
    /// Initial value of a non-input register.
    pub init: bool,
    /// Whether the register is read out. Always true for [`Role::Output`];
    /// input and internal registers can be marked as outputs too.
    pub output: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not(RegId),
    Cnot(RegId, RegId),
    Toffoli(RegId, RegId, RegId),
    /// Phase flip. Acts as the identity on classical values.
    Z(RegId),
    /// Controlled phase. Acts as the identity on classical values.
    Cz(RegId, RegId),
    /// Overwrites the target with the next bit of the random tape.
    Rand(RegId),
    /// `COPY s t` sets `t := s`.
    Copy(RegId, RegId),
}

impl GateKind {
    pub fn operands(&self) -> Operands {
        match *self {
            GateKind::Not(a) | GateKind::Z(a) | GateKind::Rand(a) => SmallVec::from_slice(&[a]),
            GateKind::Cnot(a, b) | GateKind::Cz(a, b) | GateKind::Copy(a, b) => SmallVec::from_slice(&[a, b]),
            GateKind::Toffoli(a, b, c) => SmallVec::from_slice(&[a, b, c]),
        }
    }

    /// The register whose value the gate may change, if any.
    pub fn written(&self) -> Option<RegId> {
        match *self {
            GateKind::Not(a) | GateKind::Rand(a) => Some(a),
            GateKind::Cnot(_, t) | GateKind::Copy(_, t) | GateKind::Toffoli(_, _, t) => Some(t),
            GateKind::Z(_) | GateKind::Cz(_, _) => None,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::Not(_) => "NOT",
            GateKind::Cnot(..) => "CNOT",
            GateKind::Toffoli(..) => "TOF",
            GateKind::Z(_) => "Z",
            GateKind::Cz(..) => "CZ",
            GateKind::Rand(_) => "RAND",
            GateKind::Copy(..) => "COPY",
        }
    }

    pub fn arity(mnemonic: &str) -> Option<usize> {
        Some(match mnemonic {
            "NOT" | "Z" | "RAND" => 1,
            "CNOT" | "CZ" | "COPY" => 2,
            "TOF" => 3,
            _ => return None,
        })
    }

    /// Builds a gate from a mnemonic and the right number of operands.
    pub fn from_parts(mnemonic: &str, ops: &[RegId]) -> Option<GateKind> {
        if GateKind::arity(mnemonic)? != ops.len() {
            return None;
        }
        Some(match mnemonic {
            "NOT" => GateKind::Not(ops[0]),
            "Z" => GateKind::Z(ops[0]),
            "RAND" => GateKind::Rand(ops[0]),
            "CNOT" => GateKind::Cnot(ops[0], ops[1]),
            "CZ" => GateKind::Cz(ops[0], ops[1]),
            "COPY" => GateKind::Copy(ops[0], ops[1]),
            "TOF" => GateKind::Toffoli(ops[0], ops[1], ops[2]),
            _ => return None,
        })
    }

    pub fn is_phase(&self) -> bool {
        matches!(self, GateKind::Z(_) | GateKind::Cz(..))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    /// Wire event whose runtime value decides whether the gate runs.
    pub condition: Option<EventId>,
}

impl Gate {
    pub fn new(kind: GateKind) -> Self {
        Gate { kind, condition: None }
    }

    pub fn conditioned(kind: GateKind, event: EventId) -> Self {
        Gate {
            kind,
            condition: Some(event),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EventSource {
    Input,
    Gate { gate: usize, port: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WireEvent {
    pub reg: RegId,
    #[serde(flatten)]
    pub source: EventSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    registers: Vec<Register>,
    gates: Vec<Gate>,
    events: Vec<WireEvent>,
    gate_first_event: Vec<EventId>,
    leak_free: Vec<bool>,
    secret_inputs: Vec<RegId>,
    public_inputs: Vec<RegId>,
    outputs: Vec<RegId>,
    rand_gates: usize,
}

impl Circuit {
    /// Validates registers and gates and derives the wire-event table.
    pub fn from_parts(registers: Vec<Register>, gates: Vec<Gate>) -> Result<Circuit> {
        let mut names = HashMap::new();
        for (i, r) in registers.iter().enumerate() {
            if r.id != i {
                return Err(Error::InvalidArgument(format!(
                    "register `{}` has id {} at position {i}",
                    r.name, r.id
                )));
            }
            if names.insert(r.name.as_str(), i).is_some() {
                return Err(Error::DuplicateRegister {
                    line: 0,
                    name: r.name.clone(),
                });
            }
        }

        let mut events = Vec::new();
        let mut leak_free = Vec::new();
        let mut secret_inputs = Vec::new();
        let mut public_inputs = Vec::new();
        for r in &registers {
            match r.role {
                Role::SecretInput => secret_inputs.push(r.id),
                Role::PublicInput => public_inputs.push(r.id),
                _ => continue,
            }
            events.push(WireEvent {
                reg: r.id,
                source: EventSource::Input,
            });
            leak_free.push(false);
        }

        let mut written = vec![false; registers.len()];
        let mut gate_first_event = Vec::with_capacity(gates.len());
        let mut rand_gates = 0;
        for (gi, gate) in gates.iter().enumerate() {
            let ops = gate.kind.operands();
            for (k, &r) in ops.iter().enumerate() {
                if r >= registers.len() {
                    return Err(Error::InvalidOperand { gate: gi, reg: r });
                }
                if ops[..k].contains(&r) {
                    return Err(Error::DuplicateOperand { gate: gi, reg: r });
                }
            }
            if let Some(e) = gate.condition {
                if e >= events.len() {
                    return Err(Error::InvalidCondition { gate: gi, event: e });
                }
            }
            if let Some(w) = gate.kind.written() {
                written[w] = true;
            }
            let is_rand = matches!(gate.kind, GateKind::Rand(_));
            rand_gates += usize::from(is_rand);
            gate_first_event.push(events.len());
            for (port, &r) in ops.iter().enumerate() {
                events.push(WireEvent {
                    reg: r,
                    source: EventSource::Gate { gate: gi, port },
                });
                leak_free.push(is_rand);
            }
        }

        for r in &registers {
            if r.role == Role::Output && !written[r.id] {
                return Err(Error::UnwrittenOutput { name: r.name.clone() });
            }
        }
        let outputs = registers
            .iter()
            .filter(|r| r.output || r.role == Role::Output)
            .map(|r| r.id)
            .collect();

        Ok(Circuit {
            registers,
            gates,
            events,
            gate_first_event,
            leak_free,
            secret_inputs,
            public_inputs,
            outputs,
            rand_gates,
        })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, id: RegId) -> &Register {
        &self.registers[id]
    }

    pub fn register_by_name(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn events(&self) -> &[WireEvent] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// Id of the first output-port event of gate `gate`.
    pub fn gate_first_event(&self, gate: usize) -> EventId {
        self.gate_first_event[gate]
    }

    /// Event ids produced by gate `gate`, one per operand port.
    pub fn gate_events(&self, gate: usize) -> std::ops::Range<EventId> {
        let start = self.gate_first_event[gate];
        start..start + self.gates[gate].kind.operands().len()
    }

    pub fn is_leak_free(&self, event: EventId) -> bool {
        self.leak_free[event]
    }

    /// Events that the leakage model may sample, in id order.
    pub fn leaky_events(&self) -> Vec<EventId> {
        (0..self.events.len()).filter(|&e| !self.leak_free[e]).collect()
    }

    pub fn secret_inputs(&self) -> &[RegId] {
        &self.secret_inputs
    }

    pub fn public_inputs(&self) -> &[RegId] {
        &self.public_inputs
    }

    /// Output registers in register-id order.
    pub fn outputs(&self) -> &[RegId] {
        &self.outputs
    }

    /// Number of RAND gates; an upper bound on tape consumption.
    pub fn rand_gates(&self) -> usize {
        self.rand_gates
    }

    /// The same circuit with every Z and CZ gate removed. Conditions that
    /// pointed at a removed event are redirected to the latest earlier event
    /// on the same register, which carries the same value.
    pub fn without_phase_gates(&self) -> Result<Circuit> {
        let mut remap: Vec<Option<EventId>> = vec![None; self.events.len()];
        let mut last_on_reg: Vec<Option<EventId>> = vec![None; self.registers.len()];
        let mut next = 0;
        for (e, ev) in self.events.iter().enumerate() {
            if ev.source == EventSource::Input {
                remap[e] = Some(next);
                last_on_reg[ev.reg] = Some(next);
                next += 1;
            }
        }
        let mut gates = Vec::new();
        for (gi, gate) in self.gates.iter().enumerate() {
            let range = self.gate_events(gi);
            let condition = match gate.condition {
                Some(c) => Some(remap[c].ok_or_else(|| {
                    Error::UnsupportedGate(format!(
                        "gate {gi} is conditioned on a phase-gate event with no earlier value"
                    ))
                })?),
                None => None,
            };
            if gate.kind.is_phase() {
                for e in range {
                    remap[e] = last_on_reg[self.events[e].reg];
                }
                continue;
            }
            for e in range {
                remap[e] = Some(next);
                last_on_reg[self.events[e].reg] = Some(next);
                next += 1;
            }
            gates.push(Gate {
                kind: gate.kind,
                condition,
            });
        }
        Circuit::from_parts(self.registers.clone(), gates)
    }
}

/// Incremental circuit construction with early validation.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    registers: Vec<Register>,
    names: HashMap<String, RegId>,
    gates: Vec<Gate>,
    next_event: EventId,
    last_event: Vec<Option<EventId>>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_register(&mut self, name: &str, role: Role, init: bool) -> Result<RegId> {
        if self.names.contains_key(name) {
            return Err(Error::DuplicateRegister {
                line: 0,
                name: name.to_string(),
            });
        }
        if role.is_input() && !self.gates.is_empty() {
            return Err(Error::LateInput { name: name.to_string() });
        }
        let id = self.registers.len();
        self.registers.push(Register {
            id,
            name: name.to_string(),
            role,
            init: init && !role.is_input(),
            output: role == Role::Output,
        });
        self.names.insert(name.to_string(), id);
        if role.is_input() {
            self.last_event.push(Some(self.next_event));
            self.next_event += 1;
        } else {
            self.last_event.push(None);
        }
        Ok(id)
    }

    pub fn mark_output(&mut self, reg: RegId) {
        self.registers[reg].output = true;
    }

    pub fn lookup(&self, name: &str) -> Option<RegId> {
        self.names.get(name).copied()
    }

    pub fn register(&self, reg: RegId) -> &Register {
        &self.registers[reg]
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn event_count(&self) -> usize {
        self.next_event
    }

    /// Latest wire event on `reg`, if it has produced one.
    pub fn last_event(&self, reg: RegId) -> Option<EventId> {
        self.last_event[reg]
    }

    /// Appends a gate and returns the id of its first output event.
    pub fn push(&mut self, kind: GateKind) -> Result<EventId> {
        self.push_gate(Gate::new(kind))
    }

    pub fn push_conditioned(&mut self, condition: EventId, kind: GateKind) -> Result<EventId> {
        self.push_gate(Gate::conditioned(kind, condition))
    }

    pub fn push_gate(&mut self, gate: Gate) -> Result<EventId> {
        let gi = self.gates.len();
        let ops = gate.kind.operands();
        for (k, &r) in ops.iter().enumerate() {
            if r >= self.registers.len() {
                return Err(Error::InvalidOperand { gate: gi, reg: r });
            }
            if ops[..k].contains(&r) {
                return Err(Error::DuplicateOperand { gate: gi, reg: r });
            }
        }
        if let Some(e) = gate.condition {
            if e >= self.next_event {
                return Err(Error::InvalidCondition { gate: gi, event: e });
            }
        }
        let first = self.next_event;
        for (port, &r) in ops.iter().enumerate() {
            self.last_event[r] = Some(first + port);
        }
        self.next_event += ops.len();
        self.gates.push(gate);
        Ok(first)
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::from_parts(self.registers, self.gates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toffoli_circuit() -> Circuit {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::SecretInput, false).unwrap();
        let c = b.add_register("b", Role::SecretInput, false).unwrap();
        let t = b.add_register("c", Role::PublicInput, false).unwrap();
        b.push(GateKind::Toffoli(a, c, t)).unwrap();
        b.mark_output(t);
        b.build().unwrap()
    }

    #[test]
    fn events_are_inputs_then_ports() {
        let c = toffoli_circuit();
        assert_eq!(c.event_count(), 6);
        assert_eq!(c.events()[0].source, EventSource::Input);
        assert_eq!(
            c.events()[5],
            WireEvent {
                reg: 2,
                source: EventSource::Gate { gate: 0, port: 2 }
            }
        );
        assert_eq!(c.gate_events(0), 3..6);
        assert_eq!(c.outputs(), &[2]);
    }

    #[test]
    fn rand_events_are_the_only_leak_free_ones() {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::Internal, false).unwrap();
        let o = b.add_register("o", Role::Output, false).unwrap();
        b.push(GateKind::Rand(a)).unwrap();
        b.push(GateKind::Cnot(a, o)).unwrap();
        let c = b.build().unwrap();
        assert!(c.is_leak_free(0));
        assert!(!c.is_leak_free(1));
        assert!(!c.is_leak_free(2));
        assert_eq!(c.leaky_events(), vec![1, 2]);
    }

    #[test]
    fn rejects_duplicate_operands_and_late_inputs() {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::Internal, false).unwrap();
        assert!(matches!(
            b.push(GateKind::Cnot(a, a)),
            Err(Error::DuplicateOperand { .. })
        ));
        b.push(GateKind::Not(a)).unwrap();
        assert!(matches!(
            b.add_register("x", Role::PublicInput, false),
            Err(Error::LateInput { .. })
        ));
    }

    #[test]
    fn condition_must_point_backwards() {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::Internal, false).unwrap();
        assert!(matches!(
            b.push_conditioned(0, GateKind::Not(a)),
            Err(Error::InvalidCondition { .. })
        ));
    }

    #[test]
    fn unwritten_output_is_rejected() {
        let mut b = CircuitBuilder::new();
        b.add_register("o", Role::Output, false).unwrap();
        assert!(matches!(b.build(), Err(Error::UnwrittenOutput { .. })));
    }

    #[test]
    fn stripping_phase_gates_renumbers_events() {
        let mut b = CircuitBuilder::new();
        let a = b.add_register("a", Role::SecretInput, false).unwrap();
        let o = b.add_register("o", Role::Output, false).unwrap();
        b.push(GateKind::Z(a)).unwrap();
        let z_event = b.last_event(a).unwrap();
        b.push_conditioned(z_event, GateKind::Not(o)).unwrap();
        let c = b.build().unwrap();
        let s = c.without_phase_gates().unwrap();
        assert_eq!(s.gates().len(), 1);
        assert_eq!(s.event_count(), 2);
        assert_eq!(s.gates()[0].condition, Some(0));
    }
}
