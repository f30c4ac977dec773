//! Gate emission with gadget bookkeeping.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitBuilder, EventId, GateKind, RegId, Role};
use crate::error::{Error, Result};
use crate::steane::CodeBlock;

pub type BlockId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    EncodePublic,
    Init,
    PrepZero,
    PrepPlus,
    ShorPrep,
    ShorVerify,
    ThetaAncilla,
    Toffoli,
    TransversalNot,
    TransversalCnot,
    Rand,
    Copy,
    ConditionReadout,
    SteaneEc,
    Readout,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::EncodePublic => "encode-public",
            GadgetKind::Init => "init",
            GadgetKind::PrepZero => "prep-zero",
            GadgetKind::PrepPlus => "prep-plus",
            GadgetKind::ShorPrep => "shor-prep",
            GadgetKind::ShorVerify => "shor-verify",
            GadgetKind::ThetaAncilla => "theta-ancilla",
            GadgetKind::Toffoli => "toffoli",
            GadgetKind::TransversalNot => "transversal-not",
            GadgetKind::TransversalCnot => "transversal-cnot",
            GadgetKind::Rand => "rand",
            GadgetKind::Copy => "copy",
            GadgetKind::ConditionReadout => "condition-readout",
            GadgetKind::SteaneEc => "steane-ec",
            GadgetKind::Readout => "readout",
        }
    }
}

/// Physical locations: prepared wires, gates, and measured wires.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationCount {
    pub preparations: usize,
    pub gates: usize,
    pub measurements: usize,
}

impl LocationCount {
    pub fn total(&self) -> usize {
        self.preparations + self.gates + self.measurements
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetRecord {
    pub kind: GadgetKind,
    /// Index of the gate in the circuit being expanded.
    pub source_gate: Option<usize>,
    /// Nesting depth; depth-0 records partition the gate list.
    pub depth: usize,
    pub gates: Range<usize>,
    pub events: Range<EventId>,
    pub locations: LocationCount,
    pub rand_bits: usize,
    /// Blocks that must hold codewords when the span ends.
    pub live_blocks: Vec<BlockId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    SecretInput,
    Data,
    Verification,
    Shor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub label: String,
    pub kind: BlockKind,
    pub block: CodeBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhitelistKind {
    Encoder,
    Decoder,
    ShorPrep,
    ShorVerify,
}

/// Gate range allowed to couple wires of one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhitelistEntry {
    pub kind: WhitelistKind,
    pub gates: Range<usize>,
}

struct Frame {
    kind: GadgetKind,
    source_gate: Option<usize>,
    start_gate: usize,
    start_event: EventId,
    start_rand: usize,
    locations: LocationCount,
}

/// Circuit, blocks, gadget records, whitelist and log of a finished emission.
pub(crate) type Emitted = (
    Circuit,
    Vec<BlockInfo>,
    Vec<GadgetRecord>,
    Vec<WhitelistEntry>,
    Vec<String>,
);

pub(crate) struct Emitter {
    b: CircuitBuilder,
    pub blocks: Vec<BlockInfo>,
    pub gadgets: Vec<GadgetRecord>,
    pub whitelist: Vec<WhitelistEntry>,
    pub log: Vec<String>,
    frames: Vec<Frame>,
    counter: usize,
    rand_emitted: usize,
    max_gates: usize,
}

impl Emitter {
    pub fn new(max_gates: usize) -> Self {
        Emitter {
            b: CircuitBuilder::new(),
            blocks: Vec::new(),
            gadgets: Vec::new(),
            whitelist: Vec::new(),
            log: Vec::new(),
            frames: Vec::new(),
            counter: 0,
            rand_emitted: 0,
            max_gates,
        }
    }

    pub fn gate_count(&self) -> usize {
        self.b.gate_count()
    }

    pub fn begin(&mut self, kind: GadgetKind, source_gate: Option<usize>) {
        self.frames.push(Frame {
            kind,
            source_gate,
            start_gate: self.b.gate_count(),
            start_event: self.b.event_count(),
            start_rand: self.rand_emitted,
            locations: LocationCount::default(),
        });
    }

    pub fn end(&mut self, live_blocks: Vec<BlockId>) {
        let f = self.frames.pop().expect("unbalanced gadget frames");
        self.gadgets.push(GadgetRecord {
            kind: f.kind,
            source_gate: f.source_gate,
            depth: self.frames.len(),
            gates: f.start_gate..self.b.gate_count(),
            events: f.start_event..self.b.event_count(),
            locations: f.locations,
            rand_bits: self.rand_emitted - f.start_rand,
            live_blocks,
        });
    }

    fn tally(&mut self, f: impl Fn(&mut LocationCount)) {
        for frame in &mut self.frames {
            f(&mut frame.locations);
        }
    }

    fn fresh_name(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("%{prefix}{}", self.counter)
    }

    pub fn register(&mut self, name: &str, role: Role) -> Result<RegId> {
        if name.starts_with('%') {
            return Err(Error::InvalidArgument(format!(
                "register name `{name}` uses the reserved `%` prefix"
            )));
        }
        self.b.add_register(name, role, false)
    }

    /// Fresh internal register initialised to 0.
    pub fn fresh(&mut self, prefix: &str) -> Result<RegId> {
        let name = self.fresh_name(prefix);
        self.b.add_register(&name, Role::Internal, false)
    }

    pub fn fresh_output(&mut self, name: &str) -> Result<RegId> {
        let name = if self.b.lookup(name).is_some() {
            format!("{name}.out")
        } else {
            name.to_string()
        };
        self.b.add_register(&name, Role::Output, false)
    }

    pub fn add_block(&mut self, label: String, kind: BlockKind, regs: [RegId; 7]) -> Result<BlockId> {
        let block = CodeBlock::new(regs)?;
        self.blocks.push(BlockInfo { label, kind, block });
        Ok(self.blocks.len() - 1)
    }

    /// Seven fresh zero registers.
    pub fn new_block(&mut self, kind: BlockKind) -> Result<BlockId> {
        let id = self.blocks.len();
        let mut regs = [0; 7];
        for (k, r) in regs.iter_mut().enumerate() {
            let name = format!("%q{id}[{}]", k + 1);
            *r = self.b.add_register(&name, Role::Internal, false)?;
        }
        self.add_block(format!("q{id}"), kind, regs)
    }

    /// Seven secret-input registers named `{name}[1]`..`{name}[7]`.
    pub fn secret_block(&mut self, name: &str) -> Result<BlockId> {
        let mut regs = [0; 7];
        for (k, r) in regs.iter_mut().enumerate() {
            *r = self.register(&format!("{name}[{}]", k + 1), Role::SecretInput)?;
        }
        self.add_block(name.to_string(), BlockKind::SecretInput, regs)
    }

    pub fn block(&self, id: BlockId) -> &CodeBlock {
        &self.blocks[id].block
    }

    pub fn at(&self, id: BlockId, pos: usize) -> RegId {
        self.blocks[id].block.at(pos)
    }

    fn push(&mut self, condition: Option<EventId>, kind: GateKind) -> Result<EventId> {
        if self.b.gate_count() >= self.max_gates {
            return Err(Error::SizeLimit(format!(
                "compiled circuit exceeds {} gates",
                self.max_gates
            )));
        }
        if matches!(kind, GateKind::Rand(_)) {
            self.rand_emitted += 1;
        }
        match condition {
            Some(c) => self.b.push_conditioned(c, kind),
            None => self.b.push(kind),
        }
    }

    /// A gate location.
    pub fn gate(&mut self, kind: GateKind) -> Result<EventId> {
        self.tally(|l| l.gates += 1);
        self.push(None, kind)
    }

    pub fn cgate(&mut self, condition: Option<EventId>, kind: GateKind) -> Result<EventId> {
        self.tally(|l| l.gates += 1);
        self.push(condition, kind)
    }

    /// Records `n` preparation locations (fresh zero registers).
    pub fn prep_zero_wires(&mut self, n: usize) {
        self.tally(|l| l.preparations += n);
    }

    /// `|+⟩` preparation: a fresh zero register overwritten with a random bit.
    pub fn prep_plus_wire(&mut self, r: RegId) -> Result<()> {
        self.tally(|l| l.preparations += 1);
        self.push(None, GateKind::Rand(r)).map(|_| ())
    }

    /// Z-basis measurement: copy into a fresh readout register.
    pub fn measure_z(&mut self, w: RegId) -> Result<RegId> {
        let m = self.fresh("m")?;
        self.tally(|l| l.measurements += 1);
        self.push(None, GateKind::Copy(w, m))?;
        Ok(m)
    }

    /// X-basis measurement: the readout is a fresh random bit and the wire is
    /// re-randomised by a second one.
    pub fn measure_x(&mut self, w: RegId) -> Result<RegId> {
        let m = self.fresh("m")?;
        let s = self.fresh("r")?;
        self.tally(|l| l.measurements += 1);
        self.push(None, GateKind::Rand(m))?;
        self.push(None, GateKind::Rand(s))?;
        self.push(None, GateKind::Cnot(s, w))?;
        Ok(m)
    }

    /// Parity of `block` accumulated into `target` by seven CNOTs, position 1
    /// first. Returns the event carrying the final parity.
    pub fn parity_into(&mut self, block: BlockId, target: RegId) -> Result<EventId> {
        self.tally(|l| l.measurements += 7);
        let mut last = 0;
        for pos in 1..=7 {
            let w = self.at(block, pos);
            last = self.push(None, GateKind::Cnot(w, target))? + 1;
        }
        Ok(last)
    }

    pub fn whitelist_from(&mut self, kind: WhitelistKind, start: usize) {
        self.whitelist.push(WhitelistEntry {
            kind,
            gates: start..self.b.gate_count(),
        });
    }

    pub fn finish(self) -> Result<Emitted> {
        assert!(self.frames.is_empty(), "unclosed gadget frame");
        let mut gadgets = self.gadgets;
        gadgets.sort_by_key(|g| (g.gates.start, g.depth, std::cmp::Reverse(g.gates.end)));
        Ok((self.b.build()?, self.blocks, gadgets, self.whitelist, self.log))
    }

    pub fn mark_output(&mut self, reg: RegId) {
        self.b.mark_output(reg);
    }
}
