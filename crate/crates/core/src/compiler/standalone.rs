//! Single gadgets as self-contained circuits, for testing and reporting.

use serde::{Deserialize, Serialize};

use super::emit::{BlockId, BlockKind, Emitter, GadgetRecord, LocationCount};
use super::gadgets::{prep_plus, prep_zero, shor_prep, shor_verify, steane_ec, theta_ancilla, toffoli};
use crate::circuit::{Circuit, Evaluator, RandomTape, Role};
use crate::error::Result;
use crate::steane::{bit_at, CodeBlock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Standalone {
    PrepZero,
    PrepPlus,
    ShorPrep,
    ShorPrepVerify,
    Theta,
    Toffoli,
    SteaneEc,
}

impl Standalone {
    pub const ALL: [Standalone; 7] = [
        Standalone::PrepZero,
        Standalone::PrepPlus,
        Standalone::ShorPrep,
        Standalone::ShorPrepVerify,
        Standalone::Theta,
        Standalone::Toffoli,
        Standalone::SteaneEc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Standalone::PrepZero => "prep-zero",
            Standalone::PrepPlus => "prep-plus",
            Standalone::ShorPrep => "shor-prep",
            Standalone::ShorPrepVerify => "shor-prep-verify",
            Standalone::Theta => "theta",
            Standalone::Toffoli => "toffoli",
            Standalone::SteaneEc => "steane-ec",
        }
    }

    /// Input blocks the gadget consumes.
    pub fn input_blocks(self) -> usize {
        match self {
            Standalone::Toffoli => 3,
            Standalone::SteaneEc => 1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetCircuit {
    pub kind: Standalone,
    pub circuit: Circuit,
    /// Public-input blocks `x0[1..7]`, `x1[..]`, ...
    pub inputs: Vec<CodeBlock>,
    pub outputs: Vec<CodeBlock>,
    /// Records of every gadget emitted, sorted by start then depth.
    pub gadgets: Vec<GadgetRecord>,
    pub locations: LocationCount,
    pub tape_bits: usize,
}

impl GadgetCircuit {
    /// Public input bits for the given input words.
    pub fn public_bits(&self, words: &[u8]) -> Vec<bool> {
        words.iter().flat_map(|&w| (1..=7).map(move |p| bit_at(w, p))).collect()
    }

    /// Runs the gadget on input words and returns the output words.
    pub fn run(&self, inputs: &[u8], tape: &mut RandomTape) -> Result<Vec<u8>> {
        let mut ev = Evaluator::new(&self.circuit);
        ev.run(&[], &self.public_bits(inputs), tape)?;
        Ok(self.output_words(ev.registers()))
    }

    pub fn output_words(&self, registers: &[bool]) -> Vec<u8> {
        self.outputs.iter().map(|b| b.word(registers)).collect()
    }
}

fn input_block(e: &mut Emitter, k: usize) -> Result<BlockId> {
    let mut regs = [0; 7];
    for (p, r) in regs.iter_mut().enumerate() {
        *r = e.register(&format!("x{k}[{}]", p + 1), Role::PublicInput)?;
    }
    e.add_block(format!("x{k}"), BlockKind::Data, regs)
}

pub fn standalone(kind: Standalone) -> Result<GadgetCircuit> {
    let mut e = Emitter::new(usize::MAX);
    let inputs: Vec<BlockId> = (0..kind.input_blocks())
        .map(|k| input_block(&mut e, k))
        .collect::<Result<_>>()?;
    let outputs: Vec<BlockId> = match kind {
        Standalone::PrepZero => vec![prep_zero(&mut e)?],
        Standalone::PrepPlus => vec![prep_plus(&mut e)?],
        Standalone::ShorPrep => vec![shor_prep(&mut e)?],
        Standalone::ShorPrepVerify => {
            let s = shor_prep(&mut e)?;
            shor_verify(&mut e, s)?;
            vec![s]
        }
        Standalone::Theta => theta_ancilla(&mut e)?.to_vec(),
        Standalone::Toffoli => toffoli(&mut e, [inputs[0], inputs[1], inputs[2]], None)?.to_vec(),
        Standalone::SteaneEc => {
            steane_ec(&mut e, inputs[0], None)?;
            vec![inputs[0]]
        }
    };
    for &b in &outputs {
        for r in *e.block(b).regs() {
            e.mark_output(r);
        }
    }
    let input_blocks = inputs.iter().map(|&b| *e.block(b)).collect();
    let output_blocks = outputs.iter().map(|&b| *e.block(b)).collect();
    let (circuit, _, gadgets, ..) = e.finish()?;
    let mut locations = LocationCount::default();
    let mut tape_bits = 0;
    for g in gadgets.iter().filter(|g| g.depth == 0) {
        locations.preparations += g.locations.preparations;
        locations.gates += g.locations.gates;
        locations.measurements += g.locations.measurements;
        tape_bits += g.rand_bits;
    }
    Ok(GadgetCircuit {
        kind,
        circuit,
        inputs: input_blocks,
        outputs: output_blocks,
        gadgets,
        locations,
        tape_bits,
    })
}
