//! Compilation of logical {NOT, CNOT, TOF} circuits into circuits over
//! Steane-encoded blocks.
//!
//! Each logical register becomes seven physical registers. NOT is a NOT on
//! positions 1..3, CNOT is transversal, and TOF is the teleported Toffoli
//! gadget consuming a Θ ancilla. Steane syndrome extraction optionally
//! follows every logical gate. Secrets are encoded outside the circuit with
//! leak-free randomness ([`encode_secret`]); each logical output is read by a
//! parity cascade into a single output register.

mod emit;
mod encode;
mod expand;
mod gadgets;
mod report;
mod standalone;
mod translate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{evaluate_observed, Circuit, RandomTape, RegId};
use crate::error::{Error, Result};
use crate::steane::{is_codeword, word_string};

pub use emit::{BlockId, BlockInfo, BlockKind, GadgetKind, GadgetRecord, LocationCount, WhitelistEntry, WhitelistKind};
pub use encode::{encode_codeword_nested, encode_secret, EncodedSecret};
pub use gadgets::{
    ENCODER_CNOTS, ENCODER_PIVOTS, RAND_PREP_PLUS, RAND_PREP_ZERO, RAND_SHOR_PREP, RAND_SHOR_VERIFY, RAND_STEANE_EC,
    RAND_THETA, RAND_TOFFOLI,
};
pub use report::{
    circuit_depth, location_report, pairs, GadgetLocations, LocationReport, PrepLocations, SizeReport,
    REFERENCE_LOCATIONS,
};
pub use standalone::{standalone, GadgetCircuit, Standalone};
pub use translate::{translate_primitive, translate_sequence, QuantumOp, Translation};

pub const DEFAULT_MAX_GATES: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub level: u8,
    pub ec: bool,
    pub max_gates: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            level: 1,
            ec: true,
            max_gates: DEFAULT_MAX_GATES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedReg {
    pub name: String,
    pub reg: RegId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRegs {
    pub name: String,
    pub regs: Vec<RegId>,
}

/// Everything about a compiled circuit except the gate list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledMeta {
    pub level: u8,
    pub ec: bool,
    pub logical_gates: usize,
    pub logical_depth: usize,
    /// Physical secret registers per logical secret, in encoding order.
    pub secrets: Vec<NamedRegs>,
    pub publics: Vec<NamedReg>,
    /// Readout register per logical output.
    pub outputs: Vec<NamedReg>,
    pub blocks: Vec<BlockInfo>,
    /// Final block of each register of the expanded circuit (the logical
    /// circuit at level 1, the level-1 circuit at level 2).
    pub block_map: BTreeMap<String, BlockId>,
    pub gadgets: Vec<GadgetRecord>,
    pub whitelist: Vec<WhitelistEntry>,
    pub log: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledCircuit {
    pub circuit: Circuit,
    pub meta: CompiledMeta,
}

impl CompiledCircuit {
    /// Pairs a circuit with metadata read back from JSON, checking that the
    /// two agree.
    pub fn from_parts(circuit: Circuit, meta: CompiledMeta) -> Result<Self> {
        let nregs = circuit.registers().len();
        let bad = |what: String| Err(Error::InvalidArgument(format!("gadget metadata: {what}")));
        let secret_regs: Vec<RegId> = meta.secrets.iter().flat_map(|s| s.regs.iter().copied()).collect();
        if secret_regs != circuit.secret_inputs() {
            return bad("secret registers do not match the circuit".into());
        }
        let public_regs: Vec<RegId> = meta.publics.iter().map(|p| p.reg).collect();
        if public_regs != circuit.public_inputs() {
            return bad("public registers do not match the circuit".into());
        }
        let outputs: Vec<RegId> = meta.outputs.iter().map(|o| o.reg).collect();
        if outputs != circuit.outputs() {
            return bad("output registers do not match the circuit".into());
        }
        let per_secret = 7usize.pow(u32::from(meta.level));
        if meta.level == 0 || meta.secrets.iter().any(|s| s.regs.len() != per_secret) {
            return bad(format!("level {} needs {per_secret} registers per secret", meta.level));
        }
        if meta.blocks.iter().any(|b| b.block.regs().iter().any(|&r| r >= nregs)) {
            return bad("block register out of range".into());
        }
        let ng = circuit.gates().len();
        if meta
            .gadgets
            .iter()
            .any(|g| g.gates.end > ng || g.live_blocks.iter().any(|&b| b >= meta.blocks.len()))
            || meta.whitelist.iter().any(|w| w.gates.end > ng)
        {
            return bad("gate range or block out of range".into());
        }
        Ok(CompiledCircuit { circuit, meta })
    }

    /// Top-level gadget spans in order.
    pub fn top_level(&self) -> impl Iterator<Item = &GadgetRecord> {
        self.meta.gadgets.iter().filter(|g| g.depth == 0)
    }

    /// Physical secret bits for the logical secret `y`, drawing encoding
    /// randomness from `tape`.
    pub fn encode(&self, y: &[bool], tape: &mut RandomTape) -> Result<EncodedSecret> {
        if y.len() != self.meta.secrets.len() {
            return Err(Error::InputLength {
                kind: "secret",
                expected: self.meta.secrets.len(),
                got: y.len(),
            });
        }
        encode_secret(y, self.meta.level, tape)
    }

    /// Tape bits consumed by one encoding of the secret.
    pub fn encoding_bits(&self) -> usize {
        self.meta.secrets.len() * encode::seeds_per_bit(self.meta.level)
    }
}

/// Compiles `logical` at level 1, and again at level 2 if requested.
pub fn compile(logical: &Circuit, options: CompileOptions) -> Result<CompiledCircuit> {
    if !(1..=2).contains(&options.level) {
        return Err(Error::InvalidArgument(format!(
            "level {} (expected 1 or 2)",
            options.level
        )));
    }
    let logical_depth = circuit_depth(logical);
    let level1 = expand::expand(logical, options.ec, true, options.max_gates)?;
    let mut compiled = finish(level1, 1, options.ec, logical.gates().len(), logical_depth)?;
    if options.level == 2 {
        let secrets = compiled.meta.secrets.clone();
        let mut log = compiled.meta.log.clone();
        let level2 = expand::expand(&compiled.circuit, options.ec, false, options.max_gates)?;
        compiled = finish(level2, 2, options.ec, logical.gates().len(), logical_depth)?;
        // Regroup the level-2 secret registers under their logical names.
        let mut grouped = Vec::new();
        let mut it = compiled.meta.secrets.iter();
        for s in &secrets {
            let mut regs = Vec::with_capacity(49);
            for _ in 0..s.regs.len() {
                regs.extend(&it.next().expect("seven level-2 blocks per secret").regs);
            }
            grouped.push(NamedRegs {
                name: s.name.clone(),
                regs,
            });
        }
        compiled.meta.secrets = grouped;
        log.append(&mut compiled.meta.log);
        compiled.meta.log = log;
    }
    Ok(compiled)
}

fn finish(
    x: expand::Expansion,
    level: u8,
    ec: bool,
    logical_gates: usize,
    logical_depth: usize,
) -> Result<CompiledCircuit> {
    let expand::Expansion {
        emitter,
        secrets,
        publics,
        outputs,
        block_map,
    } = x;
    let (circuit, blocks, gadgets, whitelist, log) = emitter.finish()?;
    Ok(CompiledCircuit {
        circuit,
        meta: CompiledMeta {
            level,
            ec,
            logical_gates,
            logical_depth,
            secrets,
            publics,
            outputs,
            blocks,
            block_map,
            gadgets,
            whitelist,
            log,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodewordViolation {
    pub gadget: usize,
    pub kind: GadgetKind,
    pub block: BlockId,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodewordAudit {
    pub runs: usize,
    pub checks: usize,
    pub violations: Vec<CodewordViolation>,
}

/// Runs the circuit and checks, at the end of every gadget span, that each
/// of its live blocks holds a Hamming codeword.
pub fn codeword_audit(
    compiled: &CompiledCircuit,
    secret_bits: &[bool],
    public: &[bool],
    tape: &mut RandomTape,
) -> Result<CodewordAudit> {
    let mut ends: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, g) in compiled.meta.gadgets.iter().enumerate() {
        if !g.gates.is_empty() && !g.live_blocks.is_empty() {
            ends.entry(g.gates.end - 1).or_default().push(i);
        }
    }
    let mut audit = CodewordAudit {
        runs: 1,
        checks: 0,
        violations: Vec::new(),
    };
    evaluate_observed(&compiled.circuit, secret_bits, public, tape, |gi, regs| {
        let Some(list) = ends.get(&gi) else { return };
        for &i in list {
            let g = &compiled.meta.gadgets[i];
            for &b in &g.live_blocks {
                audit.checks += 1;
                let w = compiled.meta.blocks[b].block.word(regs);
                if !is_codeword(w) {
                    audit.violations.push(CodewordViolation {
                        gadget: i,
                        kind: g.kind,
                        block: b,
                        word: word_string(w),
                    });
                }
            }
        }
    })?;
    Ok(audit)
}
