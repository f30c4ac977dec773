//! Structural check that compiled gates couple blocks position-wise.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::RegId;
use crate::compiler::{BlockId, CompiledCircuit, WhitelistKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    /// Two operands in the same block.
    IntraBlock,
    /// Operands in different blocks at different positions.
    CrossPosition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalityFlag {
    pub gate: usize,
    pub mnemonic: &'static str,
    pub kind: FlagKind,
    /// (block, position) of every operand that sits in a block.
    pub operands: Vec<(BlockId, usize)>,
    pub whitelisted: Option<WhitelistKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalityReport {
    pub gates_checked: usize,
    pub multi_operand_gates: usize,
    pub flagged: usize,
    /// Flagged gates inside whitelisted encoder, decoder and Shor networks.
    pub whitelisted: BTreeMap<String, usize>,
    pub violations: Vec<TransversalityFlag>,
    pub pass: bool,
}

fn whitelist_name(k: WhitelistKind) -> &'static str {
    match k {
        WhitelistKind::Encoder => "encoder",
        WhitelistKind::Decoder => "decoder",
        WhitelistKind::ShorPrep => "shor-prep",
        WhitelistKind::ShorVerify => "shor-verify",
    }
}

/// Flags every gate with two or more block operands that are not at one
/// common position of distinct blocks. Parity readouts target a register
/// outside every block and are never flagged.
pub fn transversality_audit(compiled: &CompiledCircuit) -> TransversalityReport {
    let c = &compiled.circuit;
    let mut slot: Vec<Option<(BlockId, usize)>> = vec![None; c.registers().len()];
    for (b, info) in compiled.meta.blocks.iter().enumerate() {
        for (k, &r) in info.block.regs().iter().enumerate() {
            slot[r] = Some((b, k + 1));
        }
    }
    let mut allowed: Vec<Option<WhitelistKind>> = vec![None; c.gates().len()];
    for w in &compiled.meta.whitelist {
        for g in w.gates.clone() {
            allowed[g] = Some(w.kind);
        }
    }

    let mut report = TransversalityReport {
        gates_checked: c.gates().len(),
        multi_operand_gates: 0,
        flagged: 0,
        whitelisted: BTreeMap::new(),
        violations: Vec::new(),
        pass: true,
    };
    for (gi, gate) in c.gates().iter().enumerate() {
        let ops = gate.kind.operands();
        if ops.len() < 2 {
            continue;
        }
        report.multi_operand_gates += 1;
        let placed: Vec<(BlockId, usize)> = ops.iter().filter_map(|&r: &RegId| slot[r]).collect();
        let kind = if placed
            .iter()
            .enumerate()
            .any(|(i, a)| placed[..i].iter().any(|b| a.0 == b.0))
        {
            FlagKind::IntraBlock
        } else if placed.windows(2).any(|w| w[0].1 != w[1].1) {
            FlagKind::CrossPosition
        } else {
            continue;
        };
        report.flagged += 1;
        match allowed[gi] {
            Some(w) => *report.whitelisted.entry(whitelist_name(w).to_string()).or_default() += 1,
            None => report.violations.push(TransversalityFlag {
                gate: gi,
                mnemonic: gate.kind.mnemonic(),
                kind,
                operands: placed,
                whitelisted: None,
            }),
        }
    }
    report.pass = report.violations.is_empty();
    report
}
