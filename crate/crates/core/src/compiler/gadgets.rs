//! Classical shadows of the Steane-code gadgets.
//!
//! Tape consumption per gadget: prep-zero 3, prep-plus 4, shor-prep 6,
//! shor-verify 12, theta-ancilla 30, toffoli 44, steane-ec 18.

use super::emit::{BlockId, BlockKind, Emitter, GadgetKind, WhitelistKind};
use crate::audit::{SHOR_DECODE_CNOTS, SHOR_PREP_CNOTS, SHOR_X_MEASURED, SHOR_Z_MEASURED};
use crate::circuit::{EventId, GateKind};
use crate::error::Result;

/// Encoder fan-out from the pivots 1, 2, 4; it maps seeds (r1, r2, r3) on
/// those positions to `r1·H1 ⊕ r2·H2 ⊕ r3·H3`.
pub const ENCODER_CNOTS: [(usize, usize); 9] = [(1, 3), (1, 5), (1, 7), (2, 3), (2, 6), (2, 7), (4, 5), (4, 6), (4, 7)];
pub const ENCODER_PIVOTS: [usize; 3] = [1, 2, 4];

pub const RAND_PREP_ZERO: usize = 3;
pub const RAND_PREP_PLUS: usize = 4;
pub const RAND_SHOR_PREP: usize = 6;
pub const RAND_SHOR_VERIFY: usize = 12;
pub const RAND_THETA: usize = 3 * RAND_PREP_PLUS + RAND_SHOR_PREP + RAND_SHOR_VERIFY;
pub const RAND_TOFFOLI: usize = RAND_THETA + 14;
pub const RAND_STEANE_EC: usize = RAND_PREP_PLUS + 14;

/// Fresh block holding a uniformly random even codeword. An ancilla block is
/// encoded from three random pivots, copied transversally onto the data
/// block, decoded again and read out position-wise.
pub(crate) fn prep_zero(e: &mut Emitter) -> Result<BlockId> {
    e.begin(GadgetKind::PrepZero, None);
    let anc = e.new_block(BlockKind::Verification)?;
    let data = e.new_block(BlockKind::Data)?;
    e.prep_zero_wires(14 - ENCODER_PIVOTS.len());
    for p in ENCODER_PIVOTS {
        let r = e.at(anc, p);
        e.prep_plus_wire(r)?;
    }
    let start = e.gate_count();
    for (c, t) in ENCODER_CNOTS {
        e.gate(GateKind::Cnot(e.at(anc, c), e.at(anc, t)))?;
    }
    e.whitelist_from(WhitelistKind::Encoder, start);
    transversal_cnot(e, anc, data, None)?;
    let start = e.gate_count();
    for &(c, t) in ENCODER_CNOTS.iter().rev() {
        e.gate(GateKind::Cnot(e.at(anc, c), e.at(anc, t)))?;
    }
    e.whitelist_from(WhitelistKind::Decoder, start);
    for p in 1..=7 {
        e.measure_z(e.at(anc, p))?;
    }
    e.end(vec![data]);
    Ok(data)
}

/// Fresh block holding a uniformly random codeword; its logical value is
/// the flip bit drawn after the three seeds.
pub(crate) fn prep_plus(e: &mut Emitter) -> Result<BlockId> {
    e.begin(GadgetKind::PrepPlus, None);
    let data = prep_zero(e)?;
    let f = e.fresh("f")?;
    e.prep_plus_wire(f)?;
    for p in 1..=3 {
        e.gate(GateKind::Cnot(f, e.at(data, p)))?;
    }
    e.end(vec![data]);
    Ok(data)
}

/// Uniformly random even-weight word on seven fresh wires.
pub(crate) fn shor_prep(e: &mut Emitter) -> Result<BlockId> {
    e.begin(GadgetKind::ShorPrep, None);
    let s = e.new_block(BlockKind::Shor)?;
    e.prep_zero_wires(1);
    for p in [1, 2, 3, 5, 6, 7] {
        e.prep_plus_wire(e.at(s, p))?;
    }
    let start = e.gate_count();
    for (c, t) in SHOR_PREP_CNOTS {
        e.gate(GateKind::Cnot(e.at(s, c), e.at(s, t)))?;
    }
    e.whitelist_from(WhitelistKind::ShorPrep, start);
    e.end(vec![]);
    Ok(s)
}

pub(crate) fn shor_verify(e: &mut Emitter, s: BlockId) -> Result<()> {
    e.begin(GadgetKind::ShorVerify, None);
    let start = e.gate_count();
    for (c, t) in SHOR_DECODE_CNOTS {
        e.gate(GateKind::Cnot(e.at(s, c), e.at(s, t)))?;
    }
    e.whitelist_from(WhitelistKind::ShorVerify, start);
    for p in SHOR_X_MEASURED {
        e.measure_x(e.at(s, p))?;
    }
    e.measure_z(e.at(s, SHOR_Z_MEASURED))?;
    e.end(vec![]);
    Ok(())
}

pub(crate) fn transversal_cnot(e: &mut Emitter, c: BlockId, t: BlockId, cond: Option<EventId>) -> Result<()> {
    for p in 1..=7 {
        e.cgate(cond, GateKind::Cnot(e.at(c, p), e.at(t, p)))?;
    }
    Ok(())
}

/// Logical X: NOT on positions 1, 2, 3.
pub(crate) fn logical_not(e: &mut Emitter, d: BlockId, cond: Option<EventId>) -> Result<()> {
    for p in 1..=3 {
        e.cgate(cond, GateKind::Not(e.at(d, p)))?;
    }
    Ok(())
}

/// Parity readout of `d` into a fresh register; returns the parity event.
pub(crate) fn parity_readout(e: &mut Emitter, d: BlockId) -> Result<EventId> {
    let m = e.fresh("m")?;
    e.parity_into(d, m)
}

/// Blocks (A1, A2, A3) holding logical (a, b, a·b) for uniform a, b.
pub(crate) fn theta_ancilla(e: &mut Emitter) -> Result<[BlockId; 3]> {
    e.begin(GadgetKind::ThetaAncilla, None);
    let a1 = prep_plus(e)?;
    let a2 = prep_plus(e)?;
    let s = shor_prep(e)?;
    let a3 = prep_plus(e)?;
    transversal_cnot(e, a3, s, None)?;
    for p in 1..=7 {
        e.gate(GateKind::Toffoli(e.at(a1, p), e.at(a2, p), e.at(s, p)))?;
    }
    // parity(S) = c ⊕ a·b since the Shor word is even.
    let m = parity_readout(e, s)?;
    logical_not(e, a3, Some(m))?;
    shor_verify(e, s)?;
    e.end(vec![a1, a2, a3]);
    Ok([a1, a2, a3])
}

/// Teleported Toffoli on data blocks holding (x, y, z). Returns fresh blocks
/// holding (x, y, z ⊕ x·y); the data blocks are consumed.
pub(crate) fn toffoli(e: &mut Emitter, d: [BlockId; 3], source: Option<usize>) -> Result<[BlockId; 3]> {
    e.begin(GadgetKind::Toffoli, source);
    let out = toffoli_body(e, d)?;
    e.end(out.to_vec());
    Ok(out)
}

/// [`toffoli`] without its own gadget frame.
pub(crate) fn toffoli_body(e: &mut Emitter, d: [BlockId; 3]) -> Result<[BlockId; 3]> {
    let [a1, a2, a3] = theta_ancilla(e)?;
    let [d1, d2, d3] = d;
    transversal_cnot(e, a1, d1, None)?;
    transversal_cnot(e, a2, d2, None)?;
    transversal_cnot(e, d3, a3, None)?;
    for p in 1..=7 {
        e.measure_x(e.at(d3, p))?;
    }
    // m2 = y ⊕ b, m1 = x ⊕ a.
    let m2 = parity_readout(e, d2)?;
    logical_not(e, a2, Some(m2))?;
    transversal_cnot(e, a1, a3, Some(m2))?;
    let m1 = parity_readout(e, d1)?;
    logical_not(e, a1, Some(m1))?;
    transversal_cnot(e, a2, a3, Some(m1))?;
    Ok([a1, a2, a3])
}

/// Syndrome extraction only: the data block is never written.
pub(crate) fn steane_ec(e: &mut Emitter, d: BlockId, source: Option<usize>) -> Result<()> {
    e.begin(GadgetKind::SteaneEc, source);
    let anc = prep_plus(e)?;
    transversal_cnot(e, d, anc, None)?;
    for p in 1..=7 {
        e.measure_x(e.at(anc, p))?;
    }
    e.end(vec![d]);
    Ok(())
}
