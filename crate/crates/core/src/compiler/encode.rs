use serde::Serialize;

use crate::circuit::RandomTape;
use crate::error::{Error, Result};
use crate::steane::{bit_at, encode_codeword};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodedSecret {
    /// Physical secret bits in register order.
    pub bits: Vec<bool>,
    /// Innermost 7-bit blocks in register order.
    pub blocks: Vec<u8>,
    pub tape_consumed: usize,
}

/// Seeds drawn per logical bit: 3 at level 1, 3 + 7·3 at level 2.
pub(crate) fn seeds_per_bit(level: u8) -> usize {
    match level {
        1 => 3,
        _ => 3 + 7 * seeds_per_bit(level - 1),
    }
}

fn seeds(tape: &mut RandomTape) -> Result<[bool; 3]> {
    Ok([tape.next_bit()?, tape.next_bit()?, tape.next_bit()?])
}

/// Encodes `bit` with `level` nested Steane layers; appends the physical
/// bits and innermost blocks.
pub fn encode_codeword_nested(
    bit: bool,
    level: u8,
    tape: &mut RandomTape,
    bits: &mut Vec<bool>,
    blocks: &mut Vec<u8>,
) -> Result<()> {
    let word = encode_codeword(bit, seeds(tape)?);
    if level <= 1 {
        bits.extend((1..=7).map(|p| bit_at(word, p)));
        blocks.push(word);
        return Ok(());
    }
    for p in 1..=7 {
        encode_codeword_nested(bit_at(word, p), level - 1, tape, bits, blocks)?;
    }
    Ok(())
}

/// One uniformly random codeword of parity `y_i` per secret bit, nested
/// `level` times. The outer seeds of a bit come first on the tape.
pub fn encode_secret(y: &[bool], level: u8, tape: &mut RandomTape) -> Result<EncodedSecret> {
    if !(1..=2).contains(&level) {
        return Err(Error::InvalidArgument(format!("encoding level {level}")));
    }
    let start = tape.used();
    let mut bits = Vec::with_capacity(y.len() * 7usize.pow(u32::from(level)));
    let mut blocks = Vec::new();
    for &b in y {
        encode_codeword_nested(b, level, tape, &mut bits, &mut blocks)?;
    }
    Ok(EncodedSecret {
        bits,
        blocks,
        tape_consumed: tape.used() - start,
    })
}
